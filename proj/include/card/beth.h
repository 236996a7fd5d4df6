#pragma once

#include <optional>
#include <vector>

#include "card/kernel.h"
#include "card/problem.h"

namespace card {

struct BethQuery {
  Term delta;
  std::vector<SymbolId> params;   // x
  std::vector<SymbolId> defined;  // y
  int n_max = 6;
  int depth_max = 2;
};

BethQuery beth_query(const Problem& p, int n_max = 6, int depth_max = 2);

struct ImplicitResult {
  bool found = false;
  int n = 0;  // smallest N at which N copies of delta force a collision
};

ImplicitResult implicit_define_check(const BethQuery& q);

// Tuple t(x) with delta(x, y) -> (y meets t). NoTermFound when the bounds are
// exhausted.
std::vector<Term> explicit_define_extract(const BethQuery& q, int n);

// delta /\ (no y equals any t) is unsatisfiable.
bool validate_explicit(const BethQuery& q, const std::vector<Term>& terms);

}  // namespace card
