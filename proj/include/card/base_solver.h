#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "card/kernel.h"

namespace card {

// Quantifier-free T_I + EUF: Boolean combinations of index literals (see
// index_theory.h) and equalities over elements, reads rd(a, i) treated as
// uninterpreted applications, free functions and predicates. bot != el is
// built in.

struct BaseModel {
  std::map<TermId, std::int64_t> index_values;  // index bases (constants and 0)
  std::vector<Term> literals;                   // theory literals true in the model
  std::vector<Term> euf_literals;               // EUF part including the arrangement

  std::int64_t value(Term index_term) const;
  bool has_value(Term index_term) const;
};

struct BaseResult {
  bool sat = false;
  std::optional<BaseModel> model;
  std::size_t decisions = 0;
};

struct BaseOptions {
  IndexTheoryKind kind = IndexTheoryKind::IDL;
  std::size_t max_decisions = 50'000'000;
};

BaseResult base_check(Term phi, const BaseOptions& opts);
inline BaseResult base_check(Term phi, IndexTheoryKind kind) { return base_check(phi, BaseOptions{kind}); }

// Satisfiability of a conjunction of theory literals (Nelson-Oppen with
// model-based arrangement search).
BaseResult check_cube(std::span<const Term> literals, IndexTheoryKind kind);

// Disjunction of theory-consistent implicant cubes equivalent to phi, or
// nullopt when more than `cap` cubes (or too much search) would be needed.
std::optional<std::vector<std::vector<Term>>> base_cubes(Term phi, IndexTheoryKind kind, std::size_t cap);

// Distinct theory atoms occurring in the formulas.
std::size_t count_theory_atoms(std::span<const Term> formulas);

// Interpolant of a and b over their shared symbols (NotUnsat if a /\ b is sat).
Term base_interpolate(Term a, Term b, IndexTheoryKind kind);

struct BaseVerification {
  bool a_entails = false;
  bool b_refuted = false;
  bool symbols_ok = false;
  bool ok() const { return a_entails && b_refuted && symbols_ok; }
};
BaseVerification verify_base_interpolant(Term a, Term b, Term theta, IndexTheoryKind kind);

// SMT-LIB 2 query with named assertions A and B and a get-interpolant command.
std::string to_smtlib(Term a, Term b, IndexTheoryKind kind);
// Reads a solver response ("unsat" followed by a term) back into the store.
Term parse_smtlib_interpolant(TermStore& store, std::string_view response);

// Runs `command` through /bin/sh, feeds it the query on stdin and re-verifies
// the answer. AdapterFailure on process errors or timeout,
// UnverifiedInterpolant when the answer does not check out.
Term external_interpolate(Term a, Term b, const std::string& command, double timeout_seconds,
                          IndexTheoryKind kind);

}  // namespace card
