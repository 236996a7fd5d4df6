#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "card/kernel.h"

namespace card {

// Element values are 0 = bot, 1 = el, 2.. anonymous.
struct ArrayValue {
  std::int64_t len = 0;
  std::map<std::int64_t, int> cells;  // positions 0..len, values != 0
};

// Finite slice of a functional model: indices range over [lo, hi].
struct FunctionalModel {
  std::int64_t lo = -2, hi = 4;
  int elems = 3;
  std::map<SymbolId, std::int64_t> index;
  std::map<SymbolId, int> elem;
  std::map<SymbolId, bool> boolean;
  std::map<SymbolId, ArrayValue> arrays;
  std::map<SymbolId, std::map<std::vector<std::int64_t>, std::int64_t>> tables;

  std::string describe(const TermStore& store) const;
};

// Truth value of a formula; DomainOverflow when an index term leaves the
// window, UnknownSymbol when a name or table entry is unassigned.
bool eval(const FunctionalModel& m, Term phi);

struct OracleConfig {
  std::int64_t lo = -2, hi = 4;
  int elems = 3;
  std::int64_t max_len = 3;
  std::uint64_t budget = 20'000'000;  // search nodes
};

// Window needed for BoundedUnsat to be conclusive: every model can be
// compressed so that index values fit [-need_neg, need_hi], stored lengths
// fit need_len and need_elems element values suffice.
struct AuthorityBound {
  std::int64_t need_hi = 0;
  std::int64_t need_neg = 0;
  std::int64_t need_len = 0;
  int need_elems = 2;
  bool applicable = true;  // false for formulas with quantifiers
  bool covered_by(const OracleConfig& c) const {
    return applicable && c.hi >= need_hi && -c.lo >= need_neg && c.max_len >= need_len && c.elems >= need_elems;
  }
};
AuthorityBound authority_bound(Term phi);

enum class OracleOutcome { Sat, BoundedUnsat };

struct OracleResult {
  OracleOutcome outcome = OracleOutcome::BoundedUnsat;
  bool authoritative = false;
  std::optional<FunctionalModel> witness;
  std::uint64_t nodes = 0;
};

// Exhaustive search for a model inside the window (BudgetExceeded when the
// node budget runs out).
OracleResult enumerate_and_decide(Term phi, const OracleConfig& cfg);

// Uniformly random total assignment of the constant symbols of `phi`.
FunctionalModel random_model(Term phi, const OracleConfig& cfg, std::mt19937& rng);

}  // namespace card
