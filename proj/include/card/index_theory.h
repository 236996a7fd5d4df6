#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "card/kernel.h"

namespace card {

// Conjunctions of (negated) index atoms: s <= t and s = t where both sides
// are a constant or 0, optionally shifted by an integer offset (IDL only).
// TO is handled as IDL restricted to offset-free terms, so strictness
// becomes a -1 weight.

struct TiResult {
  bool sat = false;
  std::map<TermId, std::int64_t> model;  // value of every base (constant or 0)
  std::vector<std::size_t> core;         // when unsat: indices into the input

  std::int64_t value(Term index_term) const;
};

bool is_ti_literal(Term lit);

TiResult ti_check_conj(std::span<const Term> literals, IndexTheoryKind kind, bool minimize_core = true);

// Interpolant over the index constants shared by a and b (NotUnsat if a /\ b is sat).
Term ti_interpolate_conj(std::span<const Term> a, std::span<const Term> b, IndexTheoryKind kind);

// A smallest-by-deletion list of terms over `params` such that a /\ b forces
// some element of each nonempty side y1, y2 to equal one of them.
std::vector<Term> ti_equality_interpolating_terms(std::span<const Term> a, std::span<const Term> b,
                                                  std::span<const Term> y1, std::span<const Term> y2,
                                                  IndexTheoryKind kind,
                                                  std::optional<std::vector<Term>> params = std::nullopt);

struct MaxEncoding {
  Term m;
  std::vector<Term> literals;  // i <= m, j <= m, (m = i or m = j)
};
MaxEncoding ti_max_encode(TermStore& store, Term i, Term j);

}  // namespace card
