#pragma once

#include <optional>
#include <vector>

#include "card/kernel.h"

namespace card {

// Model-guided interpolation: repeatedly take a model of A that falsifies the
// cubes collected so far, describe it by literals over shared symbols,
// shrink that description to a B-refuting core and add it as a new cube.
class DiagramOracle {
 public:
  virtual ~DiagramOracle() = default;
  // Shared-symbol literals true in some model of A falsifying every blocked
  // cube; nullopt once A implies the disjunction of the cubes.
  virtual std::optional<std::vector<Term>> diagram(const std::vector<std::vector<Term>>& blocked) = 0;
  // True when B together with the cube is unsatisfiable.
  virtual bool refutes(const std::vector<Term>& cube) = 0;
};

struct DiagramOptions {
  IndexTheoryKind kind = IndexTheoryKind::IDL;
  std::size_t max_rounds = 2000;
  std::int64_t weaken_span = 64;  // how far an IDL bound may be relaxed
};

// Disjunction of the collected cubes. NoSeparatingTerm when some model's full
// description is consistent with B; BudgetExceeded after max_rounds.
Term diagram_interpolate(TermStore& store, DiagramOracle& oracle, const DiagramOptions& opts);

// QuickXplain: a subset of `lits` that still refutes, minimal under removal.
std::vector<Term> minimize_refutation(const std::vector<Term>& lits,
                                      const std::function<bool(const std::vector<Term>&)>& refutes);

}  // namespace card
