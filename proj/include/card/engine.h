#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>

#include "card/base_solver.h"
#include "card/kernel.h"
#include "card/problem.h"
#include "card/reduction.h"

namespace card {

struct VerifyReport {
  bool a_entails = false;   // A0 /\ not I unsat
  bool b_refuted = false;   // I /\ B0 unsat
  bool symbols_ok = false;  // I only mentions symbols shared by A0 and B0
  bool ok() const { return a_entails && b_refuted && symbols_ok; }
};

struct Verdict {
  bool sat = false;
  std::optional<BaseModel> model;
  std::optional<Term> interpolant;
  std::optional<VerifyReport> report;
};

// Satisfiability of a quantifier-free formula in the store's theory mode.
Verdict check_sat(Term phi);

struct InterpolationOptions {
  std::optional<std::string> external_command;  // base interpolation backend
  double timeout_seconds = 60.0;
  bool verify = true;
};

// A0 and B0 with diff chains completed, reduced to 0-instantiated separated pairs.
struct InterpolationSession {
  Term a0, b0;
  Coloring coloring;
  SeparatedPair a, b;
  std::size_t n_a = 0, n_b = 0, n = 1;
  std::vector<std::pair<Term, Term>> common_pairs;
  std::size_t phi1_atoms = 0;
  Term a2, b2;  // base problem
};

// Checks the interpolation preconditions on the fragment and builds the base problem.
InterpolationSession prepare_interpolation(Term a0, Term b0);

// NotUnsat if A0 /\ B0 is satisfiable, UnsupportedFragment outside plain CARD,
// BaseStillSat if the base problem is satisfiable.
Verdict interpolate(Term a0, Term b0, const InterpolationOptions& opts = {});

VerifyReport verify(Term a0, Term b0, Term theta, const std::set<SymbolId>& extra_common = {});

// Scaling family: m common arrays, m index constants, one write per array.
std::pair<Term, Term> bench_family(TermStore& store, int m);

struct BenchRow {
  int m = 0;
  std::size_t phi1_atoms = 0;
  std::size_t phi2_atoms_after_step2 = 0;
  std::size_t base_atoms = 0;
  double wall_ms = 0;
};
BenchRow bench_row(int m, IndexTheoryKind kind = IndexTheoryKind::IDL);

}  // namespace card
