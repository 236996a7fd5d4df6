#include "card/diagram.h"

#include <algorithm>

namespace card {

namespace {

using Refutes = std::function<bool(const std::vector<Term>&)>;

std::vector<Term> join(const std::vector<Term>& a, const std::vector<Term>& b) {
  std::vector<Term> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<Term> qx(const std::vector<Term>& background, bool delta, const std::vector<Term>& c,
                     const Refutes& refutes) {
  if (delta && refutes(background)) return {};
  if (c.size() == 1) return c;
  std::size_t half = c.size() / 2;
  std::vector<Term> c1(c.begin(), c.begin() + static_cast<long>(half));
  std::vector<Term> c2(c.begin() + static_cast<long>(half), c.end());
  std::vector<Term> d2 = qx(join(background, c1), !c1.empty(), c2, refutes);
  std::vector<Term> d1 = qx(join(background, d2), !d2.empty(), c1, refutes);
  return join(d1, d2);
}

// x <= y + d, the only bound shape diagrams produce in IDL.
struct Bound {
  Term x, y;
  std::int64_t d;
};

std::optional<Bound> as_bound(Term lit) {
  if (lit.op() != Op::Le) return std::nullopt;
  auto [y, d] = split_offset(lit[1]);
  if (lit[0].op() == Op::Offset) return std::nullopt;
  return Bound{lit[0], y, d};
}

std::vector<Term> weaken(TermStore& s, std::vector<Term> core, const DiagramOptions& opts, const Refutes& refutes) {
  for (std::size_t k = 0; k < core.size(); ++k) {
    Term lit = core[k];
    if (opts.kind == IndexTheoryKind::TO) {
      // x < y is written not (y <= x); try the non-strict x <= y.
      if (lit.op() == Op::Not && lit[0].op() == Op::Le) {
        std::vector<Term> trial = core;
        trial[k] = s.le(lit[0][1], lit[0][0]);
        if (refutes(trial)) core = std::move(trial);
      }
      continue;
    }
    auto b = as_bound(lit);
    if (!b) continue;
    auto with = [&](std::int64_t d) {
      std::vector<Term> trial = core;
      trial[k] = s.le(b->x, s.offset(b->y, d));
      return trial;
    };
    std::int64_t lo = b->d, hi = b->d + opts.weaken_span;
    if (!refutes(with(lo + 1))) continue;
    lo = lo + 1;
    while (lo < hi) {
      std::int64_t mid = lo + (hi - lo + 1) / 2;
      if (refutes(with(mid))) lo = mid;
      else hi = mid - 1;
    }
    core = with(lo);
  }
  return core;
}

}  // namespace

std::vector<Term> minimize_refutation(const std::vector<Term>& lits, const Refutes& refutes) {
  if (lits.empty() || refutes({})) return {};
  return qx({}, false, lits, refutes);
}

Term diagram_interpolate(TermStore& s, DiagramOracle& oracle, const DiagramOptions& opts) {
  std::vector<std::vector<Term>> cubes;
  Refutes refutes = [&](const std::vector<Term>& c) { return oracle.refutes(c); };
  for (std::size_t round = 0;; ++round) {
    if (round >= opts.max_rounds) fail(ErrorKind::BudgetExceeded, "interpolation did not converge");
    auto d = oracle.diagram(cubes);
    if (!d) break;
    if (!oracle.refutes(*d))
      fail(ErrorKind::NoSeparatingTerm, "a model of A agrees with B on every shared candidate term");
    std::vector<Term> core = minimize_refutation(*d, refutes);
    core = weaken(s, std::move(core), opts, refutes);
    cubes.push_back(std::move(core));
  }
  std::vector<Term> disjuncts;
  for (const auto& c : cubes) disjuncts.push_back(s.conj(c));
  return s.disj(disjuncts);
}

}  // namespace card
