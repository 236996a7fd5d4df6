#include "card/index_theory.h"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace card {

namespace {

// Constraint to - from <= w.
struct Edge {
  int from;
  int to;
  std::int64_t w;
  int src;
  int color;
};

// x - y != c
struct Diseq {
  int x;
  int y;
  std::int64_t c;
  int src;
  int color;
};

struct System {
  std::vector<Edge> edges;
  std::vector<Diseq> diseqs;
};

class Nodes {
 public:
  explicit Nodes(TermStore& s) { index(s.zero()); }

  int index(Term base) {
    if (base.op() != Op::Zero && !(base.op() == Op::Symbol && base.sort() == Sort::Index))
      fail(ErrorKind::UnsupportedAtom, "not an index base: " + to_sexpr(base));
    auto [it, fresh] = ids_.emplace(base.id(), static_cast<int>(terms_.size()));
    if (fresh) terms_.push_back(base);
    return it->second;
  }
  int size() const { return static_cast<int>(terms_.size()); }
  Term term(int k) const { return terms_[k]; }

 private:
  std::unordered_map<TermId, int> ids_;
  std::vector<Term> terms_;
};

bool is_index_term(Term t) {
  auto [b, k] = split_offset(t);
  return b.op() == Op::Zero || (b.op() == Op::Symbol && b.sort() == Sort::Index);
}

// Adds the constraints of one literal (UnsupportedAtom for anything else).
void linearize(Term lit, int src, int color, IndexTheoryKind kind, Nodes& nodes, System& sys) {
  bool positive = true;
  Term atom = lit;
  if (atom.op() == Op::Not) {
    positive = false;
    atom = atom[0];
  }
  if (atom.op() == Op::True || atom.op() == Op::False) {
    if ((atom.op() == Op::True) != positive) sys.edges.push_back({0, 0, -1, src, color});
    return;
  }
  if ((atom.op() != Op::Le && atom.op() != Op::Eq) || atom[0].sort() != Sort::Index || !is_index_term(atom[0]) ||
      !is_index_term(atom[1]))
    fail(ErrorKind::UnsupportedAtom, "not an index literal: " + to_sexpr(lit));
  auto [sb, a] = split_offset(atom[0]);
  auto [tb, b] = split_offset(atom[1]);
  if (kind == IndexTheoryKind::TO && (a != 0 || b != 0))
    fail(ErrorKind::UnsupportedAtom, "offsets are not part of TO: " + to_sexpr(lit));
  int x = nodes.index(sb);
  int y = nodes.index(tb);
  // x + a (op) y + b
  if (atom.op() == Op::Le) {
    if (positive) sys.edges.push_back({y, x, b - a, src, color});
    else sys.edges.push_back({x, y, a - b - 1, src, color});
  } else if (positive) {
    sys.edges.push_back({y, x, b - a, src, color});
    sys.edges.push_back({x, y, a - b, src, color});
  } else {
    sys.diseqs.push_back({x, y, b - a, src, color});
  }
}

struct BfResult {
  bool sat = true;
  std::vector<std::int64_t> dist;
  std::vector<int> cycle;  // edge indices in path order
};

BfResult bellman_ford(const std::vector<Edge>& edges, int n) {
  BfResult r;
  r.dist.assign(n, 0);
  std::vector<int> pred(n, -1);
  int last = -1;
  for (int round = 0; round < n; ++round) {
    last = -1;
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
      const Edge& ed = edges[e];
      if (r.dist[ed.from] + ed.w < r.dist[ed.to]) {
        r.dist[ed.to] = r.dist[ed.from] + ed.w;
        pred[ed.to] = e;
        last = ed.to;
      }
    }
    if (last < 0) return r;
  }
  r.sat = false;
  int v = last;
  for (int k = 0; k < n; ++k) v = edges[pred[v]].from;
  std::vector<int> cyc;
  int u = v;
  do {
    int e = pred[u];
    cyc.push_back(e);
    u = edges[e].from;
  } while (u != v);
  std::reverse(cyc.begin(), cyc.end());
  r.cycle = std::move(cyc);
  return r;
}

struct Outcome {
  bool sat = false;
  std::vector<std::int64_t> dist;
  std::set<int> core;
};

Outcome solve(const System& sys, int n) {
  BfResult bf = bellman_ford(sys.edges, n);
  Outcome out;
  if (!bf.sat) {
    for (int e : bf.cycle) out.core.insert(sys.edges[e].src);
    return out;
  }
  for (std::size_t k = 0; k < sys.diseqs.size(); ++k) {
    const Diseq& d = sys.diseqs[k];
    if (bf.dist[d.x] - bf.dist[d.y] != d.c) continue;
    System lo = sys, hi = sys;
    lo.diseqs.erase(lo.diseqs.begin() + static_cast<long>(k));
    hi.diseqs.erase(hi.diseqs.begin() + static_cast<long>(k));
    lo.edges.push_back({d.y, d.x, d.c - 1, d.src, d.color});
    hi.edges.push_back({d.x, d.y, -d.c - 1, d.src, d.color});
    Outcome o1 = solve(lo, n);
    if (o1.sat) return o1;
    Outcome o2 = solve(hi, n);
    if (o2.sat) return o2;
    out.core = std::move(o1.core);
    out.core.insert(o2.core.begin(), o2.core.end());
    out.core.insert(d.src);
    return out;
  }
  out.sat = true;
  out.dist = std::move(bf.dist);
  return out;
}

System build(std::span<const Term> lits, IndexTheoryKind kind, Nodes& nodes, int color = 0, int base = 0) {
  System sys;
  for (std::size_t k = 0; k < lits.size(); ++k)
    linearize(lits[k], base + static_cast<int>(k), color, kind, nodes, sys);
  return sys;
}

bool unsat_subset(TermStore& store, std::span<const Term> lits, const std::vector<std::size_t>& keep,
                  IndexTheoryKind kind) {
  std::vector<Term> sub;
  for (std::size_t k : keep) sub.push_back(lits[k]);
  Nodes nodes(store);
  System sys = build(sub, kind, nodes);
  return !solve(sys, nodes.size()).sat;
}

}  // namespace

std::int64_t TiResult::value(Term t) const {
  auto [b, k] = split_offset(t);
  if (b.op() == Op::Zero) return k;
  auto it = model.find(b.id());
  if (it == model.end()) fail(ErrorKind::InvalidArgument, "no value for " + to_sexpr(b));
  return it->second + k;
}

bool is_ti_literal(Term lit) {
  Term atom = lit.op() == Op::Not ? lit[0] : lit;
  if (atom.op() != Op::Le && atom.op() != Op::Eq) return false;
  return atom[0].sort() == Sort::Index && is_index_term(atom[0]) && is_index_term(atom[1]);
}

TiResult ti_check_conj(std::span<const Term> literals, IndexTheoryKind kind, bool minimize_core) {
  TiResult res;
  if (literals.empty()) {
    res.sat = true;
    return res;
  }
  TermStore& store = literals[0].store();
  Nodes nodes(store);
  System sys = build(literals, kind, nodes);
  Outcome o = solve(sys, nodes.size());
  if (o.sat) {
    res.sat = true;
    std::int64_t z = o.dist[0];
    for (int k = 0; k < nodes.size(); ++k) res.model[nodes.term(k).id()] = o.dist[k] - z;
    return res;
  }
  std::vector<std::size_t> core(o.core.begin(), o.core.end());
  if (minimize_core) {
    for (std::size_t pos = 0; pos < core.size();) {
      std::vector<std::size_t> trial = core;
      trial.erase(trial.begin() + static_cast<long>(pos));
      if (unsat_subset(store, literals, trial, kind)) core = std::move(trial);
      else ++pos;
    }
  }
  res.core = std::move(core);
  return res;
}

namespace {

enum : int { kA = 0, kB = 1 };

class Interpolator {
 public:
  Interpolator(TermStore& s, IndexTheoryKind kind, Nodes& nodes) : s_(s), kind_(kind), nodes_(nodes) {}

  Term run(const System& sys) {
    BfResult bf = bellman_ford(sys.edges, nodes_.size());
    if (!bf.sat) return contract(sys, bf.cycle);
    for (std::size_t k = 0; k < sys.diseqs.size(); ++k) {
      const Diseq& d = sys.diseqs[k];
      if (bf.dist[d.x] - bf.dist[d.y] != d.c) continue;
      System lo = sys, hi = sys;
      lo.diseqs.erase(lo.diseqs.begin() + static_cast<long>(k));
      hi.diseqs.erase(hi.diseqs.begin() + static_cast<long>(k));
      lo.edges.push_back({d.y, d.x, d.c - 1, d.src, d.color});
      hi.edges.push_back({d.x, d.y, -d.c - 1, d.src, d.color});
      Term t1 = run(lo);
      Term t2 = run(hi);
      return d.color == kA ? s_.disj({t1, t2}) : s_.conj({t1, t2});
    }
    fail(ErrorKind::NotUnsat, "index constraints are jointly satisfiable");
  }

 private:
  Term node_term(int k) { return nodes_.term(k); }

  // to - from <= w as a formula
  Term summary(int from, int to, std::int64_t w) {
    Term u = node_term(from);
    Term v = node_term(to);
    if (kind_ == IndexTheoryKind::IDL) return s_.le(v, s_.offset(u, w));
    if (w >= 0) return s_.le(v, u);
    return s_.lt(v, u);
  }

  Term contract(const System& sys, const std::vector<int>& cycle) {
    std::size_t n = cycle.size();
    std::size_t first_b = n;
    for (std::size_t k = 0; k < n; ++k)
      if (sys.edges[cycle[k]].color == kB) {
        first_b = k;
        break;
      }
    if (first_b == n) return s_.bottom_formula();
    bool any_a = false;
    for (int e : cycle) any_a |= sys.edges[e].color == kA;
    if (!any_a) return s_.top();
    std::vector<Term> parts;
    std::size_t k = 0;
    while (k < n) {
      const Edge& e = sys.edges[cycle[(first_b + k) % n]];
      if (e.color == kB) {
        ++k;
        continue;
      }
      int from = e.from;
      std::int64_t w = 0;
      int to = e.to;
      while (k < n && sys.edges[cycle[(first_b + k) % n]].color == kA) {
        const Edge& a = sys.edges[cycle[(first_b + k) % n]];
        w += a.w;
        to = a.to;
        ++k;
      }
      parts.push_back(summary(from, to, w));
    }
    return s_.conj(parts);
  }

  TermStore& s_;
  IndexTheoryKind kind_;
  Nodes& nodes_;
};

}  // namespace

Term ti_interpolate_conj(std::span<const Term> a, std::span<const Term> b, IndexTheoryKind kind) {
  if (a.empty() && b.empty()) fail(ErrorKind::NotUnsat, "empty conjunction is satisfiable");
  TermStore& s = a.empty() ? b[0].store() : a[0].store();
  if (!ti_check_conj(a, kind, false).sat) return s.bottom_formula();
  if (!ti_check_conj(b, kind, false).sat) return s.top();
  Nodes nodes(s);
  System sa = build(a, kind, nodes, kA, 0);
  System sb = build(b, kind, nodes, kB, static_cast<int>(a.size()));
  System all = sa;
  all.edges.insert(all.edges.end(), sb.edges.begin(), sb.edges.end());
  all.diseqs.insert(all.diseqs.end(), sb.diseqs.begin(), sb.diseqs.end());
  return Interpolator(s, kind, nodes).run(all);
}

std::vector<Term> ti_equality_interpolating_terms(std::span<const Term> a, std::span<const Term> b,
                                                  std::span<const Term> y1, std::span<const Term> y2,
                                                  IndexTheoryKind kind, std::optional<std::vector<Term>> params) {
  if (a.empty() && b.empty()) fail(ErrorKind::NoTermFound, "no constraints");
  TermStore& s = a.empty() ? b[0].store() : a[0].store();
  std::set<TermId> excluded;
  for (Term y : y1) excluded.insert(y.id());
  for (Term y : y2) excluded.insert(y.id());
  std::vector<Term> bases;
  if (params) {
    bases = *params;
  } else {
    auto sa = symbols_of(a);
    auto sb = symbols_of(b);
    for (SymbolId sym : sa) {
      if (!sb.count(sym) || !s.symbol(sym).is_constant() || s.symbol(sym).range != Sort::Index) continue;
      Term c = s.constant(sym);
      if (!excluded.count(c.id())) bases.push_back(c);
    }
  }
  bases.push_back(s.zero());
  std::int64_t radius = 0;
  if (kind == IndexTheoryKind::IDL) {
    std::int64_t max_const = 0;
    std::vector<Term> all(a.begin(), a.end());
    all.insert(all.end(), b.begin(), b.end());
    post_order(all, [&](Term t) {
      if (t.op() == Op::Offset) max_const = std::max(max_const, t.payload() < 0 ? -t.payload() : t.payload());
    });
    radius = 1 + max_const;
  }
  std::vector<Term> cands;
  std::set<TermId> seen;
  for (Term base : bases) {
    for (std::int64_t step = 0; step <= 2 * radius; ++step) {
      std::int64_t d = step == 0 ? 0 : (step % 2 ? (step + 1) / 2 : -(step / 2));
      Term t = s.offset(base, d);
      if (excluded.count(t.id()) || !seen.insert(t.id()).second) continue;
      cands.push_back(t);
    }
  }
  std::vector<Term> ab(a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());
  auto covers = [&](const std::vector<Term>& v) {
    for (auto side : {y1, y2}) {
      if (side.empty()) continue;
      std::vector<Term> lits = ab;
      for (Term y : side)
        for (Term t : v) lits.push_back(s.neg(s.eq(y, t)));
      if (ti_check_conj(lits, kind, false).sat) return false;
    }
    return true;
  };
  if (!covers(cands)) fail(ErrorKind::NoTermFound, "no equality-interpolating terms among the candidates");
  for (std::size_t pos = 0; pos < cands.size();) {
    std::vector<Term> trial = cands;
    trial.erase(trial.begin() + static_cast<long>(pos));
    if (covers(trial)) cands = std::move(trial);
    else ++pos;
  }
  return cands;
}

MaxEncoding ti_max_encode(TermStore& store, Term i, Term j) {
  MaxEncoding enc;
  enc.m = store.fresh("m", Sort::Index);
  enc.literals = {store.le(i, enc.m), store.le(j, enc.m), store.disj({store.eq(enc.m, i), store.eq(enc.m, j)})};
  return enc;
}

}  // namespace card
