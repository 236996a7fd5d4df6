#include "card/base_solver.h"

#include <algorithm>
#include <functional>
#include <unordered_set>

#include "card/diagram.h"
#include "card/euf.h"
#include "card/index_theory.h"

namespace card {

std::int64_t BaseModel::value(Term t) const {
  auto [b, k] = split_offset(t);
  if (b.op() == Op::Zero) return k;
  auto it = index_values.find(b.id());
  if (it == index_values.end()) fail(ErrorKind::InvalidArgument, "no model value for " + to_sexpr(b));
  return it->second + k;
}

bool BaseModel::has_value(Term t) const {
  auto [b, k] = split_offset(t);
  return b.op() == Op::Zero || index_values.count(b.id()) > 0;
}

namespace {

bool is_ti_term(Term t) {
  auto [b, k] = split_offset(t);
  return b.op() == Op::Zero || (b.op() == Op::Symbol && b.sort() == Sort::Index);
}

// ---------------------------------------------------------------------------
// Conjunctions: Nelson-Oppen between the difference solver and congruence
// closure, with the arrangement of shared index terms found by following the
// difference-logic model and branching only where it is ambiguous.

class CubeChecker {
 public:
  CubeChecker(TermStore& s, std::span<const Term> lits, IndexTheoryKind kind) : s_(s), kind_(kind) {
    bool elems = false;
    for (Term l : lits) {
      if (is_ti_literal(l)) {
        ti_.push_back(l);
      } else if (is_euf_literal(l)) {
        euf_.push_back(l);
      } else {
        fail(ErrorKind::UnsupportedAtom, "not a base literal: " + to_sexpr(l));
      }
      all_.push_back(l);
    }
    std::unordered_set<TermId> seen;
    auto share = [&](Term t) {
      if (t.sort() == Sort::Index && is_ti_term(t) && seen.insert(t.id()).second) shared_.push_back(t);
    };
    post_order(euf_, [&](Term t) {
      if (t.sort() == Sort::Elem) elems = true;
      if (t.op() == Op::Apply || t.op() == Op::Read) {
        for (Term a : t.args()) share(a);
      } else if (t.op() == Op::Eq && t[0].sort() == Sort::Index) {
        share(t[0]);
        share(t[1]);
      }
    });
    for (Term t : shared_) {
      Term b = split_offset(t).first;
      ti_.push_back(s_.le(b, b));
    }
    if (elems) euf_.push_back(s_.neg(s_.eq(s_.bot(), s_.el())));
  }

  std::optional<BaseModel> run() {
    std::vector<std::pair<int, int>> eqs, nes;
    if (!rec(eqs, nes)) return std::nullopt;
    return model_;
  }

 private:
  bool rec(std::vector<std::pair<int, int>>& eqs, std::vector<std::pair<int, int>>& nes) {
    CongruenceClosure cc(s_);
    for (Term l : euf_) cc.assert_literal(l, 0);
    for (auto [i, j] : eqs) cc.merge(shared_[i], shared_[j], 0);
    for (auto [i, j] : nes) cc.add_diseq(shared_[i], shared_[j], 0);
    if (!cc.consistent()) return false;
    std::vector<Term> ti = ti_;
    int n = static_cast<int>(shared_.size());
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (cc.equal(shared_[i], shared_[j])) ti.push_back(s_.eq(shared_[i], shared_[j]));
    for (auto [i, j] : nes) ti.push_back(s_.neg(s_.eq(shared_[i], shared_[j])));
    TiResult r = ti_check_conj(ti, kind_, false);
    if (!r.sat) return false;
    std::vector<std::int64_t> v(n);
    for (int i = 0; i < n; ++i) v[i] = r.value(shared_[i]);
    std::vector<std::pair<int, int>> ambiguous;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (v[i] == v[j] && !cc.equal(shared_[i], shared_[j])) ambiguous.emplace_back(i, j);
    CongruenceClosure merged = cc;
    for (auto [i, j] : ambiguous) merged.merge(shared_[i], shared_[j], 0);
    bool ok = merged.consistent();
    for (int i = 0; ok && i < n; ++i)
      for (int j = i + 1; ok && j < n; ++j)
        if (v[i] != v[j] && merged.equal(shared_[i], shared_[j])) ok = false;
    if (ok) {
      model_.index_values = std::map<TermId, std::int64_t>(r.model.begin(), r.model.end());
      model_.literals = all_;
      model_.euf_literals = euf_;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (v[i] == v[j]) model_.euf_literals.push_back(s_.eq(shared_[i], shared_[j]));
      return true;
    }
    auto pick = ambiguous.front();
    eqs.push_back(pick);
    if (rec(eqs, nes)) return true;
    eqs.pop_back();
    nes.push_back(pick);
    bool res = rec(eqs, nes);
    nes.pop_back();
    return res;
  }

  TermStore& s_;
  IndexTheoryKind kind_;
  std::vector<Term> ti_, euf_, all_;
  std::vector<Term> shared_;
  BaseModel model_;
};

// Small unsatisfiable subset of a theory-inconsistent conjunction: pure
// EUF and pure index conflicts come with explanations, mixed ones are
// shrunk with QuickXplain over the combined check.
std::vector<std::size_t> theory_core(TermStore& s, const std::vector<Term>& lits, IndexTheoryKind kind) {
  std::vector<std::size_t> ti_idx, euf_idx;
  for (std::size_t k = 0; k < lits.size(); ++k) (is_ti_literal(lits[k]) ? ti_idx : euf_idx).push_back(k);
  {
    CongruenceClosure cc(s);
    bool elems = false;
    for (std::size_t k : euf_idx) {
      cc.assert_literal(lits[k], static_cast<int>(k));
      post_order(std::span<const Term>(&lits[k], 1), [&](Term t) { elems |= t.sort() == Sort::Elem; });
    }
    if (elems) cc.add_diseq(s.bot(), s.el(), -1);
    if (!cc.consistent()) {
      std::vector<std::size_t> core;
      for (int r : cc.conflict()) core.push_back(static_cast<std::size_t>(r));
      return core;
    }
  }
  {
    std::vector<Term> ti;
    for (std::size_t k : ti_idx) ti.push_back(lits[k]);
    TiResult r = ti_check_conj(ti, kind, false);
    if (!r.sat) {
      std::vector<std::size_t> core;
      for (std::size_t c : r.core) core.push_back(ti_idx[c]);
      return core;
    }
  }
  auto unsat = [&](const std::vector<std::size_t>& keep) {
    std::vector<Term> sub;
    for (std::size_t k : keep) sub.push_back(lits[k]);
    return !CubeChecker(s, sub, kind).run().has_value();
  };
  std::function<std::vector<std::size_t>(const std::vector<std::size_t>&, const std::vector<std::size_t>&, bool)>
      qx = [&](const std::vector<std::size_t>& background, const std::vector<std::size_t>& cands,
               bool changed) -> std::vector<std::size_t> {
    if (changed && unsat(background)) return {};
    if (cands.size() == 1) return cands;
    std::size_t half = cands.size() / 2;
    std::vector<std::size_t> c1(cands.begin(), cands.begin() + static_cast<long>(half));
    std::vector<std::size_t> c2(cands.begin() + static_cast<long>(half), cands.end());
    std::vector<std::size_t> b1 = background;
    b1.insert(b1.end(), c1.begin(), c1.end());
    std::vector<std::size_t> d2 = qx(b1, c2, !c1.empty());
    std::vector<std::size_t> b2 = background;
    b2.insert(b2.end(), d2.begin(), d2.end());
    std::vector<std::size_t> d1 = qx(b2, c1, !d2.empty());
    d1.insert(d1.end(), d2.begin(), d2.end());
    return d1;
  };
  std::vector<std::size_t> all(lits.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return qx({}, all, false);
}

// ---------------------------------------------------------------------------
// CDCL over the Tseitin encoding. The theory is checked at every propagation
// fixpoint; a theory conflict becomes a learned clause over its core.

class Dpll {
 public:
  Dpll(Term root, const BaseOptions& opts) : s_(root.store()), opts_(opts) {
    true_var_ = new_var(Term());
    add_input_clause({pos(true_var_)});
    add_input_clause({encode(root)});
  }

  BaseResult solve() {
    BaseResult res;
    if (trivially_false_) return res;
    for (int l : units_) {
      if (value(l) == 0) return res;
      if (value(l) < 0) enqueue(l, -1);
    }
    std::size_t checked = SIZE_MAX;
    while (true) {
      int confl = propagate();
      std::vector<int> conflict_clause;
      if (confl >= 0) {
        conflict_clause = clauses_[confl];
      } else if (atoms_assigned_ != checked) {
        if (auto core = theory_conflict()) conflict_clause = std::move(*core);
        else checked = atoms_assigned_;
      }
      if (!conflict_clause.empty() || confl >= 0) {
        checked = SIZE_MAX;
        if (!resolve_conflict(std::move(conflict_clause))) return res;
        continue;
      }
      int v = next_var();
      if (v < 0) {
        res.sat = true;
        res.model = model_;
        res.decisions = decisions_;
        return res;
      }
      if (++decisions_ > opts_.max_decisions) fail(ErrorKind::BudgetExceeded, "base solver decision budget");
      trail_lim_.push_back(trail_.size());
      enqueue(preferred(v), -1);
    }
  }

 private:
  static int pos(int v) { return 2 * v; }
  static int negl(int l) { return l ^ 1; }

  int new_var(Term atom) {
    int v = static_cast<int>(assign_.size());
    assign_.push_back(-1);
    level_.push_back(0);
    reason_.push_back(-1);
    activity_.push_back(atom.null() ? 0.0 : (is_ti_literal(atom) ? 2.0 : 1.0));
    phase_.push_back(-1);
    var_atom_.push_back(atom);
    watches_.emplace_back();
    watches_.emplace_back();
    if (!atom.null()) atom_vars_.push_back(v);
    return v;
  }

  int value(int l) const {
    int a = assign_[l >> 1];
    return a < 0 ? -1 : (a ^ (l & 1));
  }
  int level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(int l, int reason) {
    int v = l >> 1;
    assign_[v] = (l & 1) ? 0 : 1;
    level_[v] = level();
    reason_[v] = reason;
    if (!var_atom_[v].null()) ++atoms_assigned_;
    trail_.push_back(l);
  }

  void cancel_until(int lvl) {
    if (level() <= lvl) return;
    std::size_t to = trail_lim_[static_cast<std::size_t>(lvl)];
    for (std::size_t k = to; k < trail_.size(); ++k) {
      int v = trail_[k] >> 1;
      phase_[v] = assign_[v];
      assign_[v] = -1;
      reason_[v] = -1;
      if (!var_atom_[v].null()) --atoms_assigned_;
    }
    trail_.resize(to);
    trail_lim_.resize(static_cast<std::size_t>(lvl));
    qhead_ = std::min(qhead_, to);
  }

  void add_input_clause(std::vector<int> c) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (std::size_t k = 0; k + 1 < c.size(); ++k)
      if ((c[k] ^ 1) == c[k + 1]) return;
    if (c.empty()) {
      trivially_false_ = true;
      return;
    }
    if (c.size() == 1) {
      units_.push_back(c[0]);
      return;
    }
    attach(std::move(c));
  }

  int attach(std::vector<int> c) {
    int id = static_cast<int>(clauses_.size());
    watches_[c[0]].push_back(id);
    watches_[c[1]].push_back(id);
    clauses_.push_back(std::move(c));
    return id;
  }

  // All literals of `c` are false. Learns a 1UIP clause and backjumps;
  // false when the conflict holds at level 0.
  bool resolve_conflict(std::vector<int> c) {
    int top = 0;
    for (int l : c) top = std::max(top, level_[l >> 1]);
    if (top == 0) return false;
    cancel_until(top);
    std::vector<char> seen(assign_.size(), 0);
    std::vector<int> learnt{-1};
    int counter = 0;
    int p = -1;
    std::size_t idx = trail_.size();
    std::vector<int> reason = std::move(c);
    while (true) {
      for (int q : reason) {
        if (p >= 0 && q == p) continue;
        int v = q >> 1;
        if (seen[v] || level_[v] == 0) continue;
        seen[v] = 1;
        activity_[v] += bump_;
        if (level_[v] == top) ++counter;
        else learnt.push_back(q);
      }
      while (!seen[trail_[--idx] >> 1]) {
      }
      p = trail_[idx];
      seen[p >> 1] = 0;
      if (--counter == 0) break;
      reason = clauses_[reason_[p >> 1]];
    }
    learnt[0] = negl(p);
    bump_ *= 1.05;
    int back = 0;
    std::size_t second = 0;
    for (std::size_t k = 1; k < learnt.size(); ++k)
      if (level_[learnt[k] >> 1] > back) {
        back = level_[learnt[k] >> 1];
        second = k;
      }
    cancel_until(back);
    if (learnt.size() == 1) {
      enqueue(learnt[0], -1);
      return true;
    }
    std::swap(learnt[1], learnt[second]);
    int id = attach(std::move(learnt));
    enqueue(clauses_[id][0], id);
    return true;
  }

  int encode(Term f) {
    auto it = memo_.find(f);
    if (it != memo_.end()) return it->second;
    int lit;
    switch (f.op()) {
      case Op::True: lit = pos(true_var_); break;
      case Op::False: lit = negl(pos(true_var_)); break;
      case Op::Not: lit = negl(encode(f[0])); break;
      case Op::And:
      case Op::Or: {
        bool is_and = f.op() == Op::And;
        std::vector<int> xs;
        for (Term a : f.args()) xs.push_back(encode(a));
        int g = pos(new_var(Term()));
        std::vector<int> big{is_and ? g : negl(g)};
        for (int x : xs) {
          if (is_and) add_input_clause({negl(g), x});
          else add_input_clause({g, negl(x)});
          big.push_back(is_and ? negl(x) : x);
        }
        add_input_clause(big);
        lit = g;
        break;
      }
      case Op::Implies: {
        int a = encode(f[0]), b = encode(f[1]);
        int g = pos(new_var(Term()));
        add_input_clause({negl(g), negl(a), b});
        add_input_clause({g, a});
        add_input_clause({g, negl(b)});
        lit = g;
        break;
      }
      case Op::Eq:
        if (f[0].sort() == Sort::Bool) {
          int a = encode(f[0]), b = encode(f[1]);
          int g = pos(new_var(Term()));
          add_input_clause({negl(g), negl(a), b});
          add_input_clause({negl(g), a, negl(b)});
          add_input_clause({g, a, b});
          add_input_clause({g, negl(a), negl(b)});
          lit = g;
          break;
        }
        [[fallthrough]];
      default:
        if (!f.is_atom() || !(is_ti_literal(f) || is_euf_literal(f)))
          fail(ErrorKind::UnsupportedAtom, "not a base atom: " + to_sexpr(f));
        lit = pos(new_var(f));
        break;
    }
    memo_.emplace(f, lit);
    return lit;
  }

  // Index of a falsified clause, or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      int p = trail_[qhead_++];
      int false_lit = p ^ 1;
      auto& ws = watches_[false_lit];
      std::size_t i = 0, j = 0;
      for (; i < ws.size(); ++i) {
        int c = ws[i];
        auto& cl = clauses_[c];
        if (cl[0] == false_lit) std::swap(cl[0], cl[1]);
        if (value(cl[0]) == 1) {
          ws[j++] = c;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < cl.size(); ++k) {
          if (value(cl[k]) != 0) {
            std::swap(cl[1], cl[k]);
            watches_[cl[1]].push_back(c);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = c;
        if (value(cl[0]) == 0) {
          for (++i; i < ws.size(); ++i) ws[j++] = ws[i];
          ws.resize(j);
          return c;
        }
        enqueue(cl[0], c);
      }
      ws.resize(j);
    }
    return -1;
  }

  // Negated core of the current theory literals when they are inconsistent.
  std::optional<std::vector<int>> theory_conflict() {
    std::vector<Term> lits;
    std::vector<int> trail_lits;
    for (int l : trail_) {
      Term a = var_atom_[l >> 1];
      if (a.null()) continue;
      lits.push_back((l & 1) ? s_.neg(a) : a);
      trail_lits.push_back(l);
    }
    auto m = CubeChecker(s_, lits, opts_.kind).run();
    if (m) {
      model_ = std::move(*m);
      return std::nullopt;
    }
    std::vector<int> clause;
    for (std::size_t k : theory_core(s_, lits, opts_.kind)) clause.push_back(negl(trail_lits[k]));
    if (clause.empty()) fail(ErrorKind::InvalidArgument, "empty theory core");
    return clause;
  }

  int next_var() {
    int best = -1;
    for (int v : atom_vars_)
      if (assign_[v] < 0 && (best < 0 || activity_[v] > activity_[best])) best = v;
    if (best >= 0) return best;
    for (int v = 0; v < static_cast<int>(assign_.size()); ++v)
      if (assign_[v] < 0) return v;
    return -1;
  }

  int preferred(int v) const {
    if (phase_[v] >= 0) return phase_[v] ? pos(v) : negl(pos(v));
    Term a = var_atom_[v];
    return !a.null() && a.op() == Op::Eq ? negl(pos(v)) : pos(v);
  }

  TermStore& s_;
  BaseOptions opts_;
  int true_var_ = 0;
  std::vector<int8_t> assign_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<double> activity_;
  std::vector<int8_t> phase_;
  double bump_ = 1.0;
  std::vector<Term> var_atom_;
  std::vector<int> atom_vars_;
  std::vector<std::vector<int>> watches_;
  std::vector<std::vector<int>> clauses_;
  std::vector<int> units_;
  std::vector<int> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  TermMap<int> memo_;
  std::size_t atoms_assigned_ = 0;
  std::size_t decisions_ = 0;
  bool trivially_false_ = false;
  BaseModel model_;
};

// Three-valued evaluation under a partial assignment of atoms.
int eval3(Term f, const TermMap<int>& val, TermMap<int>& memo) {
  auto it = memo.find(f);
  if (it != memo.end()) return it->second;
  int r = -1;
  switch (f.op()) {
    case Op::True: r = 1; break;
    case Op::False: r = 0; break;
    case Op::Not: {
      int x = eval3(f[0], val, memo);
      r = x < 0 ? -1 : 1 - x;
      break;
    }
    case Op::And:
    case Op::Or: {
      int absorbing = f.op() == Op::And ? 0 : 1;
      bool unknown = false;
      r = 1 - absorbing;
      for (Term a : f.args()) {
        int x = eval3(a, val, memo);
        if (x == absorbing) {
          r = absorbing;
          unknown = false;
          break;
        }
        if (x < 0) unknown = true;
      }
      if (unknown) r = -1;
      break;
    }
    case Op::Implies: {
      int a = eval3(f[0], val, memo), b = eval3(f[1], val, memo);
      if (a == 0 || b == 1) r = 1;
      else if (a == 1 && b == 0) r = 0;
      break;
    }
    case Op::Eq:
      if (f[0].sort() == Sort::Bool) {
        int a = eval3(f[0], val, memo), b = eval3(f[1], val, memo);
        r = (a < 0 || b < 0) ? -1 : (a == b ? 1 : 0);
        break;
      }
      [[fallthrough]];
    default: {
      auto v = val.find(f);
      r = v == val.end() ? -1 : v->second;
    }
  }
  memo.emplace(f, r);
  return r;
}

std::vector<Term> atoms_of(Term phi) {
  std::vector<Term> atoms;
  post_order(std::span<const Term>(&phi, 1), [&](Term t) {
    if (t.sort() == Sort::Bool && t.is_atom() && t.op() != Op::True && t.op() != Op::False) atoms.push_back(t);
  });
  return atoms;
}

}  // namespace

BaseResult base_check(Term phi, const BaseOptions& opts) {
  if (phi.sort() != Sort::Bool) fail(ErrorKind::SortMismatch, "base_check expects a formula");
  return Dpll(phi, opts).solve();
}

BaseResult check_cube(std::span<const Term> literals, IndexTheoryKind kind) {
  BaseResult res;
  if (literals.empty()) {
    res.sat = true;
    res.model = BaseModel{};
    return res;
  }
  auto m = CubeChecker(literals[0].store(), literals, kind).run();
  res.sat = m.has_value();
  res.model = std::move(m);
  return res;
}

std::optional<std::vector<std::vector<Term>>> base_cubes(Term phi, IndexTheoryKind kind, std::size_t cap) {
  TermStore& s = phi.store();
  std::vector<Term> atoms = atoms_of(phi);
  std::vector<std::vector<Term>> cubes;
  std::size_t budget = 64 * (cap + 1);
  TermMap<int> val;
  std::vector<Term> current;
  bool aborted = false;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (aborted) return;
    if (budget-- == 0) {
      aborted = true;
      return;
    }
    TermMap<int> memo;
    int v = eval3(phi, val, memo);
    if (v == 0) return;
    if (!current.empty() && !check_cube(current, kind).sat) return;
    if (v == 1) {
      if (cubes.size() >= cap) {
        aborted = true;
        return;
      }
      cubes.push_back(current);
      return;
    }
    while (k < atoms.size() && val.count(atoms[k])) ++k;
    if (k >= atoms.size()) return;
    Term a = atoms[k];
    for (int polarity : {1, 0}) {
      val[a] = polarity;
      current.push_back(polarity ? a : s.neg(a));
      rec(k + 1);
      current.pop_back();
      val.erase(a);
      if (aborted) return;
    }
  };
  rec(0);
  if (aborted) return std::nullopt;
  return cubes;
}

std::size_t count_theory_atoms(std::span<const Term> formulas) {
  std::unordered_set<TermId> seen;
  post_order(formulas, [&](Term t) {
    if (t.sort() == Sort::Bool && t.is_atom() && t.op() != Op::True && t.op() != Op::False) seen.insert(t.id());
  });
  return seen.size();
}

namespace {

// ---------------------------------------------------------------------------
// Model-guided interpolation for arbitrary Boolean structure.

class BaseOracle : public DiagramOracle {
 public:
  BaseOracle(Term a, Term b, IndexTheoryKind kind) : s_(a.store()), a_(a), b_(b), kind_(kind) {
    auto sa = symbols_of(a);
    auto sb = symbols_of(b);
    for (SymbolId x : sa)
      if (sb.count(x)) common_.insert(x);
    std::int64_t offsets = 0;
    std::set<std::int64_t> seen;
    std::size_t index_consts = 0;
    std::array<Term, 2> ab{a, b};
    post_order(ab, [&](Term t) {
      if (t.op() == Op::Offset && seen.insert(t.payload() < 0 ? -t.payload() : t.payload()).second)
        offsets += t.payload() < 0 ? -t.payload() : t.payload();
      if (t.op() == Op::Symbol && t.sort() == Sort::Index) ++index_consts;
    });
    radius_ = std::min<std::int64_t>(64, 1 + offsets + static_cast<std::int64_t>(index_consts));
    for (SymbolId x : common_) {
      const SymbolInfo& info = s_.symbol(x);
      if (info.is_constant() && info.range == Sort::Index) bases_.push_back(s_.constant(x));
    }
    far_ = 2 * radius_ + static_cast<std::int64_t>(bases_.size()) + 1;
  }

  std::int64_t weaken_span() const { return 2 * far_; }

  std::optional<std::vector<Term>> diagram(const std::vector<std::vector<Term>>& blocked) override {
    std::vector<Term> parts{a_};
    for (const auto& c : blocked) parts.push_back(s_.neg(s_.conj(c)));
    BaseResult r = base_check(s_.conj(parts), kind_);
    if (!r.sat) return std::nullopt;
    return describe(*r.model);
  }

  bool refutes(const std::vector<Term>& cube) override {
    std::vector<Term> parts{b_};
    parts.insert(parts.end(), cube.begin(), cube.end());
    return !base_check(s_.conj(parts), kind_).sat;
  }

 private:
  bool is_common(Term t) const {
    for (SymbolId x : symbols_of(t))
      if (!common_.count(x)) return false;
    return true;
  }

  std::vector<Term> describe(const BaseModel& m) {
    // Minimization keeps earlier literals in preference to later ones, so
    // the order is: coarse order relations, element facts, exact offsets.
    std::vector<Term> lits, exact;
    std::vector<Term> bases{s_.zero()};
    for (Term b : bases_)
      if (m.has_value(b)) bases.push_back(b);
    for (std::size_t i = 0; i < bases.size(); ++i) {
      for (std::size_t j = i + 1; j < bases.size(); ++j) {
        Term u = bases[i], v = bases[j];
        std::int64_t d = m.value(u) - m.value(v);
        if (d == 0) {
          lits.push_back(s_.le(u, v));
          lits.push_back(s_.le(v, u));
        } else if (d < 0) {
          lits.push_back(kind_ == IndexTheoryKind::TO ? s_.lt(u, v) : s_.le(u, s_.pred(v)));
        } else {
          lits.push_back(kind_ == IndexTheoryKind::TO ? s_.lt(v, u) : s_.le(v, s_.pred(u)));
        }
        if (kind_ == IndexTheoryKind::TO || d == 0) continue;
        if (d >= -far_ && d <= far_) {
          exact.push_back(s_.le(u, s_.offset(v, d)));
          exact.push_back(s_.le(v, s_.offset(u, -d)));
        } else if (d > far_) {
          exact.push_back(s_.le(v, s_.offset(u, -(far_ + 1))));
        } else {
          exact.push_back(s_.le(u, s_.offset(v, -(far_ + 1))));
        }
      }
    }
    // Element part: congruence classes of the model, named by shared terms.
    CongruenceClosure cc(s_);
    for (Term l : m.euf_literals) cc.assert_literal(l, 0);
    std::vector<Term> originals = cc.terms();
    std::unordered_set<TermId> original_ids;
    for (Term t : originals) original_ids.insert(t.id());
    for (Term t : originals) {
      if (t.sort() != Sort::Index || !is_ti_term(t) || is_common(t) || !m.has_value(t)) continue;
      std::int64_t p = m.value(t);
      std::optional<Term> best;
      std::int64_t best_d = 0;
      for (Term u : bases) {
        std::int64_t d = p - m.value(u);
        std::int64_t ad = d < 0 ? -d : d;
        if (kind_ == IndexTheoryKind::TO ? d != 0 : ad > radius_) continue;
        if (!best || ad < (best_d < 0 ? -best_d : best_d)) {
          best = u;
          best_d = d;
        }
      }
      if (best) cc.merge(s_.offset(*best, best_d), t, 0);
    }
    std::unordered_map<TermId, Term> name;  // class representative -> shared name
    for (bool changed = true; changed;) {
      changed = false;
      for (Term t : cc.terms()) {
        Term r = cc.find(t);
        if (name.count(r.id())) continue;
        if (is_common(t)) {
          name.emplace(r.id(), t);
          changed = true;
          continue;
        }
        if (t.op() != Op::Apply && t.op() != Op::Read) continue;
        if (t.op() == Op::Apply && !common_.count(t.symbol())) continue;
        std::vector<Term> args;
        for (Term x : t.args()) {
          auto it = name.find(cc.find(x).id());
          if (it == name.end()) break;
          args.push_back(it->second);
        }
        if (args.size() != t.arity()) continue;
        Term named = s_.rebuild(t, args);
        cc.add(named);
        name.emplace(r.id(), named);
        changed = true;
      }
    }
    Term tt = cc.find(s_.top()), ff = cc.find(s_.bottom_formula());
    std::vector<Term> reps;
    std::unordered_set<TermId> rep_ids;
    for (Term t : originals) {
      Term r = cc.find(t);
      if (t.sort() == Sort::Index || t.op() == Op::True || t.op() == Op::False) continue;
      auto it = name.find(r.id());
      if (it == name.end()) continue;
      if (t.sort() == Sort::Bool) {
        if (!is_common(t)) continue;
        if (r == tt) lits.push_back(t);
        else if (r == ff) lits.push_back(s_.neg(t));
        continue;
      }
      if (rep_ids.insert(it->second.id()).second) reps.push_back(it->second);
      if (is_common(t) && !(t == it->second)) lits.push_back(s_.eq(t, it->second));
    }
    std::sort(reps.begin(), reps.end());
    for (std::size_t i = 0; i < reps.size(); ++i)
      for (std::size_t j = i + 1; j < reps.size(); ++j)
        if (reps[i].sort() == reps[j].sort() && !cc.equal(reps[i], reps[j]))
          lits.push_back(s_.neg(s_.eq(reps[i], reps[j])));
    lits.insert(lits.end(), exact.begin(), exact.end());
    return lits;
  }

  TermStore& s_;
  Term a_, b_;
  IndexTheoryKind kind_;
  std::set<SymbolId> common_;
  std::vector<Term> bases_;
  std::int64_t radius_ = 1;
  std::int64_t far_ = 1;
};

Term cube_interpolate(TermStore& s, const std::vector<Term>& alpha, const std::vector<Term>& beta,
                      IndexTheoryKind kind) {
  auto all_ti = [](const std::vector<Term>& c) {
    return std::all_of(c.begin(), c.end(), [](Term l) { return is_ti_literal(l); });
  };
  auto no_ti = [](const std::vector<Term>& c) {
    return std::none_of(c.begin(), c.end(), [](Term l) { return is_ti_literal(l); });
  };
  if (all_ti(alpha) && all_ti(beta)) return ti_interpolate_conj(alpha, beta, kind);
  if (no_ti(alpha) && no_ti(beta)) return euf_interpolate_conj(alpha, beta);
  BaseOracle oracle(s.conj(alpha), s.conj(beta), kind);
  DiagramOptions opts{kind, 2000, oracle.weaken_span()};
  return diagram_interpolate(s, oracle, opts);
}

}  // namespace

Term base_interpolate(Term a, Term b, IndexTheoryKind kind) {
  TermStore& s = a.store();
  if (base_check(s.conj({a, b}), kind).sat) fail(ErrorKind::NotUnsat, "base formulas are jointly satisfiable");
  if (!base_check(a, kind).sat) return s.bottom_formula();
  if (!base_check(b, kind).sat) return s.top();
  constexpr std::size_t kCubeCap = 8;
  auto ca = base_cubes(a, kind, kCubeCap);
  auto cb = ca ? base_cubes(b, kind, kCubeCap) : std::nullopt;
  if (ca && cb) {
    std::vector<Term> disjuncts;
    for (const auto& alpha : *ca) {
      std::vector<Term> conjuncts;
      for (const auto& beta : *cb) conjuncts.push_back(cube_interpolate(s, alpha, beta, kind));
      disjuncts.push_back(s.conj(conjuncts));
    }
    return s.disj(disjuncts);
  }
  BaseOracle oracle(a, b, kind);
  DiagramOptions opts{kind, 2000, oracle.weaken_span()};
  return diagram_interpolate(s, oracle, opts);
}

BaseVerification verify_base_interpolant(Term a, Term b, Term theta, IndexTheoryKind kind) {
  TermStore& s = a.store();
  BaseVerification v;
  v.a_entails = !base_check(s.conj({a, s.neg(theta)}), kind).sat;
  v.b_refuted = !base_check(s.conj({theta, b}), kind).sat;
  auto sa = symbols_of(a);
  auto sb = symbols_of(b);
  v.symbols_ok = true;
  for (SymbolId x : symbols_of(theta))
    if (!sa.count(x) || !sb.count(x)) v.symbols_ok = false;
  return v;
}

}  // namespace card
