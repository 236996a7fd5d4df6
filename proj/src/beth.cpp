#include "card/beth.h"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

#include "card/engine.h"
#include "card/index_theory.h"

namespace card {

namespace {

constexpr std::size_t kMaxCandidates = 200;
constexpr std::size_t kMaxTuples = 20000;

void check_query(const BethQuery& q) {
  if (q.defined.empty()) fail(ErrorKind::InvalidArgument, "nothing to define");
  std::set<SymbolId> x(q.params.begin(), q.params.end());
  for (SymbolId y : q.defined)
    if (x.count(y)) fail(ErrorKind::InvalidArgument, "a name cannot be both parameter and defined");
  std::set<SymbolId> allowed = x;
  allowed.insert(q.defined.begin(), q.defined.end());
  for (SymbolId f : symbols_of(q.delta)) {
    const SymbolInfo& info = q.delta.store().symbol(f);
    if (info.is_constant() && !allowed.count(f))
      fail(ErrorKind::InvalidArgument, "free name '" + info.name + "' is neither parameter nor defined");
  }
}

// delta with y renamed to the copy-th fresh tuple.
class Copies {
 public:
  explicit Copies(const BethQuery& q) : q_(q), s_(q.delta.store()) {}

  const std::vector<Term>& ys(int copy) {
    while (static_cast<int>(copies_.size()) <= copy) {
      std::vector<Term> v;
      for (SymbolId y : q_.defined)
        v.push_back(s_.fresh(s_.symbol(y).name + "_" + std::to_string(copies_.size() + 1), s_.symbol(y).range));
      copies_.push_back(std::move(v));
    }
    return copies_[static_cast<std::size_t>(copy)];
  }

  Term delta(int copy) {
    std::unordered_map<SymbolId, Term> m;
    const auto& v = ys(copy);
    for (std::size_t k = 0; k < q_.defined.size(); ++k) m.emplace(q_.defined[k], v[k]);
    return substitute(q_.delta, m);
  }

 private:
  const BethQuery& q_;
  TermStore& s_;
  std::vector<std::vector<Term>> copies_;
};

// Pairwise disequalities between same-sorted members of two tuples.
void all_distinct(TermStore& s, const std::vector<Term>& u, const std::vector<Term>& v, std::vector<Term>& out) {
  for (Term a : u)
    for (Term b : v)
      if (a.sort() == b.sort()) out.push_back(s.neg(s.eq(a, b)));
}

std::vector<Term> defined_terms(const BethQuery& q) {
  std::vector<Term> ys;
  for (SymbolId y : q.defined) ys.push_back(q.delta.store().constant(y));
  return ys;
}

// Terms over the parameters, by increasing depth.
std::vector<Term> enumerate_terms(const BethQuery& q, const std::set<Sort>& wanted) {
  TermStore& s = q.delta.store();
  std::map<Sort, std::vector<Term>> by_sort;
  std::set<TermId> seen;
  auto add = [&](Term t) {
    if (seen.insert(t.id()).second) by_sort[t.sort()].push_back(t);
  };
  add(s.zero());
  add(s.bot());
  add(s.el());
  for (SymbolId x : q.params) {
    const SymbolInfo& info = s.symbol(x);
    if (info.is_constant()) add(s.constant(x));
  }
  for (int depth = 1; depth <= q.depth_max; ++depth) {
    auto prev = by_sort;
    auto idx = prev[Sort::Index], elem = prev[Sort::Elem], arr = prev[Sort::Array];
    for (Term i : idx)
      if (s.signature().offsets_enabled()) {
        add(s.succ(i));
        add(s.pred(i));
      }
    for (Term a : arr) {
      add(s.len(a));
      for (Term b : arr)
        if (a.id() < b.id()) add(s.diff(a, b));
      for (Term i : idx) add(s.rd(a, i));
    }
    if (s.signature().const_enabled())
      for (Term i : idx) add(s.const_array(i));
    for (Term a : arr)
      for (Term i : idx)
        for (Term e : elem)
          if (e.op() != Op::Bot && seen.size() < 4 * kMaxCandidates) add(s.wr(a, i, e));
  }
  std::vector<Term> out;
  for (Sort so : wanted)
    for (Term t : by_sort[so]) out.push_back(t);
  std::stable_sort(out.begin(), out.end(), [&](Term a, Term b) { return dag_size(a) < dag_size(b); });
  if (out.size() > kMaxCandidates) out.resize(kMaxCandidates);
  return out;
}

bool pure_index_conjunction(Term delta, std::vector<Term>& lits) {
  std::function<bool(Term)> walk = [&](Term f) {
    if (f.op() == Op::And) {
      for (Term a : f.args())
        if (!walk(a)) return false;
      return true;
    }
    if (f.op() == Op::True) return true;
    if (!is_ti_literal(f)) return false;
    lits.push_back(f);
    return true;
  };
  return walk(delta);
}

}  // namespace

BethQuery beth_query(const Problem& p, int n_max, int depth_max) {
  const auto& g = std::get<BethGoal>(p.goal);
  return BethQuery{g.delta, g.params, g.defined, n_max, depth_max};
}

ImplicitResult implicit_define_check(const BethQuery& q) {
  check_query(q);
  TermStore& s = q.delta.store();
  Copies copies(q);
  for (int n = 2; n <= q.n_max; ++n) {
    std::vector<Term> parts;
    for (int i = 0; i < n; ++i) parts.push_back(copies.delta(i));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) all_distinct(s, copies.ys(i), copies.ys(j), parts);
    if (!check_sat(s.conj(parts)).sat) return {true, n};
  }
  return {false, 0};
}

bool validate_explicit(const BethQuery& q, const std::vector<Term>& terms) {
  TermStore& s = q.delta.store();
  std::vector<Term> parts{q.delta};
  all_distinct(s, defined_terms(q), terms, parts);
  return !check_sat(s.conj(parts)).sat;
}

std::vector<Term> explicit_define_extract(const BethQuery& q, int n) {
  check_query(q);
  TermStore& s = q.delta.store();
  std::vector<Term> ys = defined_terms(q);

  // Index-only definitions: equality-interpolating terms cover every model.
  std::vector<Term> lits;
  bool index_ys = std::all_of(ys.begin(), ys.end(), [](Term y) { return y.sort() == Sort::Index; });
  if (index_ys && pure_index_conjunction(q.delta, lits)) {
    std::vector<Term> params;
    for (SymbolId x : q.params)
      if (s.symbol(x).range == Sort::Index && s.symbol(x).is_constant()) params.push_back(s.constant(x));
    try {
      std::vector<Term> none;
      auto t = ti_equality_interpolating_terms(lits, none, ys, none, s.signature().index, params);
      if (validate_explicit(q, t)) return t;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoTermFound) throw;
    }
  }

  // Enumeration of small tuples, smallest first.
  std::set<Sort> sorts;
  for (Term y : ys) sorts.insert(y.sort());
  std::vector<Term> cands = enumerate_terms(q, sorts);
  std::size_t tried = 0;
  int max_size = std::max(1, n - 1);
  std::vector<Term> found;
  std::function<bool(std::size_t, std::vector<Term>&, int)> pick = [&](std::size_t from, std::vector<Term>& cur,
                                                                       int size) -> bool {
    if (static_cast<int>(cur.size()) == size) {
      if (++tried > kMaxTuples) fail(ErrorKind::NoTermFound, "tuple budget exhausted");
      if (validate_explicit(q, cur)) {
        found = cur;
        return true;
      }
      return false;
    }
    for (std::size_t k = from; k < cands.size(); ++k) {
      cur.push_back(cands[k]);
      if (pick(k + 1, cur, size)) return true;
      cur.pop_back();
    }
    return false;
  };
  for (int size = 1; size <= max_size; ++size) {
    std::vector<Term> cur;
    if (pick(0, cur, size)) return found;
  }
  fail(ErrorKind::NoTermFound, "no defining tuple up to depth " + std::to_string(q.depth_max));
}

}  // namespace card
