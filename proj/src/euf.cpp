#include "card/euf.h"

#include <algorithm>
#include <set>

#include "card/diagram.h"

namespace card {

CongruenceClosure::CongruenceClosure(TermStore& store) : s_(store) {
  add(s_.top());
  add(s_.bottom_formula());
  add_diseq(s_.top(), s_.bottom_formula(), -1);
}

int CongruenceClosure::add(Term t) {
  auto it = ids_.find(t.id());
  if (it != ids_.end()) return it->second;
  if (is_app(t))
    for (Term a : t.args()) add(a);
  int n = static_cast<int>(terms_.size());
  terms_.push_back(t);
  ids_.emplace(t.id(), n);
  rep_.push_back(n);
  members_.push_back({n});
  uses_.emplace_back();
  pf_parent_.push_back(-1);
  pf_reason_.emplace_back();
  if (is_app(t)) {
    std::set<int> arg_reps;
    for (Term a : t.args()) arg_reps.insert(rep_[id_of(a)]);
    for (int r : arg_reps) uses_[r].push_back(n);
    auto sig = signature(n);
    auto found = sigs_.find(sig);
    if (found == sigs_.end()) {
      sigs_.emplace(std::move(sig), n);
    } else {
      pending_.emplace_back(n, found->second, Reason{-1, n, found->second});
      process();
    }
  }
  return n;
}

std::vector<std::int64_t> CongruenceClosure::signature(int app) const {
  Term t = terms_[app];
  std::vector<std::int64_t> sig{static_cast<std::int64_t>(t.op()), t.op() == Op::Apply ? t.payload() : -1};
  for (Term a : t.args()) sig.push_back(rep_[id_of(a)]);
  return sig;
}

void CongruenceClosure::merge(Term a, Term b, int reason) {
  int x = add(a);
  int y = add(b);
  pending_.emplace_back(x, y, Reason{reason, -1, -1});
  process();
}

void CongruenceClosure::add_diseq(Term a, Term b, int reason) {
  int x = add(a);
  int y = add(b);
  diseqs_.push_back({x, y, reason});
}

void CongruenceClosure::assert_literal(Term lit, int reason) {
  bool positive = lit.op() != Op::Not;
  Term atom = positive ? lit : lit[0];
  switch (atom.op()) {
    case Op::True:
      if (!positive) add_diseq(s_.top(), s_.top(), reason);
      return;
    case Op::False:
      if (positive) add_diseq(s_.top(), s_.top(), reason);
      return;
    case Op::Eq:
      if (atom[0].sort() == Sort::Bool) break;
      if (positive) merge(atom[0], atom[1], reason);
      else add_diseq(atom[0], atom[1], reason);
      return;
    case Op::Apply:
    case Op::Symbol:
      if (atom.sort() != Sort::Bool) break;
      merge(atom, positive ? s_.top() : s_.bottom_formula(), reason);
      return;
    default:
      break;
  }
  fail(ErrorKind::UnsupportedAtom, "not an EUF literal: " + to_sexpr(lit));
}

void CongruenceClosure::make_root(int n) {
  int prev = -1;
  Reason prev_reason;
  int cur = n;
  while (cur != -1) {
    int next = pf_parent_[cur];
    Reason r = pf_reason_[cur];
    pf_parent_[cur] = prev;
    pf_reason_[cur] = prev_reason;
    prev = cur;
    prev_reason = r;
    cur = next;
  }
}

void CongruenceClosure::process() {
  while (!pending_.empty()) {
    auto [a, b, why] = pending_.back();
    pending_.pop_back();
    int ra = rep_[a], rb = rep_[b];
    if (ra == rb) continue;
    make_root(a);
    pf_parent_[a] = b;
    pf_reason_[a] = why;
    if (members_[ra].size() > members_[rb].size()) std::swap(ra, rb);
    for (int m : members_[ra]) {
      rep_[m] = rb;
      members_[rb].push_back(m);
    }
    members_[ra].clear();
    std::vector<int> moved;
    moved.swap(uses_[ra]);
    for (int app : moved) {
      auto sig = signature(app);
      auto found = sigs_.find(sig);
      if (found == sigs_.end()) {
        sigs_.emplace(std::move(sig), app);
      } else if (rep_[found->second] != rep_[app]) {
        pending_.emplace_back(app, found->second, Reason{-1, app, found->second});
      }
      uses_[rb].push_back(app);
    }
  }
}

bool CongruenceClosure::consistent() {
  for (const Diseq& d : diseqs_)
    if (rep_[d.a] == rep_[d.b]) return false;
  return true;
}

bool CongruenceClosure::equal(Term a, Term b) { return rep_[add(a)] == rep_[add(b)]; }

Term CongruenceClosure::find(Term t) { return terms_[rep_[add(t)]]; }

int CongruenceClosure::common_ancestor(int a, int b) const {
  std::set<int> up;
  for (int x = a; x != -1; x = pf_parent_[x]) up.insert(x);
  for (int y = b; y != -1; y = pf_parent_[y])
    if (up.count(y)) return y;
  return -1;
}

void CongruenceClosure::explain_into(int a, int b, std::vector<int>& out, std::vector<std::pair<int, int>>& todo) {
  int c = common_ancestor(a, b);
  if (c < 0) fail(ErrorKind::InvalidArgument, "explain: terms are not equal");
  for (int start : {a, b}) {
    for (int x = start; x != c; x = pf_parent_[x]) {
      const Reason& r = pf_reason_[x];
      if (r.app_a >= 0) {
        Term ta = terms_[r.app_a], tb = terms_[r.app_b];
        for (std::size_t k = 0; k < ta.arity(); ++k) todo.emplace_back(id_of(ta[k]), id_of(tb[k]));
      } else if (r.lit >= 0) {
        out.push_back(r.lit);
      }
    }
  }
}

std::vector<int> CongruenceClosure::explain(Term a, Term b) {
  std::vector<int> out;
  std::vector<std::pair<int, int>> todo{{add(a), add(b)}};
  std::set<std::pair<int, int>> done;
  while (!todo.empty()) {
    auto p = todo.back();
    todo.pop_back();
    if (p.first == p.second || !done.insert(p).second) continue;
    explain_into(p.first, p.second, out, todo);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> CongruenceClosure::conflict() {
  for (const Diseq& d : diseqs_) {
    if (rep_[d.a] != rep_[d.b]) continue;
    auto out = explain(terms_[d.a], terms_[d.b]);
    if (d.reason >= 0) out.push_back(d.reason);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  return {};
}

bool is_euf_literal(Term lit) {
  Term atom = lit.op() == Op::Not ? lit[0] : lit;
  switch (atom.op()) {
    case Op::Eq: return atom[0].sort() != Sort::Bool;
    case Op::Apply:
    case Op::Symbol: return atom.sort() == Sort::Bool;
    case Op::True:
    case Op::False: return true;
    default: return false;
  }
}

namespace {

bool inconsistent(TermStore& s, std::span<const Term> lits, const std::vector<std::size_t>& keep) {
  CongruenceClosure cc(s);
  for (std::size_t k : keep) cc.assert_literal(lits[k], static_cast<int>(k));
  return !cc.consistent();
}

}  // namespace

EufResult euf_check_conj(std::span<const Term> literals, bool minimize_core) {
  EufResult res;
  if (literals.empty()) {
    res.sat = true;
    return res;
  }
  TermStore& s = literals[0].store();
  CongruenceClosure cc(s);
  for (std::size_t k = 0; k < literals.size(); ++k) cc.assert_literal(literals[k], static_cast<int>(k));
  if (cc.consistent()) {
    res.sat = true;
    return res;
  }
  for (int r : cc.conflict()) res.core.push_back(static_cast<std::size_t>(r));
  if (minimize_core) {
    for (std::size_t pos = 0; pos < res.core.size();) {
      auto trial = res.core;
      trial.erase(trial.begin() + static_cast<long>(pos));
      if (inconsistent(s, literals, trial)) res.core = std::move(trial);
      else ++pos;
    }
  }
  return res;
}

std::vector<std::pair<Term, Term>> euf_entailed_var_equalities(std::span<const Term> literals,
                                                               std::span<const std::pair<Term, Term>> candidates) {
  std::vector<std::pair<Term, Term>> out;
  if (candidates.empty()) return out;
  CongruenceClosure cc(candidates[0].first.store());
  for (std::size_t k = 0; k < literals.size(); ++k) cc.assert_literal(literals[k], static_cast<int>(k));
  bool all = !cc.consistent();
  for (const auto& [x, y] : candidates)
    if (all || cc.equal(x, y)) out.emplace_back(x, y);
  return out;
}

namespace {

class EufOracle : public DiagramOracle {
 public:
  EufOracle(TermStore& s, std::span<const Term> a, std::span<const Term> b)
      : s_(s), a_(a.begin(), a.end()), b_(b.begin(), b.end()) {
    auto sa = symbols_of(a);
    auto sb = symbols_of(b);
    for (SymbolId x : sa)
      if (sb.count(x)) common_.insert(x);
    std::vector<Term> all = a_;
    all.insert(all.end(), b_.begin(), b_.end());
    post_order(all, [&](Term t) {
      if (is_term(t) && is_common(t)) shared_.push_back(t);
    });
  }

  std::optional<std::vector<Term>> diagram(const std::vector<std::vector<Term>>& blocked) override {
    std::vector<Term> decisions;
    return search(blocked, 0, decisions);
  }

  bool refutes(const std::vector<Term>& cube) override {
    CongruenceClosure cc(s_);
    for (Term l : b_) cc.assert_literal(l, 0);
    for (Term l : cube) cc.assert_literal(l, 0);
    return !cc.consistent();
  }

 private:
  static bool is_term(Term t) {
    switch (t.op()) {
      case Op::Not:
      case Op::And:
      case Op::Or:
      case Op::Implies:
      case Op::Le:
      case Op::True:
      case Op::False:
        return false;
      case Op::Eq: return false;
      default: return true;
    }
  }

  bool is_common(Term t) const {
    for (SymbolId x : symbols_of(t))
      if (!common_.count(x)) return false;
    return true;
  }

  std::optional<std::vector<Term>> search(const std::vector<std::vector<Term>>& blocked, std::size_t k,
                                          std::vector<Term>& decisions) {
    CongruenceClosure cc(s_);
    for (Term l : a_) cc.assert_literal(l, 0);
    for (Term l : decisions) cc.assert_literal(l, 0);
    if (!cc.consistent()) return std::nullopt;
    if (k == blocked.size()) return describe(cc);
    for (Term l : blocked[k]) {
      decisions.push_back(s_.neg(l));
      auto r = search(blocked, k + 1, decisions);
      decisions.pop_back();
      if (r) return r;
    }
    return std::nullopt;
  }

  std::vector<Term> describe(CongruenceClosure& cc) {
    for (Term t : shared_) cc.add(t);
    std::unordered_map<TermId, Term> rep_of;  // class representative -> shared name
    for (bool changed = true; changed;) {
      changed = false;
      for (Term t : cc.terms()) {
        Term r = cc.find(t);
        if (rep_of.count(r.id())) continue;
        if (is_common(t)) {
          rep_of.emplace(r.id(), t);
          changed = true;
          continue;
        }
        if (t.op() != Op::Apply && t.op() != Op::Read) continue;
        if (t.op() == Op::Apply && !common_.count(t.symbol())) continue;
        std::vector<Term> args;
        for (Term a : t.args()) {
          auto it = rep_of.find(cc.find(a).id());
          if (it == rep_of.end()) break;
          args.push_back(it->second);
        }
        if (args.size() != t.arity()) continue;
        Term named = s_.rebuild(t, args);
        cc.add(named);
        rep_of.emplace(r.id(), named);
        changed = true;
      }
    }
    std::vector<Term> lits;
    Term tt = cc.find(s_.top()), ff = cc.find(s_.bottom_formula());
    std::vector<Term> reps;
    for (auto& [rid, name] : rep_of) reps.push_back(name);
    std::sort(reps.begin(), reps.end());
    for (Term t : cc.terms()) {
      if (!is_common(t) || t.op() == Op::True || t.op() == Op::False) continue;
      Term r = cc.find(t);
      if (t.sort() == Sort::Bool) {
        if (r == tt) lits.push_back(t);
        else if (r == ff) lits.push_back(s_.neg(t));
        continue;
      }
      Term name = rep_of.at(r.id());
      if (!(name == t)) lits.push_back(s_.eq(t, name));
    }
    for (std::size_t i = 0; i < reps.size(); ++i)
      for (std::size_t j = i + 1; j < reps.size(); ++j)
        if (reps[i].sort() == reps[j].sort() && reps[i].sort() != Sort::Bool)
          lits.push_back(s_.neg(s_.eq(reps[i], reps[j])));
    return lits;
  }

  TermStore& s_;
  std::vector<Term> a_, b_;
  std::set<SymbolId> common_;
  std::vector<Term> shared_;
};

}  // namespace

Term euf_interpolate_conj(std::span<const Term> a, std::span<const Term> b) {
  if (a.empty() && b.empty()) fail(ErrorKind::NotUnsat, "empty conjunction is satisfiable");
  TermStore& s = a.empty() ? b[0].store() : a[0].store();
  std::vector<Term> ab(a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());
  if (euf_check_conj(ab, false).sat) fail(ErrorKind::NotUnsat, "EUF literals are jointly satisfiable");
  if (!euf_check_conj(a, false).sat) return s.bottom_formula();
  if (!euf_check_conj(b, false).sat) return s.top();
  EufOracle oracle(s, a, b);
  return diagram_interpolate(s, oracle, DiagramOptions{});
}

}  // namespace card
