#include "card/oracle.h"

#include <algorithm>
#include <set>
#include <sstream>

namespace card {

namespace {

struct Slot {
  enum Kind { Index, Elem, Bool, Len, Cell, Table } kind = Index;
  SymbolId sym = 0;
  std::int64_t pos = 0;
  std::vector<std::int64_t> key;
  Sort range = Sort::Index;
};

struct Arr {
  std::int64_t len = 0;
  std::optional<SymbolId> sym;
  bool fill_el = false;
  std::map<std::int64_t, int> over;
};

class Evaluator {
 public:
  Evaluator(const FunctionalModel& m, bool partial) : m_(m), partial_(partial) {}

  std::optional<Slot> need;

  // 1 true, 0 false, -1 unknown.
  int truth(Term f) {
    switch (f.op()) {
      case Op::True: return 1;
      case Op::False: return 0;
      case Op::Symbol: {
        auto it = m_.boolean.find(f.symbol());
        if (it != m_.boolean.end()) return it->second ? 1 : 0;
        want({Slot::Bool, f.symbol(), 0, {}, Sort::Bool});
        return -1;
      }
      case Op::Not: {
        int t = truth(f[0]);
        return t < 0 ? -1 : 1 - t;
      }
      case Op::And:
      case Op::Or: {
        std::vector<Term> xs = f.args();
        return combine(f.op() == Op::And, xs.size(), [&](std::size_t k) { return truth(xs[k]); });
      }
      case Op::Implies:
        return combine(false, 2, [&](std::size_t k) {
          int t = truth(f[k]);
          return k == 0 ? (t < 0 ? -1 : 1 - t) : t;
        });
      case Op::Le: {
        auto a = num(f[0]);
        auto b = a ? num(f[1]) : std::nullopt;
        if (!a || !b) return -1;
        return *a <= *b ? 1 : 0;
      }
      case Op::Eq: {
        Sort s = f[0].sort();
        if (s == Sort::Bool) {
          int a = truth(f[0]);
          int b = a < 0 ? -1 : truth(f[1]);
          if (a < 0 || b < 0) return -1;
          return a == b ? 1 : 0;
        }
        if (s == Sort::Array) return array_eq(f[0], f[1]);
        auto a = num(f[0]);
        auto b = a ? num(f[1]) : std::nullopt;
        if (!a || !b) return -1;
        return *a == *b ? 1 : 0;
      }
      case Op::Apply: {
        auto v = table(f);
        if (!v) return -1;
        return *v ? 1 : 0;
      }
      case Op::Forall: {
        SymbolId x = f.symbol();
        auto saved = env_.find(x) == env_.end() ? std::nullopt : std::optional<std::int64_t>(env_[x]);
        std::size_t n = static_cast<std::size_t>(m_.hi - m_.lo + 1);
        int r = combine(true, n, [&](std::size_t k) {
          env_[x] = m_.lo + static_cast<std::int64_t>(k);
          return truth(f[0]);
        });
        if (saved) env_[x] = *saved;
        else env_.erase(x);
        return r;
      }
      default:
        fail(ErrorKind::UnsupportedAtom, "cannot evaluate " + to_sexpr(f));
    }
  }

 private:
  template <typename Child>
  int combine(bool is_and, std::size_t n, Child child) {
    int absorbing = is_and ? 0 : 1;
    auto before = need;
    std::optional<Slot> first;
    bool unknown = false;
    for (std::size_t k = 0; k < n; ++k) {
      need.reset();
      int t = child(k);
      if (t == absorbing) {
        need = before;
        return absorbing;
      }
      if (t < 0 && !unknown) {
        unknown = true;
        first = need;
      }
    }
    need = before;
    if (!unknown) return 1 - absorbing;
    if (!need) need = first;
    return -1;
  }

  void want(Slot s) {
    if (!partial_) {
      std::string what = s.kind == Slot::Table ? "table entry" : s.kind == Slot::Cell ? "array cell" : "value";
      fail(ErrorKind::UnknownSymbol, "model has no " + what + " for symbol " + std::to_string(s.sym));
    }
    if (!need) need = std::move(s);
  }

  std::int64_t in_window(std::int64_t v) const {
    if (v < m_.lo || v > m_.hi)
      fail(ErrorKind::DomainOverflow, "index value " + std::to_string(v) + " outside [" + std::to_string(m_.lo) +
                                          ", " + std::to_string(m_.hi) + "]");
    return v;
  }

  std::optional<std::int64_t> num(Term t) {
    switch (t.op()) {
      case Op::Zero:
      case Op::Bot: return 0;
      case Op::El: return 1;
      case Op::Symbol: {
        SymbolId x = t.symbol();
        if (t.sort() == Sort::Index) {
          auto e = env_.find(x);
          if (e != env_.end()) return e->second;
          auto it = m_.index.find(x);
          if (it != m_.index.end()) return it->second;
          want({Slot::Index, x, 0, {}, Sort::Index});
          return std::nullopt;
        }
        auto it = m_.elem.find(x);
        if (it != m_.elem.end()) return it->second;
        want({Slot::Elem, x, 0, {}, Sort::Elem});
        return std::nullopt;
      }
      case Op::Offset: {
        auto v = num(t[0]);
        if (!v) return std::nullopt;
        return in_window(*v + t.payload());
      }
      case Op::Max: {
        auto a = num(t[0]);
        auto b = a ? num(t[1]) : std::nullopt;
        if (!a || !b) return std::nullopt;
        return std::max(*a, *b);
      }
      case Op::Read: {
        auto a = arr(t[0]);
        auto i = a ? num(t[1]) : std::nullopt;
        if (!a || !i) return std::nullopt;
        auto c = cell(*a, *i);
        if (!c) return std::nullopt;
        return *c;
      }
      case Op::Len: {
        auto a = arr(t[0]);
        if (!a) return std::nullopt;
        return a->len;
      }
      case Op::Diff: {
        auto a = arr(t[0]);
        auto b = a ? arr(t[1]) : std::nullopt;
        if (!a || !b) return std::nullopt;
        if (a->len != b->len) return std::max(a->len, b->len);
        for (std::int64_t p = a->len; p >= 0; --p) {
          auto x = cell(*a, p);
          auto y = x ? cell(*b, p) : std::nullopt;
          if (!x || !y) return std::nullopt;
          if (*x != *y) return p;
        }
        return 0;
      }
      case Op::Apply:
        return table(t);
      default:
        fail(ErrorKind::UnsupportedAtom, "cannot evaluate " + to_sexpr(t));
    }
  }

  std::optional<Arr> arr(Term t) {
    switch (t.op()) {
      case Op::Symbol: {
        auto it = m_.arrays.find(t.symbol());
        if (it == m_.arrays.end()) {
          want({Slot::Len, t.symbol(), 0, {}, Sort::Index});
          return std::nullopt;
        }
        Arr a;
        a.len = it->second.len;
        a.sym = t.symbol();
        return a;
      }
      case Op::Write: {
        auto a = arr(t[0]);
        auto i = a ? num(t[1]) : std::nullopt;
        auto e = i ? num(t[2]) : std::nullopt;
        if (!a || !i || !e) return std::nullopt;
        if (*e != 0 && *i >= 0 && *i <= a->len) a->over[*i] = static_cast<int>(*e);
        return a;
      }
      case Op::ConstArray: {
        auto i = num(t[0]);
        if (!i) return std::nullopt;
        Arr a;
        a.len = std::max<std::int64_t>(*i, 0);
        a.fill_el = true;
        return a;
      }
      default:
        fail(ErrorKind::UnsupportedAtom, "cannot evaluate array term " + to_sexpr(t));
    }
  }

  std::optional<int> cell(const Arr& a, std::int64_t p) {
    if (p < 0 || p > a.len) return 0;
    auto o = a.over.find(p);
    if (o != a.over.end()) return o->second;
    if (a.fill_el) return 1;
    const ArrayValue& v = m_.arrays.at(*a.sym);
    auto c = v.cells.find(p);
    if (c != v.cells.end()) return c->second;
    want({Slot::Cell, *a.sym, p, {}, Sort::Elem});
    return std::nullopt;
  }

  int array_eq(Term s, Term t) {
    auto a = arr(s);
    auto b = a ? arr(t) : std::nullopt;
    if (!a || !b) return -1;
    if (a->len != b->len) return 0;
    auto before = need;
    std::optional<Slot> first;
    bool unknown = false;
    for (std::int64_t p = 0; p <= a->len; ++p) {
      need.reset();
      auto x = cell(*a, p);
      auto y = cell(*b, p);
      if (x && y && *x != *y) {
        need = before;
        return 0;
      }
      if ((!x || !y) && !unknown) {
        unknown = true;
        first = need;
      }
    }
    need = before;
    if (!unknown) return 1;
    if (!need) need = first;
    return -1;
  }

  std::optional<std::int64_t> table(Term t) {
    std::vector<std::int64_t> key;
    for (Term a : t.args()) {
      switch (a.sort()) {
        case Sort::Index:
        case Sort::Elem: {
          auto v = num(a);
          if (!v) return std::nullopt;
          key.push_back(*v);
          break;
        }
        case Sort::Bool: {
          int v = truth(a);
          if (v < 0) return std::nullopt;
          key.push_back(v);
          break;
        }
        case Sort::Array: {
          auto x = arr(a);
          if (!x) return std::nullopt;
          key.push_back(x->len);
          for (std::int64_t p = 0; p <= x->len; ++p) {
            auto c = cell(*x, p);
            if (!c) return std::nullopt;
            key.push_back(*c);
          }
          key.push_back(-1);
          break;
        }
      }
    }
    SymbolId f = t.symbol();
    if (t.sort() == Sort::Array) fail(ErrorKind::UnsupportedAtom, "array-valued functions are not enumerated");
    auto it = m_.tables.find(f);
    if (it != m_.tables.end()) {
      auto e = it->second.find(key);
      if (e != it->second.end()) return e->second;
    }
    want({Slot::Table, f, 0, key, t.sort()});
    return std::nullopt;
  }

  const FunctionalModel& m_;
  bool partial_;
  std::map<SymbolId, std::int64_t> env_;
};

class Search {
 public:
  Search(Term phi, const OracleConfig& cfg) : phi_(phi), cfg_(cfg) {
    m_.lo = cfg.lo;
    m_.hi = cfg.hi;
    m_.elems = cfg.elems;
  }

  bool run() { return rec(); }
  const FunctionalModel& model() const { return m_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  bool rec() {
    if (++nodes_ > cfg_.budget) fail(ErrorKind::BudgetExceeded, "oracle node budget exhausted");
    Evaluator ev(m_, true);
    int t;
    try {
      t = ev.truth(phi_);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DomainOverflow) return false;
      throw;
    }
    if (t == 1) return true;
    if (t == 0) return false;
    Slot s = *ev.need;
    for (std::int64_t v : domain(s)) {
      int saved_anon = max_anon_;
      if (elem_like(s) && v > max_anon_) max_anon_ = static_cast<int>(v);
      assign(s, v);
      if (rec()) return true;
      unassign(s);
      max_anon_ = saved_anon;
    }
    return false;
  }

  bool elem_like(const Slot& s) const {
    return s.kind == Slot::Elem || s.kind == Slot::Cell || (s.kind == Slot::Table && s.range == Sort::Elem);
  }

  std::vector<std::int64_t> domain(const Slot& s) const {
    std::vector<std::int64_t> out;
    auto elems = [&](int first) {
      int top = std::min(cfg_.elems - 1, max_anon_ + 1);
      for (int v = first; v <= top; ++v) out.push_back(v);
    };
    switch (s.kind) {
      case Slot::Index:
        for (std::int64_t v = cfg_.lo; v <= cfg_.hi; ++v) out.push_back(v);
        break;
      case Slot::Len:
        for (std::int64_t v = 0; v <= std::min(cfg_.max_len, cfg_.hi); ++v) out.push_back(v);
        break;
      case Slot::Bool:
        out = {0, 1};
        break;
      case Slot::Elem:
        elems(0);
        break;
      case Slot::Cell:
        elems(1);
        break;
      case Slot::Table:
        if (s.range == Sort::Bool) out = {0, 1};
        else if (s.range == Sort::Elem) elems(0);
        else
          for (std::int64_t v = cfg_.lo; v <= cfg_.hi; ++v) out.push_back(v);
        break;
    }
    return out;
  }

  void assign(const Slot& s, std::int64_t v) {
    switch (s.kind) {
      case Slot::Index: m_.index[s.sym] = v; break;
      case Slot::Elem: m_.elem[s.sym] = static_cast<int>(v); break;
      case Slot::Bool: m_.boolean[s.sym] = v != 0; break;
      case Slot::Len: m_.arrays[s.sym].len = v; break;
      case Slot::Cell: m_.arrays[s.sym].cells[s.pos] = static_cast<int>(v); break;
      case Slot::Table: m_.tables[s.sym][s.key] = v; break;
    }
  }

  void unassign(const Slot& s) {
    switch (s.kind) {
      case Slot::Index: m_.index.erase(s.sym); break;
      case Slot::Elem: m_.elem.erase(s.sym); break;
      case Slot::Bool: m_.boolean.erase(s.sym); break;
      case Slot::Len: m_.arrays.erase(s.sym); break;
      case Slot::Cell: m_.arrays[s.sym].cells.erase(s.pos); break;
      case Slot::Table: m_.tables[s.sym].erase(s.key); break;
    }
  }

  Term phi_;
  OracleConfig cfg_;
  FunctionalModel m_;
  int max_anon_ = 1;
  std::uint64_t nodes_ = 0;
};

// Root of a write chain: arrays built by writes share the length of their base.
std::optional<TermId> length_root(Term a) {
  while (a.op() == Op::Write) a = a[0];
  if (a.op() == Op::ConstArray) return std::nullopt;
  return a.id();
}

}  // namespace

bool eval(const FunctionalModel& m, Term phi) {
  Evaluator ev(m, false);
  return ev.truth(phi) == 1;
}

std::string FunctionalModel::describe(const TermStore& s) const {
  std::ostringstream os;
  auto elem_name = [](int v) {
    return v == 0 ? std::string("bot") : v == 1 ? std::string("el") : "e" + std::to_string(v);
  };
  for (const auto& [x, v] : index) os << s.symbol(x).name << " = " << v << "\n";
  for (const auto& [x, v] : elem) os << s.symbol(x).name << " = " << elem_name(v) << "\n";
  for (const auto& [x, v] : boolean) os << s.symbol(x).name << " = " << (v ? "true" : "false") << "\n";
  for (const auto& [x, a] : arrays) {
    os << s.symbol(x).name << " = [";
    for (std::int64_t p = 0; p <= a.len; ++p) {
      auto c = a.cells.find(p);
      os << (p ? " " : "") << (c == a.cells.end() ? std::string("?") : elem_name(c->second));
    }
    os << "]\n";
  }
  for (const auto& [f, tab] : tables)
    for (const auto& [key, v] : tab) {
      os << s.symbol(f).name << "(";
      for (std::size_t k = 0; k < key.size(); ++k) os << (k ? " " : "") << key[k];
      os << ") = " << v << "\n";
    }
  return os.str();
}

AuthorityBound authority_bound(Term phi) {
  AuthorityBound b;
  std::int64_t max_off = 0;
  std::size_t names = 0, apps = 0, diffs = 0, elems = 0;
  std::set<TermId> roots;
  std::set<std::pair<TermId, TermId>> pairs;
  auto pair_of = [&](Term x, Term y) {
    if (x == y) return;
    pairs.insert({std::min(x.id(), y.id()), std::max(x.id(), y.id())});
  };
  post_order(std::span<const Term>(&phi, 1), [&](Term t) {
    switch (t.op()) {
      case Op::Forall: b.applicable = false; break;
      case Op::Offset: max_off = std::max(max_off, t.payload() < 0 ? -t.payload() : t.payload()); break;
      case Op::Symbol:
        if (t.sort() == Sort::Index) ++names;
        break;
      case Op::Diff: ++diffs; pair_of(t[0], t[1]); break;
      case Op::Eq:
        if (t[0].sort() == Sort::Array) pair_of(t[0], t[1]);
        break;
      case Op::Apply:
        if (t.sort() == Sort::Index) ++apps;
        break;
      default: break;
    }
    if (t.sort() == Sort::Array)
      if (auto r = length_root(t)) roots.insert(*r);
    if (t.sort() == Sort::Elem && t.op() != Op::Bot && t.op() != Op::El) ++elems;
  });
  // Arrays that reach free symbols must keep their mutual differences.
  std::vector<Term> under_apply;
  std::set<TermId> seen;
  post_order(std::span<const Term>(&phi, 1), [&](Term t) {
    if (t.op() != Op::Apply) return;
    for (Term a : t.args())
      if (a.sort() == Sort::Array && seen.insert(a.id()).second) under_apply.push_back(a);
  });
  for (std::size_t i = 0; i < under_apply.size(); ++i)
    for (std::size_t j = i + 1; j < under_apply.size(); ++j) pair_of(under_apply[i], under_apply[j]);

  std::int64_t gap = 2 * max_off + 1;
  std::int64_t positive = static_cast<std::int64_t>(names + apps + roots.size() + diffs + pairs.size());
  std::int64_t negative = static_cast<std::int64_t>(names + apps);
  b.need_hi = positive * gap + max_off;
  b.need_neg = negative * gap + max_off;
  b.need_len = positive * gap;
  b.need_elems = static_cast<int>(2 + elems + 2 * pairs.size());
  return b;
}

OracleResult enumerate_and_decide(Term phi, const OracleConfig& cfg) {
  if (cfg.lo > 0 || cfg.hi < 0) fail(ErrorKind::InvalidArgument, "window must contain 0");
  if (cfg.elems < 2) fail(ErrorKind::InvalidArgument, "at least bot and el are needed");
  Search search(phi, cfg);
  OracleResult r;
  bool sat = search.run();
  r.nodes = search.nodes();
  if (sat) {
    r.outcome = OracleOutcome::Sat;
    r.authoritative = true;
    r.witness = search.model();
  } else {
    r.outcome = OracleOutcome::BoundedUnsat;
    r.authoritative = authority_bound(phi).covered_by(cfg);
  }
  return r;
}

FunctionalModel random_model(Term phi, const OracleConfig& cfg, std::mt19937& rng) {
  FunctionalModel m;
  m.lo = cfg.lo;
  m.hi = cfg.hi;
  m.elems = cfg.elems;
  TermStore& s = phi.store();
  auto uni = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  for (SymbolId x : symbols_of(phi)) {
    const SymbolInfo& info = s.symbol(x);
    if (!info.is_constant()) continue;
    switch (info.range) {
      case Sort::Index: m.index[x] = uni(cfg.lo, cfg.hi); break;
      case Sort::Elem: m.elem[x] = static_cast<int>(uni(0, cfg.elems - 1)); break;
      case Sort::Bool: m.boolean[x] = uni(0, 1) == 1; break;
      case Sort::Array: {
        ArrayValue a;
        a.len = uni(0, std::min(cfg.max_len, cfg.hi));
        for (std::int64_t p = 0; p <= a.len; ++p) a.cells[p] = static_cast<int>(uni(1, cfg.elems - 1));
        m.arrays[x] = a;
        break;
      }
    }
  }
  return m;
}

}  // namespace card
