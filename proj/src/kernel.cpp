#include "card/kernel.h"

#include <algorithm>
#include <sstream>

namespace card {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SortMismatch: return "SortMismatch";
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
    case ErrorKind::ConstNotEnabled: return "ConstNotEnabled";
    case ErrorKind::DuplicateSymbol: return "DuplicateSymbol";
    case ErrorKind::UnsupportedAtom: return "UnsupportedAtom";
    case ErrorKind::NotUnsat: return "NotUnsat";
    case ErrorKind::MixedLiteral: return "MixedLiteral";
    case ErrorKind::NoTermFound: return "NoTermFound";
    case ErrorKind::NoSeparatingTerm: return "NoSeparatingTerm";
    case ErrorKind::AdapterFailure: return "AdapterFailure";
    case ErrorKind::UnverifiedInterpolant: return "UnverifiedInterpolant";
    case ErrorKind::UnsupportedFragment: return "UnsupportedFragment";
    case ErrorKind::BaseStillSat: return "BaseStillSat";
    case ErrorKind::DomainOverflow: return "DomainOverflow";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

std::string_view to_string(Sort s) {
  switch (s) {
    case Sort::Index: return "Index";
    case Sort::Elem: return "Elem";
    case Sort::Array: return "Array";
    case Sort::Bool: return "Bool";
  }
  return "?";
}

std::optional<Sort> parse_sort(std::string_view name) {
  if (name == "Index") return Sort::Index;
  if (name == "Elem") return Sort::Elem;
  if (name == "Array") return Sort::Array;
  if (name == "Bool") return Sort::Bool;
  return std::nullopt;
}

std::string_view to_string(Op op) {
  switch (op) {
    case Op::Symbol: return "symbol";
    case Op::Apply: return "apply";
    case Op::Zero: return "0";
    case Op::Bot: return "bot";
    case Op::El: return "el";
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Offset: return "offset";
    case Op::Read: return "rd";
    case Op::Write: return "wr";
    case Op::Diff: return "diff";
    case Op::Len: return "len";
    case Op::ConstArray: return "const";
    case Op::Max: return "max";
    case Op::Eq: return "=";
    case Op::Le: return "<=";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Forall: return "forall";
  }
  return "?";
}

const Node& Term::node() const { return store_->node(id_); }

std::vector<Term> Term::args() const {
  std::vector<Term> out;
  out.reserve(arity());
  for (TermId a : node().args) out.emplace_back(store_, a);
  return out;
}

bool Term::is_atom() const {
  switch (op()) {
    case Op::Le:
    case Op::True:
    case Op::False:
      return true;
    case Op::Eq:
      return (*this)[0].sort() != Sort::Bool;
    case Op::Apply:
    case Op::Symbol:
      return sort() == Sort::Bool;
    default:
      return false;
  }
}

std::size_t TermStore::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<std::int64_t>()(k.payload) * 31 + static_cast<std::size_t>(k.op);
  for (TermId a : k.args) h = h * 1000003u ^ std::hash<TermId>()(a);
  return h;
}

TermStore::TermStore(Signature sig) : sig_(sig) {}

std::size_t TermStore::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return nodes_.size();
}

SymbolId TermStore::declare(std::string name, std::vector<Sort> domain, Sort range) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (by_name_.count(name)) fail(ErrorKind::DuplicateSymbol, "symbol '" + name + "' already declared");
  for (Sort s : domain)
    if (s == Sort::Bool) fail(ErrorKind::SortMismatch, "Bool arguments are not allowed for '" + name + "'");
  SymbolInfo info{name, std::move(domain), range, false};
  auto id = static_cast<SymbolId>(symbols_.push_back(std::move(info)));
  by_name_.emplace(std::move(name), id);
  return id;
}

SymbolId TermStore::fresh_symbol(std::string_view prefix, Sort range) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::string name;
  do {
    name = std::string(prefix) + "!" + std::to_string(fresh_counter_++);
  } while (by_name_.count(name));
  SymbolInfo info{name, {}, range, true};
  auto id = static_cast<SymbolId>(symbols_.push_back(std::move(info)));
  by_name_.emplace(std::move(name), id);
  return id;
}

std::optional<SymbolId> TermStore::find_symbol(std::string_view name) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

const SymbolInfo& TermStore::symbol(SymbolId s) const { return symbols_[s]; }

std::size_t TermStore::symbol_count() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return symbols_.size();
}

namespace {

[[noreturn]] void rank_error(Op op, std::string_view detail) {
  fail(ErrorKind::SortMismatch, std::string(to_string(op)) + ": " + std::string(detail));
}

void expect_args(Op op, std::span<const Term> args, std::initializer_list<Sort> sorts) {
  if (args.size() != sorts.size()) rank_error(op, "wrong number of arguments");
  std::size_t k = 0;
  for (Sort s : sorts) {
    if (args[k].sort() != s)
      rank_error(op, "argument " + std::to_string(k + 1) + " has sort " + std::string(to_string(args[k].sort())) +
                         ", expected " + std::string(to_string(s)));
    ++k;
  }
}

}  // namespace

Sort TermStore::result_sort(Op op, std::span<const Term> args, std::int64_t payload) const {
  switch (op) {
    case Op::Symbol: {
      const SymbolInfo& info = symbol(static_cast<SymbolId>(payload));
      if (!info.domain.empty()) rank_error(op, "'" + info.name + "' is a function, not a constant");
      if (!args.empty()) rank_error(op, "constants take no arguments");
      return info.range;
    }
    case Op::Apply: {
      const SymbolInfo& info = symbol(static_cast<SymbolId>(payload));
      if (args.size() != info.domain.size() || info.domain.empty())
        rank_error(op, "'" + info.name + "' applied to " + std::to_string(args.size()) + " arguments");
      for (std::size_t k = 0; k < args.size(); ++k)
        if (args[k].sort() != info.domain[k]) rank_error(op, "'" + info.name + "' argument sort mismatch");
      return info.range;
    }
    case Op::Zero: return Sort::Index;
    case Op::Bot:
    case Op::El: return Sort::Elem;
    case Op::True:
    case Op::False: return Sort::Bool;
    case Op::Offset: expect_args(op, args, {Sort::Index}); return Sort::Index;
    case Op::Read: expect_args(op, args, {Sort::Array, Sort::Index}); return Sort::Elem;
    case Op::Write: expect_args(op, args, {Sort::Array, Sort::Index, Sort::Elem}); return Sort::Array;
    case Op::Diff: expect_args(op, args, {Sort::Array, Sort::Array}); return Sort::Index;
    case Op::Len: expect_args(op, args, {Sort::Array}); return Sort::Index;
    case Op::ConstArray:
      if (!sig_.const_enabled()) fail(ErrorKind::ConstNotEnabled, "const requires the CARDC theory");
      expect_args(op, args, {Sort::Index});
      return Sort::Array;
    case Op::Max: expect_args(op, args, {Sort::Index, Sort::Index}); return Sort::Index;
    case Op::Eq:
      if (args.size() != 2) rank_error(op, "expects two arguments");
      if (args[0].sort() != args[1].sort()) rank_error(op, "sides have different sorts");
      return Sort::Bool;
    case Op::Le: expect_args(op, args, {Sort::Index, Sort::Index}); return Sort::Bool;
    case Op::Not: expect_args(op, args, {Sort::Bool}); return Sort::Bool;
    case Op::And:
    case Op::Or:
      for (const Term& a : args)
        if (a.sort() != Sort::Bool) rank_error(op, "arguments must be formulas");
      return Sort::Bool;
    case Op::Implies: expect_args(op, args, {Sort::Bool, Sort::Bool}); return Sort::Bool;
    case Op::Forall: {
      const SymbolInfo& info = symbol(static_cast<SymbolId>(payload));
      if (info.range != Sort::Index || !info.domain.empty()) rank_error(op, "bound variable must be an index");
      expect_args(op, args, {Sort::Bool});
      return Sort::Bool;
    }
  }
  rank_error(op, "unknown operator");
}

Term TermStore::intern(Op op, Sort sort, std::int64_t payload, std::vector<TermId> args) {
  std::lock_guard<std::mutex> lock(mutex_);
  Key key{op, payload, args};
  auto it = index_.find(key);
  if (it != index_.end()) return Term(this, it->second);
  auto id = static_cast<TermId>(nodes_.push_back(Node{op, sort, payload, std::move(args)}));
  index_.emplace(std::move(key), id);
  return Term(this, id);
}

Term TermStore::make(Op op, std::span<const Term> args, std::int64_t payload) {
  for (const Term& a : args)
    if (a.null() || &a.store() != this) fail(ErrorKind::InvalidArgument, "term from a different store");
  Sort sort = result_sort(op, args, payload);
  if (op == Op::Offset) {
    // Numeral compression: nested offsets collapse, zero offsets vanish.
    auto [base, k] = split_offset(args[0]);
    std::int64_t total = k + payload;
    if (total == 0) return base;
    return intern(Op::Offset, sort, total, {base.id()});
  }
  std::vector<TermId> ids;
  ids.reserve(args.size());
  for (const Term& a : args) ids.push_back(a.id());
  return intern(op, sort, payload, std::move(ids));
}

Term TermStore::rebuild(Term t, std::span<const Term> args) {
  if (t.op() == Op::Offset) return offset(args[0], t.payload());
  return make(t.op(), args, t.payload());
}

Term TermStore::constant(SymbolId s) { return make(Op::Symbol, {}, s); }

Term TermStore::constant(std::string_view name) {
  auto s = find_symbol(name);
  if (!s) fail(ErrorKind::UnknownSymbol, "unknown symbol '" + std::string(name) + "'");
  return constant(*s);
}

Term TermStore::apply(SymbolId f, std::span<const Term> args) {
  if (args.empty()) return constant(f);
  return make(Op::Apply, args, f);
}

Term TermStore::zero() { return make(Op::Zero, {}); }
Term TermStore::bot() { return make(Op::Bot, {}); }
Term TermStore::el() { return make(Op::El, {}); }
Term TermStore::top() { return make(Op::True, {}); }
Term TermStore::bottom_formula() { return make(Op::False, {}); }

Term TermStore::offset(Term base, std::int64_t k) {
  if (k == 0) {
    if (base.sort() != Sort::Index) rank_error(Op::Offset, "argument must be an index");
    return base;
  }
  std::array<Term, 1> a{base};
  return make(Op::Offset, a, k);
}

Term TermStore::rd(Term a, Term i) { std::array<Term, 2> x{a, i}; return make(Op::Read, x); }
Term TermStore::wr(Term a, Term i, Term e) { std::array<Term, 3> x{a, i, e}; return make(Op::Write, x); }
Term TermStore::diff(Term a, Term b) { std::array<Term, 2> x{a, b}; return make(Op::Diff, x); }
Term TermStore::len(Term a) { std::array<Term, 1> x{a}; return make(Op::Len, x); }
Term TermStore::const_array(Term i) { std::array<Term, 1> x{i}; return make(Op::ConstArray, x); }
Term TermStore::max(Term i, Term j) { std::array<Term, 2> x{i, j}; return make(Op::Max, x); }
Term TermStore::eq(Term s, Term t) { std::array<Term, 2> x{s, t}; return make(Op::Eq, x); }
Term TermStore::le(Term s, Term t) { std::array<Term, 2> x{s, t}; return make(Op::Le, x); }
Term TermStore::lt(Term s, Term t) { return neg(le(t, s)); }

Term TermStore::neg(Term f) {
  if (f.op() == Op::Not) return f[0];
  if (f.op() == Op::True) return bottom_formula();
  if (f.op() == Op::False) return top();
  std::array<Term, 1> x{f};
  return make(Op::Not, x);
}

Term TermStore::conj(std::span<const Term> fs) {
  if (fs.empty()) return top();
  if (fs.size() == 1) return fs[0];
  return make(Op::And, fs);
}

Term TermStore::disj(std::span<const Term> fs) {
  if (fs.empty()) return bottom_formula();
  if (fs.size() == 1) return fs[0];
  return make(Op::Or, fs);
}

Term TermStore::implies(Term a, Term b) { std::array<Term, 2> x{a, b}; return make(Op::Implies, x); }

Term TermStore::forall(SymbolId bound, Term matrix) {
  std::array<Term, 1> x{matrix};
  return make(Op::Forall, x, bound);
}

std::pair<Term, std::int64_t> split_offset(Term t) {
  if (t.op() == Op::Offset) return {t[0], t.payload()};
  return {t, 0};
}

void post_order(std::span<const Term> roots, const std::function<void(Term)>& visit) {
  if (roots.empty()) return;
  std::unordered_map<TermId, bool> seen;
  std::vector<std::pair<Term, bool>> stack;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.emplace_back(*it, false);
  while (!stack.empty()) {
    auto [t, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      visit(t);
      continue;
    }
    if (seen.count(t.id())) continue;
    seen[t.id()] = true;
    stack.emplace_back(t, true);
    const auto& args = t.node().args;
    for (auto it = args.rbegin(); it != args.rend(); ++it)
      if (!seen.count(*it)) stack.emplace_back(Term(&t.store(), *it), false);
  }
}

namespace {

void collect_symbols(Term t, std::set<SymbolId>& bound, std::set<SymbolId>& out,
                     std::unordered_map<TermId, bool>& memo) {
  bool closed = bound.empty();
  if (closed && memo.count(t.id())) return;
  switch (t.op()) {
    case Op::Symbol:
      if (!bound.count(t.symbol())) out.insert(t.symbol());
      break;
    case Op::Apply:
      out.insert(t.symbol());
      break;
    case Op::Forall: {
      bool fresh_bind = bound.insert(t.symbol()).second;
      collect_symbols(t[0], bound, out, memo);
      if (fresh_bind) bound.erase(t.symbol());
      return;
    }
    default:
      break;
  }
  for (Term a : t.args()) collect_symbols(a, bound, out, memo);
  if (closed) memo[t.id()] = true;
}

}  // namespace

std::set<SymbolId> symbols_of(Term t) { return symbols_of(std::span<const Term>(&t, 1)); }

std::set<SymbolId> symbols_of(std::span<const Term> ts) {
  std::set<SymbolId> out, bound;
  std::unordered_map<TermId, bool> memo;
  for (Term t : ts) collect_symbols(t, bound, out, memo);
  return out;
}

namespace {

Term subst_rec(Term t, const std::unordered_map<SymbolId, Term>& mapping, TermMap<Term>& memo) {
  auto it = memo.find(t);
  if (it != memo.end()) return it->second;
  Term result = t;
  if (t.op() == Op::Symbol) {
    auto m = mapping.find(t.symbol());
    if (m != mapping.end()) {
      if (m->second.sort() != t.sort())
        fail(ErrorKind::SortMismatch, "substitution for '" + t.store().symbol(t.symbol()).name + "' changes sort");
      result = m->second;
    }
  } else if (t.op() == Op::Forall && mapping.count(t.symbol())) {
    auto inner = mapping;
    inner.erase(t.symbol());
    TermMap<Term> inner_memo;
    Term body = subst_rec(t[0], inner, inner_memo);
    result = t.store().forall(t.symbol(), body);
  } else if (t.arity() > 0) {
    std::vector<Term> args;
    bool changed = false;
    for (Term a : t.args()) {
      Term b = subst_rec(a, mapping, memo);
      changed |= !(a == b);
      args.push_back(b);
    }
    if (changed) result = t.store().rebuild(t, args);
  }
  memo.emplace(t, result);
  return result;
}

}  // namespace

Term substitute(Term t, const std::unordered_map<SymbolId, Term>& mapping) {
  if (mapping.empty()) return t;
  TermMap<Term> memo;
  return subst_rec(t, mapping, memo);
}

Term expand_iterated_diff(Term a, Term b, int k) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "iterated diff level must be positive");
  TermStore& s = a.store();
  Term bk = b;
  Term d = s.diff(a, bk);
  for (int n = 1; n < k; ++n) {
    bk = s.wr(bk, d, s.rd(a, d));
    d = s.diff(a, bk);
  }
  return d;
}

std::size_t dag_size(Term t) { return dag_size(std::span<const Term>(&t, 1)); }

std::size_t dag_size(std::span<const Term> ts) {
  std::size_t n = 0;
  post_order(ts, [&](Term) { ++n; });
  return n;
}

namespace {

void print_rec(Term t, const PrintOptions& opts, std::ostream& os) {
  TermStore& s = t.store();
  switch (t.op()) {
    case Op::Symbol: os << s.symbol(t.symbol()).name; return;
    case Op::Zero: os << "0"; return;
    case Op::Bot: os << "bot"; return;
    case Op::El: os << "el"; return;
    case Op::True: os << "true"; return;
    case Op::False: os << "false"; return;
    case Op::Offset: {
      std::int64_t k = t.payload();
      if (opts.numerals && t[0].op() == Op::Zero) {
        os << k;
        return;
      }
      const char* f = k > 0 ? "succ" : "pred";
      std::int64_t n = k > 0 ? k : -k;
      for (std::int64_t i = 0; i < n; ++i) os << "(" << f << " ";
      print_rec(t[0], opts, os);
      for (std::int64_t i = 0; i < n; ++i) os << ")";
      return;
    }
    case Op::Apply: os << "(" << s.symbol(t.symbol()).name; break;
    case Op::Forall:
      os << "(forall ((" << s.symbol(t.symbol()).name << " Index)) ";
      print_rec(t[0], opts, os);
      os << ")";
      return;
    default: os << "(" << to_string(t.op()); break;
  }
  for (Term a : t.args()) {
    os << " ";
    print_rec(a, opts, os);
  }
  os << ")";
}

}  // namespace

std::string to_sexpr(Term t, PrintOptions opts) {
  if (t.null()) return "<null>";
  std::ostringstream os;
  print_rec(t, opts, os);
  return os.str();
}

}  // namespace card
