#include "card/problem.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "card/sexpr.h"

namespace card {

Term Problem::formula() const {
  const auto& g = std::get<SatGoal>(goal);
  return store->conj(g.assertions);
}

Term Problem::a() const { return store->conj(std::get<InterpGoal>(goal).a_parts); }
Term Problem::b() const { return store->conj(std::get<InterpGoal>(goal).b_parts); }

namespace {

[[noreturn]] void syntax(const SExpr& at, const std::string& msg) {
  fail(ErrorKind::SyntaxError, std::to_string(at.line) + ":" + std::to_string(at.column) + ": " + msg);
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc() || r.ptr != e) return std::nullopt;
  return v;
}

class TermParser {
 public:
  explicit TermParser(TermStore& store) : s_(store) {}

  Term parse(const SExpr& e) { return parse_inner(e); }

 private:
  static std::string strip(const std::string& what) {
    auto p = what.find(": ");
    return p == std::string::npos ? what : what.substr(p + 2);
  }

  Term expect(const SExpr& e, Sort s) {
    Term t = parse_inner(e);
    if (t.sort() != s)
      fail(ErrorKind::SortMismatch, std::to_string(e.line) + ":" + std::to_string(e.column) + ": expected " +
                                        std::string(to_string(s)) + ", got " + std::string(to_string(t.sort())));
    return t;
  }

  void arity(const SExpr& e, std::size_t n) {
    if (e.items.size() != n + 1)
      syntax(e, "'" + e.head() + "' expects " + std::to_string(n) + " argument(s)");
  }

  // Errors are tagged with the position of the innermost offending node.
  Term parse_inner(const SExpr& e) {
    try {
      return parse_node(e);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::SyntaxError || located_) throw;
      located_ = true;
      fail(err.kind(), std::to_string(e.line) + ":" + std::to_string(e.column) + ": " + strip(err.what()));
    }
  }

  Term parse_node(const SExpr& e) {
    if (e.is_atom()) return parse_atom(e);
    if (e.items.empty()) syntax(e, "empty application");
    if (!e.items[0].is_atom()) syntax(e, "operator must be a symbol");
    const std::string& h = e.items[0].atom;
    auto arg = [&](std::size_t k) -> const SExpr& { return e.items[k]; };
    if (h == "rd") {
      arity(e, 2);
      std::array<Term, 2> x{parse_inner(arg(1)), parse_inner(arg(2))};
      return s_.make(Op::Read, x);
    }
    if (h == "wr") {
      arity(e, 3);
      std::array<Term, 3> x{parse_inner(arg(1)), parse_inner(arg(2)), parse_inner(arg(3))};
      return s_.make(Op::Write, x);
    }
    if (h == "diff") {
      arity(e, 2);
      std::array<Term, 2> x{parse_inner(arg(1)), parse_inner(arg(2))};
      return s_.make(Op::Diff, x);
    }
    if (h == "len") {
      arity(e, 1);
      std::array<Term, 1> x{parse_inner(arg(1))};
      return s_.make(Op::Len, x);
    }
    if (h == "const") {
      arity(e, 1);
      std::array<Term, 1> x{parse_inner(arg(1))};
      return s_.make(Op::ConstArray, x);
    }
    if (h == "succ" || h == "pred") {
      arity(e, 1);
      if (!s_.signature().offsets_enabled())
        fail(ErrorKind::UnsupportedAtom, "'" + h + "' requires the IDL index theory");
      Term t = expect(arg(1), Sort::Index);
      return s_.offset(t, h == "succ" ? 1 : -1);
    }
    if (h == "max") {
      arity(e, 2);
      std::array<Term, 2> x{parse_inner(arg(1)), parse_inner(arg(2))};
      return s_.make(Op::Max, x);
    }
    if (h == "<=" || h == "<" || h == ">=" || h == ">") {
      arity(e, 2);
      Term l = parse_inner(arg(1));
      Term r = parse_inner(arg(2));
      if (h == "<=") return s_.le(l, r);
      if (h == ">=") return s_.le(r, l);
      std::array<Term, 1> x{h == "<" ? s_.le(r, l) : s_.le(l, r)};
      return s_.make(Op::Not, x);
    }
    if (h == "=") {
      arity(e, 2);
      return s_.eq(parse_inner(arg(1)), parse_inner(arg(2)));
    }
    if (h == "not") {
      arity(e, 1);
      std::array<Term, 1> x{parse_inner(arg(1))};
      return s_.make(Op::Not, x);
    }
    if (h == "=>") {
      arity(e, 2);
      return s_.implies(parse_inner(arg(1)), parse_inner(arg(2)));
    }
    if (h == "and" || h == "or") {
      std::vector<Term> xs;
      for (std::size_t k = 1; k < e.items.size(); ++k) xs.push_back(parse_inner(arg(k)));
      return s_.make(h == "and" ? Op::And : Op::Or, xs);
    }
    auto f = s_.find_symbol(h);
    if (!f) fail(ErrorKind::UnknownSymbol, "unknown function '" + h + "'");
    std::vector<Term> xs;
    for (std::size_t k = 1; k < e.items.size(); ++k) xs.push_back(parse_inner(arg(k)));
    return s_.make(Op::Apply, xs, *f);
  }

  Term parse_atom(const SExpr& e) {
    const std::string& a = e.atom;
    if (a == "bot") return s_.bot();
    if (a == "el") return s_.el();
    if (a == "true") return s_.top();
    if (a == "false") return s_.bottom_formula();
    if (auto v = parse_int(a)) {
      if (*v == 0) return s_.zero();
      if (!s_.signature().offsets_enabled())
        fail(ErrorKind::UnsupportedAtom, "numeral " + a + " requires the IDL index theory");
      return s_.numeral(*v);
    }
    auto sym = s_.find_symbol(a);
    if (!sym) fail(ErrorKind::UnknownSymbol, "unknown symbol '" + a + "'");
    return s_.constant(*sym);
  }

  TermStore& s_;
  bool located_ = false;
};

Sort sort_of(const SExpr& e) {
  if (!e.is_atom()) syntax(e, "expected a sort name");
  auto s = parse_sort(e.atom);
  if (!s) syntax(e, "unknown sort '" + e.atom + "'");
  return *s;
}

}  // namespace

Term parse_term(TermStore& store, std::string_view text) {
  auto es = read_sexprs(text);
  if (es.size() != 1) fail(ErrorKind::SyntaxError, "expected exactly one term");
  return TermParser(store).parse(es[0]);
}

Problem parse_problem(std::string_view text) {
  Problem p;
  p.store = std::make_shared<TermStore>();
  TermStore& s = *p.store;
  std::vector<Term> plain, as, bs;
  std::optional<BethGoal> beth;
  bool want_interp = false;
  bool seen_assert = false;

  auto formula = [&](const SExpr& e) {
    Term t = TermParser(s).parse(e);
    if (t.sort() != Sort::Bool)
      fail(ErrorKind::SortMismatch, std::to_string(e.line) + ":" + std::to_string(e.column) + ": expected a formula");
    return t;
  };
  auto names = [&](const SExpr& e) {
    if (!e.is_list) syntax(e, "expected a list of constants");
    std::vector<SymbolId> out;
    for (const SExpr& n : e.items) {
      if (!n.is_atom()) syntax(n, "expected a constant name");
      auto sym = s.find_symbol(n.atom);
      if (!sym) fail(ErrorKind::UnknownSymbol, std::to_string(n.line) + ":" + std::to_string(n.column) +
                                                   ": unknown symbol '" + n.atom + "'");
      if (!s.symbol(*sym).is_constant()) syntax(n, "'" + n.atom + "' is not a constant");
      out.push_back(*sym);
    }
    return out;
  };

  for (const SExpr& cmd : read_sexprs(text)) {
    std::string h = cmd.head();
    if (h.empty()) syntax(cmd, "expected a command");
    auto need = [&](std::size_t n) {
      if (cmd.items.size() != n + 1) syntax(cmd, "'" + h + "' expects " + std::to_string(n) + " argument(s)");
    };
    if (h == "set-theory") {
      need(1);
      Signature sig = s.signature();
      if (cmd.items[1].is_atom("CARD")) sig.mode = TheoryMode::Card;
      else if (cmd.items[1].is_atom("CARDC")) sig.mode = TheoryMode::Cardc;
      else syntax(cmd.items[1], "expected CARD or CARDC");
      if (seen_assert) syntax(cmd, "set-theory must precede assertions");
      s.set_signature(sig);
    } else if (h == "set-index-theory") {
      need(1);
      Signature sig = s.signature();
      if (cmd.items[1].is_atom("TO")) sig.index = IndexTheoryKind::TO;
      else if (cmd.items[1].is_atom("IDL")) sig.index = IndexTheoryKind::IDL;
      else syntax(cmd.items[1], "expected TO or IDL");
      if (seen_assert) syntax(cmd, "set-index-theory must precede assertions");
      s.set_signature(sig);
    } else if (h == "declare-const") {
      need(2);
      if (!cmd.items[1].is_atom()) syntax(cmd.items[1], "expected a name");
      try {
        p.declarations.push_back(s.declare(cmd.items[1].atom, {}, sort_of(cmd.items[2])));
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::DuplicateSymbol) throw;
        fail(ErrorKind::DuplicateSymbol, std::to_string(cmd.line) + ":" + std::to_string(cmd.column) +
                                             ": '" + cmd.items[1].atom + "' already declared");
      }
    } else if (h == "declare-fun") {
      need(3);
      if (!cmd.items[1].is_atom()) syntax(cmd.items[1], "expected a name");
      if (!cmd.items[2].is_list) syntax(cmd.items[2], "expected an argument sort list");
      std::vector<Sort> dom;
      for (const SExpr& x : cmd.items[2].items) dom.push_back(sort_of(x));
      try {
        p.declarations.push_back(s.declare(cmd.items[1].atom, dom, sort_of(cmd.items[3])));
      } catch (const Error& err) {
        fail(err.kind(), std::to_string(cmd.line) + ":" + std::to_string(cmd.column) + ": '" +
                             cmd.items[1].atom + "' " +
                             (err.kind() == ErrorKind::DuplicateSymbol ? "already declared" : "has a bad rank"));
      }
    } else if (h == "assert") {
      need(1);
      seen_assert = true;
      plain.push_back(formula(cmd.items[1]));
    } else if (h == "assert-A") {
      need(1);
      seen_assert = true;
      as.push_back(formula(cmd.items[1]));
    } else if (h == "assert-B") {
      need(1);
      seen_assert = true;
      bs.push_back(formula(cmd.items[1]));
    } else if (h == "check-sat") {
      need(0);
    } else if (h == "get-interpolant") {
      need(0);
      want_interp = true;
    } else if (h == "beth-define") {
      need(3);
      if (beth) syntax(cmd, "only one beth-define is allowed");
      BethGoal g;
      g.params = names(cmd.items[1]);
      g.defined = names(cmd.items[2]);
      g.delta = formula(cmd.items[3]);
      seen_assert = true;
      beth = g;
    } else {
      syntax(cmd, "unknown command '" + h + "'");
    }
  }

  int kinds = (beth ? 1 : 0) + ((want_interp || !as.empty() || !bs.empty()) ? 1 : 0);
  if (kinds > 1) fail(ErrorKind::SyntaxError, "beth-define cannot be combined with interpolation assertions");
  if (beth) {
    if (!plain.empty()) beth->delta = s.conj(std::vector<Term>{s.conj(plain), beth->delta});
    p.goal = *beth;
  } else if (want_interp || !as.empty() || !bs.empty()) {
    if (!plain.empty()) fail(ErrorKind::SyntaxError, "plain assert cannot be mixed with assert-A/assert-B");
    p.goal = InterpGoal{as, bs};
  } else {
    p.goal = SatGoal{plain};
  }
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string print_problem(const Problem& p) {
  const TermStore& s = *p.store;
  std::ostringstream os;
  os << "(set-theory " << (p.mode() == TheoryMode::Cardc ? "CARDC" : "CARD") << ")\n";
  os << "(set-index-theory " << (p.index_theory() == IndexTheoryKind::TO ? "TO" : "IDL") << ")\n";
  for (SymbolId d : p.declarations) {
    const SymbolInfo& info = s.symbol(d);
    if (info.domain.empty()) {
      os << "(declare-const " << info.name << " " << to_string(info.range) << ")\n";
    } else {
      os << "(declare-fun " << info.name << " (";
      for (std::size_t k = 0; k < info.domain.size(); ++k) os << (k ? " " : "") << to_string(info.domain[k]);
      os << ") " << to_string(info.range) << ")\n";
    }
  }
  auto names = [&](const std::vector<SymbolId>& xs) {
    std::string out = "(";
    for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? " " : "") + s.symbol(xs[k]).name;
    return out + ")";
  };
  if (const auto* g = std::get_if<SatGoal>(&p.goal)) {
    for (Term t : g->assertions) os << "(assert " << to_sexpr(t) << ")\n";
    os << "(check-sat)\n";
  } else if (const auto* g = std::get_if<InterpGoal>(&p.goal)) {
    for (Term t : g->a_parts) os << "(assert-A " << to_sexpr(t) << ")\n";
    for (Term t : g->b_parts) os << "(assert-B " << to_sexpr(t) << ")\n";
    os << "(get-interpolant)\n";
  } else {
    const auto& b = std::get<BethGoal>(p.goal);
    os << "(beth-define " << names(b.params) << " " << names(b.defined) << " " << to_sexpr(b.delta) << ")\n";
  }
  return os.str();
}

std::string_view to_string(Color c) {
  switch (c) {
    case Color::AStrict: return "A";
    case Color::BStrict: return "B";
    case Color::Common: return "AB";
  }
  return "?";
}

std::optional<Color> Coloring::tag(SymbolId s) const {
  auto it = tags_.find(s);
  if (it == tags_.end()) return std::nullopt;
  return it->second;
}

void Coloring::extend(SymbolId s, Color c) {
  if (!tags_.emplace(s, c).second) fail(ErrorKind::DuplicateSymbol, "symbol already colored");
}

std::set<SymbolId> Coloring::common() const {
  std::set<SymbolId> out;
  for (auto [s, c] : tags_)
    if (c == Color::Common) out.insert(s);
  return out;
}

Color Coloring::color_of(Term t) const {
  bool a = false, b = false;
  for (SymbolId s : symbols_of(t)) {
    auto c = tag(s);
    if (!c) fail(ErrorKind::InvalidArgument, "uncolored symbol '" + t.store().symbol(s).name + "'");
    a |= *c == Color::AStrict;
    b |= *c == Color::BStrict;
  }
  if (a && b) fail(ErrorKind::MixedLiteral, "term mixes A-local and B-local symbols: " + to_sexpr(t));
  return a ? Color::AStrict : b ? Color::BStrict : Color::Common;
}

Coloring color(Term a, Term b) {
  auto sa = symbols_of(a);
  auto sb = symbols_of(b);
  Coloring c;
  for (SymbolId s : sa) c.extend(s, sb.count(s) ? Color::Common : Color::AStrict);
  for (SymbolId s : sb)
    if (!sa.count(s)) c.extend(s, Color::BStrict);
  return c;
}

Coloring color_extend(const Coloring& c, SymbolId s, Color tag) {
  Coloring out = c;
  out.extend(s, tag);
  return out;
}

}  // namespace card
