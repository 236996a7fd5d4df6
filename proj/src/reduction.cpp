#include "card/reduction.h"

#include <algorithm>
#include <map>

#include "card/index_theory.h"

namespace card {

std::optional<Term> Ledger::lookup(Term definition) const {
  auto it = by_def_.find(definition.id());
  if (it == by_def_.end()) return std::nullopt;
  return definition.store().constant(entries_[it->second].name);
}

Term Ledger::name(Term definition, Color color, std::string_view prefix, bool* created) {
  if (auto t = lookup(definition)) {
    if (created) *created = false;
    return *t;
  }
  TermStore& s = definition.store();
  SymbolId sym = s.fresh_symbol(prefix, definition.sort());
  by_def_.emplace(definition.id(), entries_.size());
  by_name_.emplace(sym, entries_.size());
  entries_.push_back({sym, definition, color});
  if (created) *created = true;
  return s.constant(sym);
}

const LedgerEntry* Ledger::entry(SymbolId s) const {
  auto it = by_name_.find(s);
  return it == by_name_.end() ? nullptr : &entries_[it->second];
}

Term Ledger::expand(Term t) const {
  for (std::size_t round = 0; round <= entries_.size(); ++round) {
    std::unordered_map<SymbolId, Term> mapping;
    for (SymbolId s : symbols_of(t))
      if (const LedgerEntry* e = entry(s)) mapping.emplace(s, e->definition);
    if (mapping.empty()) return t;
    t = substitute(t, mapping);
  }
  fail(ErrorKind::InvalidArgument, "cyclic ledger definitions");
}

std::optional<Term> SeparatedPair::length_of(Term array) const {
  for (const LenAtom& l : lens)
    if (l.array == array) return l.length;
  return std::nullopt;
}

void SeparatedPair::add_phi2(Term f) {
  if (phi2_ids_.insert(f.id()).second) phi2.push_back(f);
}

void SeparatedPair::add(const LenAtom& x) {
  if (phi1_keys_.insert({0, x.array.id(), x.length.id()}).second) lens.push_back(x);
}

void SeparatedPair::add(const DiffAtom& x) {
  if (phi1_keys_.insert({1, x.a.id(), x.b.id(), static_cast<TermId>(x.level), x.value.id()}).second)
    diffs.push_back(x);
}

void SeparatedPair::add(const WriteAtom& x) {
  if (phi1_keys_.insert({2, x.result.id(), x.base.id(), x.index.id(), x.value.id()}).second) writes.push_back(x);
}

void SeparatedPair::add(const ConstAtom& x) {
  if (phi1_keys_.insert({3, x.result.id(), x.index.id(), x.clamped.id()}).second) consts.push_back(x);
}

std::vector<Term> SeparatedPair::phi1_formulas() const {
  std::vector<Term> out;
  for (const LenAtom& x : lens) {
    TermStore& s = x.array.store();
    out.push_back(s.eq(s.len(x.array), x.length));
  }
  for (const DiffAtom& x : diffs) {
    TermStore& s = x.a.store();
    out.push_back(s.eq(expand_iterated_diff(x.a, x.b, x.level), x.value));
  }
  for (const WriteAtom& x : writes) {
    TermStore& s = x.base.store();
    out.push_back(s.eq(x.result, s.wr(x.base, x.index, x.value)));
  }
  for (const ConstAtom& x : consts) {
    TermStore& s = x.result.store();
    out.push_back(s.eq(s.const_array(x.index), x.result));
  }
  return out;
}

std::vector<Term> SeparatedPair::formulas() const {
  std::vector<Term> out = phi1_formulas();
  out.insert(out.end(), phi2.begin(), phi2.end());
  return out;
}

namespace {

class Flattener {
 public:
  Flattener(TermStore& s, std::shared_ptr<Ledger> ledger, Coloring* coloring)
      : s_(s), ledger_(std::move(ledger)), coloring_(coloring) {}

  void run(Term phi, SeparatedPair& target, SeparatedPair* other) {
    target_ = &target;
    other_ = other;
    if (phi.sort() != Sort::Bool) fail(ErrorKind::SortMismatch, "flatten expects a formula");
    target.add_phi2(formula(phi));
  }

  // Every array constant of the pair gets a length atom.
  void add_lengths(SeparatedPair& target, SeparatedPair* other) {
    target_ = &target;
    other_ = other;
    std::vector<Term> arrays;
    std::set<TermId> seen;
    auto note = [&](Term a) {
      if (seen.insert(a.id()).second) arrays.push_back(a);
    };
    for (const WriteAtom& w : target.writes) {
      note(w.result);
      note(w.base);
    }
    for (const DiffAtom& d : target.diffs) {
      note(d.a);
      note(d.b);
    }
    for (const ConstAtom& c : target.consts) note(c.result);
    post_order(target.phi2, [&](Term t) {
      if (t.op() == Op::Symbol && t.sort() == Sort::Array) note(t);
    });
    for (Term a : arrays) length(a);
  }

 private:
  Color color_of(Term def) const { return coloring_ ? coloring_->color_of(def) : Color::Common; }

  template <typename Atom>
  void emit(const Atom& atom, Color c) {
    target_->add(atom);
    if (other_ && c == Color::Common) other_->add(atom);
  }

  void emit_phi2(Term f, Color c) {
    target_->add_phi2(f);
    if (other_ && c == Color::Common) other_->add_phi2(f);
  }

  // Name for `def`; `define` is called once with the name and color when new.
  template <typename Define>
  Term named(Term def, std::string_view prefix, Define define) {
    if (auto t = ledger_->lookup(def)) {
      // A name created for the other side's strict part is never reused here.
      return *t;
    }
    Color c = color_of(def);
    Term n = ledger_->name(def, c, prefix);
    if (coloring_) coloring_->extend(n.symbol(), c);
    define(n, c);
    return n;
  }

  void mark_euf(Term a) {
    target_->euf_arrays.insert(a.id());
    if (other_) other_->euf_arrays.insert(a.id());
  }

  Term length(Term a) {
    return named(s_.len(a), "l", [&](Term l, Color c) { emit(LenAtom{a, l}, c); });
  }

  Term formula(Term f) {
    switch (f.op()) {
      case Op::True:
      case Op::False:
        return f;
      case Op::Symbol:
        return f;
      case Op::Not:
      case Op::And:
      case Op::Or:
      case Op::Implies: {
        std::vector<Term> xs;
        for (Term a : f.args()) xs.push_back(formula(a));
        return s_.rebuild(f, xs);
      }
      case Op::Le:
        return s_.le(idx(f[0]), idx(f[1]));
      case Op::Eq:
        switch (f[0].sort()) {
          case Sort::Bool: return s_.eq(formula(f[0]), formula(f[1]));
          case Sort::Index: return s_.eq(idx(f[0]), idx(f[1]));
          case Sort::Elem: return s_.eq(elem_term(f[0]), elem_term(f[1]));
          case Sort::Array: return array_eq(arr(f[0]), arr(f[1]));
        }
        break;
      case Op::Apply:
        return apply(f);
      default:
        break;
    }
    fail(ErrorKind::UnsupportedAtom, "cannot flatten " + to_sexpr(f));
  }

  Term array_eq(Term a, Term b) {
    if (a == b) return s_.top();
    Term k = diff_name(a, b);
    return s_.conj({s_.eq(k, s_.zero()), s_.eq(s_.rd(a, s_.zero()), s_.rd(b, s_.zero()))});
  }

  Term diff_name(Term a, Term b) {
    return named(s_.diff(a, b), "k", [&](Term k, Color c) { emit(DiffAtom{a, b, 1, k}, c); });
  }

  Term apply(Term t) {
    std::vector<Term> xs;
    for (Term a : t.args()) {
      switch (a.sort()) {
        case Sort::Index: xs.push_back(idx(a)); break;
        case Sort::Elem: xs.push_back(elem_term(a)); break;
        case Sort::Array: {
          Term x = arr(a);
          mark_euf(x);
          xs.push_back(x);
          break;
        }
        case Sort::Bool: fail(ErrorKind::SortMismatch, "Bool argument");
      }
    }
    return s_.apply(t.symbol(), xs);
  }

  Term idx(Term t) {
    switch (t.op()) {
      case Op::Symbol:
      case Op::Zero:
        return t;
      case Op::Offset:
        return s_.offset(idx(t[0]), t.payload());
      case Op::Len:
        return length(arr(t[0]));
      case Op::Diff: {
        Term a = arr(t[0]), b = arr(t[1]);
        if (a == b) return s_.zero();
        return diff_name(a, b);
      }
      case Op::Max: {
        Term i = idx(t[0]), j = idx(t[1]);
        return named(s_.max(i, j), "m", [&](Term m, Color c) {
          emit_phi2(s_.le(i, m), c);
          emit_phi2(s_.le(j, m), c);
          emit_phi2(s_.disj({s_.eq(m, i), s_.eq(m, j)}), c);
        });
      }
      case Op::Apply: {
        Term app = apply(t);
        return named(app, "g", [&](Term k, Color c) { emit_phi2(s_.eq(k, app), c); });
      }
      default:
        break;
    }
    fail(ErrorKind::UnsupportedAtom, "cannot flatten index term " + to_sexpr(t));
  }

  Term idx_const(Term t) {
    Term u = idx(t);
    if (u.op() != Op::Offset) return u;
    return named(u, "j", [&](Term j, Color c) { emit_phi2(s_.eq(j, u), c); });
  }

  Term elem_term(Term t) {
    switch (t.op()) {
      case Op::Symbol:
      case Op::Bot:
      case Op::El:
        return t;
      case Op::Read:
        return s_.rd(arr(t[0]), idx_const(t[1]));
      case Op::Apply:
        return apply(t);
      default:
        break;
    }
    fail(ErrorKind::UnsupportedAtom, "cannot flatten element term " + to_sexpr(t));
  }

  Term elem_const(Term t) {
    Term u = elem_term(t);
    if (u.op() == Op::Symbol || u.op() == Op::Bot || u.op() == Op::El) return u;
    return named(u, "e", [&](Term x, Color c) { emit_phi2(s_.eq(x, u), c); });
  }

  Term arr(Term t) {
    switch (t.op()) {
      case Op::Symbol:
        return t;
      case Op::Write: {
        Term b = arr(t[0]);
        Term i = idx_const(t[1]);
        Term e = elem_const(t[2]);
        return named(s_.wr(b, i, e), "w", [&](Term w, Color c) { emit(WriteAtom{w, b, i, e}, c); });
      }
      case Op::ConstArray: {
        Term i = idx_const(t[0]);
        return named(s_.const_array(i), "c", [&](Term a, Color c) {
          Term m = idx(s_.max(i, s_.zero()));
          emit(ConstAtom{a, i, m}, c);
        });
      }
      case Op::Apply: {
        Term app = apply(t);
        return named(app, "f", [&](Term a, Color c) {
          mark_euf(a);
          emit_phi2(s_.eq(a, app), c);
        });
      }
      default:
        break;
    }
    fail(ErrorKind::UnsupportedAtom, "cannot flatten array term " + to_sexpr(t));
  }

  TermStore& s_;
  std::shared_ptr<Ledger> ledger_;
  Coloring* coloring_;
  SeparatedPair* target_ = nullptr;
  SeparatedPair* other_ = nullptr;
};

TermStore& store_of(const SeparatedPair& sp) {
  if (!sp.lens.empty()) return sp.lens[0].array.store();
  if (!sp.diffs.empty()) return sp.diffs[0].a.store();
  if (!sp.writes.empty()) return sp.writes[0].base.store();
  return sp.consts.at(0).result.store();
}

}  // namespace

SeparatedPair flatten(Term phi) {
  SeparatedPair sp;
  sp.ledger = std::make_shared<Ledger>();
  Flattener f(phi.store(), sp.ledger, nullptr);
  f.run(phi, sp, nullptr);
  f.add_lengths(sp, nullptr);
  return sp;
}

std::pair<SeparatedPair, SeparatedPair> flatten_pair(Term a, Term b, Coloring& coloring) {
  SeparatedPair sa, sb;
  sa.ledger = sb.ledger = std::make_shared<Ledger>();
  Flattener f(a.store(), sa.ledger, &coloring);
  f.run(a, sa, &sb);
  f.run(b, sb, &sa);
  f.add_lengths(sa, &sb);
  f.add_lengths(sb, &sa);
  return {std::move(sa), std::move(sb)};
}

std::vector<Term> instantiation_set(const SeparatedPair& sp) {
  std::vector<Term> all = sp.formulas();
  std::set<Term> out;
  if (!all.empty()) out.insert(all[0].store().zero());
  post_order(all, [&](Term t) {
    if (t.op() == Op::Symbol && t.sort() == Sort::Index) out.insert(t);
  });
  return {out.begin(), out.end()};
}

SeparatedPair zero_instantiate(const SeparatedPair& sp, const std::vector<Term>& inst) {
  SeparatedPair out = sp;
  if (sp.phi1_size() == 0) return out;
  TermStore& s = store_of(sp);
  Term zero = s.zero(), bot = s.bot();
  auto len_of = [&](Term a) {
    auto l = sp.length_of(a);
    if (!l) fail(ErrorKind::InvalidArgument, "missing length atom for " + to_sexpr(a));
    return *l;
  };
  for (const WriteAtom& w : sp.writes) {
    Term lb = len_of(w.base);
    Term a = w.result, b = w.base, i = w.index, e = w.value;
    out.add_phi2(s.implies(s.conj({s.neg(s.eq(e, bot)), s.le(zero, i), s.le(i, lb)}), s.eq(s.rd(a, i), e)));
    out.add_phi2(s.implies(s.disj({s.lt(i, zero), s.lt(lb, i), s.eq(e, bot)}), s.eq(s.rd(a, i), s.rd(b, i))));
    for (Term h : inst) out.add_phi2(s.implies(s.neg(s.eq(h, i)), s.eq(s.rd(a, h), s.rd(b, h))));
  }
  for (const LenAtom& l : sp.lens) {
    out.add_phi2(s.le(zero, l.length));
    for (Term h : inst)
      out.add_phi2(s.iff(s.neg(s.eq(s.rd(l.array, h), bot)), s.conj({s.le(zero, h), s.le(h, l.length)})));
  }
  for (const ConstAtom& c : sp.consts) {
    out.add_phi2(s.eq(len_of(c.result), c.clamped));
    for (Term h : inst)
      out.add_phi2(s.implies(s.conj({s.le(zero, h), s.le(h, c.clamped)}), s.eq(s.rd(c.result, h), s.el())));
  }
  std::map<std::pair<TermId, TermId>, std::map<int, const DiffAtom*>> chains;
  for (const DiffAtom& d : sp.diffs) chains[{d.a.id(), d.b.id()}][d.level] = &d;
  for (const auto& [key, levels] : chains) {
    int top = levels.rbegin()->first;
    if (static_cast<int>(levels.size()) != top || levels.begin()->first != 1)
      fail(ErrorKind::InvalidArgument, "incomplete diff chain");
    Term a = levels.begin()->second->a, b = levels.begin()->second->b;
    Term la = len_of(a), lb = len_of(b);
    std::vector<Term> k;
    for (const auto& [lvl, d] : levels) k.push_back(d->value);
    std::size_t n = k.size();
    auto rd_eq = [&](Term h) { return s.eq(s.rd(a, h), s.rd(b, h)); };
    for (std::size_t j = 0; j + 1 < n; ++j) out.add_phi2(s.le(k[j + 1], k[j]));
    out.add_phi2(s.le(zero, k[n - 1]));
    for (std::size_t j = 0; j + 1 < n; ++j)
      out.add_phi2(s.implies(s.lt(k[j + 1], k[j]), s.neg(rd_eq(k[j]))));
    for (std::size_t j = 0; j + 1 < n; ++j)
      out.add_phi2(s.implies(s.conj({s.eq(la, lb), s.eq(k[j], k[j + 1])}), s.eq(k[j], zero)));
    for (std::size_t j = 0; j < n; ++j) out.add_phi2(s.implies(rd_eq(k[j]), s.eq(k[j], zero)));
    for (Term h : inst) {
      std::vector<Term> alts{rd_eq(h)};
      for (std::size_t j = 0; j + 1 < n; ++j) alts.push_back(s.eq(h, k[j]));
      out.add_phi2(s.implies(s.lt(k[n - 1], h), s.disj(alts)));
    }
    out.add_phi2(s.implies(s.lt(lb, la), s.conj({s.eq(k[0], k[n - 1]), s.eq(k[n - 1], la)})));
    out.add_phi2(s.implies(s.lt(la, lb), s.conj({s.eq(k[0], k[n - 1]), s.eq(k[n - 1], lb)})));
  }
  return out;
}

void diff_chain_complete(SeparatedPair& sp, Term a, Term b, int upto, Color color) {
  if (!sp.ledger) sp.ledger = std::make_shared<Ledger>();
  for (int n = 1; n <= upto; ++n) {
    Term k = sp.ledger->name(expand_iterated_diff(a, b, n), color, "k");
    sp.add(DiffAtom{a, b, n, k});
  }
}

std::size_t count_wr_index_constants(const SeparatedPair& sp) {
  std::set<TermId> ids;
  for (const WriteAtom& w : sp.writes) ids.insert(w.index.id());
  return ids.size();
}

}  // namespace card
