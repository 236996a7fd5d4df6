#include "card/engine.h"

#include <algorithm>
#include <chrono>

namespace card {

namespace {

std::vector<Term> terms_of(TermStore& s, const std::set<TermId>& ids) {
  std::vector<Term> out;
  for (TermId id : ids) out.emplace_back(&s, id);
  return out;
}

// Arrays handed to free symbols are EUF constants as well: their EUF
// equality is tied to array equality so that congruence sees extensionality.
void complete_free_arrays(SeparatedPair& sp, TermStore& s) {
  std::vector<Term> arrays = terms_of(s, sp.euf_arrays);
  Term zero = s.zero();
  for (std::size_t i = 0; i < arrays.size(); ++i)
    for (std::size_t j = i + 1; j < arrays.size(); ++j) {
      Term a = arrays[i], b = arrays[j];
      diff_chain_complete(sp, a, b, 1, Color::Common);
      Term k = *sp.ledger->lookup(s.diff(a, b));
      sp.add_phi2(s.iff(s.eq(a, b), s.conj({s.eq(k, zero), s.eq(s.rd(a, zero), s.rd(b, zero))})));
    }
}

void check_fragment(Term a0, Term b0) {
  TermStore& s = a0.store();
  const char* why = "interpolation is implemented for plain CARD without free function or predicate symbols";
  if (s.signature().mode == TheoryMode::Cardc)
    fail(ErrorKind::UnsupportedFragment, std::string(why) + " (constant arrays enabled)");
  std::array<Term, 2> ab{a0, b0};
  for (SymbolId f : symbols_of(ab))
    if (!s.symbol(f).is_constant() || s.symbol(f).range == Sort::Bool)
      fail(ErrorKind::UnsupportedFragment, std::string(why) + " (found '" + s.symbol(f).name + "')");
}

std::set<SymbolId> shared_symbols(Term a0, Term b0) {
  std::set<SymbolId> sa = symbols_of(a0), sb = symbols_of(b0), out;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(out, out.end()));
  return out;
}

}  // namespace

Verdict check_sat(Term phi) {
  TermStore& s = phi.store();
  SeparatedPair sp = flatten(phi);
  complete_free_arrays(sp, s);
  sp = zero_instantiate(sp, instantiation_set(sp));
  BaseResult r = base_check(s.conj(sp.phi2), s.signature().index);
  Verdict v;
  v.sat = r.sat;
  v.model = std::move(r.model);
  return v;
}

InterpolationSession prepare_interpolation(Term a0, Term b0) {
  check_fragment(a0, b0);
  TermStore& s = a0.store();
  InterpolationSession S;
  S.a0 = a0;
  S.b0 = b0;
  S.coloring = color(a0, b0);
  std::tie(S.a, S.b) = flatten_pair(a0, b0, S.coloring);
  S.n_a = count_wr_index_constants(S.a);
  S.n_b = count_wr_index_constants(S.b);
  S.n = 1 + std::max(S.n_a, S.n_b);

  std::vector<Term> all = S.a.formulas();
  for (Term f : S.b.formulas()) all.push_back(f);
  std::vector<Term> common;
  for (SymbolId x : symbols_of(all))
    if (s.symbol(x).range == Sort::Array && s.symbol(x).is_constant() && S.coloring.is_common(x))
      common.push_back(s.constant(x));
  for (std::size_t i = 0; i < common.size(); ++i)
    for (std::size_t j = i + 1; j < common.size(); ++j) {
      Term c1 = common[i], c2 = common[j];
      std::size_t before = S.a.ledger->entries().size();
      diff_chain_complete(S.a, c1, c2, static_cast<int>(S.n), Color::Common);
      diff_chain_complete(S.b, c1, c2, static_cast<int>(S.n), Color::Common);
      const auto& entries = S.a.ledger->entries();
      for (std::size_t k = before; k < entries.size(); ++k) S.coloring.extend(entries[k].name, Color::Common);
      S.common_pairs.emplace_back(c1, c2);
    }
  S.phi1_atoms = S.a.phi1_size() + S.b.phi1_size();

  S.a = zero_instantiate(S.a, instantiation_set(S.a));
  S.b = zero_instantiate(S.b, instantiation_set(S.b));
  S.a2 = s.conj(S.a.phi2);
  S.b2 = s.conj(S.b.phi2);
  return S;
}

Verdict interpolate(Term a0, Term b0, const InterpolationOptions& opts) {
  check_fragment(a0, b0);
  TermStore& s = a0.store();
  if (check_sat(s.conj({a0, b0})).sat) fail(ErrorKind::NotUnsat, "A and B are jointly satisfiable");
  InterpolationSession S = prepare_interpolation(a0, b0);
  IndexTheoryKind kind = s.signature().index;
  Term theta;
  try {
    theta = opts.external_command
                ? external_interpolate(S.a2, S.b2, *opts.external_command, opts.timeout_seconds, kind)
                : base_interpolate(S.a2, S.b2, kind);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotUnsat)
      fail(ErrorKind::BaseStillSat, "base problem after diff completion and 0-instantiation is satisfiable");
    throw;
  }
  Verdict v;
  v.interpolant = S.a.ledger->expand(theta);
  if (opts.verify) {
    v.report = verify(a0, b0, *v.interpolant);
    if (!v.report->ok()) fail(ErrorKind::UnverifiedInterpolant, to_sexpr(*v.interpolant));
  }
  return v;
}

VerifyReport verify(Term a0, Term b0, Term theta, const std::set<SymbolId>& extra_common) {
  TermStore& s = a0.store();
  VerifyReport r;
  std::set<SymbolId> shared = shared_symbols(a0, b0);
  r.symbols_ok = true;
  for (SymbolId x : symbols_of(theta))
    if (!shared.count(x) && !extra_common.count(x)) r.symbols_ok = false;
  r.a_entails = !check_sat(s.conj({a0, s.neg(theta)})).sat;
  r.b_refuted = !check_sat(s.conj({theta, b0})).sat;
  return r;
}

std::pair<Term, Term> bench_family(TermStore& s, int m) {
  if (m < 2) fail(ErrorKind::InvalidArgument, "bench family needs m >= 2");
  auto sym = [&](const std::string& name, Sort sort) {
    auto f = s.find_symbol(name);
    return s.constant(f ? *f : s.declare(name, {}, sort));
  };
  std::string tag = "_" + std::to_string(m);
  Term x = sym("x" + tag, Sort::Elem), e = sym("e" + tag, Sort::Elem);
  std::vector<Term> c, i;
  for (int k = 0; k < m; ++k) {
    c.push_back(sym("c" + std::to_string(k) + tag, Sort::Array));
    i.push_back(sym("i" + std::to_string(k) + tag, Sort::Index));
  }
  std::vector<Term> a{s.neg(s.eq(x, e)), s.neg(s.eq(x, s.bot()))};
  std::vector<Term> b{s.neg(s.eq(e, s.bot()))};
  for (int k = 0; k < m; ++k) {
    Term next = c[static_cast<std::size_t>((k + 1) % m)];
    a.push_back(s.eq(next, s.wr(c[k], i[k], x)));
    b.push_back(s.le(s.zero(), i[k]));
    b.push_back(s.le(i[k], s.len(c[k])));
    b.push_back(s.eq(s.rd(next, i[k]), e));
  }
  return {s.conj(a), s.conj(b)};
}

BenchRow bench_row(int m, IndexTheoryKind kind) {
  TermStore s(Signature{TheoryMode::Card, kind});
  auto start = std::chrono::steady_clock::now();
  auto [a0, b0] = bench_family(s, m);
  InterpolationSession S = prepare_interpolation(a0, b0);
  BenchRow row;
  row.m = m;
  row.phi1_atoms = S.phi1_atoms;
  row.phi2_atoms_after_step2 = S.a.phi2.size() + S.b.phi2.size();
  std::array<Term, 2> base{S.a2, S.b2};
  row.base_atoms = count_theory_atoms(base);
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace card
