#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "card/base_solver.h"
#include "card/euf.h"

namespace card {
namespace {

struct EufTest : ::testing::Test {
  TermStore s;
  SymbolId f = 0;
  Term a, b, c, x, p, q;
  EufTest() {
    f = s.declare("f", {Sort::Elem}, Sort::Elem);
    a = s.constant(s.declare("a", {}, Sort::Elem));
    b = s.constant(s.declare("b", {}, Sort::Elem));
    c = s.constant(s.declare("c", {}, Sort::Elem));
    x = s.constant(s.declare("x", {}, Sort::Elem));
    p = s.constant(s.declare("p", {}, Sort::Elem));
    q = s.constant(s.declare("q", {}, Sort::Elem));
  }
  Term F(Term t) {
    std::array<Term, 1> args{t};
    return s.apply(f, args);
  }
  Term ne(Term u, Term v) { return s.neg(s.eq(u, v)); }
};

// Reference decision: merge equalities, then congruent pairs until nothing
// changes, then look for a violated disequality.
bool naive_cc_sat(std::span<const Term> lits) {
  std::vector<Term> terms;
  post_order(lits, [&](Term t) {
    if (t.sort() == Sort::Elem) terms.push_back(t);
  });
  std::map<TermId, int> id;
  for (Term t : terms) id.emplace(t.id(), static_cast<int>(id.size()));
  std::vector<int> parent(id.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : find(parent[v]); };
  auto cls = [&](Term t) { return find(id.at(t.id())); };
  for (Term l : lits)
    if (l.op() == Op::Eq) parent[cls(l[0])] = cls(l[1]);
  for (bool changed = true; changed;) {
    changed = false;
    for (Term u : terms)
      for (Term v : terms) {
        if (u.op() != Op::Apply || v.op() != Op::Apply || u.symbol() != v.symbol() || cls(u) == cls(v)) continue;
        bool same = true;
        for (std::size_t k = 0; k < u.arity(); ++k) same = same && cls(u[k]) == cls(v[k]);
        if (same) {
          parent[cls(u)] = cls(v);
          changed = true;
        }
      }
  }
  for (Term l : lits)
    if (l.op() == Op::Not && cls(l[0][0]) == cls(l[0][1])) return false;
  return true;
}

TEST_F(EufTest, Congruence) {
  std::vector<Term> lits{s.eq(a, b), ne(F(a), F(b))};
  EXPECT_FALSE(euf_check_conj(lits).sat);
}

TEST_F(EufTest, CyclicFunction) {
  std::vector<Term> lits{s.eq(F(a), b), s.eq(F(b), a), ne(F(F(a)), a)};
  EufResult r = euf_check_conj(lits);
  EXPECT_FALSE(r.sat);
  EXPECT_EQ(r.core.size(), 3u);
  EXPECT_FALSE(naive_cc_sat(lits));
}

TEST_F(EufTest, SingleDisequalityIsSat) {
  std::vector<Term> lits{ne(a, b)};
  EXPECT_TRUE(euf_check_conj(lits).sat);
}

TEST_F(EufTest, Explanations) {
  CongruenceClosure cc(s);
  cc.assert_literal(s.eq(a, b), 0);
  cc.assert_literal(s.eq(b, c), 1);
  cc.assert_literal(s.eq(x, p), 2);
  EXPECT_TRUE(cc.equal(F(a), F(c)));
  auto why = cc.explain(F(a), F(c));
  std::sort(why.begin(), why.end());
  EXPECT_EQ(why, (std::vector<int>{0, 1}));
  cc.assert_literal(ne(F(a), F(c)), 3);
  EXPECT_FALSE(cc.consistent());
  auto conflict = cc.conflict();
  std::sort(conflict.begin(), conflict.end());
  EXPECT_EQ(conflict, (std::vector<int>{0, 1, 3}));
}

TEST_F(EufTest, Interpolant) {
  std::vector<Term> A{s.eq(x, c), s.eq(p, F(x))};
  std::vector<Term> B{s.eq(q, F(c)), ne(p, q)};
  Term theta = euf_interpolate_conj(A, B);
  auto syms = symbols_of(theta);
  EXPECT_FALSE(syms.count(x.symbol()));
  EXPECT_TRUE(verify_base_interpolant(s.conj(A), s.conj(B), theta, IndexTheoryKind::IDL).ok());
  // Equivalent to p = f(c).
  Term expected = s.eq(p, F(c));
  EXPECT_FALSE(base_check(s.conj({theta, s.neg(expected)}), IndexTheoryKind::IDL).sat);
  EXPECT_FALSE(base_check(s.conj({expected, s.neg(theta)}), IndexTheoryKind::IDL).sat);
}

TEST_F(EufTest, InterpolantEdgeCases) {
  std::vector<Term> bad{ne(a, a)}, ok{s.eq(a, b)};
  EXPECT_EQ(euf_interpolate_conj(bad, ok), s.bottom_formula());
  try {
    std::vector<Term> other{s.eq(c, x)};
    euf_interpolate_conj(ok, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotUnsat);
  }
}

TEST_F(EufTest, EntailedEqualities) {
  std::vector<Term> lits{s.eq(x, a), s.eq(a, b)};
  std::vector<std::pair<Term, Term>> cands{{x, b}, {x, c}};
  auto got = euf_entailed_var_equalities(lits, cands);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].second, b);

  std::vector<Term> inj{s.eq(F(x), F(b))};
  std::vector<std::pair<Term, Term>> xb{{x, b}};
  EXPECT_TRUE(euf_entailed_var_equalities(inj, xb).empty());

  std::vector<Term> chain{s.eq(a, b), s.eq(b, c), s.eq(c, x), s.eq(x, p)};
  std::vector<std::pair<Term, Term>> ap{{a, p}};
  EXPECT_EQ(euf_entailed_var_equalities(chain, ap).size(), 1u);
}

TEST_F(EufTest, RandomCubesAgreeWithNaiveClosure) {
  std::mt19937 rng(3);
  std::vector<Term> base{a, b, c, F(a), F(b), F(F(a)), F(c), F(F(b))};
  std::uniform_int_distribution<int> pick(0, static_cast<int>(base.size()) - 1), len(1, 7);
  for (int round = 0; round < 1000; ++round) {
    std::vector<Term> lits;
    int n = len(rng);
    for (int k = 0; k < n; ++k) {
      Term u = base[static_cast<std::size_t>(pick(rng))], v = base[static_cast<std::size_t>(pick(rng))];
      lits.push_back(rng() % 3 ? s.eq(u, v) : ne(u, v));
    }
    ASSERT_EQ(euf_check_conj(lits).sat, naive_cc_sat(lits)) << to_sexpr(s.conj(lits));
  }
}

}  // namespace
}  // namespace card
