#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "card/base_solver.h"
#include "card/problem.h"
#include "card/reduction.h"
#include "support/generators.h"

namespace card {
namespace {

struct ReductionTest : ::testing::Test {
  TermStore s;
  Term a, b, i, j, e, e2;
  ReductionTest() {
    a = s.constant(s.declare("a", {}, Sort::Array));
    b = s.constant(s.declare("b", {}, Sort::Array));
    i = s.constant(s.declare("i", {}, Sort::Index));
    j = s.constant(s.declare("j", {}, Sort::Index));
    e = s.constant(s.declare("e", {}, Sort::Elem));
    e2 = s.constant(s.declare("e2", {}, Sort::Elem));
  }
  static bool contains(const std::vector<Term>& fs, Term f) { return std::find(fs.begin(), fs.end(), f) != fs.end(); }
};

TEST_F(ReductionTest, HoistsWrite) {
  SeparatedPair sp = flatten(s.eq(s.rd(s.wr(a, i, e), j), e2));
  ASSERT_EQ(sp.writes.size(), 1u);
  const WriteAtom& w = sp.writes[0];
  EXPECT_EQ(w.base, a);
  EXPECT_EQ(w.index, i);
  EXPECT_EQ(w.value, e);
  EXPECT_TRUE(sp.length_of(a));
  EXPECT_TRUE(sp.length_of(w.result));
  EXPECT_TRUE(contains(sp.phi2, s.eq(s.rd(w.result, j), e2)));
  EXPECT_EQ(sp.ledger->expand(w.result), s.wr(a, i, e));
}

TEST_F(ReductionTest, ArrayDisequality) {
  SeparatedPair sp = flatten(s.neg(s.eq(a, b)));
  ASSERT_EQ(sp.diffs.size(), 1u);
  Term k = sp.diffs[0].value;
  EXPECT_EQ(sp.diffs[0].level, 1);
  EXPECT_TRUE(sp.length_of(a) && sp.length_of(b));
  Term expected = s.neg(s.conj({s.eq(k, s.zero()), s.eq(s.rd(a, s.zero()), s.rd(b, s.zero()))}));
  EXPECT_TRUE(contains(sp.phi2, expected));
}

TEST_F(ReductionTest, LengthInstances) {
  SeparatedPair sp = flatten(s.le(i, s.len(a)));
  Term l = *sp.length_of(a);
  auto inst = instantiation_set(sp);
  // Length names are index constants too.
  EXPECT_EQ(std::set<Term>(inst.begin(), inst.end()), (std::set<Term>{s.zero(), i, l}));
  SeparatedPair z = zero_instantiate(sp, inst);
  EXPECT_TRUE(contains(z.phi2, s.le(s.zero(), l)));
  for (Term h : inst)
    EXPECT_TRUE(contains(z.phi2, s.iff(s.neg(s.eq(s.rd(a, h), s.bot())), s.conj({s.le(s.zero(), h), s.le(h, l)}))));
  EXPECT_EQ(z.phi2.size(), sp.phi2.size() + 1 + inst.size());
}

TEST_F(ReductionTest, WriteSelfInstanceKept) {
  SeparatedPair sp = flatten(s.eq(s.rd(s.wr(a, i, e), j), e2));
  Term w = sp.writes[0].result;
  std::vector<Term> inst{i};
  SeparatedPair z = zero_instantiate(sp, inst);
  EXPECT_TRUE(contains(z.phi2, s.implies(s.neg(s.eq(i, i)), s.eq(s.rd(w, i), s.rd(a, i)))));
}

TEST_F(ReductionTest, InstanceCount) {
  SeparatedPair sp = flatten(s.eq(s.rd(s.wr(a, i, e), j), e2));
  auto inst = instantiation_set(sp);
  SeparatedPair z = zero_instantiate(sp, inst);
  // Two guards and |I| instances per write, one bound and |I| instances per length.
  std::size_t expected = sp.writes.size() * (2 + inst.size()) + sp.lens.size() * (1 + inst.size());
  EXPECT_EQ(z.phi2.size() - sp.phi2.size(), expected);
}

TEST_F(ReductionTest, ZeroInstantiateIdempotent) {
  SeparatedPair sp = flatten(s.conj({s.neg(s.eq(a, s.wr(b, i, e))), s.le(s.diff(a, b), j)}));
  auto inst = instantiation_set(sp);
  SeparatedPair once = zero_instantiate(sp, inst);
  SeparatedPair twice = zero_instantiate(once, inst);
  EXPECT_EQ(once.formulas(), twice.formulas());
}

TEST_F(ReductionTest, DiffChainCompletion) {
  SeparatedPair sp = flatten(s.neg(s.eq(a, b)));
  diff_chain_complete(sp, a, b, 3, Color::Common);
  ASSERT_EQ(sp.diffs.size(), 3u);
  std::set<int> levels;
  for (const DiffAtom& d : sp.diffs) levels.insert(d.level);
  EXPECT_EQ(levels, (std::set<int>{1, 2, 3}));
  EXPECT_EQ(sp.ledger->expand(sp.diffs.back().value), expand_iterated_diff(a, b, 3));
  auto before = sp.formulas();
  diff_chain_complete(sp, a, b, 3, Color::Common);
  EXPECT_EQ(sp.formulas(), before);
}

TEST_F(ReductionTest, IncompleteChainRejected) {
  SeparatedPair sp = flatten(s.le(i, s.len(a)));
  sp.add(DiffAtom{a, b, 2, s.fresh("k", Sort::Index)});
  sp.add(LenAtom{b, s.fresh("l", Sort::Index)});
  try {
    zero_instantiate(sp, instantiation_set(sp));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::InvalidArgument);
  }
}

TEST_F(ReductionTest, SelfChainForcesZero) {
  SeparatedPair sp = flatten(s.le(i, s.len(a)));
  diff_chain_complete(sp, a, a, 3, Color::Common);
  SeparatedPair z = zero_instantiate(sp, instantiation_set(sp));
  for (const DiffAtom& d : z.diffs) {
    std::vector<Term> f = z.phi2;
    f.push_back(s.neg(s.eq(d.value, s.zero())));
    EXPECT_FALSE(base_check(s.conj(f), IndexTheoryKind::IDL).sat) << "level " << d.level;
  }
}

TEST_F(ReductionTest, WriteIndexCount) {
  SeparatedPair two = flatten(s.conj({s.eq(b, s.wr(a, i, e)), s.eq(a, s.wr(b, j, e2))}));
  EXPECT_EQ(count_wr_index_constants(two), 2u);
  SeparatedPair none = flatten(s.le(i, j));
  EXPECT_EQ(count_wr_index_constants(none), 0u);
}

TEST(ReductionColors, PairNamesCarryColors) {
  Problem p = parse_problem(R"(
    (declare-const c1 Array)(declare-const c2 Array)(declare-const a Array)(declare-const i Index)(declare-const e Elem)
    (assert-A (= (rd (wr a i e) i) e))
    (assert-A (<= (diff c1 c2) i))
    (assert-B (= (len c1) (len c2)))
    (assert-B (<= i (diff c1 c2))))");
  Coloring col = color(p.a(), p.b());
  auto [sa, sb] = flatten_pair(p.a(), p.b(), col);
  ASSERT_EQ(sa.writes.size(), 1u);
  EXPECT_EQ(col.tag(sa.writes[0].result.symbol()), Color::AStrict);
  EXPECT_TRUE(sb.writes.empty());
  ASSERT_EQ(sa.diffs.size(), 1u);
  EXPECT_EQ(col.tag(sa.diffs[0].value.symbol()), Color::Common);
  ASSERT_EQ(sb.diffs.size(), 1u);
  EXPECT_EQ(sa.diffs[0].value, sb.diffs[0].value);
}

TEST(ReductionProperty, FlattenSizeIsLinear) {
  std::mt19937 rng(17);
  TermStore s;
  testing::GenConfig cfg;
  testing::FormulaGen gen(s, cfg, rng);
  for (int round = 0; round < 1000; ++round) {
    Term phi = gen.formula();
    SeparatedPair sp = flatten(phi);
    std::size_t in = dag_size(phi), out = dag_size(sp.formulas());
    EXPECT_LE(out, 10 * in) << to_sexpr(phi);
  }
}

TEST(ReductionProperty, ZeroInstantiateIdempotentOnCorpus) {
  std::mt19937 rng(19);
  TermStore s;
  testing::GenConfig cfg;
  testing::FormulaGen gen(s, cfg, rng);
  for (int round = 0; round < 500; ++round) {
    SeparatedPair sp = flatten(gen.formula());
    auto inst = instantiation_set(sp);
    SeparatedPair once = zero_instantiate(sp, inst);
    EXPECT_EQ(zero_instantiate(once, inst).formulas(), once.formulas());
  }
}

}  // namespace
}  // namespace card
