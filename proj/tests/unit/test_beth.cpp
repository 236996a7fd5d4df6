#include <gtest/gtest.h>

#include "card/beth.h"
#include "card/engine.h"
#include "card/oracle.h"
#include "card/problem.h"

namespace card {
namespace {

const char* kRead = "(declare-const x Array)(declare-const y Elem)(beth-define (x) (y) (= y (rd x 0)))";
const char* kTwo =
    "(set-index-theory IDL)(declare-const x Index)(declare-const y Index)"
    "(beth-define (x) (y) (and (<= x y) (<= y (succ x))))";
const char* kFree = "(declare-const x Index)(declare-const y Index)(beth-define (x) (y) (<= 0 y))";

std::string render(const std::vector<Term>& ts) {
  std::string out;
  for (Term t : ts) out += (out.empty() ? "" : " ") + to_sexpr(t);
  return out;
}

TEST(Beth, FunctionalDefinition) {
  Problem p = parse_problem(kRead);
  BethQuery q = beth_query(p);
  ImplicitResult r = implicit_define_check(q);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.n, 2);
  auto t = explicit_define_extract(q, r.n);
  EXPECT_EQ(render(t), "(rd x 0)");
  EXPECT_TRUE(validate_explicit(q, t));
}

TEST(Beth, TwoValuedDefinition) {
  Problem p = parse_problem(kTwo);
  BethQuery q = beth_query(p);
  ImplicitResult r = implicit_define_check(q);
  ASSERT_TRUE(r.found);
  EXPECT_EQ(r.n, 3);
  auto t = explicit_define_extract(q, r.n);
  EXPECT_EQ(render(t), "x (succ x)");
  EXPECT_TRUE(validate_explicit(q, t));
  // A single candidate does not cover both values.
  EXPECT_FALSE(validate_explicit(q, {t[0]}));
}

TEST(Beth, PigeonholeConfirmedOnWindow) {
  // Two distinct values of y fit, three do not.
  Problem p = parse_problem(
      "(set-index-theory IDL)(declare-const x Index)(declare-const y1 Index)(declare-const y2 Index)"
      "(declare-const y3 Index)(assert (= x x))");
  TermStore& s = *p.store;
  Term x = s.constant("x");
  auto in = [&](Term y) { return s.conj({s.le(x, y), s.le(y, s.succ(x))}); };
  Term y1 = s.constant("y1"), y2 = s.constant("y2"), y3 = s.constant("y3");
  Term two = s.conj({in(y1), in(y2), s.neg(s.eq(y1, y2))});
  Term three = s.conj({in(y1), in(y2), in(y3), s.neg(s.eq(y1, y2)), s.neg(s.eq(y1, y3)), s.neg(s.eq(y2, y3))});
  AuthorityBound need = authority_bound(three);
  OracleConfig cfg{-need.need_neg, need.need_hi, need.need_elems, need.need_len};
  EXPECT_EQ(enumerate_and_decide(two, cfg).outcome, OracleOutcome::Sat);
  OracleResult r3 = enumerate_and_decide(three, cfg);
  EXPECT_EQ(r3.outcome, OracleOutcome::BoundedUnsat);
  EXPECT_TRUE(r3.authoritative);
}

TEST(Beth, Unconstrained) {
  Problem p = parse_problem(kFree);
  BethQuery q = beth_query(p, 5);
  EXPECT_FALSE(implicit_define_check(q).found);
}

TEST(Beth, DepthBoundReportsNoTerm) {
  Problem p = parse_problem(kRead);
  BethQuery q = beth_query(p, 6, 0);
  try {
    explicit_define_extract(q, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoTermFound);
  }
}

TEST(Beth, ExtractionSizeBoundsImplicitN) {
  for (const char* text : {kRead, kTwo}) {
    Problem p = parse_problem(text);
    BethQuery q = beth_query(p);
    ImplicitResult r = implicit_define_check(q);
    ASSERT_TRUE(r.found);
    auto t = explicit_define_extract(q, r.n);
    EXPECT_LE(r.n, static_cast<int>(t.size()) + 1);
  }
}

TEST(Beth, FreeNamesRejected) {
  Problem p = parse_problem(
      "(declare-const x Index)(declare-const y Index)(declare-const z Index)(beth-define (x) (y) (<= z y))");
  try {
    implicit_define_check(beth_query(p));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

}  // namespace
}  // namespace card
