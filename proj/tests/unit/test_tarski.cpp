#include <gtest/gtest.h>

#include "tfs/compiler.hpp"
#include "tfs/tarski.hpp"

using namespace tfs;

namespace {

TarskiFunction identity(size_t n, size_t d) {
  TarskiFunction c{n, d, {}};
  for (uint64_t k = 0; k < c.points(); ++k) {
    Point x = c.point(k);
    c.table.insert(c.table.end(), x.begin(), x.end());
  }
  return c;
}

TarskiFunction constant(size_t n, const Point& v) {
  TarskiFunction c{n, v.size(), {}};
  for (uint64_t k = 0; k < c.points(); ++k) c.table.insert(c.table.end(), v.begin(), v.end());
  return c;
}

BitString solve(const TarskiFunction& c, uint64_t threshold = 100) {
  Rng rng(0);
  return run_recursive(*tarski_problem(), *tarski_dsr(threshold), encode_tarski(tarski_to_plus(c)), rng);
}

}  // namespace

TEST(Tarski, VerifyBasics) {
  TarskiPlusInstance id = tarski_to_plus(identity(2, 2));
  EXPECT_TRUE(tarski_verify(id, {TarskiKind::Fixpoint, {3, 2}, {}}));
  TarskiPlusInstance k = tarski_to_plus(constant(2, {2, 4}));
  EXPECT_TRUE(tarski_verify(k, {TarskiKind::Fixpoint, {2, 4}, {}}));
  EXPECT_FALSE(tarski_verify(k, {TarskiKind::Fixpoint, {2, 3}, {}}));
  // decreasing map on one axis
  TarskiFunction dec{2, 1, {4, 3, 2, 1}};
  TarskiPlusInstance di = tarski_to_plus(dec);
  EXPECT_TRUE(tarski_verify(di, {TarskiKind::Violation, {1}, {2}}));
  EXPECT_FALSE(tarski_verify(di, {TarskiKind::Violation, {2}, {1}}));
}

TEST(Tarski, Mu) {
  TarskiPlusInstance one;
  one.c = {0, 1, {1}};
  one.t = 2;
  one.lo = one.hi = {1};
  EXPECT_EQ(mu_tarski(one), 2u);
  TarskiPlusInstance box;
  box.c = constant(3, {1, 1});
  box.t = 3;
  box.lo = {1, 1};
  box.hi = {2, 4};
  EXPECT_EQ(mu_tarski(box), 6u);
  EXPECT_EQ(mu_tarski(tarski_to_plus(identity(2, 2))), 7u);
}

TEST(Tarski, EncodingRoundTrip) {
  Rng rng(1);
  TarskiPlusInstance inst = tarski_to_plus(tarski_random(2, 3, rng));
  EXPECT_EQ(encode_tarski(decode_tarski(encode_tarski(inst))), encode_tarski(inst));
  TarskiSolution s{TarskiKind::Violation, {1, 2, 3}, {2, 2, 4}};
  EXPECT_EQ(decode_tarski_solution(inst, encode_tarski_solution(inst, s)), s);
}

TEST(Tarski, IdentityAndConstant) {
  TarskiFunction id = identity(3, 2);
  auto inst = tarski_to_plus(id);
  auto s = decode_tarski_solution(inst, solve(id, 4));
  ASSERT_TRUE(s);
  EXPECT_EQ(s->kind, TarskiKind::Fixpoint);
  TarskiFunction k = constant(3, {5, 2});
  s = decode_tarski_solution(inst, solve(k, 4));
  ASSERT_TRUE(s);
  EXPECT_EQ(*s, (TarskiSolution{TarskiKind::Fixpoint, {5, 2}, {}}));
}

TEST(Tarski, OneDimensionalStep) {
  // f(x) = 11 below 9, 12 from 9 on: unique fixed point 11
  TarskiFunction c{4, 1, {}};
  for (uint32_t x = 1; x <= 16; ++x) c.table.push_back(x < 9 ? 11 : 12);
  ASSERT_TRUE(is_monotone(c));
  auto fps = tarski_fixed_points(c);
  ASSERT_EQ(fps.size(), 1u);
  auto s = decode_tarski_solution(tarski_to_plus(c), solve(c));
  EXPECT_EQ(s->x, fps[0]);
}

TEST(Tarski, RandomMonotoneFindsFixedPoint) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    size_t d = 1 + trial % 3;
    size_t n = d == 3 ? 2 : 3;
    TarskiFunction c = tarski_random_monotone(n, d, rng);
    ASSERT_TRUE(is_monotone(c));
    for (uint64_t th : {0, 8, 100}) {
      auto s = decode_tarski_solution(tarski_to_plus(c), solve(c, th));
      ASSERT_TRUE(s);
      EXPECT_EQ(s->kind, TarskiKind::Fixpoint);
      EXPECT_EQ(c.eval(s->x), s->x);
    }
  }
}

TEST(Tarski, ArbitraryMapsStillVerify) {
  Rng rng(3);
  for (int trial = 0; trial < 600; ++trial) {
    size_t d = 1 + trial % 3;
    TarskiFunction c = tarski_random(d == 3 ? 2 : 3, d, rng);
    for (uint64_t th : {0, 4, 100}) {
      BitString y = solve(c, th);  // run_recursive checks every answer
      EXPECT_TRUE(tarski_problem()->verify(encode_tarski(tarski_to_plus(c)), y));
    }
  }
}

TEST(Tarski, AuditFindsNoViolations) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    TarskiFunction c = trial % 2 ? tarski_random_monotone(2, 3, rng) : tarski_random(2, 3, rng);
    AuditReport r = audit_dsr(*tarski_problem(), *tarski_dsr(0), encode_tarski(tarski_to_plus(c)), rng);
    EXPECT_TRUE(r.passed);
  }
}

TEST(Tarski, CompiledPathIsStepExact) {
  Rng rng(5);
  TarskiFunction c = tarski_random_monotone(2, 2, rng);
  CompiledSod comp = compile_to_sod(tarski_problem(), tarski_dsr(4), encode_tarski(tarski_to_plus(c)));
  std::vector<uint64_t> pots;
  SodAnswer a = solve_sod_pathfollow(comp.instance, comp.source, 10'000'000, &pots);
  EXPECT_EQ(a.steps, comp.target - 1);
  for (uint64_t i = 0; i < pots.size(); ++i) ASSERT_EQ(pots[i], i + 1);
  BitString y = extract_solution(a.vertex, *comp.ctx, AnswerKind::SinkOfDag);
  EXPECT_TRUE(tarski_problem()->verify(encode_tarski(tarski_to_plus(c)), y));
}
