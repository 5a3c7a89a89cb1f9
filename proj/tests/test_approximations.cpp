#include <gtest/gtest.h>

#include <cmath>

#include "ppl/approximations.hpp"
#include "ppl/verify.hpp"

using namespace ppl;

namespace {

const ArithTables& tables() {
  static const ArithTables t = build_tables(100'000);
  return t;
}

const L1AssemblyReport& assembly_2_14() {
  static const L1AssemblyReport r = l1_assembly(tables(), 1 << 14);
  return r;
}

}  // namespace

TEST(LambdaR, Examples) {
  const auto& t = tables();
  const auto a = lambda_R_table(t, 100, 2.0);
  EXPECT_NEAR(a.values[6], std::log(2.0), 1e-15);
  EXPECT_NEAR(a.values[1], std::log(2.0), 1e-15);
  const auto b = lambda_R_table(t, 1000, 37.5);
  EXPECT_NEAR(b.values[1], std::log(37.5), 1e-15);
  for (std::uint64_t p : {2u, 3u, 5u, 31u, 37u}) EXPECT_NEAR(b.values[p], std::log(static_cast<double>(p)), 1e-12);
}

TEST(LambdaR, MatchesDivisorSumDefinition) {
  const auto& t = tables();
  const double R = 23.7;
  const auto a = lambda_R_table(t, 3000, R);
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    double s = 0.0;
    for (std::uint64_t d = 1; d <= 23 && d <= n; ++d) {
      if (n % d == 0) s += t.mobius(d) * std::log(R / d);
    }
    ASSERT_NEAR(a.values[n], s, 1e-12) << n;
  }
}

TEST(LambdaR, TruncationIdentity) {
  const auto& t = tables();
  for (double R : {20.0, 50.0, 100.0, 317.5}) {
    const auto a = lambda_R_table(t, 10'000, R);
    for (std::uint64_t n = 2; n <= R; ++n) ASSERT_NEAR(a.values[n], t.mangoldt(n), 1e-12) << R << " " << n;
  }
}

TEST(LambdaR, RangeErrors) {
  const auto& t = tables();
  EXPECT_THROW(lambda_R_table(t, 100, 0.5), domain_error);
  EXPECT_THROW(lambda_R_table(t, 100, 101.0), range_error);
  EXPECT_THROW(lambda_R_table(t, 200'000, 10.0), range_error);
  EXPECT_THROW(lambda_refined_table(t, 100, 0.9), domain_error);
}

TEST(LambdaR, ThreadCountDoesNotChangeBits) {
  set_thread_count(1);
  const auto a = lambda_R_table(tables(), 50'000, 150.0);
  set_thread_count(3);
  const auto b = lambda_R_table(tables(), 50'000, 150.0);
  set_thread_count(1);
  EXPECT_EQ(a.values, b.values);
}

TEST(LambdaRefined, Examples) {
  const auto& t = tables();
  const auto r1 = lambda_refined_table(t, 50, 1.0);
  for (std::uint64_t n = 1; n <= 50; ++n) EXPECT_DOUBLE_EQ(r1.values[n], 1.0);
  const auto r2 = lambda_refined_table(t, 50, 2.0);
  for (std::uint64_t n = 1; n <= 50; ++n) EXPECT_NEAR(r2.values[n], n % 2 ? 2.0 : 0.0, 1e-15) << n;
}

TEST(LambdaRefined, DualFormsAgreeInDouble) {
  const auto& t = tables();
  for (double R = 1; R <= 50; R += 1) {
    const auto a = lambda_refined_table(t, 500, R);
    const auto b = lambda_refined_ramanujan(t, 500, R);
    for (std::uint64_t n = 1; n <= 500; ++n) {
      ASSERT_NEAR(a.values[n], b[n], 1e-9 * std::max(1.0, std::abs(b[n]))) << R << " " << n;
    }
  }
}

TEST(LambdaRefined, DualFormsAgreeExactly) {
  const auto& t = tables();
  for (double R : {1.0, 2.0, 6.0, 13.0, 30.0, 49.5, 50.0}) {
    const auto a = lambda_refined_table(t, 500, R, true);
    const auto b = lambda_refined_ramanujan_exact(t, 500, R);
    ASSERT_TRUE(a.exact.has_value());
    for (std::uint64_t n = 1; n <= 500; ++n) ASSERT_EQ((*a.exact)[n], b[n]) << R << " " << n;
    // The double table is the rounded rational.
    for (std::uint64_t n = 1; n <= 500; ++n) {
      ASSERT_NEAR(a.values[n], static_cast<double>(b[n]), 1e-12 * std::max(1.0, std::abs(a.values[n])));
    }
  }
}

TEST(LambdaRefined, FullDualFormSuite) {
  const VerifyContext cx{tables(), Constants{}, RunConfig{}};
  VerifyReport rep;
  check_dual_form(rep, cx);
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_EQ(rep.entries[0].status, check_status::pass) << rep.entries[0].detail;
}

TEST(Moments, DeskScaleEnvelopes) {
  const auto& t = tables();
  const auto a = lambda_R_table(t, 10'000, 50.0);
  const auto m = moment_suite(t, a);
  ASSERT_EQ(m.entries.size(), 2u);
  for (const auto& e : m.entries) EXPECT_LE(std::abs(e.residual_over_N), 5.0) << e.name;
  EXPECT_EQ(m.entries[0].main_term, 10'000 * std::log(50.0));

  const auto b = lambda_refined_table(t, 10'000, 50.0);
  const auto mb = moment_suite(t, b);
  EXPECT_EQ(mb.entries[0].name, "sum_lambdaR_sq");
  EXPECT_LE(std::abs(mb.entries[0].residual_over_N), 5.0);
  EXPECT_EQ(mb.L, truncated_zero(t, 50.0));
  EXPECT_EQ(mb.L, truncated_singular(50.0, 0, t).values[0]);
  EXPECT_THROW(moment_suite(t, lambda_refined_table(t, 10'000, 101.0)), range_error);
}

TEST(Distance, Examples) {
  const auto& t = tables();
  const double dN = 10'000;
  const auto a = lambda_R_table(t, 10'000, 100.0);
  const double r = l2_distance(t, a) / (dN * std::log(dN / 100.0));
  EXPECT_GE(r, 0.5);
  EXPECT_LE(r, 1.5);
  // R = N: Lambda_R = Lambda except at n = 1, where it is log N.
  const auto full = lambda_R_table(t, 2000, 2000.0);
  const double d = l2_distance(t, full);
  EXPECT_NEAR(d, std::pow(std::log(2000.0), 2), 1e-9);
}

TEST(Distance, ParsevalBridge) {
  const auto a = lambda_R_table(tables(), 500, 20.0);
  const auto b = parseval_bridge(tables(), a);
  EXPECT_LE(b.relative_gap, 1e-9);
  const auto c = lambda_refined_table(tables(), 500, 20.0);
  EXPECT_LE(parseval_bridge(tables(), c).relative_gap, 1e-9);
}

TEST(RefinementGap, AverageIsSmall) {
  const auto a = lambda_R_table(tables(), 10'000, 100.0);
  const auto b = lambda_refined_table(tables(), 10'000, 100.0);
  EXPECT_LE(average_refinement_gap(a, b), 2.0);
}

TEST(L1Sums, RIsOne) {
  const auto r = l1_approx_sums(tables(), 1000, 1.0);
  EXPECT_EQ(r.S_R.l1, 0.0);
  // The refined sum is the Dirichlet kernel; its L1 norm is (4/pi^2) log N + O(1).
  const double lg = std::log(1000.0);
  EXPECT_GE(r.curly_SR.l1, 0.4 * lg);
  EXPECT_LE(r.curly_SR.l1, lg);
  EXPECT_LE(r.curly_SR.l1_error_bound, 0.01 * r.curly_SR.l1);
}

TEST(L1Sums, DeskScaleRatios) {
  const auto r = l1_approx_sums(tables(), 10'000, 100.0);
  EXPECT_LE(r.ratio_S_R, 20.0);
  EXPECT_LE(r.ratio_curly, 20.0);
  EXPECT_GT(r.ratio_S_R, 0.0);
}

TEST(L1Assembly, AssemblyAt2To14) {
  const auto& r = assembly_2_14();
  EXPECT_TRUE(r.triangle_holds);
  EXPECT_TRUE(r.cauchy_schwarz_holds);
  EXPECT_TRUE(r.within_computed_bound);
  EXPECT_TRUE(r.shape_holds);
  EXPECT_LE(r.l1_error_bound, 0.01 * r.l1);
  EXPECT_THROW(l1_assembly(tables(), 15), domain_error);
}

TEST(L1Assembly, HalfRatioTrend) {
  const auto a = l1_assembly(tables(), 1 << 10);
  const auto& b = assembly_2_14();
  EXPECT_LE(b.half_ratio, 1.1 * a.half_ratio);
}
