#include <gtest/gtest.h>

#include <cmath>

#include "ppl/singular_series.hpp"
#include "ppl/verify.hpp"

using namespace ppl;

namespace {

const ArithTables& tables() {
  static const ArithTables t = build_tables(1'000'000);
  return t;
}

const Constants& constants() {
  static const Constants c = compute_constants(default_prime_cutoff);
  return c;
}

}  // namespace

TEST(Constants, TwinPrimeConstantPrintedDigits) {
  const auto& c = constants();
  EXPECT_GT(c.c2, 0.6);
  EXPECT_LT(c.c2, 0.7);
  EXPECT_EQ(std::floor(c.c2 * 1e5), 66016.0);
  EXPECT_LE(c.tail_bound, 1e-9);
}

TEST(Constants, FrozenValues) {
  // Pinned from an independent prime-product evaluation with the same tail
  // treatment; the two-cutoff test below checks they are stable.
  const auto& c = constants();
  EXPECT_NEAR(c.c2, 0.660161815845, 2e-10);
  EXPECT_NEAR(c.lconst, 4.4310778297, 1e-8);
  EXPECT_NEAR(c.dconst, 1.3325822758, 1e-8);
  EXPECT_NEAR(c.mconst, -0.0270563252, 1e-8);
  EXPECT_GT(c.lconst, 0.0);
  EXPECT_GT(c.dconst, 0.0);
}

TEST(Constants, TwoCutoffAgreement) {
  const auto lo = compute_constants(1'000'000);
  const auto& hi = constants();
  EXPECT_LT(std::abs(lo.c2 - hi.c2), 1e-8);
  EXPECT_LT(std::abs(lo.lconst - hi.lconst), 1e-8);
  EXPECT_LT(std::abs(lo.mconst - hi.mconst), 1e-8);
  EXPECT_LT(std::abs(lo.dconst - hi.dconst), 1e-8);
  EXPECT_LE(std::abs(lo.c2 - hi.c2), lo.c2_tail + hi.c2_tail);
  EXPECT_LE(std::abs(lo.lconst - hi.lconst), lo.l_tail + hi.l_tail);
  EXPECT_LE(std::abs(lo.mconst - hi.mconst), lo.m_tail + hi.m_tail);
  EXPECT_LE(std::abs(lo.dconst - hi.dconst), lo.d_tail + hi.d_tail);
}

TEST(Constants, CutoffTooSmall) { EXPECT_THROW(compute_constants(999), domain_error); }

TEST(SingularSeries, Examples) {
  const auto& c = constants();
  EXPECT_EQ(singular_series(3, c), 0.0);
  EXPECT_DOUBLE_EQ(singular_series(2, c), 2 * c.c2);
  EXPECT_NEAR(singular_series(2, c), 1.32032, 1e-5);
  EXPECT_DOUBLE_EQ(singular_series(6, c), 4 * c.c2);
  EXPECT_DOUBLE_EQ(singular_series(-6, c), singular_series(6, c));
  EXPECT_THROW(singular_series(0, c), domain_error);
}

TEST(SingularSeries, PowersOfTwo) {
  const auto& c = constants();
  for (std::int64_t k = 2; k <= (std::int64_t{1} << 40); k *= 2) EXPECT_DOUBLE_EQ(singular_series(k, c), 2 * c.c2);
}

TEST(SingularTable, MatchesScalarAndInvariants) {
  const auto& c = constants();
  const auto st = build_singular_table(20'000, tables(), c);
  for (std::uint64_t k = 1; k <= 20'000; ++k) {
    const double v = st.values[k];
    ASSERT_EQ(v, singular_series(static_cast<std::int64_t>(k), c)) << k;
    if (k % 2) {
      ASSERT_EQ(v, 0.0);
    } else {
      ASSERT_GE(v, 2 * c.c2);
    }
  }
}

TEST(SingularTable, DependsOnlyOnOddKernel) {
  const auto& c = constants();
  const auto st = build_singular_table(10'000, tables(), c);
  for (std::uint64_t k = 2; k <= 10'000; k += 2) {
    const auto k2 = 2 * oracle::odd_radical(tables(), k);
    ASSERT_DOUBLE_EQ(st.values[k], singular_series(static_cast<std::int64_t>(k2), c)) << k;
  }
}

TEST(TruncatedSingular, Examples) {
  const auto& t = tables();
  const auto t1 = truncated_singular(1.0, 50, t);
  for (std::uint64_t k = 0; k <= 50; ++k) EXPECT_DOUBLE_EQ(t1.values[k], 1.0);
  EXPECT_DOUBLE_EQ(truncated_singular(3.0, 0, t).values[0], 2.5);
  EXPECT_DOUBLE_EQ(truncated_singular(5.0, 0, t).values[0], 2.75);
  EXPECT_THROW(truncated_singular(2e6, 0, t), range_error);
  EXPECT_THROW(truncated_singular(0.5, 0, t), domain_error);
}

TEST(TruncatedSingular, MatchesDirectDefinition) {
  // Ramanujan sums from the exponential-sum oracle, not the closed form.
  const auto& t = tables();
  const double y = 60.0;
  const auto tt = truncated_singular(y, 300, t);
  std::vector<std::vector<cplx>> roots(61);
  for (std::uint64_t q = 1; q <= 60; ++q) roots[q] = oracle::root_table(q);
  for (std::int64_t k = 0; k <= 300; ++k) {
    double s = 0.0;
    for (std::uint64_t q = 1; q <= 60; ++q) {
      if (t.mobius(q) == 0) continue;
      const double ph = t.totient(q);
      s += oracle::ramanujan_exponential(q, -k, roots[q]).real() / (ph * ph);
    }
    ASSERT_NEAR(tt.values[static_cast<std::size_t>(k)], s, 1e-10) << k;
  }
}

TEST(TruncatedSingular, ZeroIsNondecreasingAndEven) {
  const auto& t = tables();
  double prev = 0.0;
  for (double y = 1; y <= 2000; y += 7) {
    const double v = truncated_zero(t, y);
    ASSERT_GE(v, prev);
    prev = v;
  }
  EXPECT_DOUBLE_EQ(truncated_singular_at(-14, 100, t), truncated_singular_at(14, 100, t));
  EXPECT_EQ(truncated_singular_at(0, 100, t), truncated_zero(t, 100));
}

TEST(TruncatedSingular, ThreadCountDoesNotChangeBits) {
  const auto& t = tables();
  set_thread_count(1);
  const auto a = truncated_singular(300.0, 20'000, t);
  set_thread_count(3);
  const auto b = truncated_singular(300.0, 20'000, t);
  set_thread_count(1);
  EXPECT_EQ(a.values, b.values);
}

TEST(SeriesConvergence, Examples) {
  const auto& t = tables();
  const auto& c = constants();
  const auto d = series_convergence_check(2, {10, 100, 1000}, c, t);
  EXPECT_GT(d[0].second, d[1].second);
  EXPECT_GT(d[1].second, d[2].second);
  EXPECT_LT(d[2].second, 10.0 / 1000.0);
  EXPECT_NEAR(series_convergence_check(2, {1}, c, t)[0].second, 0.3203, 1e-4);
  const auto d4 = series_convergence_check(4, {10, 100}, c, t);
  EXPECT_GT(d4[0].second, d4[1].second);
  EXPECT_THROW(series_convergence_check(3, {10}, c, t), domain_error);
}

TEST(SeriesConvergence, AllEvenKUpTo100) {
  const auto& t = tables();
  const auto& c = constants();
  for (std::int64_t k = 2; k <= 100; k += 2) {
    const auto d = series_convergence_check(k, {1e2, 1e3, 1e4}, c, t);
    EXPECT_GT(d[0].second, d[1].second) << k;
    EXPECT_GT(d[1].second, d[2].second) << k;
  }
}

TEST(Hildebrand, Examples) {
  const auto& t = tables();
  const auto& c = constants();
  EXPECT_DOUBLE_EQ(hildebrand_check(1.0, 1, c, t).lhs, 1.0);
  for (std::uint64_t k : {1u, 6u}) {
    const auto h = hildebrand_check(1e4, k, c, t);
    EXPECT_LE(std::abs(h.residual), 10.0 * h.h_over_sqrtx) << k;
  }
  const auto h6 = hildebrand_check(1e4, 6, c, t);
  EXPECT_NEAR(h6.g, std::log(2.0) / 2 + std::log(3.0) / 3, 1e-15);
  EXPECT_NEAR(h6.h, (1 + 1 / std::sqrt(2.0)) * (1 + 1 / std::sqrt(3.0)), 1e-15);
  EXPECT_THROW(hildebrand_check(2e6, 1, c, t), range_error);
}

TEST(LogSeries, EnvelopeBelowTwo) {
  const double worst = log_series_envelope(tables(), 10, 1'000'000);
  EXPECT_LE(worst, 2.0);
  EXPECT_GT(worst, 1.0);  // the O(1) is about gamma + sum log p/(p(p-1)) = D
}
