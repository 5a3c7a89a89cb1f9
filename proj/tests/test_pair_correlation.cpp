#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ppl/pair_correlation.hpp"
#include "ppl/verify.hpp"

using namespace ppl;

namespace {

const ArithTables& tables() {
  static const ArithTables t = build_tables(200'000);
  return t;
}

const Constants& constants() {
  static const Constants c = compute_constants(default_prime_cutoff);
  return c;
}

}  // namespace

TEST(Psi2Direct, HandValuesAtTen) {
  const auto pc = psi2_direct(tables(), 10);
  const double l2 = std::log(2.0), l3 = std::log(3.0), l5 = std::log(5.0), l7 = std::log(7.0);
  EXPECT_NEAR(pc.counts[0], 3 * l2 * l2 + 2 * l3 * l3 + l5 * l5 + l7 * l7, 1e-12);
  EXPECT_NEAR(pc.counts[0], 10.232113665556, 1e-12);
  EXPECT_NEAR(pc.counts[1], l2 * l3 + l3 * l2 + l2 * l5 + l7 * l2 + l2 * l3, 1e-12);
  EXPECT_NEAR(pc.counts[1], 4.748879515987, 1e-12);
  EXPECT_EQ(pc[10], 0.0);
  EXPECT_EQ(pc[-1], pc[1]);
}

TEST(Psi2Direct, ScaleCap) {
  const auto big = build_tables(10'001);
  EXPECT_THROW(psi2_direct(big, 10'001), scale_error);
}

TEST(Psi2Fft, MatchesDirectAtTen) {
  const auto a = psi2_direct(tables(), 10);
  const auto b = psi2_fft(tables(), 10);
  for (int k = 0; k <= 10; ++k) EXPECT_NEAR(a.counts[k], b.counts[k], 1e-9);
  EXPECT_EQ(b.transform_length, 32u);
  EXPECT_LT(b.max_imag, 1e-6);
}

TEST(Psi2Fft, MatchesDirectOnRandomN) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> d(100, 2000);
  for (int i = 0; i < 20; ++i) {
    const auto N = d(rng);
    const auto a = psi2_direct(tables(), N);
    const auto b = psi2_fft(tables(), N);
    for (std::uint64_t k = 0; k <= N; ++k) ASSERT_NEAR(a.counts[k], b.counts[k], 1e-6) << N << " " << k;
    ASSERT_LT(b.max_imag, 1e-6);
  }
}

TEST(Psi2, StructuralInvariants) {
  const std::uint64_t N = 3000;
  const auto pc = psi2_fft(tables(), N);
  for (std::uint64_t k = 0; k <= N; ++k) ASSERT_GE(pc.counts[k], -1e-6);
  EXPECT_NEAR(pc.counts[N - 1], 0.0, 1e-6);
  EXPECT_NEAR(pc.counts[N], 0.0, 1e-6);
}

TEST(Psi2, ThreadCountDoesNotChangeBits) {
  set_thread_count(1);
  const auto a = psi2_direct(tables(), 9000);
  set_thread_count(4);
  const auto b = psi2_direct(tables(), 9000);
  set_thread_count(1);
  EXPECT_EQ(a.counts, b.counts);
}

TEST(FirstMoment, IdentityAndHlResidual) {
  const auto& c = constants();
  for (std::uint64_t N : {1000u, 10000u}) {
    const auto pc = psi2_direct(tables(), N);
    const auto st = build_singular_table(N, tables(), c);
    const auto psi = chebyshev_psi(tables(), N);
    const auto fm = first_moment_checks(pc, st, psi);
    EXPECT_LT(std::abs(fm.identity_residual), 1e-6 * psi.psi * psi.psi) << N;
    EXPECT_LE(std::abs(fm.hl_residual_over_NlogN), 5.0) << N;
  }
}

TEST(FirstMoment, InconsistentInputs) {
  const auto pc = psi2_direct(tables(), 100);
  const auto st = build_singular_table(100, tables(), constants());
  EXPECT_THROW(first_moment_checks(pc, st, chebyshev_psi(tables(), 99)), domain_error);
  const auto short_st = build_singular_table(50, tables(), constants());
  EXPECT_THROW(error_term(pc, short_st, constants()), range_error);
}

TEST(ErrorTerm, Table1Rows) {
  const auto& c = constants();
  struct Row {
    std::uint64_t N;
    const char* want;
  };
  for (const Row& r : {Row{1000, "0.09464"}, Row{10000, "0.12327"}, Row{100000, "0.16857"}}) {
    const auto pc = r.N <= direct_oracle_cap ? psi2_direct(tables(), r.N) : psi2_fft(tables(), r.N);
    const auto st = build_singular_table(r.N, tables(), c);
    const auto es = error_term(pc, st, c);
    const auto row = table1_row(es);
    EXPECT_EQ(row.truncated, r.want) << r.N << " full " << es.normalized;
    EXPECT_FALSE(row.boundary_ambiguous);
    EXPECT_GE(es.e_value, 0.0);
    EXPECT_LE(es.odd_contrib, es.e_value);
    EXPECT_NEAR(es.e_value, es.e_value_compensated, 1e-9 * es.e_value);
  }
}

TEST(ErrorTerm, FrozenFullValues) {
  // Full-precision values behind the published five-decimal rows, from an
  // independent FFT/NumPy evaluation.
  const auto& c = constants();
  const auto e3 = error_term(psi2_direct(tables(), 1000), build_singular_table(1000, tables(), c), c);
  EXPECT_NEAR(e3.normalized, 0.094644491, 1e-8);
  const auto e4 = error_term(psi2_direct(tables(), 10000), build_singular_table(10000, tables(), c), c);
  EXPECT_NEAR(e4.normalized, 0.123278158, 1e-8);
}

TEST(Table1Format, TruncatesAndFlags) {
  ErrorSummary es;
  es.N = 1;
  es.normalized = 0.123456789;
  auto row = table1_row(es);
  EXPECT_EQ(row.truncated, "0.12345");
  EXPECT_EQ(row.rounded, "0.12346");
  EXPECT_FALSE(row.boundary_ambiguous);
  es.normalized = 0.12345;  // 12345.000000000002 or 12344.999999999998 after scaling
  row = table1_row(es);
  EXPECT_TRUE(row.boundary_ambiguous);
}

TEST(FigureData, RowsAndOddZeros) {
  const auto& c = constants();
  const auto pc = psi2_direct(tables(), 1000);
  const auto st = build_singular_table(1000, tables(), c);
  const auto rows = figure_data(pc, st, 1, 100);
  ASSERT_EQ(rows.size(), 100u);
  for (const auto& r : rows) {
    if (r.k % 2) {
      EXPECT_EQ(r.hl_prediction, 0.0);
    }
  }
  const auto tail = figure_data(pc, st, 900, 1000);
  ASSERT_EQ(tail.size(), 101u);
  EXPECT_EQ(tail[99].psi2, 0.0);   // k = 999
  EXPECT_EQ(tail[100].psi2, 0.0);  // k = 1000
  const auto k2 = figure_data(pc, st, 2, 2)[0];
  EXPECT_LE(std::abs(k2.psi2 - k2.hl_prediction), 0.35 * k2.hl_prediction);
  EXPECT_THROW(figure_data(pc, st, 0, 10), range_error);
  EXPECT_THROW(figure_data(pc, st, 10, 1001), range_error);
}

TEST(OddLags, PowersOfTwoAndBound) {
  for (std::uint64_t N : {1000u, 10000u}) {
    const auto pc = psi2_direct(tables(), N);
    const double lg = std::log(static_cast<double>(N));
    const double cap = lg * lg * 2.0 * std::log2(static_cast<double>(N));
    for (std::uint64_t k = 1; k <= N; k += 2) {
      double s = 0.0;
      for (std::uint64_t m = 2; m <= N; m *= 2) {
        if (m + k <= N) s += tables().mangoldt(m) * tables().mangoldt(m + k);
        if (m > k) s += tables().mangoldt(m) * tables().mangoldt(m - k);
      }
      ASSERT_NEAR(pc.counts[k], s, 1e-9) << k;
      ASSERT_LE(pc.counts[k], cap);
    }
  }
}

TEST(Trend, NormalizedRows) {
  const auto& c = constants();
  const auto st = build_singular_table(200, tables(), c);
  const auto rows = normalized_error_trend(tables(), st, c, 2, 200);
  ASSERT_EQ(rows.size(), 199u);
  for (const auto& r : rows) EXPECT_GE(r.normalized, 0.0);
  EXPECT_THROW(normalized_error_trend(tables(), st, c, 1, 10), range_error);
}
