#pragma once

// Truncated divisor-sum approximations to Lambda(n):
//
//   Lambda_R(n) = sum_{d | n, d <= R} mu(d) log(R/d)
//   lambda_R(n) = sum_{q <= R} mu(q)/phi(q) c_q(-n)
//               = sum_{d | n, d <= R} (d mu(d)/phi(d)) sum_{m <= R/d, (m,d)=1} mu(m)^2/phi(m)
//
// their exponential sums S_R and the major-arc sum, and the second-moment
// and L1 estimates built on them.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ppl/arith_tables.hpp"
#include "ppl/errors.hpp"
#include "ppl/exp_sums.hpp"
#include "ppl/fft.hpp"
#include "ppl/singular_series.hpp"
#include "ppl/summation.hpp"

namespace ppl {

using rational = boost::multiprecision::cpp_rational;

enum class approx_kind { lambda_R, lambda_refined };

inline const char* to_string(approx_kind k) { return k == approx_kind::lambda_R ? "lambda_R" : "lambda_refined"; }

struct ApproxTable {
  std::uint64_t N = 0;
  double R = 1.0;
  approx_kind kind = approx_kind::lambda_R;
  std::vector<double> values;                 // index 0..N, values[0] = 0
  std::optional<std::vector<rational>> exact;  // lambda_refined only, index 0..N

  // Coefficients of the associated exponential sum.
  const std::vector<double>& coefficients() const { return values; }
};

namespace detail {

inline std::uint64_t validate_R(const ArithTables& t, std::uint64_t N, double R, const char* who) {
  if (!(R >= 1.0)) throw domain_error(std::string(who) + ": R must be >= 1");
  if (N > t.limit()) throw range_error(std::string(who) + ": N exceeds table limit");
  if (R > static_cast<double>(N)) throw range_error(std::string(who) + ": need R <= N");
  return static_cast<std::uint64_t>(std::floor(R));
}

// values[n] += weight[d] for every d | n with weight[d] != 0, d ascending
// per n. Parallel over blocks of n, so the per-n order never changes.
inline void divisor_scatter(std::vector<double>& values, const std::vector<double>& weight) {
  const std::uint64_t N = values.size() - 1;
  const std::uint64_t dmax = weight.size() - 1;
  const std::size_t chunks = (N + reduction_chunk) / reduction_chunk;
  parallel_chunks(chunks, [&](std::size_t c) {
    const std::uint64_t lo = std::max<std::uint64_t>(1, c * reduction_chunk);
    const std::uint64_t hi = std::min<std::uint64_t>(N + 1, (c + 1) * reduction_chunk);
    if (lo >= hi) return;
    for (std::uint64_t d = 1; d <= dmax; ++d) {
      const double w = weight[d];
      if (w == 0.0) continue;
      for (std::uint64_t n = (lo + d - 1) / d * d; n < hi; n += d) values[n] += w;
    }
  });
}

// sum_{m <= x, (m, d) = 1} mu(m)^2 / phi(m), by filtered summation.
inline double coprime_mu2_phi_sum(const ArithTables& t, std::uint64_t x, std::uint64_t d) {
  return deterministic_sum(1, x + 1, [&](std::size_t m) {
    if (t.mobius(m) == 0 || std::gcd<std::uint64_t>(m, d) != 1) return 0.0;
    return 1.0 / static_cast<double>(t.totient(m));
  });
}

inline rational coprime_mu2_phi_sum_exact(const ArithTables& t, std::uint64_t x, std::uint64_t d) {
  rational s = 0;
  for (std::uint64_t m = 1; m <= x; ++m) {
    if (t.mobius(m) == 0 || std::gcd<std::uint64_t>(m, d) != 1) continue;
    s += rational(1, t.totient(m));
  }
  return s;
}

}  // namespace detail

// Divisor-convolution sieve: mu(d) log(R/d) is added to every multiple of
// each squarefree d <= R.
inline ApproxTable lambda_R_table(const ArithTables& t, std::uint64_t N, double R) {
  const std::uint64_t dmax = detail::validate_R(t, N, R, "lambda_R_table");
  std::vector<double> weight(dmax + 1, 0.0);
  for (std::uint64_t d = 1; d <= dmax; ++d) {
    if (t.mobius(d) != 0) weight[d] = t.mobius(d) * std::log(R / static_cast<double>(d));
  }
  ApproxTable a;
  a.N = N;
  a.R = R;
  a.kind = approx_kind::lambda_R;
  a.values.assign(N + 1, 0.0);
  detail::divisor_scatter(a.values, weight);
  return a;
}

// Divisor form: a(d, R) = (d mu(d)/phi(d)) sum_{m <= R/d, (m,d)=1} mu(m)^2/phi(m)
// is added to every multiple of d. with_exact also fills the rational table
// (small N only).
inline ApproxTable lambda_refined_table(const ArithTables& t, std::uint64_t N, double R, bool with_exact = false) {
  const std::uint64_t dmax = detail::validate_R(t, N, R, "lambda_refined_table");
  std::vector<double> weight(dmax + 1, 0.0);
  std::vector<rational> exact_weight;
  if (with_exact) exact_weight.assign(dmax + 1, rational(0));
  for (std::uint64_t d = 1; d <= dmax; ++d) {
    const int mu = t.mobius(d);
    if (mu == 0) continue;
    const std::uint64_t x = dmax / d;  // m <= R/d  <=>  m <= floor(floor(R)/d)
    const double phi = t.totient(d);
    weight[d] = static_cast<double>(d) * mu / phi * detail::coprime_mu2_phi_sum(t, x, d);
    if (with_exact) {
      exact_weight[d] = rational(static_cast<std::int64_t>(d) * mu, t.totient(d)) *
                        detail::coprime_mu2_phi_sum_exact(t, x, d);
    }
  }
  ApproxTable a;
  a.N = N;
  a.R = R;
  a.kind = approx_kind::lambda_refined;
  a.values.assign(N + 1, 0.0);
  detail::divisor_scatter(a.values, weight);
  if (with_exact) {
    std::vector<rational> ex(N + 1, rational(0));
    for (std::uint64_t d = 1; d <= dmax; ++d) {
      if (exact_weight[d] == 0) continue;
      for (std::uint64_t n = d; n <= N; n += d) ex[n] += exact_weight[d];
    }
    a.exact = std::move(ex);
  }
  return a;
}

// Ramanujan-expansion form, straight from the definition. Independent of
// the divisor form; used to cross-check it.
inline std::vector<double> lambda_refined_ramanujan(const ArithTables& t, std::uint64_t N, double R) {
  const std::uint64_t qmax = detail::validate_R(t, N, R, "lambda_refined_ramanujan");
  std::vector<double> v(N + 1, 0.0);
  std::vector<double> terms;
  for (std::uint64_t n = 1; n <= N; ++n) {
    terms.clear();
    for (std::uint64_t q = 1; q <= qmax; ++q) {
      if (t.mobius(q) == 0) continue;
      terms.push_back(t.mobius(q) * static_cast<double>(ramanujan_sum(t, q, -static_cast<std::int64_t>(n))) /
                      static_cast<double>(t.totient(q)));
    }
    v[n] = pairwise_sum(terms);
  }
  return v;
}

inline std::vector<rational> lambda_refined_ramanujan_exact(const ArithTables& t, std::uint64_t N, double R) {
  const std::uint64_t qmax = detail::validate_R(t, N, R, "lambda_refined_ramanujan_exact");
  std::vector<rational> v(N + 1, rational(0));
  for (std::uint64_t n = 1; n <= N; ++n) {
    for (std::uint64_t q = 1; q <= qmax; ++q) {
      if (t.mobius(q) == 0) continue;
      v[n] += rational(t.mobius(q) * ramanujan_sum(t, q, -static_cast<std::int64_t>(n)), t.totient(q));
    }
  }
  return v;
}

// ---------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------

struct MomentEntry {
  std::string name;
  double sum = 0.0;
  double main_term = 0.0;
  double residual_over_N = 0.0;  // (sum - main_term) / N
};

struct MomentReport {
  std::uint64_t N = 0;
  double R = 0.0;
  approx_kind kind = approx_kind::lambda_R;
  double L = std::numeric_limits<double>::quiet_NaN();  // L(R), refined kind only
  std::vector<MomentEntry> entries;
};

// Second moment and cross moment with Lambda for the table's kind:
//   Lambda_R:  sum Lambda_R^2 ~ N log R,   sum Lambda_R Lambda ~ N log R
//   lambda_R:  sum lambda_R^2 ~ N L(R),    sum lambda_R Lambda ~ psi(N) L(R)
inline MomentReport moment_suite(const ArithTables& t, const ApproxTable& a) {
  const std::uint64_t N = a.N;
  const double dN = static_cast<double>(N);
  if (a.kind == approx_kind::lambda_refined && a.R > std::sqrt(dN) * (1.0 + 1e-12)) {
    throw range_error("moment_suite: lambda_R second moment needs R <= sqrt(N)");
  }
  const double second = deterministic_sum(1, N + 1, [&](std::size_t n) { return a.values[n] * a.values[n]; });
  const double cross = deterministic_sum(1, N + 1, [&](std::size_t n) { return a.values[n] * t.mangoldt(n); });
  MomentReport r;
  r.N = N;
  r.R = a.R;
  r.kind = a.kind;
  auto entry = [&](std::string name, double sum, double main) {
    r.entries.push_back({std::move(name), sum, main, (sum - main) / dN});
  };
  if (a.kind == approx_kind::lambda_R) {
    entry("sum_LambdaR_sq", second, dN * std::log(a.R));
    entry("sum_LambdaR_Lambda", cross, dN * std::log(a.R));
  } else {
    const double LR = truncated_zero(t, a.R);
    r.L = LR;
    entry("sum_lambdaR_sq", second, dN * LR);
    entry("sum_lambdaR_Lambda", cross, chebyshev_psi(t, N).psi * LR);
  }
  return r;
}

// sum_{n<=N} (Lambda(n) - values[n])^2, which by Parseval is the L2
// distance between S and the approximating exponential sum.
inline double l2_distance(const ArithTables& t, const ApproxTable& a) {
  return deterministic_sum(1, a.N + 1, [&](std::size_t n) {
    const double d = t.mangoldt(n) - a.values[n];
    return d * d;
  });
}

struct ParsevalBridge {
  double coefficient_sum = 0.0;  // l2_distance
  double grid_integral = 0.0;    // grid mean of |S - S_R|^2
  double relative_gap = 0.0;
};

inline ParsevalBridge parseval_bridge(const ArithTables& t, const ApproxTable& a, std::uint64_t M = 0) {
  if (M == 0) M = next_pow2(2 * a.N + 2);
  std::vector<double> diff(a.N + 1, 0.0);
  for (std::uint64_t n = 1; n <= a.N; ++n) diff[n] = t.mangoldt(n) - a.values[n];
  const auto ev = sample_grid(from_real(diff), M);
  ParsevalBridge b;
  b.coefficient_sum = l2_distance(t, a);
  b.grid_integral = grid_mean(ev.values, [](cplx z) { return std::norm(z); });
  b.relative_gap = std::abs(b.grid_integral - b.coefficient_sum) / std::max(b.coefficient_sum, 1e-300);
  return b;
}

// sum_{n<=N} |lambda_R(n) - Lambda_R(n)| / N.
inline double average_refinement_gap(const ApproxTable& lr, const ApproxTable& refined) {
  if (lr.N != refined.N) throw domain_error("average_refinement_gap: tables differ in N");
  return deterministic_sum(1, lr.N + 1, [&](std::size_t n) { return std::abs(lr.values[n] - refined.values[n]); }) /
         static_cast<double>(lr.N);
}

// ---------------------------------------------------------------------
// L1 norms of the approximating sums
// ---------------------------------------------------------------------

struct L1ApproxReport {
  std::uint64_t N = 0;
  double R = 0.0;
  NormEstimates S_R;       // sum Lambda_R(n) e(n alpha)
  NormEstimates curly_SR;  // sum lambda_R(n) e(n alpha)
  double ratio_S_R = 0.0;  // l1 / (R log N)
  double ratio_curly = 0.0;
};

// M = 0 applies the L1 grid policy to each sum separately, with expected
// norm R log N and Lipschitz bound 2 pi sum n |a_n|.
inline L1ApproxReport l1_approx_sums(const ArithTables& t, std::uint64_t N, double R, std::uint64_t M = 0) {
  const auto lr = lambda_R_table(t, N, R);
  const auto refined = lambda_refined_table(t, N, R);
  const double dN = static_cast<double>(N);
  const double scale = R * std::log(dN);
  auto norms = [&](const std::vector<double>& a) {
    const double lip = lipschitz_bound(a);
    const std::uint64_t m = M != 0 ? M : l1_grid_policy(N, lip, scale);
    return l1_norm_streaming(a, m, lip);
  };
  L1ApproxReport r;
  r.N = N;
  r.R = R;
  r.S_R = norms(lr.values);
  r.curly_SR = norms(refined.values);
  r.ratio_S_R = r.S_R.l1 / scale;
  r.ratio_curly = r.curly_SR.l1 / scale;
  return r;
}

// ---------------------------------------------------------------------
// Assembly of the L1 upper bound for S at R = N^{1/2} / (log N)^{3/2}
// ---------------------------------------------------------------------

struct L1AssemblyReport {
  std::uint64_t N = 0, M = 0;
  double R = 0.0;
  double l1 = 0.0;  // grid mean |S|
  double l1_error_bound = 0.0;
  double l1_SR = 0.0;        // grid mean |S_R|
  double l1_diff = 0.0;      // grid mean |S - S_R|
  double l2_distance = 0.0;  // sum (Lambda - Lambda_R)^2
  double computed_bound = 0.0;  // sqrt(l2_distance) + l1_SR
  bool triangle_holds = false;  // l1 <= l1_diff + l1_SR
  bool cauchy_schwarz_holds = false;  // l1_diff <= sqrt(l2_distance)
  bool within_computed_bound = false;
  double asymptotic_bound = 0.0;  // sqrt(N log(N/R) + c N) + c' R log N
  double shape_ratio = 0.0;       // l1^2 / (N log N)
  double shape_limit = 0.0;       // 1/2 + 3 loglog N / (2 log N) + c / log N
  bool shape_holds = false;
  double half_ratio = 0.0;  // l1^2 / ((1/2) N log N)
};

inline L1AssemblyReport l1_assembly(const ArithTables& t, std::uint64_t N, std::uint64_t M = 0,
                                        double on_envelope = 5.0, double sum_envelope = 20.0) {
  if (N < 16) throw domain_error("l1_assembly: N must be >= 16");
  const double dN = static_cast<double>(N);
  const double logN = std::log(dN);
  L1AssemblyReport r;
  r.N = N;
  r.R = std::max(1.0, std::sqrt(dN) / std::pow(logN, 1.5));
  r.M = M != 0 ? M : default_l1_grid(t, N);

  const auto lr = lambda_R_table(t, N, r.R);
  const auto a = mangoldt_coefficients(t, N);
  const std::vector<std::vector<double>> polys{a, lr.values};
  const auto means = stream_grid_means<3>(polys, r.M, [](std::span<const cplx> v) {
    return std::array<double, 3>{std::abs(v[0]), std::abs(v[1]), std::abs(v[0] - v[1])};
  });
  r.l1 = means[0];
  r.l1_SR = means[1];
  r.l1_diff = means[2];
  r.l1_error_bound = lipschitz_bound(a) / (2.0 * static_cast<double>(r.M));
  r.l2_distance = l2_distance(t, lr);
  r.computed_bound = std::sqrt(r.l2_distance) + r.l1_SR;
  r.triangle_holds = r.l1 <= (r.l1_diff + r.l1_SR) * (1.0 + 1e-12);
  r.cauchy_schwarz_holds = r.l1_diff <= std::sqrt(r.l2_distance) * (1.0 + 1e-9);
  r.within_computed_bound = r.l1 <= r.computed_bound * (1.0 + 1e-9);
  r.asymptotic_bound = std::sqrt(dN * std::log(dN / r.R) + on_envelope * dN) + sum_envelope * r.R * logN;
  r.shape_ratio = r.l1 * r.l1 / (dN * logN);
  r.shape_limit = 0.5 + 1.5 * std::log(logN) / logN + on_envelope / logN;
  r.shape_holds = r.shape_ratio <= r.shape_limit;
  r.half_ratio = r.l1 * r.l1 / (0.5 * dN * logN);
  return r;
}

}  // namespace ppl
