#pragma once

// The exponential sum S(alpha) = sum_{n<=N} Lambda(n) e(n alpha), the
// Dirichlet-type kernel I(alpha), and the major-arc model V_y(alpha), all
// sampled on uniform grids; L1/L2 norms with Riemann-sum error bounds; and
// the quantities a0, W, J, T of the variance lower-bound argument.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ppl/arith_tables.hpp"
#include "ppl/errors.hpp"
#include "ppl/fft.hpp"
#include "ppl/pair_correlation.hpp"
#include "ppl/singular_series.hpp"
#include "ppl/summation.hpp"

namespace ppl {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Lambda(n) at frequency n, n = 0..N (a[0] = 0).
inline std::vector<double> mangoldt_coefficients(const ArithTables& t, std::uint64_t N) {
  if (N > t.limit()) throw range_error("mangoldt_coefficients: N exceeds table limit");
  std::vector<double> a(N + 1, 0.0);
  for (std::uint64_t n = 1; n <= N; ++n) a[n] = t.mangoldt(n);
  return a;
}

// 2 pi sum_n n |a_n|: bounds sup |P'(alpha)| for P(alpha) = sum a_n e(n alpha).
inline double lipschitz_bound(std::span<const double> a) {
  return two_pi * deterministic_sum(0, a.size(), [&](std::size_t n) { return static_cast<double>(n) * std::abs(a[n]); });
}

inline GridEvaluation sample_S(const ArithTables& t, std::uint64_t N, std::uint64_t M) {
  if (M < 2 * N + 2) throw domain_error("sample_S: need M >= 2N + 2");
  const auto a = mangoldt_coefficients(t, N);
  return sample_grid(from_real(a), M);
}

// I(alpha) = sum_{n<=N} e(n alpha).
inline GridEvaluation sample_I(std::uint64_t N, std::uint64_t M) {
  if (M < 2 * N + 2) throw domain_error("sample_I: need M >= 2N + 2");
  std::vector<double> a(N + 1, 1.0);
  a[0] = 0.0;
  return sample_grid(from_real(a), M);
}

// V_y(alpha) through its Fourier series sum_{|k|<=N} (N-|k|) S_y(k) e(k alpha).
inline GridEvaluation V_y_grid(std::uint64_t N, const TruncatedTable& tt, std::uint64_t M) {
  if (M < 2 * N + 2) throw domain_error("V_y_grid: need M >= 2N + 2");
  if (tt.kmax < N) throw range_error("V_y_grid: truncated table shorter than N");
  TrigPoly p;
  p.lo = -static_cast<std::int64_t>(N);
  p.coeff.resize(2 * N + 1);
  const double dN = static_cast<double>(N);
  for (std::int64_t k = p.lo; k <= static_cast<std::int64_t>(N); ++k) {
    p.coeff[static_cast<std::size_t>(k - p.lo)] = (dN - static_cast<double>(detail::abs_u64(k))) * tt[k];
  }
  return sample_grid(p, M);
}

inline GridEvaluation V_y_grid(std::uint64_t N, double y, std::uint64_t M, const ArithTables& t) {
  return V_y_grid(N, truncated_singular(y, N, t), M);
}

// ---------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------

struct NormEstimates {
  double l1 = 0.0;
  double l1_error_bound = 0.0;  // |l1 - int_0^1 |F|| <= this
  double l2sq = 0.0;
  std::uint64_t M_used = 0;
};

// Left-endpoint rule. |F| inherits F's Lipschitz constant, so the rule is
// off by at most lipschitz / (2M).
inline NormEstimates l1_norm(const GridEvaluation& ev, double lipschitz) {
  NormEstimates ne;
  ne.M_used = ev.M;
  ne.l1 = grid_mean(ev.values, [](cplx z) { return std::abs(z); });
  ne.l2sq = grid_mean(ev.values, [](cplx z) { return std::norm(z); });
  ne.l1_error_bound = lipschitz / (2.0 * static_cast<double>(ev.M));
  return ne;
}

// Same estimates for a real-coefficient polynomial, evaluated in cosets so
// the grid never has to fit in memory.
inline NormEstimates l1_norm_streaming(const std::vector<double>& a, std::uint64_t M, double lipschitz) {
  const std::vector<std::vector<double>> polys{a};
  const auto r = stream_grid_means<2>(polys, M, [](std::span<const cplx> v) {
    return std::array<double, 2>{std::abs(v[0]), std::norm(v[0])};
  });
  NormEstimates ne;
  ne.M_used = M;
  ne.l1 = r[0];
  ne.l2sq = r[1];
  ne.l1_error_bound = lipschitz / (2.0 * static_cast<double>(M));
  return ne;
}

// Grid-size policy for L1 work: smallest power of two with M >= 64 N and
// M >= lipschitz / (rel * expected_norm), so that lipschitz / (2M) stays
// below half of rel * expected_norm.
inline std::uint64_t l1_grid_policy(std::uint64_t N, double lipschitz, double expected_norm, double rel = 0.01) {
  const double need = std::max(64.0 * static_cast<double>(N), lipschitz / (rel * expected_norm));
  if (!(need < 0x1p62)) throw capacity_error("l1_grid_policy: grid size overflows");
  return next_pow2(static_cast<std::uint64_t>(std::ceil(need)));
}

// Default M for S: expected norm sqrt(N log N), Lipschitz bound 2 pi N psi(N).
inline std::uint64_t default_l1_grid(const ArithTables& t, std::uint64_t N) {
  const double dN = static_cast<double>(N);
  const double psi = chebyshev_psi(t, N).psi;
  const double scale = std::sqrt(dN * std::log(std::max(dN, 2.0)));
  return l1_grid_policy(N, two_pi * dN * psi, scale);
}

struct L1Report {
  std::uint64_t N = 0;
  NormEstimates norms;
  double ratio_sqrt_nlogn = 0.0;  // l1 / sqrt(N log N)
  double ratio_sqrt_n = 0.0;      // l1 / sqrt(N)
};

// L1 norm of S with the first-order bound 2 pi sum n Lambda(n) / (2M).
// M = 0 selects the default policy.
inline L1Report l1_of_S(const ArithTables& t, std::uint64_t N, std::uint64_t M = 0) {
  if (N < 2) throw domain_error("l1_of_S: N must be >= 2");
  const auto a = mangoldt_coefficients(t, N);
  if (M == 0) M = default_l1_grid(t, N);
  L1Report r;
  r.N = N;
  r.norms = l1_norm_streaming(a, M, lipschitz_bound(a));
  const double dN = static_cast<double>(N);
  r.ratio_sqrt_nlogn = r.norms.l1 / std::sqrt(dN * std::log(dN));
  r.ratio_sqrt_n = r.norms.l1 / std::sqrt(dN);
  return r;
}

// ---------------------------------------------------------------------
// Major-arc quantities
// ---------------------------------------------------------------------

// a0(N, y) = sum_{n<=N} Lambda(n)^2 - N S_y(0).
inline double a0(const ArithTables& t, std::uint64_t N, double y, const TruncatedTable& tt) {
  if (y < 1.0 || y > static_cast<double>(N)) throw domain_error("a0: need 1 <= y <= N");
  if (tt.y != y) throw domain_error("a0: truncated table was built for a different y");
  return mangoldt_square_sum(t, N) - static_cast<double>(N) * tt.values[0];
}

// W = sum_{1<=|k|<=N} (N-|k|)^2 (S(k) - S_y(k))^2.
inline double W_direct(std::uint64_t N, const SingularTable& st, const TruncatedTable& tt) {
  if (st.kmax < N || tt.kmax < N) throw range_error("W_direct: tables shorter than N");
  const double dN = static_cast<double>(N);
  return 2.0 * deterministic_sum(1, N + 1, [&](std::size_t k) {
           const double w = dN - static_cast<double>(k);
           const double d = st.values[k] - tt.values[k];
           return w * w * d * d;
         });
}

// Main terms (1/3) N^3 L / y^2 - (1/4) N^2 log^2(N/y^2) + M N^2 log(N/y^2).
inline double W_asymptotic(std::uint64_t N, double y, const Constants& c) {
  const double dN = static_cast<double>(N);
  if (y < 1.0 || y > std::sqrt(dN) * (1.0 + 1e-12)) throw domain_error("W_asymptotic: need 1 <= y <= sqrt(N)");
  const double lg = std::log(dN / (y * y));
  return dN * dN * dN * c.lconst / (3.0 * y * y) - 0.25 * dN * dN * lg * lg + c.mconst * dN * dN * lg;
}

// J = int ||S|^2 - V_y - a0|^2 by Parseval: the k = 0 coefficient cancels,
// leaving sum_{1<=|k|<=N} (psi_2(N,k) - S_y(k)(N-|k|))^2.
inline double J_parseval(const PairCountTable& pc, const TruncatedTable& tt) {
  const std::uint64_t N = pc.N;
  if (tt.kmax < N) throw range_error("J_parseval: truncated table shorter than N");
  const double dN = static_cast<double>(N);
  return 2.0 * deterministic_sum(1, N + 1, [&](std::size_t k) {
           const double d = pc.counts[k] - tt.values[k] * (dN - static_cast<double>(k));
           return d * d;
         });
}

struct VarianceBoundReport {
  double lower_bound = 0.0;  // (sqrt J - sqrt W)^2
  double e_value = 0.0;
  double slack = 0.0;  // e_value - lower_bound
  bool holds = false;
};

// E(N) >= (sqrt J - sqrt W)^2, accepted up to a relative rounding margin.
inline VarianceBoundReport variance_bound_check(double J, double W, double e_value) {
  VarianceBoundReport r;
  const double d = std::sqrt(J) - std::sqrt(W);
  r.lower_bound = d * d;
  r.e_value = e_value;
  r.slack = e_value - r.lower_bound;
  r.holds = e_value >= r.lower_bound - 1e-6 * e_value;
  return r;
}

struct TReport {
  double T = 0.0;       // grid mean of ||S|^2 - V_y - a0|
  double J_grid = 0.0;  // grid mean of ||S|^2 - V_y - a0|^2 (exact quadrature)
  std::uint64_t M = 0;
};

// T on an M-point grid (M >= 2N + 2 makes J_grid exact; T itself is a
// Riemann sum and is diagnostic only).
inline TReport T_grid(const ArithTables& t, std::uint64_t N, const TruncatedTable& tt, std::uint64_t M) {
  const auto S = sample_S(t, N, M);
  const auto V = V_y_grid(N, tt, M);
  const double a = a0(t, N, tt.y, tt);
  std::vector<double> g(M);
  for (std::uint64_t j = 0; j < M; ++j) g[j] = std::norm(S.values[j]) - V.values[j].real() - a;
  TReport r;
  r.M = M;
  r.T = deterministic_sum(0, M, [&](std::size_t j) { return std::abs(g[j]); }) / static_cast<double>(M);
  r.J_grid = deterministic_sum(0, M, [&](std::size_t j) { return g[j] * g[j]; }) / static_cast<double>(M);
  return r;
}

struct MajorArcQuantities {
  std::uint64_t N = 0;
  double y = 0.0;
  double a0 = 0.0;
  double a0_ratio = 0.0;  // a0 / (N log(N/y)), NaN when y = N
  double W = 0.0;
  double W_asymptotic = 0.0;  // NaN when y > sqrt(N)
  double J = 0.0;
  double T = std::numeric_limits<double>::quiet_NaN();
  double lower_bound_variance = 0.0;  // (sqrt J - sqrt W)^2 when J >= W, else 0
  double e_value = 0.0;
  VarianceBoundReport variance_bound;
};

inline MajorArcQuantities major_arc(const ArithTables& t, std::uint64_t N, double y, const Constants& c,
                                    bool with_T = false) {
  if (N < 2) throw domain_error("major_arc: N must be >= 2");
  const auto tt = truncated_singular(y, N, t);
  const auto st = build_singular_table(N, t, c);
  const auto pc = N <= direct_oracle_cap ? psi2_direct(t, N) : psi2_fft(t, N);
  const double dN = static_cast<double>(N);
  MajorArcQuantities q;
  q.N = N;
  q.y = y;
  q.a0 = a0(t, N, y, tt);
  q.a0_ratio = y < dN ? q.a0 / (dN * std::log(dN / y)) : std::numeric_limits<double>::quiet_NaN();
  q.W = W_direct(N, st, tt);
  q.W_asymptotic = y <= std::sqrt(dN) * (1.0 + 1e-12) ? W_asymptotic(N, y, c) : std::numeric_limits<double>::quiet_NaN();
  q.J = J_parseval(pc, tt);
  q.e_value = error_term(pc, st, c).e_value;
  q.variance_bound = variance_bound_check(q.J, q.W, q.e_value);
  q.lower_bound_variance = q.J >= q.W ? q.variance_bound.lower_bound : 0.0;
  if (with_T) q.T = T_grid(t, N, tt, next_pow2(4 * N + 4)).T;
  return q;
}

// ---------------------------------------------------------------------
// Hoelder split of int ||S|^2 - V_y|
// ---------------------------------------------------------------------

struct HolderReport {
  std::uint64_t N = 0, M = 0;
  double y = 0.0, y0 = 0.0;
  double int_abs_h = 0.0;   // int |h|, h = |S|^2 - V_y
  double int_sqrt_h = 0.0;  // int |h|^{1/2}
  double int_h2 = 0.0;      // int |h|^2
  bool holder_holds = false;
  double a0 = 0.0;
  bool abs_h_ge_a0 = false;
  double int_sqrt_V = 0.0;  // int |V_y|^{1/2}
  double I1 = 0.0;          // q <= y0 part
  double I2 = 0.0;          // y0 < q <= y part
  bool split_holds = false;  // int |V_y|^{1/2} <= I1 + I2
  double I1_ratio = 0.0;     // I1 / (y0 log N)
  double I2_cs_bound = 0.0;  // (N sum_{y0<q<=y} mu^2/phi)^{1/2}
  bool I2_within_cs = false;
  double sqrtV_ratio = 0.0;  // int |V_y|^{1/2} / (N^{1/2} (log log N)^{1/2})
};

inline HolderReport holder_split_check(const ArithTables& t, std::uint64_t N, std::uint64_t M = 0) {
  if (N < 16) throw domain_error("holder_split_check: N must be >= 16");
  const double dN = static_cast<double>(N);
  const double logN = std::log(dN);
  HolderReport r;
  r.N = N;
  r.y = std::sqrt(dN);
  r.y0 = std::sqrt(dN) / logN;
  r.M = M == 0 ? next_pow2(4 * N + 4) : M;

  const auto tt = truncated_singular(r.y, N, t);
  const auto tt0 = truncated_singular(r.y0, N, t);
  TruncatedTable rest = tt;
  rest.y = r.y;
  for (std::uint64_t k = 0; k <= N; ++k) rest.values[k] = tt.values[k] - tt0.values[k];

  const auto S = sample_S(t, N, r.M);
  const auto V0 = V_y_grid(N, tt0, r.M);
  const auto V1 = V_y_grid(N, rest, r.M);
  const std::size_t Mz = r.M;
  std::vector<double> h(Mz), v(Mz);
  for (std::size_t j = 0; j < Mz; ++j) {
    v[j] = V0.values[j].real() + V1.values[j].real();
    h[j] = std::norm(S.values[j]) - v[j];
  }
  auto mean = [&](auto&& f) { return deterministic_sum(0, Mz, f) / static_cast<double>(Mz); };
  r.int_abs_h = mean([&](std::size_t j) { return std::abs(h[j]); });
  r.int_sqrt_h = mean([&](std::size_t j) { return std::sqrt(std::abs(h[j])); });
  r.int_h2 = mean([&](std::size_t j) { return h[j] * h[j]; });
  const double lhs = r.int_abs_h * r.int_abs_h * r.int_abs_h;
  const double rhs = r.int_sqrt_h * r.int_sqrt_h * r.int_h2;
  r.holder_holds = lhs <= rhs * (1.0 + 1e-12);

  r.a0 = a0(t, N, r.y, tt);
  r.abs_h_ge_a0 = r.int_abs_h >= r.a0 - 1e-9 * mangoldt_square_sum(t, N);

  r.int_sqrt_V = mean([&](std::size_t j) { return std::sqrt(std::abs(v[j])); });
  r.I1 = mean([&](std::size_t j) { return std::sqrt(std::abs(V0.values[j].real())); });
  r.I2 = mean([&](std::size_t j) { return std::sqrt(std::abs(V1.values[j].real())); });
  r.split_holds = r.int_sqrt_V <= (r.I1 + r.I2) * (1.0 + 1e-12);
  r.I1_ratio = r.I1 / (r.y0 * logN);
  r.I2_cs_bound = std::sqrt(dN * (tt.values[0] - tt0.values[0]));
  r.I2_within_cs = r.I2 <= r.I2_cs_bound * (1.0 + 1e-9);
  r.sqrtV_ratio = r.int_sqrt_V / (std::sqrt(dN) * std::sqrt(std::log(logN)));
  return r;
}

// ---------------------------------------------------------------------
// Grid identities
// ---------------------------------------------------------------------

// Largest |I(j/M)| / (min(N, 1/(2||j/M||)) + 1) over the grid; <= 1 when
// the Dirichlet-kernel bound holds everywhere.
inline double dirichlet_bound_ratio(const GridEvaluation& I, std::uint64_t N) {
  double worst = 0.0;
  const double dN = static_cast<double>(N);
  for (std::uint64_t j = 0; j < I.M; ++j) {
    const double a = static_cast<double>(std::min(j, I.M - j)) / static_cast<double>(I.M);
    const double cap = (a == 0.0 ? dN : std::min(dN, 1.0 / (2.0 * a))) + 1.0;
    worst = std::max(worst, std::abs(I.values[j]) / cap);
  }
  return worst;
}

}  // namespace ppl
