#pragma once

// Prime-pair correlation psi_2(N, k), the Hardy-Littlewood variance E(N),
// and the first-moment identities tying both to psi(N).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "ppl/arith_tables.hpp"
#include "ppl/errors.hpp"
#include "ppl/fft.hpp"
#include "ppl/singular_series.hpp"
#include "ppl/summation.hpp"

namespace ppl {

inline constexpr std::uint64_t direct_oracle_cap = 10'000;

enum class pair_method { direct, fft };

inline const char* to_string(pair_method m) { return m == pair_method::direct ? "direct" : "fft"; }

struct PairCountTable {
  std::uint64_t N = 0;
  std::vector<double> counts;  // psi_2(N, k), k = 0..N
  pair_method method = pair_method::direct;
  // fft only: transform length and the largest |imag| seen among the lag
  // coefficients (zero in exact arithmetic).
  std::uint64_t transform_length = 0;
  double max_imag = 0.0;
  double tolerance = 0.0;  // documented absolute agreement with the oracle

  double operator[](std::int64_t k) const {
    const std::uint64_t a = detail::abs_u64(k);
    return a <= N ? counts[a] : 0.0;
  }
};

// Oracle: for each lag k, walks the prime powers n <= N - k and keeps the
// ones with n + k also a prime power.
inline PairCountTable psi2_direct(const ArithTables& t, std::uint64_t N) {
  if (N > t.limit()) throw range_error("psi2_direct: N exceeds table limit");
  if (N > direct_oracle_cap) {
    throw scale_error("psi2_direct: N = " + std::to_string(N) + " is above the oracle cap of " +
                      std::to_string(direct_oracle_cap));
  }
  std::vector<std::uint32_t> pp;
  for (std::uint64_t n = 2; n <= N; ++n) {
    if (t.mangoldt(n) != 0.0) pp.push_back(static_cast<std::uint32_t>(n));
  }
  PairCountTable pc;
  pc.N = N;
  pc.method = pair_method::direct;
  pc.counts.assign(N + 1, 0.0);
  const std::size_t chunks = (N + reduction_chunk) / reduction_chunk;
  parallel_chunks(chunks, [&](std::size_t c) {
    const std::uint64_t lo = c * reduction_chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(N + 1, lo + reduction_chunk);
    for (std::uint64_t k = lo; k < hi; ++k) {
      double s = 0.0;
      for (std::uint32_t n : pp) {
        if (n + k > N) break;
        const double b = t.mangoldt(n + k);
        if (b != 0.0) s += t.mangoldt(n) * b;
      }
      pc.counts[k] = s;
    }
  });
  return pc;
}

// Autocorrelation of the zero-padded Lambda sequence: forward transform,
// squared modulus, inverse transform. The padding length M >= 2N + 1 rules
// out circular wrap-around.
inline PairCountTable psi2_fft(const ArithTables& t, std::uint64_t N) {
  if (N > t.limit()) throw range_error("psi2_fft: N exceeds table limit");
  const std::uint64_t M = next_pow2(2 * N + 1);
  if (M > max_materialized_grid) {
    throw capacity_error("psi2_fft: transform length " + std::to_string(M) + " exceeds the grid cap");
  }
  ComplexFft fwd(M, ComplexFft::direction::forward);
  auto buf = fwd.buffer();
  for (std::uint64_t n = 1; n <= N; ++n) buf[n] = t.mangoldt(n);
  fwd.execute();
  ComplexFft inv(M, ComplexFft::direction::backward);
  auto ibuf = inv.buffer();
  for (std::uint64_t m = 0; m < M; ++m) ibuf[m] = std::norm(buf[m]);
  inv.execute();

  PairCountTable pc;
  pc.N = N;
  pc.method = pair_method::fft;
  pc.transform_length = M;
  pc.tolerance = 1e-6;
  pc.counts.assign(N + 1, 0.0);
  const double scale = 1.0 / static_cast<double>(M);
  for (std::uint64_t k = 0; k <= N; ++k) {
    const cplx z = ibuf[k] * scale;
    pc.counts[k] = z.real();
    pc.max_imag = std::max(pc.max_imag, std::abs(z.imag()));
  }
  return pc;
}

inline PairCountTable psi2(const ArithTables& t, std::uint64_t N, pair_method m) {
  return m == pair_method::direct ? psi2_direct(t, N) : psi2_fft(t, N);
}

struct ErrorSummary {
  std::uint64_t N = 0;
  double e_value = 0.0;     // E(N)
  double normalized = 0.0;  // E(N) / (N^2 log^2 N)
  double odd_contrib = 0.0;
  double first_moment_residual = 0.0;  // sum_{1<=|k|<=N} (N-|k|) S(k) - N^2
  double e_value_compensated = 0.0;    // same sum, Neumaier accumulation
};

// E(N) = 2 sum_{k=1}^{N} (psi_2(N,k) - S(k)(N-k))^2 by evenness in k.
inline ErrorSummary error_term(const PairCountTable& pc, const SingularTable& st, const Constants& c) {
  const std::uint64_t N = pc.N;
  if (st.kmax < N) throw range_error("error_term: singular table shorter than N");
  if (c.c2 <= 0.0) throw domain_error("error_term: constants not initialised");
  const double dN = static_cast<double>(N);
  auto dev = [&](std::size_t k) {
    const double d = pc.counts[k] - st.values[k] * (dN - static_cast<double>(k));
    return d * d;
  };
  ErrorSummary es;
  es.N = N;
  es.e_value = 2.0 * deterministic_sum(1, N + 1, dev);
  es.odd_contrib = 2.0 * deterministic_sum(1, N + 1, [&](std::size_t k) { return k % 2 ? dev(k) : 0.0; });
  const double logN = std::log(dN);
  es.normalized = N > 1 ? es.e_value / (dN * dN * logN * logN) : 0.0;
  es.first_moment_residual =
      2.0 * deterministic_sum(1, N + 1, [&](std::size_t k) { return (dN - static_cast<double>(k)) * st.values[k]; }) -
      dN * dN;
  compensated_sum cs;
  for (std::uint64_t k = 1; k <= N; ++k) cs += dev(k);
  es.e_value_compensated = 2.0 * cs.value();
  return es;
}

struct FirstMomentReport {
  double identity_residual = 0.0;      // sum_{|k|<=N} psi_2(N,k) - psi(N)^2
  double hl_residual_over_NlogN = 0.0;  // (sum (N-|k|) S(k) - N^2) / (N log N)
};

inline FirstMomentReport first_moment_checks(const PairCountTable& pc, const SingularTable& st,
                                             const PsiSummary& psi) {
  if (psi.N != pc.N) throw domain_error("first_moment_checks: inconsistent N");
  if (st.kmax < pc.N) throw range_error("first_moment_checks: singular table shorter than N");
  const std::uint64_t N = pc.N;
  const double dN = static_cast<double>(N);
  FirstMomentReport r;
  const double total = pc.counts[0] + 2.0 * deterministic_sum(1, N + 1, [&](std::size_t k) { return pc.counts[k]; });
  r.identity_residual = total - psi.psi * psi.psi;
  const double hl =
      2.0 * deterministic_sum(1, N + 1, [&](std::size_t k) { return (dN - static_cast<double>(k)) * st.values[k]; });
  r.hl_residual_over_NlogN = N > 1 ? (hl - dN * dN) / (dN * std::log(dN)) : 0.0;
  return r;
}

// ---------------------------------------------------------------------
// Published-row formatting. Values are truncated (not rounded) to five decimals.
// ---------------------------------------------------------------------

struct Table1Row {
  std::uint64_t N = 0;
  double normalized = 0.0;
  std::string truncated;  // e.g. "0.09464"
  std::string rounded;
  // Set when normalized * 1e5 lies within 2 ulp of an integer, where
  // truncation is sensitive to the last bits of the computation.
  bool boundary_ambiguous = false;
};

inline Table1Row table1_row(const ErrorSummary& es) {
  Table1Row row;
  row.N = es.N;
  row.normalized = es.normalized;
  const double scaled = es.normalized * 1e5;
  const double fl = std::floor(scaled);
  const double ulp2 = 2.0 * (std::nextafter(scaled, INFINITY) - scaled);
  row.boundary_ambiguous = (scaled - fl) <= ulp2 || (fl + 1.0 - scaled) <= ulp2;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5f", fl / 1e5);
  row.truncated = buf;
  std::snprintf(buf, sizeof buf, "%.5f", es.normalized);
  row.rounded = buf;
  return row;
}

// ---------------------------------------------------------------------
// Figure data
// ---------------------------------------------------------------------

struct FigureRow {
  std::int64_t k = 0;
  double psi2 = 0.0;
  double hl_prediction = 0.0;  // S(k)(N - k)
};

// Rows for k in [k_first, k_last] (clipped to [1, N]).
inline std::vector<FigureRow> figure_data(const PairCountTable& pc, const SingularTable& st, std::int64_t k_first,
                                          std::int64_t k_last) {
  const auto N = static_cast<std::int64_t>(pc.N);
  if (k_first < 1 || k_last > N || k_first > k_last) {
    throw range_error("figure_data: k range must lie within [1, N]");
  }
  if (static_cast<std::int64_t>(st.kmax) < k_last) throw range_error("figure_data: singular table too short");
  std::vector<FigureRow> rows;
  rows.reserve(static_cast<std::size_t>(k_last - k_first + 1));
  for (std::int64_t k = k_first; k <= k_last; ++k) {
    rows.push_back({k, pc[k], st[k] * static_cast<double>(N - k)});
  }
  return rows;
}

struct TrendRow {
  std::uint64_t N = 0;
  double normalized = 0.0;
};

// E(N) / (N^2 log^2 N) for N = n_first..n_last (n_first >= 2).
inline std::vector<TrendRow> normalized_error_trend(const ArithTables& t, const SingularTable& st,
                                                    const Constants& c, std::uint64_t n_first,
                                                    std::uint64_t n_last) {
  if (n_first < 2 || n_last < n_first) throw range_error("normalized_error_trend: need 2 <= first <= last");
  std::vector<TrendRow> rows;
  for (std::uint64_t N = n_first; N <= n_last; ++N) {
    const auto pc = N <= direct_oracle_cap ? psi2_direct(t, N) : psi2_fft(t, N);
    rows.push_back({N, error_term(pc, st, c).normalized});
  }
  return rows;
}

}  // namespace ppl
