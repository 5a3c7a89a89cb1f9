#pragma once

// Hardy-Littlewood singular series, its Ramanujan-sum truncations, and the
// prime-product constants that appear in the variance asymptotics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ppl/arith_tables.hpp"
#include "ppl/errors.hpp"
#include "ppl/summation.hpp"

namespace ppl {

// Euler-Mascheroni constant (OEIS A001620), rounded to double.
inline constexpr double euler_gamma = 0.5772156649015329;

inline constexpr std::uint64_t default_prime_cutoff = 10'000'000;

struct Constants {
  double c2 = 0.0;      // twin prime constant, prod_{p>2} (1 - 1/(p-1)^2)
  double lconst = 0.0;  // prod_p (1 + (2p-1)/(p(p-1)^2))
  double mconst = 0.0;  // 3/4 - log(2 pi)/2 + (1/2) sum_p (p-2) log p / (p(p-1)^2)
  double dconst = 0.0;  // gamma + sum_p log p / (p(p-1))
  std::uint64_t prime_cutoff = 0;
  // Rigorous bounds on |true - computed| for each constant; tail_bound is
  // their maximum.
  double c2_tail = 0.0;
  double l_tail = 0.0;
  double m_tail = 0.0;
  double d_tail = 0.0;
  double tail_bound = 0.0;
};

namespace detail {

// E1(x) = int_x^inf e^{-u}/u du; std::expint is Ei and Ei(-x) = -E1(x).
inline double exp_integral_e1(double x) { return -std::expint(-x); }

// sup_{t >= x} |theta(t) - t| / t (Dusart's explicit Chebyshev bounds).
inline double theta_relative_error(double x) {
  const double lx = std::log(x);
  return (x >= 3594641.0 ? 0.2 : 3.965) / (lx * lx);
}

}  // namespace detail

// Each constant is a sum (or log of a product) over primes. The part over
// p <= P is summed directly. The tail over p > P is reduced to one of two
// reference series,
//
//   T2 = sum_{p>P} 1/p^2        and        TL = sum_{p>P} log p / p^2,
//
// plus a higher-order remainder bounded termwise by an integral over all
// integers (valid for P >= 1000):
//
//   log(1 - 1/(p-1)^2)           = -1/p^2        + O*(4/p^3)
//   log(1 + (2p-1)/(p(p-1)^2))   =  2/p^2        + O*(4/p^3)
//   log p / (p(p-1))             =  log p/p^2    + O*(1.01 log p/p^3)
//   (p-2) log p / (p(p-1)^2)     =  log p/p^2    + O*(1.01 log p/p^4)
//
// giving remainders 2/P^2 and (log P + 1)/P^2. The reference series are
// estimated by Stieltjes integration against theta(t) = t + e(t):
//
//   sum_{p>P} g(p) log p = g(P)(P - theta(P)) + int_P^inf g(t) dt + err,
//   |err| <= eps(P) (P g(P) + int_P^inf g(t) dt),
//
// with g(t) = 1/(t^2 log t) (int = E1(log P)) or g(t) = 1/t^2 (int = 1/P),
// theta(P) taken exactly from the sieve and eps(P) from
// detail::theta_relative_error. Product constants convert a log-error
// bound d into a value bound via |C| expm1(d).
inline Constants compute_constants(std::uint64_t prime_cutoff = default_prime_cutoff) {
  if (prime_cutoff < 1000) throw domain_error("compute_constants: prime_cutoff must be >= 1000");
  const auto primes = primes_up_to(prime_cutoff);
  const std::size_t np = primes.size();
  auto over_primes = [&](auto&& f) {
    return deterministic_sum(0, np, [&](std::size_t i) { return f(static_cast<double>(primes[i])); });
  };

  const double log_c2 = over_primes([](double p) {
    return p == 2.0 ? 0.0 : std::log1p(-1.0 / ((p - 1.0) * (p - 1.0)));
  });
  const double log_l = over_primes([](double p) {
    return std::log1p((2.0 * p - 1.0) / (p * (p - 1.0) * (p - 1.0)));
  });
  const double sum_d = over_primes([](double p) { return std::log(p) / (p * (p - 1.0)); });
  const double sum_m = over_primes([](double p) {
    return (p - 2.0) * std::log(p) / (p * (p - 1.0) * (p - 1.0));
  });
  const double theta = over_primes([](double p) { return std::log(p); });

  const double P = static_cast<double>(prime_cutoff);
  const double logP = std::log(P);
  const double eps = detail::theta_relative_error(P);

  const double e1 = detail::exp_integral_e1(logP);
  const double t2_est = (P - theta) / (P * P * logP) + e1;
  const double t2_err = eps * (1.0 / (P * logP) + e1);
  const double tl_est = (P - theta) / (P * P) + 1.0 / P;
  const double tl_err = eps * (2.0 / P);

  const double rem_sq = 2.0 / (P * P);
  const double rem_log = (logP + 1.0) / (P * P);

  Constants c;
  c.prime_cutoff = prime_cutoff;
  c.c2 = std::exp(log_c2 - t2_est);
  c.c2_tail = c.c2 * std::expm1(t2_err + rem_sq);
  c.lconst = std::exp(log_l + 2.0 * t2_est);
  c.l_tail = c.lconst * std::expm1(2.0 * t2_err + rem_sq);
  c.dconst = euler_gamma + sum_d + tl_est;
  c.d_tail = tl_err + rem_log;
  c.mconst = 0.75 - 0.5 * std::log(2.0 * std::numbers::pi) + 0.5 * (sum_m + tl_est);
  c.m_tail = 0.5 * (tl_err + rem_log);
  c.tail_bound = std::max({c.c2_tail, c.l_tail, c.m_tail, c.d_tail});
  return c;
}

// S(k) = 2 C2 prod_{p | k, p > 2} (p-1)/(p-2) for even k, 0 for odd k.
// Undefined at k = 0.
inline double singular_series(std::int64_t k, const Constants& c) {
  if (k == 0) throw domain_error("singular_series: S(k) is not defined for k = 0");
  std::uint64_t m = detail::abs_u64(k);
  if (m % 2) return 0.0;
  while (m % 2 == 0) m /= 2;
  double v = 2.0 * c.c2;
  for (std::uint64_t p = 3; p * p <= m; p += 2) {
    if (m % p) continue;
    v *= static_cast<double>(p - 1) / static_cast<double>(p - 2);
    while (m % p == 0) m /= p;
  }
  if (m > 1) v *= static_cast<double>(m - 1) / static_cast<double>(m - 2);
  return v;
}

// S(k) for 1 <= k <= kmax (index 0 unused, stored as 0).
struct SingularTable {
  std::uint64_t kmax = 0;
  std::vector<double> values;

  double operator[](std::int64_t k) const { return values[detail::abs_u64(k)]; }
};

// Factors each k through the sieve's smallest-prime-factor table; the
// product is taken over ascending primes, matching singular_series().
inline SingularTable build_singular_table(std::uint64_t kmax, const ArithTables& t, const Constants& c) {
  if (kmax > t.limit()) throw range_error("build_singular_table: kmax exceeds table limit");
  SingularTable st;
  st.kmax = kmax;
  st.values.assign(kmax + 1, 0.0);
  for (std::uint64_t k = 2; k <= kmax; k += 2) {
    std::uint64_t m = k;
    while (m % 2 == 0) m /= 2;
    double v = 2.0 * c.c2;
    while (m > 1) {
      const std::uint32_t p = t.spf(m);
      v *= static_cast<double>(p - 1) / static_cast<double>(p - 2);
      while (m % p == 0) m /= p;
    }
    st.values[k] = v;
  }
  return st;
}

// Sum_{q <= y} mu(q)^2 / phi(q). This is S_y(0) and also the L(R) of the
// refined approximation; both call sites go through here.
inline double truncated_zero(const ArithTables& t, double y) {
  if (y < 1.0) throw domain_error("truncated_zero: y must be >= 1");
  const auto qmax = static_cast<std::uint64_t>(std::floor(y));
  if (qmax > t.limit()) throw range_error("truncated_zero: y exceeds table limit");
  return deterministic_sum(1, qmax + 1, [&](std::size_t q) {
    return t.mobius(q) == 0 ? 0.0 : 1.0 / static_cast<double>(t.totient(q));
  });
}

struct TruncatedTable {
  double y = 1.0;
  std::uint64_t kmax = 0;
  std::vector<double> values;  // S_y(k), k = 0..kmax

  double operator[](std::int64_t k) const { return values[detail::abs_u64(k)]; }
};

namespace detail {

struct squarefree_weights {
  std::vector<std::uint32_t> q;
  std::vector<double> w;  // 1/phi(q)^2
};

inline squarefree_weights squarefree_up_to(const ArithTables& t, std::uint64_t qmax) {
  squarefree_weights s;
  for (std::uint64_t q = 1; q <= qmax; ++q) {
    if (t.mobius(q) == 0) continue;
    const double ph = t.totient(q);
    s.q.push_back(static_cast<std::uint32_t>(q));
    s.w.push_back(1.0 / (ph * ph));
  }
  return s;
}

inline double truncated_at(const ArithTables& t, const squarefree_weights& sw, std::int64_t k,
                           std::vector<double>& scratch) {
  scratch.resize(sw.q.size());
  for (std::size_t i = 0; i < sw.q.size(); ++i) {
    scratch[i] = sw.w[i] * static_cast<double>(ramanujan_sum(t, sw.q[i], -k));
  }
  return pairwise_sum(scratch);
}

}  // namespace detail

// S_y(k) = sum_{q <= y} mu(q)^2 / phi(q)^2 c_q(-k) for k = 0..kmax.
inline TruncatedTable truncated_singular(double y, std::uint64_t kmax, const ArithTables& t) {
  if (y < 1.0) throw domain_error("truncated_singular: y must be >= 1");
  const auto qmax = static_cast<std::uint64_t>(std::floor(y));
  if (qmax > t.limit()) throw range_error("truncated_singular: y exceeds table limit");
  const auto sw = detail::squarefree_up_to(t, qmax);
  TruncatedTable tt;
  tt.y = y;
  tt.kmax = kmax;
  tt.values.assign(kmax + 1, 0.0);
  tt.values[0] = truncated_zero(t, y);
  const std::size_t chunks = (kmax + reduction_chunk) / reduction_chunk;
  parallel_chunks(chunks, [&](std::size_t c) {
    std::vector<double> scratch;
    const std::uint64_t lo = std::max<std::uint64_t>(1, c * reduction_chunk);
    const std::uint64_t hi = std::min<std::uint64_t>(kmax + 1, (c + 1) * reduction_chunk);
    for (std::uint64_t k = lo; k < hi; ++k) {
      tt.values[k] = detail::truncated_at(t, sw, static_cast<std::int64_t>(k), scratch);
    }
  });
  return tt;
}

// Single-k evaluation of S_y(k).
inline double truncated_singular_at(std::int64_t k, double y, const ArithTables& t) {
  if (k == 0) return truncated_zero(t, y);
  if (y < 1.0) throw domain_error("truncated_singular_at: y must be >= 1");
  const auto qmax = static_cast<std::uint64_t>(std::floor(y));
  if (qmax > t.limit()) throw range_error("truncated_singular_at: y exceeds table limit");
  std::vector<double> scratch;
  return detail::truncated_at(t, detail::squarefree_up_to(t, qmax), k, scratch);
}

// |S_y(k) - S(k)| for each y in y_list.
inline std::vector<std::pair<double, double>> series_convergence_check(std::int64_t k,
                                                                       const std::vector<double>& y_list,
                                                                       const Constants& c,
                                                                       const ArithTables& t) {
  if (k == 0 || k % 2 != 0) throw domain_error("series_convergence_check: k must be even and nonzero");
  const double target = singular_series(k, c);
  std::vector<std::pair<double, double>> out;
  out.reserve(y_list.size());
  for (double y : y_list) out.emplace_back(y, std::abs(truncated_singular_at(k, y, t) - target));
  return out;
}

struct HildebrandResult {
  double lhs = 0.0;       // sum_{n <= x, (n,k)=1} mu(n)^2 / phi(n)
  double rhs_main = 0.0;  // (phi(k)/k)(log x + D + g(k))
  double residual = 0.0;
  double h_over_sqrtx = 0.0;
  double g = 0.0;
  double h = 0.0;
};

inline HildebrandResult hildebrand_check(double x, std::uint64_t k, const Constants& c, const ArithTables& t) {
  if (x < 1.0) throw domain_error("hildebrand_check: x must be >= 1");
  if (k < 1) throw domain_error("hildebrand_check: k must be positive");
  const auto nmax = static_cast<std::uint64_t>(std::floor(x));
  if (nmax > t.limit()) throw range_error("hildebrand_check: x exceeds table limit");

  HildebrandResult r;
  r.lhs = deterministic_sum(1, nmax + 1, [&](std::size_t n) {
    if (t.mobius(n) == 0 || std::gcd<std::uint64_t>(n, k) != 1) return 0.0;
    return 1.0 / static_cast<double>(t.totient(n));
  });
  double phi_k = 1.0;
  r.h = 1.0;
  std::uint64_t m = k;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    std::uint64_t pk = 1;
    while (m % p == 0) {
      m /= p;
      pk *= p;
    }
    const double pd = static_cast<double>(p);
    phi_k *= static_cast<double>(pk / p * (p - 1));
    r.g += std::log(pd) / pd;
    r.h *= 1.0 + 1.0 / std::sqrt(pd);
  }
  if (m > 1) {
    const double pd = static_cast<double>(m);
    phi_k *= pd - 1.0;
    r.g += std::log(pd) / pd;
    r.h *= 1.0 + 1.0 / std::sqrt(pd);
  }
  r.rhs_main = phi_k / static_cast<double>(k) * (std::log(x) + c.dconst + r.g);
  r.residual = r.lhs - r.rhs_main;
  r.h_over_sqrtx = r.h / std::sqrt(x);
  return r;
}

// max over real y in [ylo, yhi) of |S_y(0) - log y|. S_y(0) is a step
// function of y, so each integer interval is checked at both ends.
inline double log_series_envelope(const ArithTables& t, std::uint64_t ylo, std::uint64_t yhi) {
  if (yhi > t.limit()) throw range_error("log_series_envelope: yhi exceeds table limit");
  double s = truncated_zero(t, static_cast<double>(ylo));
  double worst = 0.0;
  for (std::uint64_t n = ylo; n < yhi; ++n) {
    if (n > ylo && t.mobius(n) != 0) s += 1.0 / static_cast<double>(t.totient(n));
    worst = std::max({worst, std::abs(s - std::log(static_cast<double>(n))),
                      std::abs(s - std::log(static_cast<double>(n + 1)))});
  }
  return worst;
}

}  // namespace ppl
