#pragma once

// Elementary arithmetic functions up to N: von Mangoldt, Moebius, Euler
// totient and smallest prime factor, all produced by one linear sieve pass.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ppl/errors.hpp"
#include "ppl/summation.hpp"

namespace ppl {

inline constexpr std::uint64_t max_table_limit = std::uint64_t{1} << 31;
inline constexpr std::uint64_t default_memory_budget = std::uint64_t{2} << 30;  // 2 GiB

// Bytes per index: mangoldt (8) + mobius (1) + totient (4) + spf (4).
inline constexpr std::uint64_t table_bytes_per_entry = 17;

// Immutable after construction; arrays are indexed 0..limit with slot 0 unused.
class ArithTables {
public:
  ArithTables() = default;

  std::uint32_t limit() const { return limit_; }

  double mangoldt(std::uint64_t n) const { return mangoldt_[n]; }
  int mobius(std::uint64_t n) const { return mobius_[n]; }
  std::uint32_t totient(std::uint64_t n) const { return totient_[n]; }
  std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }

  std::span<const double> mangoldt_array() const { return mangoldt_; }
  std::span<const std::int8_t> mobius_array() const { return mobius_; }
  std::span<const std::uint32_t> totient_array() const { return totient_; }
  std::span<const std::uint32_t> spf_array() const { return spf_; }

  // Primes up to limit() in increasing order.
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  bool operator==(const ArithTables&) const = default;

private:
  friend ArithTables build_tables(std::uint64_t, std::uint64_t);
  friend ArithTables read_table_cache(const std::string&);

  std::uint32_t limit_ = 0;
  std::vector<double> mangoldt_;
  std::vector<std::int8_t> mobius_;
  std::vector<std::uint32_t> totient_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> primes_;
};

struct PsiSummary {
  std::uint64_t N = 0;
  double psi = 0.0;        // sum of Lambda(n), n <= N
  double remainder = 0.0;  // psi - N
};

// Linear (Euler) sieve. Each composite is visited exactly once, through
// its smallest prime factor, which yields mu, phi and Lambda along the way.
inline ArithTables build_tables(std::uint64_t N, std::uint64_t memory_budget = default_memory_budget) {
  if (N < 1 || N > max_table_limit) {
    throw range_error("build_tables: N must lie in [1, 2^31], got " + std::to_string(N));
  }
  if ((N + 1) * table_bytes_per_entry > memory_budget) {
    throw capacity_error("build_tables: N = " + std::to_string(N) + " needs " +
                         std::to_string((N + 1) * table_bytes_per_entry) +
                         " bytes, above the memory budget of " + std::to_string(memory_budget));
  }
  ArithTables t;
  t.limit_ = static_cast<std::uint32_t>(N);
  t.mangoldt_.assign(N + 1, 0.0);
  t.mobius_.assign(N + 1, 0);
  t.totient_.assign(N + 1, 0);
  t.spf_.assign(N + 1, 0);
  if (N >= 1) {
    t.mobius_[1] = 1;
    t.totient_[1] = 1;
    t.spf_[1] = 1;
  }
  std::vector<double> logp;
  for (std::uint64_t i = 2; i <= N; ++i) {
    if (t.spf_[i] == 0) {
      t.spf_[i] = static_cast<std::uint32_t>(i);
      t.mobius_[i] = -1;
      t.totient_[i] = static_cast<std::uint32_t>(i - 1);
      t.mangoldt_[i] = std::log(static_cast<double>(i));
      t.primes_.push_back(static_cast<std::uint32_t>(i));
      logp.push_back(t.mangoldt_[i]);
    }
    const std::uint32_t si = t.spf_[i];
    for (std::size_t j = 0; j < t.primes_.size(); ++j) {
      const std::uint64_t p = t.primes_[j];
      if (p > si || i * p > N) break;
      const std::uint64_t m = i * p;
      t.spf_[m] = static_cast<std::uint32_t>(p);
      if (p == si) {
        t.mobius_[m] = 0;
        t.totient_[m] = t.totient_[i] * static_cast<std::uint32_t>(p);
        // i*p is a prime power exactly when i already was one (of p).
        t.mangoldt_[m] = t.mangoldt_[i] != 0.0 ? logp[j] : 0.0;
      } else {
        t.mobius_[m] = static_cast<std::int8_t>(-t.mobius_[i]);
        t.totient_[m] = t.totient_[i] * static_cast<std::uint32_t>(p - 1);
      }
    }
  }
  return t;
}

// Odd-only sieve of Eratosthenes for prime lists well past any table
// limit (the constants need primes up to 10^7 and beyond).
inline std::vector<std::uint32_t> primes_up_to(std::uint64_t P) {
  std::vector<std::uint32_t> out;
  if (P < 2) return out;
  out.push_back(2);
  const std::uint64_t half = (P - 1) / 2;  // index i <-> 2i+1, i >= 1
  std::vector<std::uint8_t> composite(half + 1, 0);
  for (std::uint64_t i = 1; i <= half; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    out.push_back(static_cast<std::uint32_t>(p));
    for (std::uint64_t q = p * p; q <= P; q += 2 * p) composite[(q - 1) / 2] = 1;
  }
  return out;
}

namespace detail {

struct factored {
  int mobius = 1;
  std::uint64_t totient = 1;
};

inline factored factor_trial(std::uint64_t q) {
  factored f;
  for (std::uint64_t p = 2; p * p <= q; ++p) {
    if (q % p) continue;
    std::uint64_t pk = 1;
    int e = 0;
    while (q % p == 0) {
      q /= p;
      pk *= p;
      ++e;
    }
    f.mobius = e > 1 ? 0 : -f.mobius;
    f.totient *= pk / p * (p - 1);
  }
  if (q > 1) {
    f.mobius = -f.mobius;
    f.totient *= q - 1;
  }
  return f;
}

inline std::uint64_t abs_u64(std::int64_t n) {
  return n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
}

}  // namespace detail

// c_q(n) = mu(q/g) phi(q) / phi(q/g) with g = gcd(q, n). Total function;
// factors q by trial division, so prefer the table overload in loops.
inline std::int64_t ramanujan_sum(std::uint64_t q, std::int64_t n) {
  if (q == 0) throw domain_error("ramanujan_sum: q must be positive");
  const std::uint64_t g = std::gcd(q, detail::abs_u64(n));
  const std::uint64_t r = q / g;
  const auto fr = detail::factor_trial(r);
  if (fr.mobius == 0) return 0;
  const auto fq = detail::factor_trial(q);
  return fr.mobius * static_cast<std::int64_t>(fq.totient / fr.totient);
}

inline std::int64_t ramanujan_sum(const ArithTables& t, std::uint64_t q, std::int64_t n) {
  if (q == 0) throw domain_error("ramanujan_sum: q must be positive");
  if (q > t.limit()) throw range_error("ramanujan_sum: q exceeds table limit");
  const std::uint64_t g = std::gcd(q, detail::abs_u64(n));
  const std::uint64_t r = q / g;
  const int m = t.mobius(r);
  if (m == 0) return 0;
  return m * static_cast<std::int64_t>(t.totient(q) / t.totient(r));
}

inline PsiSummary chebyshev_psi(const ArithTables& t, std::uint64_t N) {
  if (N > t.limit()) {
    throw range_error("chebyshev_psi: N = " + std::to_string(N) + " exceeds table limit " +
                      std::to_string(t.limit()));
  }
  PsiSummary s;
  s.N = N;
  s.psi = deterministic_sum(1, N + 1, [&](std::size_t n) { return t.mangoldt(n); });
  s.remainder = s.psi - static_cast<double>(N);
  return s;
}

// Sum of Lambda(n)^2 for n <= N, i.e. psi_2(N, 0).
inline double mangoldt_square_sum(const ArithTables& t, std::uint64_t N) {
  if (N > t.limit()) throw range_error("mangoldt_square_sum: N exceeds table limit");
  // Sequential accumulation of nonnegative terms keeps the result
  // nondecreasing in N; a pairwise tree reshapes as N grows and can dip by an ulp.
  long double s = 0.0L;
  for (std::uint64_t n = 2; n <= N; ++n) {
    const long double l = t.mangoldt(n);
    s += l * l;
  }
  return static_cast<double>(s);
}

// Distinct prime factors of n (n <= limit), ascending.
inline std::vector<std::uint32_t> prime_factors(const ArithTables& t, std::uint64_t n) {
  std::vector<std::uint32_t> ps;
  while (n > 1) {
    const std::uint32_t p = t.spf(n);
    ps.push_back(p);
    while (n % p == 0) n /= p;
  }
  return ps;
}

// ---------------------------------------------------------------------
// Binary cache: "PPL1", u32 version, u64 N, then mangoldt (f64),
// mobius (i8), totient (u32), spf (u32), each for n = 1..N. Little-endian.
// ---------------------------------------------------------------------

inline constexpr char cache_magic[4] = {'P', 'P', 'L', '1'};
inline constexpr std::uint32_t cache_version = 1;

namespace detail {

template <typename T>
void write_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(buf), sizeof(T))) throw io_error("table cache: truncated file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace detail

inline void write_table_cache(const ArithTables& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error("table cache: cannot open " + path + " for writing");
  os.write(cache_magic, 4);
  detail::write_le<std::uint32_t>(os, cache_version);
  detail::write_le<std::uint64_t>(os, t.limit());
  const std::uint64_t N = t.limit();
  for (std::uint64_t n = 1; n <= N; ++n) detail::write_le<double>(os, t.mangoldt(n));
  for (std::uint64_t n = 1; n <= N; ++n) detail::write_le<std::int8_t>(os, static_cast<std::int8_t>(t.mobius(n)));
  for (std::uint64_t n = 1; n <= N; ++n) detail::write_le<std::uint32_t>(os, t.totient(n));
  for (std::uint64_t n = 1; n <= N; ++n) detail::write_le<std::uint32_t>(os, t.spf(n));
  if (!os) throw io_error("table cache: write failed for " + path);
}

inline ArithTables read_table_cache(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("table cache: cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, cache_magic, 4) != 0) {
    throw io_error("table cache: bad magic in " + path);
  }
  const auto version = detail::read_le<std::uint32_t>(is);
  if (version != cache_version) throw io_error("table cache: unsupported version " + std::to_string(version));
  const auto N = detail::read_le<std::uint64_t>(is);
  if (N < 1 || N > max_table_limit) throw io_error("table cache: N out of range");
  ArithTables t;
  t.limit_ = static_cast<std::uint32_t>(N);
  t.mangoldt_.assign(N + 1, 0.0);
  t.mobius_.assign(N + 1, 0);
  t.totient_.assign(N + 1, 0);
  t.spf_.assign(N + 1, 0);
  for (std::uint64_t n = 1; n <= N; ++n) t.mangoldt_[n] = detail::read_le<double>(is);
  for (std::uint64_t n = 1; n <= N; ++n) t.mobius_[n] = detail::read_le<std::int8_t>(is);
  for (std::uint64_t n = 1; n <= N; ++n) t.totient_[n] = detail::read_le<std::uint32_t>(is);
  for (std::uint64_t n = 1; n <= N; ++n) t.spf_[n] = detail::read_le<std::uint32_t>(is);
  for (std::uint64_t n = 2; n <= N; ++n) {
    if (t.spf_[n] == n) t.primes_.push_back(static_cast<std::uint32_t>(n));
  }
  return t;
}

// Reads the cache when it exists and covers N, otherwise sieves and (if a
// path was given) writes a fresh cache.
inline ArithTables load_or_build_tables(std::uint64_t N, const std::string& cache_path,
                                        std::uint64_t memory_budget = default_memory_budget) {
  if (!cache_path.empty()) {
    std::ifstream probe(cache_path, std::ios::binary);
    if (probe) {
      probe.close();
      ArithTables cached = read_table_cache(cache_path);
      if (cached.limit() >= N) return cached;
    }
  }
  ArithTables t = build_tables(N, memory_budget);
  if (!cache_path.empty()) write_table_cache(t, cache_path);
  return t;
}

}  // namespace ppl
