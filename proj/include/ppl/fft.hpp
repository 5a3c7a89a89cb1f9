#pragma once

// FFTW-backed transforms and grid sampling of trigonometric polynomials.
//
// Sign convention: values[j] = sum_k c_k e(k j / M) with e(u) = exp(2 pi i u),
// i.e. FFTW_BACKWARD without normalization.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ppl/errors.hpp"
#include "ppl/summation.hpp"

namespace ppl {

using cplx = std::complex<double>;

// Grids larger than this are refused when materialized (16 bytes each).
inline constexpr std::uint64_t max_materialized_grid = std::uint64_t{1} << 27;

inline std::uint64_t next_pow2(std::uint64_t n) { return n <= 1 ? 1 : std::bit_ceil(n); }

// e(x / M) for an integer numerator, reduced mod M first so the phase is
// accurate for any x.
inline cplx unit_root(std::uint64_t x, std::uint64_t M) {
  const double a = 2.0 * std::numbers::pi * static_cast<double>(x % M) / static_cast<double>(M);
  return {std::cos(a), std::sin(a)};
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

// In-place complex transform of fixed length with an owned, FFTW-aligned
// buffer. The planner is not thread-safe, so planning is serialized;
// execution is not.
class ComplexFft {
public:
  enum class direction { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

  ComplexFft(std::size_t n, direction dir) : n_(n) {
    data_ = reinterpret_cast<cplx*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!data_) throw capacity_error("ComplexFft: cannot allocate " + std::to_string(n) + " points");
    std::fill(data_, data_ + n, cplx{});
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(data_),
                             reinterpret_cast<fftw_complex*>(data_), static_cast<int>(dir), FFTW_ESTIMATE);
  }
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;
  ComplexFft(ComplexFft&& o) noexcept : n_(o.n_), data_(o.data_), plan_(o.plan_) {
    o.data_ = nullptr;
    o.plan_ = nullptr;
  }
  ~ComplexFft() {
    if (plan_) {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan_);
    }
    if (data_) fftw_free(data_);
  }

  std::span<cplx> buffer() { return {data_, n_}; }
  std::span<const cplx> buffer() const { return {data_, n_}; }
  std::size_t size() const { return n_; }
  void execute() { fftw_execute(plan_); }

private:
  std::size_t n_;
  cplx* data_ = nullptr;
  fftw_plan plan_ = nullptr;
};

// A trigonometric polynomial sum_{k=lo}^{lo+size-1} coeff[k-lo] e(k alpha).
struct TrigPoly {
  std::int64_t lo = 0;
  std::vector<cplx> coeff;

  std::int64_t hi() const { return lo + static_cast<std::int64_t>(coeff.size()) - 1; }
  std::uint64_t degree() const {
    return coeff.empty() ? 0 : static_cast<std::uint64_t>(std::max(std::abs(lo), std::abs(hi())));
  }
};

// Real coefficients a[n] at frequency n = 0..size-1.
inline TrigPoly from_real(std::span<const double> a) {
  TrigPoly p;
  p.lo = 0;
  p.coeff.assign(a.begin(), a.end());
  return p;
}

// Complex values of a trigonometric polynomial at j/M, j = 0..M-1.
struct GridEvaluation {
  std::uint64_t M = 0;
  std::uint64_t degree = 0;
  std::vector<cplx> values;

  // True when the grid integrates |F|^2 (degree 2*degree) exactly.
  bool exact_for_square() const { return M >= 2 * degree + 1; }
};

// Samples p on the M-point grid with one length-M transform. Coefficients
// are folded mod M, which is exact aliasing, so any M works; exactness of
// grid quadrature is recorded in GridEvaluation.
inline GridEvaluation sample_grid(const TrigPoly& p, std::uint64_t M) {
  if (M == 0 || (M & (M - 1)) != 0) throw domain_error("sample_grid: M must be a power of two");
  if (M > max_materialized_grid) {
    throw capacity_error("sample_grid: M = " + std::to_string(M) + " exceeds the materialized grid cap");
  }
  ComplexFft fft(M, ComplexFft::direction::backward);
  auto buf = fft.buffer();
  const auto sM = static_cast<std::int64_t>(M);
  for (std::size_t i = 0; i < p.coeff.size(); ++i) {
    const std::int64_t k = p.lo + static_cast<std::int64_t>(i);
    buf[static_cast<std::size_t>(((k % sM) + sM) % sM)] += p.coeff[i];
  }
  fft.execute();
  GridEvaluation ev;
  ev.M = M;
  ev.degree = p.degree();
  ev.values.assign(buf.begin(), buf.end());
  return ev;
}

// Fourier coefficients of grid data: c_k = (1/M) sum_j v_j e(-k j/M).
inline std::vector<cplx> grid_coefficients(std::span<const cplx> values) {
  const std::size_t M = values.size();
  ComplexFft fft(M, ComplexFft::direction::forward);
  std::copy(values.begin(), values.end(), fft.buffer().begin());
  fft.execute();
  std::vector<cplx> out(fft.buffer().begin(), fft.buffer().end());
  const double inv = 1.0 / static_cast<double>(M);
  for (auto& z : out) z *= inv;
  return out;
}

// Grid mean of fn(values[j]) with the fixed reduction tree.
template <typename Fn>
double grid_mean(std::span<const cplx> values, Fn&& fn) {
  return deterministic_sum(0, values.size(), [&](std::size_t j) { return fn(values[j]); }) /
         static_cast<double>(values.size());
}

// ---------------------------------------------------------------------
// Streaming evaluation for grids too large to hold in memory.
//
// For polynomials with real coefficients at frequencies 0..N the M-point
// grid is split into K = M / M0 interleaved cosets, M0 = next_pow2(N+1):
// point j = K i + r sits at alpha = i/M0 + r/M, so coset r is one length-M0
// transform of a[n] e(n r / M). Real coefficients give |P(1-alpha)| =
// |P(alpha)|, and coset r mirrors coset K-r, so only r = 0..K/2 are
// evaluated (interior cosets weighted twice). Functionals passed in must
// therefore be invariant under simultaneous conjugation of their inputs.
// ---------------------------------------------------------------------

template <std::size_t F, typename Fn>
std::array<double, F> stream_grid_means(std::span<const std::vector<double>> polys, std::uint64_t M, Fn&& fn) {
  if (M == 0 || (M & (M - 1)) != 0) throw domain_error("stream_grid_means: M must be a power of two");
  if (polys.empty() || polys.size() > 8) throw domain_error("stream_grid_means: expects 1 to 8 polynomials");
  std::size_t len = 0;
  for (const auto& p : polys) len = std::max(len, p.size());
  const std::uint64_t M0 = std::min<std::uint64_t>(M, std::max<std::uint64_t>(next_pow2(len), 64));
  const std::uint64_t K = M / M0;
  const std::uint64_t cosets = K == 1 ? 1 : K / 2 + 1;
  const std::size_t npoly = polys.size();

  // Split twiddles e(n r/M) = e(h B r/M) e(l r/M) with n = h B + l.
  constexpr std::uint64_t B = 1024;
  const std::uint64_t H = (len + B - 1) / B;

  struct worker_state {
    std::vector<ComplexFft> ffts;
    std::vector<cplx> hi_tw, lo_tw;
    std::array<std::vector<double>, F> acc;
  };
  const unsigned workers = active_workers(cosets);
  std::vector<worker_state> states(workers);
  for (auto& s : states) {
    for (std::size_t q = 0; q < npoly; ++q) s.ffts.emplace_back(M0, ComplexFft::direction::backward);
    s.hi_tw.resize(H);
    s.lo_tw.resize(B);
    for (auto& a : s.acc) a.resize(M0);
  }

  std::vector<std::array<double, F>> partial(cosets);
  parallel_chunks_indexed(cosets, [&](std::size_t r, unsigned w) {
    auto& s = states[w];
    if (K > 1) {
      for (std::uint64_t h = 0; h < H; ++h) s.hi_tw[h] = unit_root(h * B * r, M);
      for (std::uint64_t l = 0; l < B; ++l) s.lo_tw[l] = unit_root(l * r, M);
    }
    for (std::size_t q = 0; q < npoly; ++q) {
      auto buf = s.ffts[q].buffer();
      std::fill(buf.begin(), buf.end(), cplx{});
      const auto& a = polys[q];
      for (std::size_t n = 0; n < a.size(); ++n) {
        if (a[n] == 0.0) continue;
        const cplx tw = K > 1 ? s.hi_tw[n / B] * s.lo_tw[n % B] : cplx{1.0, 0.0};
        buf[n % M0] += a[n] * tw;
      }
      s.ffts[q].execute();
    }
    std::array<cplx, 8> vals{};
    for (std::uint64_t i = 0; i < M0; ++i) {
      for (std::size_t q = 0; q < npoly && q < vals.size(); ++q) vals[q] = s.ffts[q].buffer()[i];
      const std::array<double, F> v = fn(std::span<const cplx>(vals.data(), npoly));
      for (std::size_t f = 0; f < F; ++f) s.acc[f][i] = v[f];
    }
    const double weight = (K > 1 && r != 0 && r != K / 2) ? 2.0 : 1.0;
    for (std::size_t f = 0; f < F; ++f) partial[r][f] = weight * pairwise_sum(s.acc[f]);
  });

  std::array<double, F> out{};
  std::vector<double> col(cosets);
  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t r = 0; r < cosets; ++r) col[r] = partial[r][f];
    out[f] = pairwise_sum(col) / static_cast<double>(M);
  }
  return out;
}

}  // namespace ppl
