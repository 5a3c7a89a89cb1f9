#pragma once

// Deterministic reductions.
//
// Every floating-point total in the library goes through one of these so
// that results are bit-stable across runs and across thread counts: work
// is cut into fixed-size chunks, each chunk is reduced with a pairwise
// tree, and chunk partials are combined with the same pairwise tree in
// chunk order. Which thread evaluated a chunk never affects the result.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace ppl {

inline constexpr std::size_t reduction_chunk = 4096;

namespace detail {

inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> n{0};
  return n;
}

}  // namespace detail

// Worker count for chunked loops. PPL_THREADS overrides anything set
// programmatically; 0 means "not set" and falls back to 1.
inline unsigned thread_count() {
  if (const char* env = std::getenv("PPL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned n = detail::thread_setting().load();
  return n == 0 ? 1u : n;
}

inline void set_thread_count(unsigned n) { detail::thread_setting().store(n); }

// Runs body(chunk_index, worker_index) for chunk_index in [0, chunks) on
// up to thread_count() workers. Chunks are claimed dynamically; callers
// write results into per-chunk slots so ordering is irrelevant.
// worker_index < active_workers(chunks) identifies per-worker scratch.
inline unsigned active_workers(std::size_t chunks) {
  return static_cast<unsigned>(std::min<std::size_t>(thread_count(), std::max<std::size_t>(chunks, 1)));
}

template <typename Body>
void parallel_chunks_indexed(std::size_t chunks, Body&& body) {
  const unsigned workers = active_workers(chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c, 0u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) body(c, w);
    });
  }
}

template <typename Body>
void parallel_chunks(std::size_t chunks, Body&& body) {
  parallel_chunks_indexed(chunks, [&](std::size_t c, unsigned) { body(c); });
}

// Pairwise (cascade) summation. Error grows as O(eps log n) rather than
// O(eps n) for naive accumulation.
inline double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t leaf = 32;
  if (xs.size() <= leaf) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Neumaier's variant of Kahan summation; used to cross-check pairwise
// totals where cancellation is a concern.
class compensated_sum {
public:
  compensated_sum& operator+=(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  double value() const { return sum_ + carry_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) {
  compensated_sum s;
  for (double x : xs) s += x;
  return s.value();
}

// Sum of term(i) for i in [first, last) using the fixed chunk tree.
template <typename Term>
double deterministic_sum(std::size_t first, std::size_t last, Term&& term) {
  if (last <= first) return 0.0;
  const std::size_t n = last - first;
  const std::size_t chunks = (n + reduction_chunk - 1) / reduction_chunk;
  std::vector<double> partial(chunks, 0.0);
  parallel_chunks(chunks, [&](std::size_t c) {
    const std::size_t lo = first + c * reduction_chunk;
    const std::size_t hi = std::min(last, lo + reduction_chunk);
    std::vector<double> buf(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = term(i);
    partial[c] = pairwise_sum(buf);
  });
  return pairwise_sum(partial);
}

// Convenience overload for a whole array.
inline double deterministic_sum(std::span<const double> xs) {
  return deterministic_sum(0, xs.size(), [&](std::size_t i) { return xs[i]; });
}

}  // namespace ppl
