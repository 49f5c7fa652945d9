#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lnr {

// Thrown when an argument violates a documented precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an evaluation point lies outside the mathematical domain of a
// formula (e.g. a barrier evaluated past its pole).
class MathDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Thrown when an iterative solve stagnates or diverges. Carries the residual
// history so callers can report the last iterate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline int& thread_budget_ref() {
  static int budget = std::max(1u, std::thread::hardware_concurrency());
  return budget;
}
}  // namespace detail

inline void set_thread_budget(int threads) {
  detail::thread_budget_ref() = threads > 0 ? threads : 1;
}
inline int thread_budget() { return detail::thread_budget_ref(); }

// Chunked parallel loop. The chunk decomposition is fixed (independent of the
// number of worker threads), so per-chunk partial results combine in a fixed
// order and floating-point output is identical across machines and runs.
inline constexpr std::int64_t kParallelChunks = 256;

template <typename Fn>
void parallel_for_chunks(std::int64_t count, const Fn& body) {
  if (count <= 0) return;
  const std::int64_t nchunks = count < kParallelChunks ? 1 : kParallelChunks;
  const std::int64_t chunk = (count + nchunks - 1) / nchunks;
  const int nthreads = thread_budget();
  if (nthreads <= 1 || count < 4096) {
    for (std::int64_t c = 0; c < nchunks; ++c) {
      const std::int64_t lo = c * chunk;
      const std::int64_t hi = std::min(count, lo + chunk);
      if (lo < hi) body(c, lo, hi);
    }
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) {
    workers.emplace_back([&, t]() {
      for (std::int64_t c = t; c < nchunks; c += nthreads) {
        const std::int64_t lo = c * chunk;
        const std::int64_t hi = std::min(count, lo + chunk);
        if (lo < hi) body(c, lo, hi);
      }
    });
  }
  for (auto& w : workers) w.join();
}

template <typename Fn>
void parallel_for(std::int64_t count, const Fn& body) {
  parallel_for_chunks(count, [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) body(i);
  });
}

// Deterministic reduction helper: per-chunk partials combined in chunk order.
template <typename Fn>
double parallel_sum(std::int64_t count, const Fn& term) {
  std::vector<double> partial(kParallelChunks, 0.0);
  parallel_for_chunks(count, [&](std::int64_t c, std::int64_t lo, std::int64_t hi) {
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(c)] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <typename Fn>
double parallel_max(std::int64_t count, const Fn& term) {
  std::vector<double> partial(kParallelChunks, -std::numeric_limits<double>::infinity());
  parallel_for_chunks(count, [&](std::int64_t c, std::int64_t lo, std::int64_t hi) {
    double s = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = lo; i < hi; ++i) s = std::max(s, term(i));
    partial[static_cast<std::size_t>(c)] = s;
  });
  double total = -std::numeric_limits<double>::infinity();
  for (double p : partial) total = std::max(total, p);
  return total;
}

// Least-squares slope of log(y) against log(x); used for observed orders.
inline double fitted_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw ArgumentError("fitted_log_slope: need two or more samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace lnr
