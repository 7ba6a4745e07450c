#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hypspec {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;

constexpr double kBoundaryCutoff = 1.0 - 1e-9;   // |x| beyond this is not evaluated
constexpr double kNearBoundaryFlag = 1.0 - 1e-14; // |x| beyond this is flagged
constexpr double kInf = std::numeric_limits<double>::infinity();

// Error taxonomy shared by all modules. Everything derives from std::runtime_error
// so callers can catch broadly; the CLI maps these onto exit codes.
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct degenerate_immersion_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct near_singular_transform_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct resolution_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct mollification_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct containment_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// log(sinh(t)) without overflow for large t.
inline double log_sinh(double t) {
  if (t > 20.0) return t + std::log1p(-std::exp(-2.0 * t)) - std::log(2.0);
  return std::log(std::sinh(t));
}

// sinh(t)^p evaluated through logs so that p*t up to ~700 stays finite.
inline double sinh_pow(double t, double p) {
  if (p == 0.0) return 1.0;
  return std::exp(p * log_sinh(t));
}

inline double sq(double x) { return x * x; }

// Pairwise summation: deterministic and more accurate than naive left-to-right.
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(std::span<const double>(v.data(), v.size()));
}

// Parallelism degree: explicit argument wins, then HYPSPEC_THREADS, then 1.
inline int thread_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HYPSPEC_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

// Runs fn(i) for i in [0, n). Chunk boundaries depend only on n, never on the
// thread count, so per-chunk results merge in a fixed order.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         int threads = 0) {
  const int nt = std::min<std::size_t>(thread_count(threads), std::max<std::size_t>(n, 1));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::atomic<std::size_t> next{0};
  const std::size_t grain = std::max<std::size_t>(1, n / (4 * nt));
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t begin = next.fetch_add(grain);
        if (begin >= n) break;
        std::size_t end = std::min(n, begin + grain);
        for (std::size_t i = begin; i < end; ++i) fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace hypspec
