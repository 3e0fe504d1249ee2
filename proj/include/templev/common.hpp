// Shared error types and small numeric helpers.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace templev {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Assumption B2 failure: the removed-jump mass eta is infinite.
struct DivergentEta : Error {
  using Error::Error;
};

// The |x|^alpha moment of a Rosinski measure diverges.
struct DivergentSigma : Error {
  using Error::Error;
};

struct UnsupportedAlpha : Error {
  using Error::Error;
};

struct QuadratureFailure : Error {
  using Error::Error;
};

struct IntegrabilityUnverified : Error {
  using Error::Error;
};

struct BracketFailure : Error {
  using Error::Error;
};

// Rejection acceptance ratio exceeded 1: a density or eta bug upstream.
struct RatioAboveOne : Error {
  using Error::Error;
};

struct EmptySample : Error {
  using Error::Error;
};

struct GridError : Error {
  using Error::Error;
};

constexpr double pi = 3.14159265358979323846;

// Deterministic parallel map: slot i of the output depends only on i, so
// results are identical for any thread count.
template <class Body>
void parallel_for(std::size_t n, int threads, const Body& body) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

inline bool nearly_equal(double a, double b, double rel, double abs_floor = 0.0) {
  return std::fabs(a - b) <= std::max(abs_floor, rel * std::max(std::fabs(a), std::fabs(b)));
}

// Gamma(1-alpha)*cos(pi*alpha/2)/alpha; the cosine-transform constant
// K(alpha) = int_0^inf (1-cos u) u^{-1-alpha} du for alpha in (0,1) u (1,2).
inline double stable_cosine_constant(double alpha) {
  return std::tgamma(1.0 - alpha) * std::cos(pi * alpha / 2.0) / alpha;
}

}  // namespace templev
