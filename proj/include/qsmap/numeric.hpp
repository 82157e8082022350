#ifndef QSMAP_NUMERIC_HPP
#define QSMAP_NUMERIC_HPP

// Shared numerical plumbing: probe grids, seeded random streams, monotone
// inversion by bisection.

#include <algorithm>
#include <charconv>
#include <string>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "qsmap/error.hpp"

namespace qsmap {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// n log-spaced samples over [lo, hi] inclusive (lo, hi > 0).
inline std::vector<double> log_grid(std::size_t n, double lo, double hi) {
  std::vector<double> grid;
  if (n == 0) return grid;
  grid.reserve(n);
  if (n == 1) {
    grid.push_back(std::sqrt(lo * hi));
    return grid;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(n - 1);
    grid.push_back(std::exp(a + (b - a) * u));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

/// The fixed probe grids. They are part of the public contract so that any
/// probe failure can be reproduced exactly.
namespace probe {

inline constexpr std::size_t kModulusPoints = 1024;
inline constexpr double kModulusLo = 1e-6;
inline constexpr double kModulusHi = 1e6;

inline constexpr std::size_t kGaugePoints = 64;
inline constexpr double kGaugeLo = 1e-6;
inline constexpr double kGaugeHi = 1e6;

// Pair grid for multiplicative conditions; products stay inside the gauge grid range.
inline constexpr std::size_t kProductPoints = 32;
inline constexpr double kProductLo = 1e-3;
inline constexpr double kProductHi = 1e3;

inline constexpr std::size_t kGeneratorPoints = 128;

inline const std::vector<double>& modulus_grid() {
  static const std::vector<double> grid = log_grid(kModulusPoints, kModulusLo, kModulusHi);
  return grid;
}

inline const std::vector<double>& gauge_grid() {
  static const std::vector<double> grid = log_grid(kGaugePoints, kGaugeLo, kGaugeHi);
  return grid;
}

inline const std::vector<double>& product_grid() {
  static const std::vector<double> grid = log_grid(kProductPoints, kProductLo, kProductHi);
  return grid;
}

}  // namespace probe

/// Relative closeness: |a - b| <= tol * max(|a|, |b|).
inline bool close_rel(double a, double b, double tol) noexcept {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

/// Strict increase along a sorted sample, tolerating plateaus only where the
/// function has saturated to 0 (underflow) or +inf (overflow).
inline bool strictly_increasing_on(const std::function<double(double)>& fn,
                                   const std::vector<double>& grid) {
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = fn(grid[k]);
    if (std::isnan(v) || v < 0.0) return false;
    if (k > 0) {
      const bool saturated = (v == 0.0 && prev == 0.0) || (std::isinf(v) && std::isinf(prev));
      if (!(v > prev) && !saturated) return false;
    }
    prev = v;
  }
  return true;
}

/// Seeded stream with a platform-independent uniform mapping (the standard
/// distributions are implementation-defined; the engine output is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

/// Solves fn(t) = y for a nondecreasing fn with fn(0) <= y by bracket
/// doubling then bisection down to adjacent doubles.
inline double invert_increasing(const std::function<double(double)>& fn, double y) {
  if (!(y >= 0.0)) throw Error(ErrorKind::NotInvertible, "target value must be nonnegative");
  if (y == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (!(fn(hi) >= y)) {
    lo = hi;
    hi *= 2.0;
    if (std::isinf(hi) || ++doublings > 1100) {
      throw Error(ErrorKind::NoBracket, "value not reached by bracket doubling");
    }
  }
  for (int iter = 0; iter < 2200; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (fn(mid) >= y) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::abs(fn(lo) - y) < std::abs(fn(hi) - y) ? lo : hi;
}

/// Golden-section maximisation of a unimodal function on [a, b].
inline double golden_max(const std::function<double(double)>& fn, double a, double b,
                         int iterations = 200) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int i = 0; i < iterations && std::abs(b - a) > 1e-15 * (std::abs(a) + std::abs(b)); ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = fn(d);
    }
  }
  return std::max({fn(a), fn(b), fc, fd});
}

}  // namespace qsmap

#endif  // QSMAP_NUMERIC_HPP
