#ifndef QSMAP_TRIANGLE_HPP
#define QSMAP_TRIANGLE_HPP

// Triangle functions and the classifiers built on them: generalized triangle
// inequality, minimal b-metric coefficient, Ptolemy's inequality.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "qsmap/error.hpp"
#include "qsmap/numeric.hpp"
#include "qsmap/space.hpp"

namespace qsmap {

/// Symmetric gauge Phi, monotone in each argument, Phi(0,0) = 0.
class TriangleFunction {
 public:
  enum class Kind { Additive, ScaledAdditive, Max, Custom };
  using Evaluator = std::function<double(double, double)>;

  static TriangleFunction additive() { return TriangleFunction(Kind::Additive, 1.0); }

  /// K * (u + v). A b-metric coefficient is K >= 1; smaller K is accepted so
  /// that sharpness of a minimal coefficient can be probed.
  static TriangleFunction scaled_additive(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorKind::BadParams, "K must be positive");
    return TriangleFunction(Kind::ScaledAdditive, k);
  }

  static TriangleFunction max_gauge() { return TriangleFunction(Kind::Max, 1.0); }

  /// Validated on the 64x64 gauge probe grid (symmetry, monotonicity) and at
  /// the origin. `continuous` is a declared capability, not verified.
  static TriangleFunction custom(Evaluator fn, std::string name = "custom", bool continuous = false) {
    if (!fn) throw Error(ErrorKind::InvalidGauge, "empty evaluator");
    TriangleFunction phi(Kind::Custom, 1.0);
    phi.fn_ = std::make_shared<const Evaluator>(std::move(fn));
    phi.name_ = std::move(name);
    phi.continuous_ = continuous;
    phi.validate_custom();
    return phi;
  }

  Kind kind() const noexcept { return kind_; }
  double coefficient() const noexcept { return k_; }
  bool continuous() const noexcept { return continuous_; }

  double operator()(double u, double v) const {
    switch (kind_) {
      case Kind::Additive: return u + v;
      case Kind::ScaledAdditive: return k_ * (u + v);
      case Kind::Max: return std::max(u, v);
      case Kind::Custom: return (*fn_)(u, v);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// phi(t) = Phi(t, t).
  double diag(double t) const { return (*this)(t, t); }

  std::string describe() const {
    switch (kind_) {
      case Kind::Additive: return "additive";
      case Kind::ScaledAdditive: return "bmetric:" + format_number(k_);
      case Kind::Max: return "max";
      case Kind::Custom: return name_;
    }
    return "?";
  }

 private:
  TriangleFunction(Kind kind, double k) : kind_(kind), k_(k) {}

  void validate_custom() const {
    const auto& grid = probe::gauge_grid();
    if (!(std::abs((*this)(0.0, 0.0)) == 0.0)) {
      throw Error(ErrorKind::InvalidGauge, name_ + ": Phi(0,0) != 0");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const double v = (*this)(grid[i], grid[j]);
        if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::InvalidGauge, name_ + ": value not finite/nonnegative");
        if (!close_rel(v, (*this)(grid[j], grid[i]), 1e-12)) {
          throw Error(ErrorKind::InvalidGauge, name_ + ": not symmetric on the probe grid");
        }
        const double prev = i > 0 ? (*this)(grid[i - 1], grid[j]) : 0.0;
        if (v < prev && !close_rel(v, prev, 1e-12)) {
          throw Error(ErrorKind::InvalidGauge, name_ + ": not monotone on the probe grid");
        }
      }
    }
  }

  Kind kind_;
  double k_;
  std::shared_ptr<const Evaluator> fn_;
  std::string name_;
  bool continuous_ = true;
};

struct TriangleReport {
  bool holds = true;
  std::optional<std::array<std::size_t, 3>> worst_triple;  // (x, z, y)
  double lhs = 0.0;                                         // d(x, y)
  double rhs = 0.0;                                         // Phi(d(x,z), d(y,z))
  double margin = std::numeric_limits<double>::infinity();  // rhs - lhs
  double tol = 0.0;
};

/// d(x,y) <= Phi(d(x,z), d(y,z)) + tol over all ordered triples with x != y
/// (z unrestricted). Reports the first minimum-margin triple in (x, y, z)
/// lexicographic order.
inline TriangleReport check_triangle(const SemimetricSpace& space, const TriangleFunction& phi,
                                     double tol = kDefaultTol) {
  TriangleReport report;
  report.tol = tol;
  const std::size_t n = space.size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      const double lhs = space.d(x, y);
      for (std::size_t z = 0; z < n; ++z) {
        const double rhs = phi(space.d(x, z), space.d(y, z));
        const double margin = rhs - lhs;
        if (margin < report.margin) {
          report.margin = margin;
          report.lhs = lhs;
          report.rhs = rhs;
          report.worst_triple = std::array<std::size_t, 3>{x, z, y};
        }
      }
    }
  }
  report.holds = report.margin >= -tol;
  return report;
}

/// Smallest K with d(x,y) <= K (d(x,z) + d(z,y)) over the same triples as
/// check_triangle (so it is never below 1); 0 when n < 3.
inline double minimal_bmetric_K(const SemimetricSpace& space) {
  const std::size_t n = space.size();
  if (n < 3) return 0.0;
  double best = 0.0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      for (std::size_t z = 0; z < n; ++z) best = std::max(best, space.d(x, y) / (space.d(x, z) + space.d(z, y)));
    }
  return best;
}

enum class EnumerationMode { Exhaustive, Sampled };

inline std::string_view to_string(EnumerationMode mode) noexcept {
  return mode == EnumerationMode::Exhaustive ? "exhaustive" : "sampled";
}

struct PtolemyReport {
  bool holds = true;
  std::optional<std::array<std::size_t, 4>> witness;        // (x, y, z, t)
  double lhs = 0.0;                                         // d(x,z) d(t,y)
  double rhs = 0.0;                                         // d(x,y) d(t,z) + d(x,t) d(y,z)
  double margin = std::numeric_limits<double>::infinity();  // rhs - lhs
  EnumerationMode mode = EnumerationMode::Exhaustive;
  std::size_t checked = 0;
  double tol = 0.0;
};

inline constexpr std::size_t kPtolemyExhaustiveLimit = 64;
inline constexpr std::size_t kPtolemySamples = 1'000'000;

/// Ptolemy's inequality over ordered quadruples of distinct points; quadruples
/// with repeated points satisfy it identically and are skipped. Above 64
/// points a seeded sample of 10^6 quadruples is checked instead.
inline PtolemyReport is_ptolemaic(const SemimetricSpace& space, double tol = kDefaultTol,
                                  std::uint64_t seed = 0) {
  PtolemyReport report;
  report.tol = tol;
  const std::size_t n = space.size();
  auto visit = [&](std::size_t x, std::size_t y, std::size_t z, std::size_t t) {
    const double lhs = space.d(x, z) * space.d(t, y);
    const double rhs = space.d(x, y) * space.d(t, z) + space.d(x, t) * space.d(y, z);
    ++report.checked;
    if (rhs - lhs < report.margin) {
      report.margin = rhs - lhs;
      report.lhs = lhs;
      report.rhs = rhs;
      report.witness = std::array<std::size_t, 4>{x, y, z, t};
    }
  };
  if (n < 4) return report;
  if (n <= kPtolemyExhaustiveLimit) {
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x) continue;
        for (std::size_t z = 0; z < n; ++z) {
          if (z == x || z == y) continue;
          for (std::size_t t = 0; t < n; ++t) {
            if (t == x || t == y || t == z) continue;
            visit(x, y, z, t);
          }
        }
      }
  } else {
    report.mode = EnumerationMode::Sampled;
    Rng rng(seed);
    for (std::size_t k = 0; k < kPtolemySamples; ++k) {
      std::array<std::size_t, 4> q{};
      for (std::size_t slot = 0; slot < 4; ++slot) {
        bool fresh;
        do {
          q[slot] = rng.below(n);
          fresh = std::find(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(slot), q[slot]) ==
                  q.begin() + static_cast<std::ptrdiff_t>(slot);
        } while (!fresh);
      }
      visit(q[0], q[1], q[2], q[3]);
    }
  }
  report.holds = report.margin >= -tol;
  return report;
}

/// t with Phi(t, t) = y. Closed form for the built-in gauges, bisection for
/// custom ones (whose diagonal must be strictly increasing).
inline double invert_diag(const TriangleFunction& phi, double y) {
  if (!(y >= 0.0)) throw Error(ErrorKind::NotInvertible, "target must be nonnegative");
  switch (phi.kind()) {
    case TriangleFunction::Kind::Additive: return y / 2.0;
    case TriangleFunction::Kind::ScaledAdditive: return y / (2.0 * phi.coefficient());
    case TriangleFunction::Kind::Max: return y;
    case TriangleFunction::Kind::Custom: break;
  }
  auto diag = [&phi](double t) { return phi.diag(t); };
  if (!strictly_increasing_on(diag, probe::gauge_grid())) {
    throw Error(ErrorKind::NotInvertible, phi.describe() + ": diagonal is not strictly increasing");
  }
  return invert_increasing(diag, y);
}

}  // namespace qsmap

#endif  // QSMAP_TRIANGLE_HPP
