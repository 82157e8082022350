#ifndef QSMAP_DISTORTION_HPP
#define QSMAP_DISTORTION_HPP

// Diameter-ratio distortion bounds for quasisymmetric maps between spaces
// with (possibly different) triangle functions.

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "qsmap/error.hpp"
#include "qsmap/modulus.hpp"
#include "qsmap/quasisymmetry.hpp"
#include "qsmap/space.hpp"
#include "qsmap/triangle.hpp"

namespace qsmap {

inline constexpr double kBoundTol = 1e-9;

/// K for which phi(t) = Phi(t,t) = 2Kt, when the gauge is linear on the diagonal.
inline std::optional<double> diagonal_coefficient(const TriangleFunction& phi) {
  switch (phi.kind()) {
    case TriangleFunction::Kind::Additive: return 1.0;
    case TriangleFunction::Kind::ScaledAdditive: return phi.coefficient();
    case TriangleFunction::Kind::Max: return 0.5;
    case TriangleFunction::Kind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

struct ClassicalBounds {
  double k1 = 0.0;
  double k2 = 0.0;
  double lower = 0.0;  // 1 / (2 K2 eta(diam B / diam A))
  double upper = 0.0;  // eta(2 K1 diam A / diam B)
  double slack_lower = 0.0;
  double slack_upper = 0.0;
};

struct DistortionReport {
  bool holds = true;
  double diam_a = 0.0;
  double diam_b = 0.0;
  double diam_fa = 0.0;
  double diam_fb = 0.0;
  double ratio = 0.0;  // diam f(A) / diam f(B)
  // diam f(A)/diam f(B) <= eta(diam A / phi1^{-1}(diam B))
  double upper = 0.0;
  double slack_upper = 0.0;
  // 1/eta(diam B/diam A) <= diam f(A) / phi2^{-1}(diam f(B))
  double lower_lhs = 0.0;
  double lower_rhs = 0.0;
  double slack_lower = 0.0;
  std::optional<ClassicalBounds> classical;
  double tol = kBoundTol;
};

namespace detail {

inline std::vector<std::size_t> image_indices(const PointMap& f, const std::vector<std::size_t>& indices) {
  std::vector<std::size_t> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(f(i));
  return out;
}

inline void require_bound_preconditions(const PointMap& f, const Modulus& eta, const TriangleFunction& phi1,
                                        const TriangleFunction& phi2) {
  if (!check_qs(f, eta).holds) {
    throw Error(ErrorKind::NotQuasisymmetric, "map is not " + eta.describe() + "-quasisymmetric");
  }
  if (!check_triangle(f.domain(), phi1).holds) {
    throw Error(ErrorKind::PreconditionFailed, "domain does not satisfy " + phi1.describe());
  }
  if (!check_triangle(f.codomain(), phi2).holds) {
    throw Error(ErrorKind::PreconditionFailed, "codomain does not satisfy " + phi2.describe());
  }
}

inline bool same_space(const SubsetRef& s, const PointMap& f) {
  return s.space.get() == f.domain_ptr().get() || *s.space == f.domain();
}

}  // namespace detail

/// Both generalized bounds for A subset B, plus the b-metric double
/// inequality whenever both gauges are linear on the diagonal.
inline DistortionReport tv_bounds(const PointMap& f, const Modulus& eta, const SubsetRef& A, const SubsetRef& B,
                                  const TriangleFunction& phi1, const TriangleFunction& phi2,
                                  double tol = kBoundTol) {
  if (!detail::same_space(A, f) || !detail::same_space(B, f)) {
    throw Error(ErrorKind::BadSubset, "subsets must live in the map's domain");
  }
  if (!is_subset_of(A, B)) throw Error(ErrorKind::BadSubset, "A is not contained in B");
  DistortionReport r;
  r.tol = tol;
  r.diam_a = diameter(A);
  r.diam_b = diameter(B);
  if (!(r.diam_a > 0.0)) throw Error(ErrorKind::PreconditionFailed, "diam A must be positive");
  detail::require_bound_preconditions(f, eta, phi1, phi2);

  const auto fa = detail::image_indices(f, A.indices);
  const auto fb = detail::image_indices(f, B.indices);
  r.diam_fa = diameter(f.codomain(), fa);
  r.diam_fb = diameter(f.codomain(), fb);
  if (!(r.diam_fb > 0.0)) throw Error(ErrorKind::PreconditionFailed, "f(B) is a single point");
  r.ratio = r.diam_fa / r.diam_fb;

  r.upper = eta(r.diam_a / invert_diag(phi1, r.diam_b));
  r.slack_upper = r.upper - r.ratio;
  r.lower_lhs = 1.0 / eta(r.diam_b / r.diam_a);
  r.lower_rhs = r.diam_fa / invert_diag(phi2, r.diam_fb);
  r.slack_lower = r.lower_rhs - r.lower_lhs;
  r.holds = r.slack_upper >= -tol && r.slack_lower >= -tol;

  const auto k1 = diagonal_coefficient(phi1);
  const auto k2 = diagonal_coefficient(phi2);
  if (k1 && k2) {
    ClassicalBounds c;
    c.k1 = *k1;
    c.k2 = *k2;
    c.lower = 1.0 / (2.0 * c.k2 * eta(r.diam_b / r.diam_a));
    c.upper = eta(2.0 * c.k1 * r.diam_a / r.diam_b);
    c.slack_lower = r.ratio - c.lower;
    c.slack_upper = c.upper - r.ratio;
    r.holds = r.holds && c.slack_lower >= -tol && c.slack_upper >= -tol;
    r.classical = c;
  }
  return r;
}

struct PairBound {
  std::size_t x = 0;
  std::size_t y = 0;
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;
};

struct BilipschitzCheck {
  double derived_L = 0.0;
  std::optional<double> observed_L;
  bool holds = true;
};

struct BoundedImageReport {
  bool holds = true;
  double diam_x = 0.0;
  double diam_fx = 0.0;
  std::size_t pairs = 0;
  std::optional<PairBound> worst_lower;  // smallest value - lower
  std::optional<PairBound> worst_upper;  // smallest upper - value
  double slack_lower = std::numeric_limits<double>::infinity();
  double slack_upper = std::numeric_limits<double>::infinity();
  std::optional<BilipschitzCheck> bilipschitz;
  double tol = kBoundTol;
};

/// Pointwise two-sided bound with B = X and A = {x, y}. For eta = Linear(C)
/// between metric spaces also derives L = 2C max{diam Y/diam X, diam X/diam Y}.
inline BoundedImageReport bounded_image_bounds(const PointMap& f, const Modulus& eta, const TriangleFunction& phi1,
                                               const TriangleFunction& phi2, double tol = kBoundTol) {
  const SemimetricSpace& X = f.domain();
  if (X.size() < 2) throw Error(ErrorKind::PreconditionFailed, "domain needs at least two points");
  detail::require_bound_preconditions(f, eta, phi1, phi2);
  BoundedImageReport r;
  r.tol = tol;
  r.diam_x = diameter(X);
  std::vector<std::size_t> all(X.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  r.diam_fx = diameter(f.codomain(), detail::image_indices(f, all));
  if (!(r.diam_fx > 0.0)) throw Error(ErrorKind::PreconditionFailed, "f(X) is a single point");
  const double lower_scale = invert_diag(phi2, r.diam_fx);
  const double upper_scale = invert_diag(phi1, r.diam_x);
  for (std::size_t x = 0; x < X.size(); ++x)
    for (std::size_t y = x + 1; y < X.size(); ++y) {
      PairBound p{x, y, lower_scale / eta(r.diam_x / X.d(x, y)), f.image_d(x, y),
                  r.diam_fx * eta(X.d(x, y) / upper_scale)};
      ++r.pairs;
      if (p.value - p.lower < r.slack_lower) {
        r.slack_lower = p.value - p.lower;
        r.worst_lower = p;
      }
      if (p.upper - p.value < r.slack_upper) {
        r.slack_upper = p.upper - p.value;
        r.worst_upper = p;
      }
    }
  r.holds = r.slack_lower >= -tol && r.slack_upper >= -tol;
  if (eta.kind() == Modulus::Kind::Linear && phi1.kind() == TriangleFunction::Kind::Additive &&
      phi2.kind() == TriangleFunction::Kind::Additive) {
    BilipschitzCheck b;
    b.derived_L = 2.0 * eta.param() * std::max(r.diam_fx / r.diam_x, r.diam_x / r.diam_fx);
    b.observed_L = minimal_bilipschitz_L(f);
    b.holds = b.observed_L && *b.observed_L <= b.derived_L * (1.0 + tol);
    r.holds = r.holds && b.holds;
    r.bilipschitz = b;
  }
  return r;
}

}  // namespace qsmap

#endif  // QSMAP_DISTORTION_HPP
