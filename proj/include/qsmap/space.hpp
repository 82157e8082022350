#ifndef QSMAP_SPACE_HPP
#define QSMAP_SPACE_HPP

// Finite semimetric spaces, subsets, spectra and point maps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qsmap/error.hpp"
#include "qsmap/numeric.hpp"

namespace qsmap {

inline constexpr double kDefaultTol = 1e-9;

/// A named scalar function on [0, inf), used for distance transforms and the
/// generator/gauge arguments of the constructions.
struct ScalarGauge {
  std::string name;
  std::function<double(double)> fn;

  double operator()(double u) const { return fn(u); }
};

/// Finite set of labelled points with a symmetric, zero-diagonal distance
/// matrix that is strictly positive off the diagonal. Immutable once built;
/// construct through build_space().
class SemimetricSpace {
 public:
  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  double d(std::size_t i, std::size_t j) const noexcept { return dist_[i * size() + j]; }

  /// Row-major n*n matrix.
  std::span<const double> matrix() const noexcept { return dist_; }

  std::optional<std::size_t> index_of(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

  friend bool operator==(const SemimetricSpace& a, const SemimetricSpace& b) {
    return a.labels_ == b.labels_ && a.dist_ == b.dist_;
  }

 private:
  friend SemimetricSpace build_space_flat(std::vector<std::string>, std::vector<double>, double,
                                          std::string);

  std::string name_;
  std::vector<std::string> labels_;
  std::vector<double> dist_;
};

using SpacePtr = std::shared_ptr<const SemimetricSpace>;

/// Validates a flat row-major matrix. Asymmetry within `tol` (relative) is
/// averaged away; diagonal entries within `tol` of zero are forced to 0.
inline SemimetricSpace build_space_flat(std::vector<std::string> labels, std::vector<double> matrix,
                                        double tol = kDefaultTol, std::string name = {}) {
  const std::size_t n = labels.size();
  if (matrix.size() != n * n) {
    throw Error(ErrorKind::ShapeMismatch, "matrix is not " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (!(tol >= 0.0)) throw Error(ErrorKind::BadParams, "tolerance must be nonnegative");
  {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen.insert(labels[i]).second) {
        throw Error(ErrorKind::DuplicateLabel, "label '" + labels[i] + "' occurs twice", {i});
      }
    }
  }
  double scale = 0.0;
  for (std::size_t k = 0; k < matrix.size(); ++k) {
    if (!std::isfinite(matrix[k])) {
      throw Error(ErrorKind::NonFinite, "matrix entry is not finite", {k / n, k % n});
    }
    scale = std::max(scale, std::abs(matrix[k]));
  }
  const double diag_tol = tol * std::max(1.0, scale);
  for (std::size_t i = 0; i < n; ++i) {
    double& dii = matrix[i * n + i];
    if (std::abs(dii) > diag_tol) {
      throw Error(ErrorKind::NonZeroDiagonal, "d(" + labels[i] + "," + labels[i] + ") is not 0", {i, i});
    }
    dii = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = matrix[i * n + j];
      const double b = matrix[j * n + i];
      if (a < 0.0 || b < 0.0) {
        throw Error(ErrorKind::NegativeDistance,
                    "d(" + labels[i] + "," + labels[j] + ") is negative", {i, j});
      }
      if (!close_rel(a, b, tol)) {
        throw Error(ErrorKind::NonSymmetric,
                    "d(" + labels[i] + "," + labels[j] + ") differs from its transpose", {i, j});
      }
      const double avg = a == b ? a : 0.5 * (a + b);
      if (avg <= 0.0) {
        throw Error(ErrorKind::ZeroOffDiagonal,
                    "distinct points " + labels[i] + " and " + labels[j] + " at distance 0", {i, j});
      }
      matrix[i * n + j] = avg;
      matrix[j * n + i] = avg;
    }
  }
  SemimetricSpace space;
  space.name_ = std::move(name);
  space.labels_ = std::move(labels);
  space.dist_ = std::move(matrix);
  return space;
}

inline SemimetricSpace build_space(std::vector<std::string> labels,
                                   const std::vector<std::vector<double>>& matrix,
                                   double tol = kDefaultTol, std::string name = {}) {
  const std::size_t n = labels.size();
  if (matrix.size() != n) {
    throw Error(ErrorKind::ShapeMismatch, "matrix has " + std::to_string(matrix.size()) +
                                              " rows for " + std::to_string(n) + " labels");
  }
  std::vector<double> flat;
  flat.reserve(n * n);
  for (const auto& row : matrix) {
    if (row.size() != n) throw Error(ErrorKind::ShapeMismatch, "matrix is not square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return build_space_flat(std::move(labels), std::move(flat), tol, std::move(name));
}

inline SpacePtr share(SemimetricSpace space) {
  return std::make_shared<const SemimetricSpace>(std::move(space));
}

/// Labels "p0", "p1", ...
inline std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i));
  return labels;
}

/// Sorted distinct distance values, always starting with 0.
struct Spectrum {
  std::vector<double> values;
};

inline Spectrum spectrum(const SemimetricSpace& space) {
  std::vector<double> values{0.0};
  const std::size_t n = space.size();
  values.reserve(1 + n * (n - (n > 0 ? 1 : 0)) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) values.push_back(space.d(i, j));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return {std::move(values)};
}

/// Nonempty, sorted, duplicate-free selection of points of one space.
struct SubsetRef {
  SpacePtr space;
  std::vector<std::size_t> indices;
};

inline SubsetRef make_subset(SpacePtr space, std::vector<std::size_t> indices) {
  if (!space) throw Error(ErrorKind::BadSubset, "subset has no space");
  if (indices.empty()) throw Error(ErrorKind::BadSubset, "subset is empty");
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw Error(ErrorKind::BadSubset, "subset repeats a point");
  }
  if (indices.back() >= space->size()) throw Error(ErrorKind::BadSubset, "subset index out of range");
  return {std::move(space), std::move(indices)};
}

inline SubsetRef whole(SpacePtr space) {
  std::vector<std::size_t> all(space->size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return make_subset(std::move(space), std::move(all));
}

inline bool is_subset_of(const SubsetRef& a, const SubsetRef& b) {
  return std::includes(b.indices.begin(), b.indices.end(), a.indices.begin(), a.indices.end());
}

inline double diameter(const SemimetricSpace& space, std::span<const std::size_t> indices) {
  double diam = 0.0;
  for (std::size_t p = 0; p < indices.size(); ++p)
    for (std::size_t q = p + 1; q < indices.size(); ++q)
      diam = std::max(diam, space.d(indices[p], indices[q]));
  return diam;
}

inline double diameter(const SubsetRef& subset) { return diameter(*subset.space, subset.indices); }

inline double diameter(const SemimetricSpace& space) {
  double diam = 0.0;
  for (double v : space.matrix()) diam = std::max(diam, v);
  return diam;
}

/// The induced subspace on `indices` (in the given order).
inline SemimetricSpace subspace(const SemimetricSpace& space, std::span<const std::size_t> indices) {
  const std::size_t m = indices.size();
  std::vector<std::string> labels;
  std::vector<double> flat(m * m);
  for (std::size_t p = 0; p < m; ++p) {
    labels.push_back(space.label(indices[p]));
    for (std::size_t q = 0; q < m; ++q) flat[p * m + q] = space.d(indices[p], indices[q]);
  }
  return build_space_flat(std::move(labels), std::move(flat), 0.0, space.name());
}

/// Replaces every distance u by scaler(u). The scaler must vanish at 0 and
/// be strictly increasing on the space's spectrum.
inline SemimetricSpace transform_distances(const SemimetricSpace& space, const ScalarGauge& scaler,
                                           std::string name = {}) {
  const double origin = scaler(0.0);
  if (!(std::abs(origin) <= 1e-12)) {
    throw Error(ErrorKind::ScalerOriginNonzero, "scaler '" + scaler.name + "' is nonzero at 0");
  }
  const auto spec = spectrum(space);
  double prev = 0.0;
  for (std::size_t k = 1; k < spec.values.size(); ++k) {
    const double v = scaler(spec.values[k]);
    if (!(v > prev) || !std::isfinite(v)) {
      throw Error(ErrorKind::ScalerNotMonotone,
                  "scaler '" + scaler.name + "' is not strictly increasing on the spectrum");
    }
    prev = v;
  }
  const std::size_t n = space.size();
  std::vector<double> flat(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) flat[i * n + j] = scaler(space.d(i, j));
  if (name.empty()) name = space.name().empty() ? scaler.name : space.name() + "|" + scaler.name;
  return build_space_flat(space.labels(), std::move(flat), 0.0, std::move(name));
}

/// Snowflake transform u -> u^alpha.
inline ScalarGauge power_scaler(double alpha, double lambda = 1.0) {
  return {"power:" + format_number(alpha),
          [alpha, lambda](double u) { return u == 0.0 ? 0.0 : lambda * std::pow(u, alpha); }};
}

inline ScalarGauge scale_scaler(double lambda) {
  return {"scale:" + format_number(lambda), [lambda](double u) { return lambda * u; }};
}

inline ScalarGauge expm1_scaler() {
  return {"expm1", [](double u) { return std::expm1(u); }};
}

/// A mapping between two spaces given by point assignment.
class PointMap {
 public:
  PointMap(SpacePtr domain, SpacePtr codomain, std::vector<std::size_t> assignment,
           bool require_bijective = false)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), assignment_(std::move(assignment)) {
    if (!domain_ || !codomain_) throw Error(ErrorKind::BadParams, "map needs a domain and a codomain");
    if (assignment_.size() != domain_->size()) {
      throw Error(ErrorKind::UnassignedPoint, "assignment length differs from domain size");
    }
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
      if (assignment_[i] >= codomain_->size()) {
        throw Error(ErrorKind::UnknownTarget, "point " + domain_->label(i) + " maps outside the codomain", {i});
      }
    }
    bijective_ = domain_->size() == codomain_->size();
    if (bijective_) {
      std::vector<bool> hit(codomain_->size(), false);
      for (std::size_t target : assignment_) {
        if (hit[target]) {
          bijective_ = false;
          break;
        }
        hit[target] = true;
      }
    }
    if (require_bijective && !bijective_) throw Error(ErrorKind::NotBijective, "map is not a bijection");
  }

  const SemimetricSpace& domain() const noexcept { return *domain_; }
  const SemimetricSpace& codomain() const noexcept { return *codomain_; }
  const SpacePtr& domain_ptr() const noexcept { return domain_; }
  const SpacePtr& codomain_ptr() const noexcept { return codomain_; }
  const std::vector<std::size_t>& assignment() const noexcept { return assignment_; }
  std::size_t operator()(std::size_t i) const { return assignment_.at(i); }
  bool is_bijective() const noexcept { return bijective_; }

  /// rho(f(i), f(j)).
  double image_d(std::size_t i, std::size_t j) const noexcept {
    return codomain_->d(assignment_[i], assignment_[j]);
  }

  PointMap inverse() const {
    if (!bijective_) throw Error(ErrorKind::NotBijective, "only bijections have an inverse");
    std::vector<std::size_t> inv(assignment_.size());
    for (std::size_t i = 0; i < assignment_.size(); ++i) inv[assignment_[i]] = i;
    return PointMap(codomain_, domain_, std::move(inv), true);
  }

 private:
  SpacePtr domain_;
  SpacePtr codomain_;
  std::vector<std::size_t> assignment_;
  bool bijective_ = false;
};

/// g o f.
inline PointMap compose(const PointMap& f, const PointMap& g) {
  if (&f.codomain() != &g.domain() && !(f.codomain() == g.domain())) {
    throw Error(ErrorKind::BadParams, "codomain of the first map is not the domain of the second");
  }
  std::vector<std::size_t> assignment(f.assignment().size());
  for (std::size_t i = 0; i < assignment.size(); ++i) assignment[i] = g(f(i));
  return PointMap(f.domain_ptr(), g.codomain_ptr(), std::move(assignment));
}

/// Map i -> i between two spaces of equal size.
inline PointMap index_map(SpacePtr domain, SpacePtr codomain) {
  if (domain->size() != codomain->size()) throw Error(ErrorKind::NotBijective, "spaces differ in size");
  std::vector<std::size_t> assignment(domain->size());
  for (std::size_t i = 0; i < assignment.size(); ++i) assignment[i] = i;
  return PointMap(std::move(domain), std::move(codomain), std::move(assignment), true);
}

/// Label-to-label construction; every domain label must be assigned exactly once.
inline PointMap build_map(SpacePtr domain, SpacePtr codomain,
                          const std::vector<std::pair<std::string, std::string>>& assignment,
                          bool require_bijective = false) {
  std::unordered_map<std::string, std::size_t> dom_index;
  std::unordered_map<std::string, std::size_t> cod_index;
  for (std::size_t i = 0; i < domain->size(); ++i) dom_index.emplace(domain->label(i), i);
  for (std::size_t j = 0; j < codomain->size(); ++j) cod_index.emplace(codomain->label(j), j);
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> targets(domain->size(), kUnset);
  for (const auto& [from, to] : assignment) {
    const auto src = dom_index.find(from);
    if (src == dom_index.end()) throw Error(ErrorKind::UnknownSource, "'" + from + "' is not a domain point");
    const auto dst = cod_index.find(to);
    if (dst == cod_index.end()) {
      throw Error(ErrorKind::UnknownTarget, "'" + to + "' is not a codomain point", {src->second});
    }
    if (targets[src->second] != kUnset) {
      throw Error(ErrorKind::DuplicateAssignment, "'" + from + "' is assigned twice", {src->second});
    }
    targets[src->second] = dst->second;
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == kUnset) {
      throw Error(ErrorKind::UnassignedPoint, "'" + domain->label(i) + "' has no image", {i});
    }
  }
  return PointMap(std::move(domain), std::move(codomain), std::move(targets), require_bijective);
}

}  // namespace qsmap

#endif  // QSMAP_SPACE_HPP
