#ifndef QSMAP_GENERATE_HPP
#define QSMAP_GENERATE_HPP

// Reproducible generators for the space families used throughout the library.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qsmap/error.hpp"
#include "qsmap/numeric.hpp"
#include "qsmap/space.hpp"

namespace qsmap {

enum class GeneratorKind { Euclidean, Ultrametric, RandomSemimetric, Pseudolinear, Wilson, Collinear };

struct GeneratorParams {
  int n = 0;
  int dim = 2;
  double s = 0.0;
  double t = 0.0;
  std::vector<double> coordinates;
};

inline std::string_view to_string(GeneratorKind kind) noexcept {
  switch (kind) {
    case GeneratorKind::Euclidean: return "euclidean";
    case GeneratorKind::Ultrametric: return "ultrametric";
    case GeneratorKind::RandomSemimetric: return "random_semimetric";
    case GeneratorKind::Pseudolinear: return "pseudolinear";
    case GeneratorKind::Wilson: return "wilson";
    case GeneratorKind::Collinear: return "collinear";
  }
  return "unknown";
}

inline GeneratorKind parse_generator_kind(std::string_view text) {
  for (auto kind : {GeneratorKind::Euclidean, GeneratorKind::Ultrametric, GeneratorKind::RandomSemimetric,
                    GeneratorKind::Pseudolinear, GeneratorKind::Wilson, GeneratorKind::Collinear}) {
    if (to_string(kind) == text) return kind;
  }
  if (text == "random-semimetric" || text == "random") return GeneratorKind::RandomSemimetric;
  throw Error(ErrorKind::BadParams, "unknown generator '" + std::string(text) + "'");
}

namespace detail {

inline void require_points(int n) {
  if (n < 1) throw Error(ErrorKind::BadParams, "point count must be at least 1");
}

inline SemimetricSpace euclidean(const GeneratorParams& p, std::uint64_t seed) {
  require_points(p.n);
  if (p.dim < 1) throw Error(ErrorKind::BadParams, "dimension must be at least 1");
  const std::size_t n = static_cast<std::size_t>(p.n);
  const std::size_t dim = static_cast<std::size_t>(p.dim);
  Rng rng(seed);
  std::vector<double> coords(n * dim);
  for (double& c : coords) c = rng.uniform();
  std::vector<double> flat(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double delta = coords[i * dim + k] - coords[j * dim + k];
        acc += delta * delta;
      }
      flat[i * n + j] = flat[j * n + i] = std::sqrt(acc);
    }
  }
  return build_space_flat(default_labels(n), std::move(flat), 0.0,
                          "euclidean(" + std::to_string(n) + "," + std::to_string(dim) + ")#" +
                              std::to_string(seed));
}

// Random agglomeration: at step k two random clusters merge at level h_k,
// with h_1 < h_2 < ... so cophenetic distances form an ultrametric.
inline SemimetricSpace ultrametric(const GeneratorParams& p, std::uint64_t seed) {
  require_points(p.n);
  const std::size_t n = static_cast<std::size_t>(p.n);
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  std::vector<double> flat(n * n, 0.0);
  double level = 0.0;
  while (clusters.size() > 1) {
    level += 0.25 + rng.uniform();
    const std::size_t a = rng.below(clusters.size());
    std::size_t b = rng.below(clusters.size() - 1);
    if (b >= a) ++b;
    for (std::size_t i : clusters[a])
      for (std::size_t j : clusters[b]) flat[i * n + j] = flat[j * n + i] = level;
    clusters[a].insert(clusters[a].end(), clusters[b].begin(), clusters[b].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
  }
  return build_space_flat(default_labels(n), std::move(flat), 0.0,
                          "ultrametric(" + std::to_string(n) + ")#" + std::to_string(seed));
}

inline SemimetricSpace random_semimetric(const GeneratorParams& p, std::uint64_t seed) {
  require_points(p.n);
  const std::size_t n = static_cast<std::size_t>(p.n);
  Rng rng(seed);
  std::vector<double> flat(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) flat[i * n + j] = flat[j * n + i] = rng.uniform_open_closed();
  return build_space_flat(default_labels(n), std::move(flat), 0.0,
                          "random_semimetric(" + std::to_string(n) + ")#" + std::to_string(seed));
}

inline SemimetricSpace pseudolinear(const GeneratorParams& p) {
  if (!(p.s > 0.0) || !(p.t > 0.0)) throw Error(ErrorKind::BadParams, "s and t must be positive");
  const double s = p.s;
  const double t = p.t;
  // x1..x4: d12 = d34 = t, d23 = d41 = s, d13 = d24 = s + t.
  std::vector<std::vector<double>> m = {
      {0.0, t, s + t, s},
      {t, 0.0, s, s + t},
      {s + t, s, 0.0, t},
      {s, s + t, t, 0.0},
  };
  return build_space({"x1", "x2", "x3", "x4"}, m, 0.0,
                     "pseudolinear(" + format_number(s) + "," + format_number(t) + ")");
}

// Points -1, 0, 1, 1/2, ..., 1/n on the line, with d(-1, 1/k) redefined to 1/k.
inline SemimetricSpace wilson(const GeneratorParams& p) {
  require_points(p.n);
  const std::size_t n = static_cast<std::size_t>(p.n);
  std::vector<double> xs{-1.0, 0.0};
  std::vector<std::string> labels{"-1", "0"};
  for (std::size_t k = 1; k <= n; ++k) {
    xs.push_back(1.0 / static_cast<double>(k));
    labels.push_back(k == 1 ? "1" : "1/" + std::to_string(k));
  }
  const std::size_t m = xs.size();
  std::vector<double> flat(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) flat[i * m + j] = std::abs(xs[i] - xs[j]);
  for (std::size_t k = 2; k < m; ++k) flat[0 * m + k] = flat[k * m + 0] = xs[k];
  return build_space_flat(std::move(labels), std::move(flat), 0.0, "wilson(" + std::to_string(n) + ")");
}

inline SemimetricSpace collinear(const GeneratorParams& p) {
  const auto& xs = p.coordinates;
  if (xs.empty()) throw Error(ErrorKind::BadParams, "collinear needs at least one coordinate");
  const std::size_t m = xs.size();
  std::vector<double> flat(m * m, 0.0);
  std::string name = "collinear(";
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(xs[i])) throw Error(ErrorKind::BadParams, "coordinates must be finite");
    name += (i ? "," : "") + format_number(xs[i]);
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      flat[i * m + j] = std::abs(xs[i] - xs[j]);
      if (flat[i * m + j] == 0.0) throw Error(ErrorKind::BadParams, "collinear coordinates must be distinct");
    }
  }
  return build_space_flat(default_labels(m), std::move(flat), 0.0, name + ")");
}

}  // namespace detail

/// Deterministic for a fixed (kind, params, seed); seed is ignored by the
/// closed-form families.
inline SemimetricSpace generate(GeneratorKind kind, const GeneratorParams& params, std::uint64_t seed = 0) {
  switch (kind) {
    case GeneratorKind::Euclidean: return detail::euclidean(params, seed);
    case GeneratorKind::Ultrametric: return detail::ultrametric(params, seed);
    case GeneratorKind::RandomSemimetric: return detail::random_semimetric(params, seed);
    case GeneratorKind::Pseudolinear: return detail::pseudolinear(params);
    case GeneratorKind::Wilson: return detail::wilson(params);
    case GeneratorKind::Collinear: return detail::collinear(params);
  }
  throw Error(ErrorKind::BadParams, "unknown generator");
}

inline SemimetricSpace euclidean_space(int n, int dim, std::uint64_t seed) {
  GeneratorParams p;
  p.n = n;
  p.dim = dim;
  return generate(GeneratorKind::Euclidean, p, seed);
}
inline SemimetricSpace ultrametric_space(int n, std::uint64_t seed) {
  GeneratorParams p;
  p.n = n;
  return generate(GeneratorKind::Ultrametric, p, seed);
}
inline SemimetricSpace random_semimetric_space(int n, std::uint64_t seed) {
  GeneratorParams p;
  p.n = n;
  return generate(GeneratorKind::RandomSemimetric, p, seed);
}
inline SemimetricSpace pseudolinear_space(double s, double t) {
  GeneratorParams p;
  p.s = s;
  p.t = t;
  return generate(GeneratorKind::Pseudolinear, p);
}
inline SemimetricSpace wilson_space(int n) {
  GeneratorParams p;
  p.n = n;
  return generate(GeneratorKind::Wilson, p);
}
inline SemimetricSpace collinear_space(std::vector<double> coordinates) {
  GeneratorParams p;
  p.coordinates = std::move(coordinates);
  return generate(GeneratorKind::Collinear, p);
}

}  // namespace qsmap

#endif  // QSMAP_GENERATE_HPP
