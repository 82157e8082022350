#ifndef QSMAP_WEAKSIM_HPP
#define QSMAP_WEAKSIM_HPP

// Weak similarities: bijections f with a strictly increasing phi on the
// spectrum such that rho(fx, fy) = phi(d(x, y)). Found by an edge-rank
// preserving backtracking search.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qsmap/error.hpp"
#include "qsmap/modulus.hpp"
#include "qsmap/numeric.hpp"
#include "qsmap/quasisymmetry.hpp"
#include "qsmap/space.hpp"

namespace qsmap {

inline constexpr double kRankTol = 1e-9;

/// phi on the spectrum only: from[i] -> to[i], both strictly ascending, from[0] = to[0] = 0.
struct SpectrumMap {
  std::vector<double> from;
  std::vector<double> to;

  /// Image of a spectrum value (matched within relative tol), or none.
  std::optional<double> operator()(double d, double tol = kRankTol) const {
    for (std::size_t k = 0; k < from.size(); ++k)
      if (d == from[k] || close_rel(d, from[k], tol)) return to[k];
    return std::nullopt;
  }
};

struct WeakSimilarity {
  PointMap f;
  SpectrumMap phi;
};

/// Distances bucketed into ranks: a new rank starts once a value exceeds the
/// smallest value of the current rank by more than tol (relative).
struct RankedSpace {
  std::vector<double> levels;             // representative (smallest) value per rank; levels[0] = 0
  std::vector<std::size_t> rank;          // n x n
  std::vector<std::size_t> multiplicity;  // unordered pairs per rank (rank 0 counts nothing)
  std::size_t n = 0;

  std::size_t at(std::size_t i, std::size_t j) const { return rank[i * n + j]; }
};

inline RankedSpace rank_space(const SemimetricSpace& S, double tol = kRankTol) {
  RankedSpace r;
  r.n = S.size();
  std::vector<double> values(S.matrix().begin(), S.matrix().end());
  values.push_back(0.0);
  std::sort(values.begin(), values.end());
  for (double v : values) {
    if (r.levels.empty() || v > r.levels.back() * (1.0 + tol)) r.levels.push_back(v);
  }
  // v > 0 always opens a rank above 0, since 0 * (1 + tol) = 0.
  auto rank_of = [&](double v) {
    const auto it = std::upper_bound(r.levels.begin(), r.levels.end(), v);
    return static_cast<std::size_t>(it - r.levels.begin()) - 1;
  };
  r.rank.resize(r.n * r.n);
  r.multiplicity.assign(r.levels.size(), 0);
  for (std::size_t i = 0; i < r.n; ++i)
    for (std::size_t j = 0; j < r.n; ++j) {
      r.rank[i * r.n + j] = rank_of(S.d(i, j));
      if (i < j) ++r.multiplicity[r.rank[i * r.n + j]];
    }
  return r;
}

/// The order isomorphism Sp X -> Sp Y (k-th smallest to k-th smallest), if the
/// spectra have equal size and equal per-rank pair multiplicities.
inline std::optional<SpectrumMap> forced_scaling(const SemimetricSpace& X, const SemimetricSpace& Y,
                                                 double tol = kRankTol) {
  const RankedSpace rx = rank_space(X, tol);
  const RankedSpace ry = rank_space(Y, tol);
  if (rx.levels.size() != ry.levels.size() || rx.multiplicity != ry.multiplicity) return std::nullopt;
  return SpectrumMap{rx.levels, ry.levels};
}

namespace detail {

inline std::vector<std::size_t> vertex_signature(const RankedSpace& r, std::size_t v) {
  std::vector<std::size_t> sig;
  sig.reserve(r.n);
  for (std::size_t u = 0; u < r.n; ++u)
    if (u != v) sig.push_back(r.at(v, u));
  std::sort(sig.begin(), sig.end());
  return sig;
}

}  // namespace detail

/// Exhaustive backtracking over rank-preserving bijections; vertices are placed
/// rarest incident-rank multiset first (ties by index). Sound and complete.
inline std::optional<WeakSimilarity> find_weak_similarity(const SpacePtr& X, const SpacePtr& Y,
                                                          double tol = kRankTol) {
  auto phi = forced_scaling(*X, *Y, tol);
  if (!phi) return std::nullopt;
  const RankedSpace rx = rank_space(*X, tol);
  const RankedSpace ry = rank_space(*Y, tol);
  const std::size_t n = rx.n;
  if (n != ry.n) return std::nullopt;

  std::vector<std::vector<std::size_t>> sx(n), sy(n);
  for (std::size_t v = 0; v < n; ++v) {
    sx[v] = detail::vertex_signature(rx, v);
    sy[v] = detail::vertex_signature(ry, v);
  }
  std::map<std::vector<std::size_t>, std::size_t> count_x, count_y;
  for (std::size_t v = 0; v < n; ++v) {
    ++count_x[sx[v]];
    ++count_y[sy[v]];
  }
  if (count_x != count_y) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return count_x[sx[a]] < count_x[sx[b]]; });
  std::vector<std::vector<std::size_t>> candidates(n);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w = 0; w < n; ++w)
      if (sx[v] == sy[w]) candidates[v].push_back(w);

  constexpr std::size_t kFree = static_cast<std::size_t>(-1);
  std::vector<std::size_t> assign(n, kFree);
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> place = [&](std::size_t depth) {
    if (depth == n) return true;
    const std::size_t v = order[depth];
    for (std::size_t w : candidates[v]) {
      if (used[w]) continue;
      bool ok = true;
      for (std::size_t k = 0; k < depth && ok; ++k) {
        const std::size_t u = order[k];
        ok = rx.at(v, u) == ry.at(w, assign[u]);
      }
      if (!ok) continue;
      assign[v] = w;
      used[w] = true;
      if (place(depth + 1)) return true;
      used[w] = false;
      assign[v] = kFree;
    }
    return false;
  };
  if (!place(0)) return std::nullopt;
  return WeakSimilarity{PointMap(X, Y, assign, true), std::move(*phi)};
}

inline constexpr std::size_t kBruteForceLimit = 9;

/// Tries all n! bijections in lexicographic order against the ordering
/// implications directly (no rank buckets): sorting domain pairs by d, each
/// consecutive equal step must stay equal in the image and each strict step
/// must stay strict.
inline std::optional<WeakSimilarity> brute_force_weak_similarity(const SpacePtr& X, const SpacePtr& Y,
                                                                 double tol = kRankTol) {
  const std::size_t n = X->size();
  if (n > kBruteForceLimit) throw Error(ErrorKind::TooLarge, "brute force is limited to 9 points");
  if (Y->size() != n) return std::nullopt;
  std::vector<std::array<std::size_t, 2>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [&](const auto& p, const auto& q) { return X->d(p[0], p[1]) < X->d(q[0], q[1]); });
  auto equal = [tol](double a, double b) { return a == b || close_rel(a, b, tol); };

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t k = 1; k < pairs.size() && ok; ++k) {
      const double d0 = X->d(pairs[k - 1][0], pairs[k - 1][1]);
      const double d1 = X->d(pairs[k][0], pairs[k][1]);
      const double r0 = Y->d(perm[pairs[k - 1][0]], perm[pairs[k - 1][1]]);
      const double r1 = Y->d(perm[pairs[k][0]], perm[pairs[k][1]]);
      ok = equal(d0, d1) ? equal(r0, r1) : (r0 < r1 && !equal(r0, r1));
    }
    if (!ok) continue;
    SpectrumMap phi{{0.0}, {0.0}};
    for (const auto& p : pairs) {
      const double d = X->d(p[0], p[1]);
      if (!equal(d, phi.from.back())) {
        phi.from.push_back(d);
        phi.to.push_back(Y->d(perm[p[0]], perm[p[1]]));
      }
    }
    return WeakSimilarity{PointMap(X, Y, perm, true), std::move(phi)};
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

using PairOfPairs = std::array<std::size_t, 4>;  // (x, y, z, w)

struct ImplicationReport {
  bool holds = true;
  std::size_t checked = 0;
  std::optional<PairOfPairs> witness;
  double d_xy = 0.0;
  double d_zw = 0.0;
  double rho_xy = 0.0;
  double rho_zw = 0.0;
};

namespace detail {

inline void compare_pairs(const PointMap& f, PairOfPairs q, double tol, ImplicationReport& r) {
  const SemimetricSpace& X = f.domain();
  const double d1 = X.d(q[0], q[1]);
  const double d2 = X.d(q[2], q[3]);
  const double r1 = f.image_d(q[0], q[1]);
  const double r2 = f.image_d(q[2], q[3]);
  ++r.checked;
  auto equal = [tol](double a, double b) { return a == b || close_rel(a, b, tol); };
  bool ok = true;
  if (equal(d1, d2)) {
    ok = equal(r1, r2);
  } else if (d1 < d2) {
    ok = r1 < r2 && !equal(r1, r2);
  }
  if (!ok && r.holds) {
    r.holds = false;
    r.witness = q;
    r.d_xy = d1;
    r.d_zw = d2;
    r.rho_xy = r1;
    r.rho_zw = r2;
  }
}

}  // namespace detail

/// d(x,y) < d(z,w) => rho < rho and d = d => rho = rho over all pairs of pairs.
/// For a bijection this certifies weak similarity.
inline ImplicationReport check_monotone_implications(const PointMap& f, double tol = kRankTol) {
  ImplicationReport r;
  const std::size_t n = f.domain().size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z)
        for (std::size_t w = z + 1; w < n; ++w) detail::compare_pairs(f, {x, y, z, w}, tol, r);
  return r;
}

/// The same implications restricted to pairs sharing a base point:
/// d(x,a) vs d(x,b).
inline ImplicationReport check_basepoint_implications(const PointMap& f, double tol = kRankTol) {
  ImplicationReport r;
  const std::size_t n = f.domain().size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t a = 0; a < n; ++a) {
      if (a == x) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (b == x || b == a) continue;
        detail::compare_pairs(f, {x, a, x, b}, tol, r);
      }
    }
  return r;
}

struct InvolutionReport {
  bool holds = true;
  double max_error = 0.0;  // max |eta(k) eta(1/k) - 1|
  double worst_k = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // grid points where a factor is 0 or not finite
  std::string mode = "grid";
  double tol = 0.0;
};

inline std::vector<double> involution_grid() { return log_grid(1025, 1e-3, 1e3); }

/// |eta(k) eta(1/k) - 1| <= tol across the grid.
inline InvolutionReport check_involution_identity(const Modulus& eta, const std::vector<double>& grid,
                                                  double tol = 1e-9) {
  InvolutionReport r;
  r.tol = tol;
  for (double k : grid) {
    const double a = eta(k);
    const double b = eta(1.0 / k);
    if (!std::isfinite(a) || !std::isfinite(b) || a == 0.0 || b == 0.0) {
      ++r.skipped;
      continue;
    }
    ++r.checked;
    const double err = std::abs(a * b - 1.0);
    if (err > r.max_error) {
      r.max_error = err;
      r.worst_k = k;
    }
  }
  r.holds = r.max_error <= tol;
  return r;
}

inline InvolutionReport check_involution_identity(const Modulus& eta, double tol = 1e-9) {
  return check_involution_identity(eta, involution_grid(), tol);
}

/// t -> exp(psi(t, 1/t)) for antisymmetric psi.
inline Modulus eta_from_antisymmetric(std::function<double(double, double)> psi, std::string name = "involutive") {
  const auto& grid = probe::gauge_grid();
  for (double x : grid)
    for (double z : grid) {
      const double a = psi(x, z);
      const double b = psi(z, x);
      if (!(a == -b || std::abs(a + b) <= 1e-12 * std::max(1.0, std::abs(a)))) {
        throw Error(ErrorKind::NotAntisymmetric, name + " is not antisymmetric at (" + format_number(x) + ", " +
                                                     format_number(z) + ")");
      }
    }
  Modulus eta = Modulus::involutive(std::move(psi), std::move(name));
  require_valid_modulus(eta);
  return eta;
}

/// A submultiplicative strictly increasing continuation phi* of phi is a
/// modulus for f.
inline Modulus qs_from_weaksim(const WeakSimilarity& ws, const Modulus& phistar) {
  for (std::size_t k = 0; k < ws.phi.from.size(); ++k) {
    const double v = phistar(ws.phi.from[k]);
    const double want = ws.phi.to[k];
    const bool match = want == 0.0 ? std::abs(v) <= 1e-12 : close_rel(v, want, 1e-12);
    if (!match) {
      throw Error(ErrorKind::NotAContinuation, phistar.describe() + " misses phi at " + format_number(ws.phi.from[k]));
    }
  }
  if (!is_valid_modulus(phistar)) {
    throw Error(ErrorKind::NotAContinuation, phistar.describe() + " is not strictly increasing on the probe grid");
  }
  const auto& grid = probe::product_grid();
  for (double u : grid)
    for (double v : grid) {
      if (!(phistar(u * v) <= phistar(u) * phistar(v) * (1.0 + 1e-12))) {
        throw Error(ErrorKind::NotSubmultiplicative, phistar.describe() + " is not submultiplicative at u = " +
                                                         format_number(u) + ", v = " + format_number(v));
      }
    }
  if (!check_qs(ws.f, phistar).holds) {
    throw Error(ErrorKind::TheoremViolation, "continuation does not verify the map");
  }
  return phistar;
}

/// Every pair satisfies rho(fx, fy) = phi(d(x, y)) and phi is strictly increasing from 0.
inline bool verify_realization(const WeakSimilarity& ws, double tol = kRankTol) {
  const auto& phi = ws.phi;
  if (phi.from.empty() || phi.from.size() != phi.to.size() || phi.from[0] != 0.0 || phi.to[0] != 0.0) return false;
  for (std::size_t k = 1; k < phi.from.size(); ++k)
    if (!(phi.from[k] > phi.from[k - 1]) || !(phi.to[k] > phi.to[k - 1])) return false;
  if (!ws.f.is_bijective()) return false;
  const SemimetricSpace& X = ws.f.domain();
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i + 1; j < X.size(); ++j) {
      const auto image = phi(X.d(i, j), tol);
      if (!image) return false;
      const double rho = ws.f.image_d(i, j);
      if (!(rho == *image || close_rel(rho, *image, tol))) return false;
    }
  return true;
}

/// (phi2 o phi1, f2 o f1).
inline WeakSimilarity compose(const WeakSimilarity& first, const WeakSimilarity& second, double tol = kRankTol) {
  SpectrumMap phi;
  for (std::size_t k = 0; k < first.phi.from.size(); ++k) {
    const auto v = second.phi(first.phi.to[k], tol);
    if (!v) throw Error(ErrorKind::BadParams, "spectra of the two realizations do not chain");
    phi.from.push_back(first.phi.from[k]);
    phi.to.push_back(*v);
  }
  return WeakSimilarity{compose(first.f, second.f), std::move(phi)};
}

}  // namespace qsmap

#endif  // QSMAP_WEAKSIM_HPP
