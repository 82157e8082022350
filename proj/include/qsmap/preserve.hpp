#ifndef QSMAP_PRESERVE_HPP
#define QSMAP_PRESERVE_HPP

// Transfer of triangle functions and of Ptolemy's inequality along
// quasisymmetric maps.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsmap/error.hpp"
#include "qsmap/modulus.hpp"
#include "qsmap/numeric.hpp"
#include "qsmap/quasisymmetry.hpp"
#include "qsmap/space.hpp"
#include "qsmap/triangle.hpp"

namespace qsmap {

enum class PairMode { Realized, Grid };

inline std::string_view to_string(PairMode mode) noexcept { return mode == PairMode::Realized ? "realized" : "grid"; }

struct RatioPairs {
  std::vector<std::pair<double, double>> pairs;
  PairMode mode = PairMode::Grid;
};

/// t1 = d(x,y)/d(x,z), t2 = d(x,y)/d(z,y) over ordered triples of distinct points.
inline RatioPairs realized_pairs(const SemimetricSpace& X) {
  RatioPairs out;
  out.mode = PairMode::Realized;
  const std::size_t n = X.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      for (std::size_t z = 0; z < n; ++z) {
        if (z == x || z == y) continue;
        out.pairs.emplace_back(X.d(x, y) / X.d(x, z), X.d(x, y) / X.d(z, y));
      }
    }
  return out;
}

inline constexpr std::size_t kTransferGridPoints = 256;
inline constexpr double kTransferGridLo = 1e-4;
inline constexpr double kTransferGridHi = 1e4;

inline RatioPairs grid_pairs(std::size_t points = kTransferGridPoints, double lo = kTransferGridLo,
                             double hi = kTransferGridHi) {
  RatioPairs out;
  const auto g = log_grid(points, lo, hi);
  out.pairs.reserve(g.size() * g.size());
  for (double t1 : g)
    for (double t2 : g) out.pairs.emplace_back(t1, t2);
  return out;
}

struct TransferWorst {
  double t1 = 0.0;
  double t2 = 0.0;
  double lhs1 = 0.0;  // Phi1(1/t1, 1/t2)
  double lhs2 = 0.0;  // Phi2(1/eta(t1), 1/eta(t2))
};

struct TransferReport {
  bool holds = true;
  std::size_t checked_pairs = 0;  // pairs satisfying the premise
  std::optional<TransferWorst> worst;
  std::optional<TransferWorst> first_violation;
  PairMode mode = PairMode::Grid;
  double tol = 0.0;
};

/// 1 <= Phi1(1/t1, 1/t2) implies 1 <= Phi2(1/eta(t1), 1/eta(t2)) (+ tol).
inline TransferReport check_transfer_condition(const TriangleFunction& phi1, const TriangleFunction& phi2,
                                               const Modulus& eta, const RatioPairs& source,
                                               double tol = kDefaultTol) {
  TransferReport report;
  report.mode = source.mode;
  report.tol = tol;
  for (const auto& [t1, t2] : source.pairs) {
    const double lhs1 = phi1(1.0 / t1, 1.0 / t2);
    if (!(lhs1 >= 1.0)) continue;
    const double lhs2 = phi2(1.0 / eta(t1), 1.0 / eta(t2));
    ++report.checked_pairs;
    const TransferWorst here{t1, t2, lhs1, lhs2};
    if (!report.worst || lhs2 < report.worst->lhs2) report.worst = here;
    if (!(lhs2 >= 1.0 - tol) && !report.first_violation) {
      report.holds = false;
      report.first_violation = here;
    }
  }
  return report;
}

struct MinimalK2 {
  double k2 = 1.0;
  double sup = 0.0;  // sup on the boundary before the K2 >= 1 floor
  double t1 = 0.0;   // boundary point of the grid maximum
  double t2 = 0.0;
};

/// Smallest K2 such that 1 <= K1(1/t1 + 1/t2) implies 1 <= K2(1/eta(t1) + 1/eta(t2)).
/// The supremum sits on the boundary 1/t1 + 1/t2 = 1/K1, parametrized as
/// t1 = K1(1+g), t2 = K1(1+1/g); the grid maximum is refined by golden-section
/// search. Never below 1, since a <= Phi2(a, 0) forces K2 >= 1.
inline MinimalK2 minimal_transfer_K2_detail(double k1, const Modulus& eta, std::size_t points = kTransferGridPoints,
                                            double lo = kTransferGridLo, double hi = kTransferGridHi) {
  if (!(k1 > 0.0) || !std::isfinite(k1)) throw Error(ErrorKind::BadParams, "K1 must be positive");
  require_valid_modulus(eta);
  auto boundary = [&](double g) {
    const double t1 = k1 * (1.0 + g);
    const double t2 = k1 * (1.0 + 1.0 / g);
    return std::array<double, 3>{t1, t2, 1.0 / (1.0 / eta(t1) + 1.0 / eta(t2))};
  };
  const auto grid = log_grid(points, lo, hi);
  MinimalK2 best;
  best.sup = -1.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto [t1, t2, v] = boundary(grid[k]);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::Unbounded, "supremum diverges at t1 = " + format_number(t1) + ", t2 = " +
                                            format_number(t2));
    }
    if (v > best.sup) {
      best = {0.0, v, t1, t2};
      arg = k;
    }
  }
  const double a = std::log(grid[arg == 0 ? 0 : arg - 1]);
  const double b = std::log(grid[std::min(arg + 1, grid.size() - 1)]);
  if (b > a) {
    golden_max(
        [&](double s) {
          const auto [t1, t2, v] = boundary(std::exp(s));
          if (std::isfinite(v) && v > best.sup) best = {0.0, v, t1, t2};
          return v;
        },
        a, b);
  }
  best.k2 = std::max(1.0, best.sup);
  return best;
}

inline double minimal_transfer_K2(double k1, const Modulus& eta, std::size_t points = kTransferGridPoints,
                                  double lo = kTransferGridLo, double hi = kTransferGridHi) {
  return minimal_transfer_K2_detail(k1, eta, points, lo, hi).k2;
}

/// Side conditions of the transfer theorem: lambda Phi1(x,y) <= Phi1(lambda x, lambda y),
/// Phi2(lambda x, lambda y) <= lambda Phi2(x,y) and a <= Phi2(a, 0).
struct SideConditions {
  bool homogeneity = true;
  bool origin_bound = true;
  bool probed = false;  // false: settled analytically for built-in gauges
};

inline SideConditions check_side_conditions(const TriangleFunction& phi1, const TriangleFunction& phi2) {
  SideConditions s;
  const bool builtin1 = phi1.kind() != TriangleFunction::Kind::Custom;
  const bool builtin2 = phi2.kind() != TriangleFunction::Kind::Custom;
  s.probed = !(builtin1 && builtin2);
  const auto& g = probe::product_grid();
  constexpr double slack = 1e-12;
  if (!builtin1 || !builtin2) {
    for (double lambda : g)
      for (double x : g)
        for (double y : g) {
          if (!builtin1 && !(lambda * phi1(x, y) <= phi1(lambda * x, lambda * y) * (1.0 + slack))) {
            s.homogeneity = false;
          }
          if (!builtin2 && !(phi2(lambda * x, lambda * y) <= lambda * phi2(x, y) * (1.0 + slack))) {
            s.homogeneity = false;
          }
        }
  }
  switch (phi2.kind()) {
    case TriangleFunction::Kind::Additive:
    case TriangleFunction::Kind::Max: break;
    case TriangleFunction::Kind::ScaledAdditive: s.origin_bound = phi2.coefficient() >= 1.0; break;
    case TriangleFunction::Kind::Custom:
      for (double a : probe::gauge_grid())
        if (!(a <= phi2(a, 0.0) * (1.0 + slack))) s.origin_bound = false;
      break;
  }
  return s;
}

struct EndToEndReport {
  bool holds = true;
  TransferReport transfer;
  SideConditions side;
  std::optional<TriangleReport> conclusion;  // present when the hypotheses hold
  bool theorem_violation = false;            // hypotheses hold but the conclusion fails
};

/// Runs the transfer condition on realized ratios; when it (and the side
/// conditions) hold, the codomain must satisfy Phi2.
inline EndToEndReport verify_transfer_end_to_end(const PointMap& f, const TriangleFunction& phi1,
                                                 const TriangleFunction& phi2, const Modulus& eta,
                                                 double tol = kDefaultTol) {
  if (!f.is_bijective()) throw Error(ErrorKind::PreconditionFailed, "map is not bijective");
  if (!check_triangle(f.domain(), phi1, tol).holds) {
    throw Error(ErrorKind::PreconditionFailed, "domain does not satisfy " + phi1.describe());
  }
  if (!check_qs(f, eta, tol).holds) {
    throw Error(ErrorKind::PreconditionFailed, "map is not " + eta.describe() + "-quasisymmetric");
  }
  EndToEndReport r;
  r.transfer = check_transfer_condition(phi1, phi2, eta, realized_pairs(f.domain()), tol);
  r.side = check_side_conditions(phi1, phi2);
  const bool hypotheses = r.transfer.holds && r.side.homogeneity && r.side.origin_bound;
  if (hypotheses) {
    r.conclusion = check_triangle(f.codomain(), phi2, tol);
    r.theorem_violation = !r.conclusion->holds;
  }
  r.holds = hypotheses && r.conclusion->holds;
  return r;
}

enum class PtolemyPath { Auto, Realized };

struct PtolemyTransferReport {
  bool holds = true;
  bool analytic = false;  // implication certified for eta = t^alpha, alpha <= 1
  bool implication_holds = true;
  std::size_t checked = 0;
  std::optional<std::array<std::size_t, 4>> witness;  // (x, y, z, t) of the worst implication margin
  std::array<double, 4> ratios{};                     // t1..t4 at the witness
  double lhs = 0.0;                                   // eta1 eta2 eta3 eta4
  double rhs = 0.0;                                   // eta1 eta2 + eta3 eta4
  double margin = std::numeric_limits<double>::infinity();
  std::optional<PtolemyReport> conclusion;
  bool theorem_violation = false;
  double tol = 0.0;
};

/// t1 t2 t3 t4 <= t1 t2 + t3 t4 implies the same for eta(t_i), checked at
/// realized quadruple ratios; when it holds the codomain must be Ptolemaic.
inline PtolemyTransferReport ptolemy_transfer_check(const PointMap& f, const Modulus& eta,
                                                    PtolemyPath path = PtolemyPath::Auto, double tol = kDefaultTol) {
  if (!f.is_bijective()) throw Error(ErrorKind::PreconditionFailed, "map is not bijective");
  if (!is_ptolemaic(f.domain(), tol).holds) throw Error(ErrorKind::PreconditionFailed, "domain is not Ptolemaic");
  if (!check_qs(f, eta, tol).holds) {
    throw Error(ErrorKind::PreconditionFailed, "map is not " + eta.describe() + "-quasisymmetric");
  }
  PtolemyTransferReport r;
  r.tol = tol;
  r.analytic = path == PtolemyPath::Auto && eta.kind() == Modulus::Kind::Power && eta.param() <= 1.0;
  if (!r.analytic) {
    const SemimetricSpace& X = f.domain();
    const std::size_t n = X.size();
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x) continue;
        for (std::size_t z = 0; z < n; ++z) {
          if (z == x || z == y) continue;
          for (std::size_t t = 0; t < n; ++t) {
            if (t == x || t == y || t == z) continue;
            const std::array<double, 4> ts{X.d(x, z) / X.d(x, y), X.d(t, y) / X.d(t, z), X.d(x, z) / X.d(x, t),
                                           X.d(t, y) / X.d(y, z)};
            if (!(ts[0] * ts[1] * ts[2] * ts[3] <= (ts[0] * ts[1] + ts[2] * ts[3]) * (1.0 + tol))) continue;
            const double e1 = eta(ts[0]), e2 = eta(ts[1]), e3 = eta(ts[2]), e4 = eta(ts[3]);
            const double lhs = e1 * e2 * e3 * e4;
            const double rhs = e1 * e2 + e3 * e4;
            ++r.checked;
            const double margin = (rhs - lhs) / std::max(1.0, rhs);
            if (margin < r.margin) {
              r.margin = margin;
              r.witness = std::array<std::size_t, 4>{x, y, z, t};
              r.ratios = ts;
              r.lhs = lhs;
              r.rhs = rhs;
            }
          }
        }
      }
    r.implication_holds = r.margin >= -tol;
  }
  if (r.implication_holds) {
    r.conclusion = is_ptolemaic(f.codomain(), tol);
    r.theorem_violation = !r.conclusion->holds;
  }
  r.holds = r.implication_holds && r.conclusion->holds;
  return r;
}

}  // namespace qsmap

#endif  // QSMAP_PRESERVE_HPP
