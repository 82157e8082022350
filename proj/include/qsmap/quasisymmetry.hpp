#ifndef QSMAP_QUASISYMMETRY_HPP
#define QSMAP_QUASISYMMETRY_HPP

// Empirical moduli of point maps and eta-quasisymmetry verification.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qsmap/error.hpp"
#include "qsmap/modulus.hpp"
#include "qsmap/numeric.hpp"
#include "qsmap/space.hpp"

namespace qsmap {

using Triple = std::array<std::size_t, 3>;

/// One realized ratio level of the envelope. `raw` is the largest image ratio
/// observed at this t, realized by `witness` = (x, a, b); `H` is the running
/// maximum over all levels up to and including this one.
struct EnvelopeStep {
  double t = 0.0;
  double H = 0.0;
  double raw = 0.0;
  Triple witness{};
};

struct EmpiricalEnvelope {
  std::vector<EnvelopeStep> steps;

  /// Right-continuous step value; 0 below the first realized ratio.
  double operator()(double t) const {
    const double key = t * (1.0 + kRatioTol);
    auto it = std::upper_bound(steps.begin(), steps.end(), key,
                               [](double v, const EnvelopeStep& s) { return v < s.t; });
    return it == steps.begin() ? 0.0 : std::prev(it)->H;
  }

  Modulus as_modulus() const {
    std::vector<EnvelopePoint> pts;
    pts.reserve(steps.size());
    for (const auto& s : steps) pts.push_back({s.t, s.H});
    return Modulus::empirical(std::move(pts));
  }
};

/// Ordered triples (x, a, b) with a != x and b != x; t = d(x,a)/d(x,b),
/// r = rho(fx,fa)/rho(fx,fb). Levels closer than 1e-12 relative merge.
inline EmpiricalEnvelope empirical_modulus(const PointMap& f) {
  struct Sample {
    double t;
    double r;
    Triple w;
  };
  const SemimetricSpace& X = f.domain();
  const std::size_t n = X.size();
  std::vector<Sample> samples;
  samples.reserve(n * n * n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t a = 0; a < n; ++a) {
      if (a == x) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (b == x) continue;
        const double num = f.image_d(x, a);
        const double den = f.image_d(x, b);
        double r = 0.0;
        if (den == 0.0) {
          if (num > 0.0) {
            throw Error(ErrorKind::UnboundedEnvelope,
                        "f(" + X.label(x) + ") = f(" + X.label(b) + ") while f(" + X.label(a) +
                            ") differs: no finite modulus exists",
                        {x, a, b});
          }
        } else {
          r = num / den;
        }
        samples.push_back({X.d(x, a) / X.d(x, b), r, {x, a, b}});
      }
    }
  }
  std::stable_sort(samples.begin(), samples.end(), [](const Sample& p, const Sample& q) { return p.t < q.t; });

  EmpiricalEnvelope env;
  for (const auto& s : samples) {
    if (!env.steps.empty() && s.t <= env.steps.back().t * (1.0 + kRatioTol)) {
      auto& last = env.steps.back();
      if (s.r > last.raw) {
        last.raw = s.r;
        last.witness = s.w;
      }
      continue;
    }
    env.steps.push_back({s.t, 0.0, s.r, s.w});
  }
  double running = 0.0;
  for (auto& step : env.steps) {
    running = std::max(running, step.raw);
    step.H = running;
  }
  return env;
}

struct QsReport {
  bool holds = true;
  std::optional<Triple> witness;  // (x, a, b)
  double t = 0.0;
  double image_ratio = 0.0;
  double eta_at_t = 0.0;
  double min_slack = std::numeric_limits<double>::infinity();  // min of eta(t_i) - H(t_i)
  std::size_t levels = 0;
  double tol = 0.0;
};

/// eta verifies f iff eta(t_i) + tol >= H(t_i) at every realized ratio.
inline QsReport check_qs(const EmpiricalEnvelope& env, const Modulus& eta, double tol = kDefaultTol) {
  QsReport report;
  report.tol = tol;
  report.levels = env.steps.size();
  for (const auto& step : env.steps) {
    const double e = eta(step.t);
    const double slack = e - step.H;
    if (slack < report.min_slack || std::isnan(slack)) report.min_slack = slack;
    if (report.holds && !(e + tol >= step.H)) {
      // The first violated level is violated by its own raw maximum.
      report.holds = false;
      report.witness = step.witness;
      report.t = step.t;
      report.image_ratio = step.H;
      report.eta_at_t = e;
    }
  }
  return report;
}

inline QsReport check_qs(const PointMap& f, const Modulus& eta, double tol = kDefaultTol) {
  return check_qs(empirical_modulus(f), eta, tol);
}

struct EtaRatioReport {
  bool holds = true;
  double min_product = std::numeric_limits<double>::infinity();  // eta(t) eta(1/t)
  double at_t = 0.0;
  double eta_at_one = 0.0;
  std::size_t checked = 0;
};

/// eta(t) eta(1/t) >= 1 at realized ratios and eta(1) >= 1.
inline EtaRatioReport eta_ratio_report(const PointMap& f, const Modulus& eta) {
  EtaRatioReport report;
  const SemimetricSpace& X = f.domain();
  const std::size_t n = X.size();
  std::vector<double> ratios;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != x && b != x) ratios.push_back(X.d(x, a) / X.d(x, b));
  std::sort(ratios.begin(), ratios.end());
  ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());
  for (double t : ratios) {
    const double product = eta(t) * eta(1.0 / t);
    ++report.checked;
    if (product < report.min_product) {
      report.min_product = product;
      report.at_t = t;
    }
  }
  report.eta_at_one = eta(1.0);
  report.holds = report.eta_at_one >= 1.0 - 1e-12 && (report.checked == 0 || report.min_product >= 1.0 - 1e-9);
  return report;
}

struct SnowflakeFit {
  double lambda = 0.0;
  double alpha = 0.0;
  bool similarity = false;
};

/// rho = lambda d^alpha on every pair, solved exactly from the two smallest
/// distinct domain distances and then verified to relative tol.
inline std::optional<SnowflakeFit> fit_snowflake(const PointMap& f, double tol = kDefaultTol) {
  const SemimetricSpace& X = f.domain();
  const std::size_t n = X.size();
  struct Pair {
    double d;
    double rho;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double rho = f.image_d(i, j);
      if (!(rho > 0.0)) return std::nullopt;
      pairs.push_back({X.d(i, j), rho});
    }
  if (pairs.empty()) return std::nullopt;
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& p, const Pair& q) { return p.d < q.d; });
  const Pair first = pairs.front();
  const auto second = std::find_if(pairs.begin(), pairs.end(), [&](const Pair& p) { return p.d > first.d; });
  if (second == pairs.end()) return std::nullopt;
  SnowflakeFit fit;
  fit.alpha = std::log(second->rho / first.rho) / std::log(second->d / first.d);
  if (!(fit.alpha > 0.0) || !std::isfinite(fit.alpha)) return std::nullopt;
  fit.lambda = first.rho / std::pow(first.d, fit.alpha);
  for (const auto& p : pairs) {
    if (!close_rel(fit.lambda * std::pow(p.d, fit.alpha), p.rho, tol)) return std::nullopt;
  }
  fit.similarity = std::abs(fit.alpha - 1.0) <= tol;
  return fit;
}

/// Largest of rho/d and d/rho over distinct pairs; none if f collapses a pair.
inline std::optional<double> minimal_bilipschitz_L(const PointMap& f) {
  const SemimetricSpace& X = f.domain();
  double worst = 1.0;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i + 1; j < X.size(); ++j) {
      const double rho = f.image_d(i, j);
      if (!(rho > 0.0)) return std::nullopt;
      const double d = X.d(i, j);
      worst = std::max({worst, rho / d, d / rho});
    }
  return worst;
}

/// C K^2 phi1, after checking phi1 <= phi2 <= K phi1 and
/// phi2(uv) <= C phi2(u) phi2(v) on the probe grids.
inline Modulus eta_from_sandwich(const ScalarGauge& phi1, const ScalarGauge& phi2, double c, double k) {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::BadParams, "C must be positive");
  if (!(k >= 1.0) || !std::isfinite(k)) throw Error(ErrorKind::BadParams, "K must be at least 1");
  if (phi1(0.0) != 0.0 || !strictly_increasing_on(phi1.fn, probe::modulus_grid())) {
    throw Error(ErrorKind::NotHomeomorphism, phi1.name + " is not a homeomorphism on the probe grid");
  }
  constexpr double slack = 1e-12;
  for (double t : probe::modulus_grid()) {
    const double lo = phi1(t);
    const double mid = phi2(t);
    if (!(lo <= mid * (1.0 + slack)) || !(mid <= k * lo * (1.0 + slack))) {
      throw Error(ErrorKind::SandwichOrderViolated,
                  "phi1 <= phi2 <= K phi1 fails at t = " + format_number(t));
    }
  }
  const auto& grid = probe::product_grid();
  for (double u : grid)
    for (double v : grid) {
      const double lhs = phi2(u * v);
      const double rhs = c * phi2(u) * phi2(v);
      if (!(lhs <= rhs * (1.0 + slack))) {
        throw Error(ErrorKind::SubmultiplicativityViolated,
                    "phi2(uv) > C phi2(u) phi2(v) at u = " + format_number(u) + ", v = " + format_number(v));
      }
    }
  return Modulus::sandwich(c, k, phi1);
}

}  // namespace qsmap

#endif  // QSMAP_QUASISYMMETRY_HPP
