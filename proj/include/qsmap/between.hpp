#ifndef QSMAP_BETWEEN_HPP
#define QSMAP_BETWEEN_HPP

// Metric betweenness, its preservation, betweenness-preserving moduli,
// pseudolinear quadruples and isometric embedding into the line.

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

/// y lies between x and z: d(x,z) = d(x,y) + d(y,z).
struct BetweennessTriple {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t z = 0;
  double slack = 0.0;
};

/// All triples with x < z whose equality holds within tol relative to d(x,z).
inline std::vector<BetweennessTriple> betweenness_triples(const SemimetricSpace& S, double tol = kDefaultTol) {
  std::vector<BetweennessTriple> out;
  const std::size_t n = S.size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t z = x + 1; z < n; ++z)
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x || y == z) continue;
        const double slack = std::abs(S.d(x, z) - S.d(x, y) - S.d(y, z));
        if (slack <= tol * S.d(x, z)) out.push_back({x, y, z, slack});
      }
  return out;
}

struct BetweennessViolation {
  BetweennessTriple triple;  // in the domain
  double image_lhs = 0.0;    // rho(fx, fz)
  double image_rhs = 0.0;    // rho(fx, fy) + rho(fy, fz)
};

struct BetweennessReport {
  bool holds = true;
  std::size_t checked = 0;
  std::vector<BetweennessViolation> violations;
  double tol = 0.0;
};

inline BetweennessReport preserves_betweenness(const PointMap& f, double tol = kDefaultTol) {
  BetweennessReport r;
  r.tol = tol;
  for (const auto& tr : betweenness_triples(f.domain(), tol)) {
    ++r.checked;
    const double lhs = f.image_d(tr.x, tr.z);
    const double rhs = f.image_d(tr.x, tr.y) + f.image_d(tr.y, tr.z);
    if (!(std::abs(lhs - rhs) <= tol * lhs)) r.violations.push_back({tr, lhs, rhs});
  }
  r.holds = r.violations.empty();
  return r;
}

/// t1 = k/(N+1), k = 1..N.
inline std::vector<double> partition_samples(std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = static_cast<double>(k + 1) / static_cast<double>(count + 1);
  return out;
}

struct L02Sample {
  double t1 = 0.0;
  double forward = 0.0;  // eta(t1) + eta(t2)
  double inverse = 0.0;  // 1/eta(1/t1) + 1/eta(1/t2)
};

struct L02Report {
  // eta(t1) + eta(t2) = 1 and 1/eta(1/t1) + 1/eta(1/t2) = 1 whenever t1 + t2 = 1.
  bool sufficiency_holds = true;
  double max_forward_error = 0.0;
  double max_inverse_error = 0.0;
  std::optional<L02Sample> worst;
  // Samples with inverse > 1 + tol or forward < 1 - tol. The necessary
  // inequalities only bind at ratios realized by betweenness triples, so a
  // grid scan extrapolates them.
  bool necessity_holds = true;
  std::vector<L02Sample> necessity_violations;
  std::string necessity_mode = "grid-extrapolated";
  std::size_t samples = 0;
  double tol = 0.0;
};

inline L02Report check_l02_conditions(const Modulus& eta, const std::vector<double>& t1_samples, double tol = 1e-10) {
  L02Report r;
  r.tol = tol;
  double worst_error = -1.0;
  for (double t1 : t1_samples) {
    if (!(t1 > 0.0 && t1 < 1.0)) throw Error(ErrorKind::BadParams, "partition samples must lie in (0, 1)");
    const double t2 = 1.0 - t1;
    L02Sample s{t1, eta(t1) + eta(t2), 1.0 / eta(1.0 / t1) + 1.0 / eta(1.0 / t2)};
    ++r.samples;
    const double ef = std::abs(s.forward - 1.0);
    const double ei = std::abs(s.inverse - 1.0);
    r.max_forward_error = std::max(r.max_forward_error, ef);
    r.max_inverse_error = std::max(r.max_inverse_error, ei);
    if (std::max(ef, ei) > worst_error) {
      worst_error = std::max(ef, ei);
      r.worst = s;
    }
    if (s.inverse > 1.0 + tol || s.forward < 1.0 - tol) r.necessity_violations.push_back(s);
  }
  r.sufficiency_holds = r.max_forward_error <= tol && r.max_inverse_error <= tol;
  r.necessity_holds = r.necessity_violations.empty();
  return r;
}

/// x^n / 2 on [0, 1].
inline ScalarGauge power_generator(int n) {
  if (n < 1) throw Error(ErrorKind::BadParams, "generator exponent must be a positive integer");
  return {"x^" + std::to_string(n) + "/2", [n](double x) {
            double p = 1.0;
            for (int k = 0; k < n; ++k) p *= x;
            return 0.5 * p;
          }};
}

/// eta(t) = 1/2 + f1(t) - f1(1-t) on [0,1], 1/(1/2 + f2(1/t) - f2(1-1/t)) beyond.
inline Modulus eta_from_generators(const ScalarGauge& f1, const ScalarGauge& f2) {
  for (const ScalarGauge* f : {&f1, &f2}) {
    if (std::abs((*f)(0.0)) > 1e-12 || std::abs((*f)(1.0) - 0.5) > 1e-12) {
      throw Error(ErrorKind::GeneratorEndpointViolation, f->name + " must satisfy f(0) = 0 and f(1) = 1/2");
    }
    double prev = (*f)(0.0);
    for (std::size_t k = 1; k < probe::kGeneratorPoints; ++k) {
      const double v = (*f)(static_cast<double>(k) / static_cast<double>(probe::kGeneratorPoints - 1));
      if (!(v > prev)) throw Error(ErrorKind::GeneratorNotIncreasing, f->name + " is not strictly increasing");
      prev = v;
    }
  }
  Modulus eta = Modulus::composite(f1, f2);
  const double one_left = 0.5 + f1(1.0) - f1(0.0);
  const double one_right = 1.0 / (0.5 + f2(1.0) - f2(0.0));
  if (std::abs(one_left - 1.0) > 1e-12 || std::abs(one_right - 1.0) > 1e-12) {
    throw Error(ErrorKind::GeneratorEndpointViolation, "branches disagree at t = 1");
  }
  require_valid_modulus(eta);
  return eta;
}

/// Enumeration (a, b, c, d) with d(a,b) = d(c,d) = t, d(b,c) = d(d,a) = s and
/// both diagonals equal to s + t.
struct QuadrupleShape {
  std::optional<std::array<std::size_t, 4>> ordering;
  double s = 0.0;
  double t = 0.0;
  explicit operator bool() const noexcept { return ordering.has_value(); }
};

inline QuadrupleShape detect_pseudolinear(const SemimetricSpace& S, const std::array<std::size_t, 4>& q,
                                          double tol = kDefaultTol) {
  // The three ways to split four points into two diagonals.
  static constexpr std::array<std::array<std::size_t, 4>, 3> cycles{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 1, 3, 2}}};
  for (const auto& c : cycles) {
    const std::size_t a = q[c[0]], b = q[c[1]], cc = q[c[2]], d = q[c[3]];
    const double t = S.d(a, b);
    const double s = S.d(b, cc);
    if (close_rel(S.d(cc, d), t, tol) && close_rel(S.d(d, a), s, tol) && close_rel(S.d(a, cc), s + t, tol) &&
        close_rel(S.d(b, d), s + t, tol)) {
      QuadrupleShape shape;
      shape.ordering = std::array<std::size_t, 4>{a, b, cc, d};
      shape.s = s;
      shape.t = t;
      return shape;
    }
  }
  return {};
}

inline QuadrupleShape detect_pseudolinear(const SemimetricSpace& S, double tol = kDefaultTol) {
  if (S.size() != 4) throw Error(ErrorKind::BadParams, "pseudolinear detection needs exactly four points");
  return detect_pseudolinear(S, {0, 1, 2, 3}, tol);
}

/// Coordinates of an isometric embedding into the real line, anchored at the
/// lexicographically smallest diametrical pair, or none.
inline std::optional<std::vector<double>> line_embed(const SemimetricSpace& S, double tol = kDefaultTol) {
  const std::size_t n = S.size();
  if (n == 0) return std::vector<double>{};
  std::size_t a = 0, b = 0;
  double diam = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (S.d(i, j) > diam) {
        diam = S.d(i, j);
        a = i;
        b = j;
      }
  std::vector<double> x(n, 0.0);
  if (n == 1) return x;
  x[b] = diam;
  for (std::size_t p = 0; p < n; ++p) {
    if (p == a || p == b) continue;
    const double plus = S.d(a, p);
    x[p] = std::abs(std::abs(diam - plus) - S.d(b, p)) <= std::abs(diam + plus - S.d(b, p)) ? plus : -plus;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(std::abs(x[i] - x[j]) - S.d(i, j)) > tol * diam) return std::nullopt;
  return x;
}

struct ImageStructureReport {
  bool holds = true;
  bool domain_line = false;
  std::optional<bool> image_line;  // checked when the domain subset embeds
  QuadrupleShape domain_quadruple;
  QuadrupleShape image_quadruple;  // checked when the domain subset is pseudolinear
};

/// For a betweenness-preserving f: line-embeddable subsets map to
/// line-embeddable sets and pseudolinear quadruples to pseudolinear quadruples.
inline ImageStructureReport betweenness_image_structure(const PointMap& f, const SubsetRef& A,
                                                        double tol = kDefaultTol) {
  if (!preserves_betweenness(f, tol).holds) {
    throw Error(ErrorKind::PreconditionFailed, "map does not preserve metric betweenness");
  }
  ImageStructureReport r;
  const SemimetricSpace sub = subspace(*A.space, A.indices);
  std::vector<std::size_t> image;
  for (std::size_t i : A.indices) image.push_back(f(i));
  std::vector<std::size_t> distinct = image;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const SemimetricSpace fsub = subspace(f.codomain(), distinct);

  r.domain_line = line_embed(sub, tol).has_value();
  if (r.domain_line) {
    r.image_line = line_embed(fsub, tol).has_value();
    r.holds = *r.image_line;
  }
  if (A.indices.size() == 4) {
    r.domain_quadruple = detect_pseudolinear(sub, tol);
    if (r.domain_quadruple) {
      if (distinct.size() == 4) r.image_quadruple = detect_pseudolinear(f.codomain(), {image[0], image[1], image[2], image[3]}, tol);
      r.holds = r.holds && static_cast<bool>(r.image_quadruple);
    }
  }
  return r;
}

}  // namespace qsmap

#endif  // QSMAP_BETWEEN_HPP
