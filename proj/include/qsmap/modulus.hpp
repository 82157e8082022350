#ifndef QSMAP_MODULUS_HPP
#define QSMAP_MODULUS_HPP

// Distortion moduli eta: [0, inf) -> [0, inf).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qsmap/error.hpp"
#include "qsmap/numeric.hpp"
#include "qsmap/space.hpp"

namespace qsmap {

/// One step of an empirical envelope: H(t) = value for t in [t, next t).
struct EnvelopePoint {
  double t = 0.0;
  double value = 0.0;
};

/// Relative tolerance used when matching realized ratios to envelope steps.
inline constexpr double kRatioTol = 1e-12;

class Modulus {
 public:
  enum class Kind { Power, Linear, BiLip, Sandwich, Composite, ExpRatio, Involutive, Empirical, Inverse, Custom };

  static Modulus power(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::BadParams, "power exponent must be positive");
    Modulus m(Kind::Power);
    m.a_ = alpha;
    return m;
  }

  static Modulus linear(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::BadParams, "linear coefficient must be positive");
    Modulus m(Kind::Linear);
    m.a_ = c;
    return m;
  }

  /// L^2 t.
  static Modulus bilip(double l) {
    if (!(l >= 1.0) || !std::isfinite(l)) throw Error(ErrorKind::BadParams, "bi-Lipschitz constant must be >= 1");
    Modulus m(Kind::BiLip);
    m.a_ = l;
    return m;
  }

  /// C K^2 phi1(t). Use eta_from_sandwich() to get the validated construction.
  static Modulus sandwich(double c, double k, ScalarGauge phi1) {
    Modulus m(Kind::Sandwich);
    m.a_ = c;
    m.b_ = k;
    m.f1_ = std::make_shared<const ScalarGauge>(std::move(phi1));
    return m;
  }

  /// eta(t) = 1/2 + f1(t) - f1(1-t) on [0,1] and
  /// 1 / (1/2 + f2(1/t) - f2(1 - 1/t)) on [1, inf).
  /// Use eta_from_generators() for the validated construction.
  static Modulus composite(ScalarGauge f1, ScalarGauge f2) {
    Modulus m(Kind::Composite);
    m.f1_ = std::make_shared<const ScalarGauge>(std::move(f1));
    m.f2_ = std::make_shared<const ScalarGauge>(std::move(f2));
    return m;
  }

  /// (e^t - 1) / (e^{1/t} - 1), 0 at 0.
  static Modulus exp_ratio() { return Modulus(Kind::ExpRatio); }

  /// exp(psi(t, 1/t)), 0 at 0.
  static Modulus involutive(std::function<double(double, double)> psi, std::string name = "involutive") {
    Modulus m(Kind::Involutive);
    m.psi_ = std::make_shared<const std::function<double(double, double)>>(std::move(psi));
    m.name_ = std::move(name);
    return m;
  }

  /// Right-continuous step function through sorted points (nondecreasing values).
  static Modulus empirical(std::vector<EnvelopePoint> points) {
    for (std::size_t k = 1; k < points.size(); ++k) {
      if (!(points[k].t > points[k - 1].t) || points[k].value < points[k - 1].value) {
        throw Error(ErrorKind::BadParams, "empirical steps must have increasing t and nondecreasing values");
      }
    }
    Modulus m(Kind::Empirical);
    m.steps_ = std::make_shared<const std::vector<EnvelopePoint>>(std::move(points));
    return m;
  }

  /// t -> 1 / base^{-1}(1/t), evaluated by bisection.
  static Modulus inverse_of(const Modulus& base) {
    Modulus m(Kind::Inverse);
    m.base_ = std::make_shared<const Modulus>(base);
    return m;
  }

  static Modulus custom(ScalarGauge fn) {
    Modulus m(Kind::Custom);
    m.f1_ = std::make_shared<const ScalarGauge>(std::move(fn));
    return m;
  }

  Kind kind() const noexcept { return kind_; }
  /// Power: alpha. Linear: C. BiLip: L. Sandwich: C.
  double param() const noexcept { return a_; }
  /// Sandwich: K.
  double param2() const noexcept { return b_; }
  const std::vector<EnvelopePoint>& steps() const {
    static const std::vector<EnvelopePoint> empty;
    return steps_ ? *steps_ : empty;
  }

  double operator()(double t) const {
    if (!(t >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
    switch (kind_) {
      case Kind::Power: return t == 0.0 ? 0.0 : std::pow(t, a_);
      case Kind::Linear: return a_ * t;
      case Kind::BiLip: return a_ * a_ * t;
      case Kind::Sandwich: return a_ * b_ * b_ * (*f1_)(t);
      case Kind::Composite: {
        if (t <= 1.0) return 0.5 + (*f1_)(t) - (*f1_)(1.0 - t);
        const double s = 1.0 / t;
        return 1.0 / (0.5 + (*f2_)(s) - (*f2_)(1.0 - s));
      }
      case Kind::ExpRatio: return t == 0.0 ? 0.0 : std::expm1(t) / std::expm1(1.0 / t);
      case Kind::Involutive: return t == 0.0 ? 0.0 : std::exp((*psi_)(t, 1.0 / t));
      case Kind::Empirical: {
        const auto& pts = *steps_;
        const double key = t * (1.0 + kRatioTol);
        auto it = std::upper_bound(pts.begin(), pts.end(), key,
                                   [](double v, const EnvelopePoint& p) { return v < p.t; });
        if (it == pts.begin()) return 0.0;
        return std::prev(it)->value;
      }
      case Kind::Inverse: {
        if (t == 0.0) return 0.0;
        const Modulus& base = *base_;
        const double pre = invert_increasing([&base](double u) { return base(u); }, 1.0 / t);
        return 1.0 / pre;
      }
      case Kind::Custom: return (*f1_)(t);
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::Power: return "power:" + format_number(a_);
      case Kind::Linear: return "linear:" + format_number(a_);
      case Kind::BiLip: return "bilip:" + format_number(a_);
      case Kind::Sandwich:
        return "sandwich(C=" + format_number(a_) + ",K=" + format_number(b_) + "," + f1_->name + ")";
      case Kind::Composite: return "k8(" + f1_->name + "," + f2_->name + ")";
      case Kind::ExpRatio: return "expratio";
      case Kind::Involutive: return name_;
      case Kind::Empirical: return "empirical(" + std::to_string(steps_->size()) + " steps)";
      case Kind::Inverse: return "inverse(" + base_->describe() + ")";
      case Kind::Custom: return f1_->name;
    }
    return "?";
  }

 private:
  explicit Modulus(Kind kind) : kind_(kind) {}

  Kind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::shared_ptr<const ScalarGauge> f1_;
  std::shared_ptr<const ScalarGauge> f2_;
  std::shared_ptr<const std::function<double(double, double)>> psi_;
  std::shared_ptr<const std::vector<EnvelopePoint>> steps_;
  std::shared_ptr<const Modulus> base_;
  std::string name_;
};

inline double eval_modulus(const Modulus& eta, double t) { return eta(t); }

/// Homeomorphism surrogate: eta(0) = 0 and strict increase on the 1024-point
/// modulus probe grid (plateaus allowed only where doubles saturate).
inline bool is_valid_modulus(const Modulus& eta) {
  if (eta(0.0) != 0.0) return false;
  return strictly_increasing_on([&eta](double t) { return eta(t); }, probe::modulus_grid());
}

inline void require_valid_modulus(const Modulus& eta) {
  if (!is_valid_modulus(eta)) {
    throw Error(ErrorKind::NotHomeomorphism, eta.describe() + " is not strictly increasing from 0 on the probe grid");
  }
}

/// Numeric path of the inverse-map modulus, regardless of family.
inline Modulus inverse_modulus_numeric(const Modulus& eta) {
  if (eta.kind() == Modulus::Kind::Empirical || !is_valid_modulus(eta)) {
    throw Error(ErrorKind::NotInvertible, eta.describe() + " is not a strictly increasing modulus");
  }
  return Modulus::inverse_of(eta);
}

/// eta'(t) = 1 / eta^{-1}(1/t): the modulus of the inverse map.
inline Modulus inverse_modulus(const Modulus& eta) {
  switch (eta.kind()) {
    case Modulus::Kind::Power: return Modulus::power(1.0 / eta.param());
    case Modulus::Kind::Linear: return Modulus::linear(eta.param());
    case Modulus::Kind::BiLip: return Modulus::bilip(eta.param());
    default: return inverse_modulus_numeric(eta);
  }
}

}  // namespace qsmap

#endif  // QSMAP_MODULUS_HPP
