#ifndef QSMAP_ERROR_HPP
#define QSMAP_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qsmap {

enum class ErrorKind {
  ShapeMismatch,
  NonFinite,
  NonSymmetric,
  NegativeDistance,
  NonZeroDiagonal,
  ZeroOffDiagonal,
  DuplicateLabel,
  ScalerNotMonotone,
  ScalerOriginNonzero,
  BadParams,
  BadSubset,
  UnassignedPoint,
  UnknownSource,
  UnknownTarget,
  DuplicateAssignment,
  NotBijective,
  InvalidGauge,
  NotInvertible,
  NoBracket,
  NotHomeomorphism,
  UnboundedEnvelope,
  SandwichOrderViolated,
  SubmultiplicativityViolated,
  NotQuasisymmetric,
  PreconditionFailed,
  Unbounded,
  GeneratorEndpointViolation,
  GeneratorNotIncreasing,
  TooLarge,
  NotAntisymmetric,
  NotAContinuation,
  NotSubmultiplicative,
  TheoremViolation,
  ParseError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::NegativeDistance: return "NegativeDistance";
    case ErrorKind::NonZeroDiagonal: return "NonZeroDiagonal";
    case ErrorKind::ZeroOffDiagonal: return "ZeroOffDiagonal";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::ScalerNotMonotone: return "ScalerNotMonotone";
    case ErrorKind::ScalerOriginNonzero: return "ScalerOriginNonzero";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::BadSubset: return "BadSubset";
    case ErrorKind::UnassignedPoint: return "UnassignedPoint";
    case ErrorKind::UnknownSource: return "UnknownSource";
    case ErrorKind::UnknownTarget: return "UnknownTarget";
    case ErrorKind::DuplicateAssignment: return "DuplicateAssignment";
    case ErrorKind::NotBijective: return "NotBijective";
    case ErrorKind::InvalidGauge: return "InvalidGauge";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NotHomeomorphism: return "NotHomeomorphism";
    case ErrorKind::UnboundedEnvelope: return "UnboundedEnvelope";
    case ErrorKind::SandwichOrderViolated: return "SandwichOrderViolated";
    case ErrorKind::SubmultiplicativityViolated: return "SubmultiplicativityViolated";
    case ErrorKind::NotQuasisymmetric: return "NotQuasisymmetric";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::GeneratorEndpointViolation: return "GeneratorEndpointViolation";
    case ErrorKind::GeneratorNotIncreasing: return "GeneratorNotIncreasing";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorKind::NotAContinuation: return "NotAContinuation";
    case ErrorKind::NotSubmultiplicative: return "NotSubmultiplicative";
    case ErrorKind::TheoremViolation: return "TheoremViolation";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `witness()` carries point indices
/// when the failure is tied to concrete points (e.g. the triple that makes an
/// envelope unbounded).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::vector<std::size_t> witness = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        witness_(std::move(witness)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::size_t>& witness() const noexcept { return witness_; }

 private:
  ErrorKind kind_;
  std::vector<std::size_t> witness_;
};

}  // namespace qsmap

#endif  // QSMAP_ERROR_HPP
