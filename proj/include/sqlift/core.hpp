#pragma once

/// @file
/// Shared vocabulary for the sqlift library: dense vector/matrix aliases,
/// the extended-real value type, the error type and default tolerances.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sqlift {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Default tolerances. Every routine that uses one also accepts an override.
namespace tol {
inline constexpr double feasibility = 1e-9;
inline constexpr double activity = 1e-8;
inline constexpr double support = 1e-8;
inline constexpr double ri_positivity = 1e-9;
inline constexpr double stationarity = 1e-8;
} // namespace tol

enum class ErrorKind {
  DimensionMismatch,
  NumericalFailure,
  EmptySet,
  InfeasiblePolyhedron,
  OutOfDomain,
  OutOfLiftedDomain,
  InfeasibleMultiplier,
  NotStationary,
  InconsistencyDetected,
  NotAStationaryPoint,
  InvalidRange,
  InsufficientSamples,
  NotConvex,
  NotAMinimizer,
  UnsupportedProblemClass,
  DivergenceDetected,
  InsufficientTrace,
  TooLarge,
  UnboundedPolyhedron,
  ParseError,
  ValidationError,
  IOError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  case ErrorKind::NumericalFailure: return "NumericalFailure";
  case ErrorKind::EmptySet: return "EmptySet";
  case ErrorKind::InfeasiblePolyhedron: return "InfeasiblePolyhedron";
  case ErrorKind::OutOfDomain: return "OutOfDomain";
  case ErrorKind::OutOfLiftedDomain: return "OutOfLiftedDomain";
  case ErrorKind::InfeasibleMultiplier: return "InfeasibleMultiplier";
  case ErrorKind::NotStationary: return "NotStationary";
  case ErrorKind::InconsistencyDetected: return "InconsistencyDetected";
  case ErrorKind::NotAStationaryPoint: return "NotAStationaryPoint";
  case ErrorKind::InvalidRange: return "InvalidRange";
  case ErrorKind::InsufficientSamples: return "InsufficientSamples";
  case ErrorKind::NotConvex: return "NotConvex";
  case ErrorKind::NotAMinimizer: return "NotAMinimizer";
  case ErrorKind::UnsupportedProblemClass: return "UnsupportedProblemClass";
  case ErrorKind::DivergenceDetected: return "DivergenceDetected";
  case ErrorKind::InsufficientTrace: return "InsufficientTrace";
  case ErrorKind::TooLarge: return "TooLarge";
  case ErrorKind::UnboundedPolyhedron: return "UnboundedPolyhedron";
  case ErrorKind::ParseError: return "ParseError";
  case ErrorKind::ValidationError: return "ValidationError";
  case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

/// The single exception type thrown by the library. Callers dispatch on kind().
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// A value in R ∪ {-∞, +∞}. Infinite values are never encoded as large
/// floats; construction from a non-finite double keeps the sign of the
/// infinity and rejects NaN.
class ExtendedReal {
public:
  constexpr ExtendedReal() = default;
  explicit ExtendedReal(double v) : value_(v) {
    if (std::isnan(v))
      throw Error(ErrorKind::NumericalFailure, "NaN extended real");
  }

  static ExtendedReal pos_inf() {
    return ExtendedReal(std::numeric_limits<double>::infinity());
  }
  static ExtendedReal neg_inf() {
    return ExtendedReal(-std::numeric_limits<double>::infinity());
  }

  bool is_finite() const { return std::isfinite(value_); }
  bool is_pos_inf() const { return std::isinf(value_) && value_ > 0; }
  bool is_neg_inf() const { return std::isinf(value_) && value_ < 0; }

  /// The finite value. Throws if infinite.
  double value() const {
    if (!is_finite())
      throw Error(ErrorKind::NumericalFailure,
                  "finite value requested from an infinite extended real");
    return value_;
  }
  /// Raw IEEE representation (±inf for the infinite cases).
  double raw() const { return value_; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
      throw Error(ErrorKind::NumericalFailure, "∞ - ∞ in extended arithmetic");
    return ExtendedReal(a.value_ + b.value_);
  }
  friend ExtendedReal operator+(ExtendedReal a, double b) {
    return a + ExtendedReal(b);
  }
  friend ExtendedReal operator*(double s, ExtendedReal a) {
    if (s == 0.0) return ExtendedReal(0.0);
    return ExtendedReal(s * a.value_);
  }
  friend bool operator==(ExtendedReal a, ExtendedReal b) {
    return a.value_ == b.value_;
  }
  friend bool operator<(ExtendedReal a, ExtendedReal b) {
    return a.value_ < b.value_;
  }
  friend std::ostream &operator<<(std::ostream &os, ExtendedReal a) {
    if (a.is_pos_inf()) return os << "+inf";
    if (a.is_neg_inf()) return os << "-inf";
    return os << a.value_;
  }

private:
  double value_ = 0.0;
};

inline void require_dim(Index got, Index want, const char *what) {
  if (got != want)
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": expected dimension " +
                    std::to_string(want) + ", got " + std::to_string(got));
}

inline Vector from_std(const std::vector<double> &v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

inline std::vector<double> to_std(const Vector &v) {
  return {v.data(), v.data() + v.size()};
}

} // namespace sqlift
