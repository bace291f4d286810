#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lgb {

enum class ErrorKind {
  NotSymmetric,
  NotPositiveDefinite,
  IllConditioned,
  SingularTransform,
  DimensionMismatch,
  DegenerateCovariance,
  SingularDynamics,
  NoConvergence,
  StructuralError,
  NotObservableAtHorizon,
  DomainError,
  PreconditionError,
  EmptyInput,
  NoCriticalValue,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` distinguishes the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lgb
