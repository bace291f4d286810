#include "lgb/error.hpp"

namespace lgb {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::SingularTransform: return "SingularTransform";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorKind::SingularDynamics: return "SingularDynamics";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::StructuralError: return "StructuralError";
    case ErrorKind::NotObservableAtHorizon: return "NotObservableAtHorizon";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::PreconditionError: return "PreconditionError";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NoCriticalValue: return "NoCriticalValue";
  }
  return "Unknown";
}

}  // namespace lgb
