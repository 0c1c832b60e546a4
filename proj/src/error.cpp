#include "nhqm/error.hpp"

namespace nhqm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BrokenSymmetry: return "BrokenSymmetry";
    case ErrorKind::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorKind::MetricMismatch: return "MetricMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::GapClosure: return "GapClosure";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::DefectiveMonodromy: return "DefectiveMonodromy";
    case ErrorKind::ResonanceError: return "ResonanceError";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::SingularTheta: return "SingularTheta";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError:
    case ErrorKind::UnknownFunction:
    case ErrorKind::UnknownIdentifier:
    case ErrorKind::DivisionByZero:
    case ErrorKind::SchemaError:
    case ErrorKind::ParseError:
    case ErrorKind::IoError:
    case ErrorKind::UsageError:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::GridMismatch:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), index_(index) {}

}  // namespace nhqm
