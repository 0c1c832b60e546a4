#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nhqm {

enum class ErrorKind {
  NonConvergence,
  DegenerateSpectrum,
  NotPositiveDefinite,
  NotHermitian,
  Overflow,
  DimensionMismatch,
  BrokenSymmetry,
  ComplexSpectrum,
  MetricMismatch,
  NonFinite,
  Singular,
  GapClosure,
  NotInvariant,
  DefectiveMonodromy,
  ResonanceError,
  ConstraintViolation,
  SingularTheta,
  GridMismatch,
  SyntaxError,
  UnknownFunction,
  UnknownIdentifier,
  DivisionByZero,
  SchemaError,
  ParseError,
  IoError,
  UsageError,
};

std::string_view to_string(ErrorKind kind);

// True for the kinds that describe bad user input rather than a numerical
// failure. The CLI maps the two groups to different exit codes.
bool is_input_error(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }

  // Step index for NonFinite, byte offset for parser errors.
  std::optional<std::size_t> index() const noexcept { return index_; }

private:
  ErrorKind kind_;
  std::optional<std::size_t> index_;
};

}  // namespace nhqm
