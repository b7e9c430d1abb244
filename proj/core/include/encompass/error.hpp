#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace enc {

enum class ErrorCode {
  LengthMismatch,
  NonFiniteValue,
  InvalidHorizon,
  InvalidArgument,
  SeriesTooShort,
  DomainError,
  DimensionMismatch,
  OutOfSpace,
  AllStartsInfeasible,
  SingularBread,
  NotPositiveDefinite,
  EmptyDistribution,
  SingularWeight,
  DegenerateFit,
  MismatchedReports,
  InvalidShape,
  NonStationary,
  Divergence,
  InsufficientPaths,
  IncompatibleModels,
  EmptyInput,
  ParseError,
  SchemaError,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace enc
