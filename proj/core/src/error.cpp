#include "encompass/error.hpp"

namespace enc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::InvalidHorizon: return "InvalidHorizon";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfSpace: return "OutOfSpace";
    case ErrorCode::AllStartsInfeasible: return "AllStartsInfeasible";
    case ErrorCode::SingularBread: return "SingularBread";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::EmptyDistribution: return "EmptyDistribution";
    case ErrorCode::SingularWeight: return "SingularWeight";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::MismatchedReports: return "MismatchedReports";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::NonStationary: return "NonStationary";
    case ErrorCode::Divergence: return "Divergence";
    case ErrorCode::InsufficientPaths: return "InsufficientPaths";
    case ErrorCode::IncompatibleModels: return "IncompatibleModels";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace enc
