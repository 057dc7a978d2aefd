#pragma once

#include <stdexcept>
#include <string>

namespace tca {

enum class ErrorCode {
  InvalidArgument = 1,
  DimensionMismatch,
  SingularMatrix,
  NotPositiveDefinite,
  RankDeficientRegressors,
  ZeroImpact,
  InconsistentNormalization,
  ParseError,
  UnknownVariable,
  HorizonOutOfRange,
  TermExplosion,
  PathExplosion,
  MixedEndpoints,
  TargetTooLarge,
  UnsupportedCondition,
  BootstrapUnstable,
  DecompositionViolated,
  Io,
};

[[nodiscard]] const char* error_code_name(ErrorCode code) noexcept;

// All library failures surface as this type; the C API maps `code()` onto
// its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// ParseError carries the 0-based character offset into the condition text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(ErrorCode::ParseError,
              "at position " + std::to_string(position) + ": " + message),
        position_(position) {}

  [[nodiscard]] std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace tca
