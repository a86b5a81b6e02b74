#pragma once

#include <stdexcept>
#include <string>

namespace egl {

enum class ErrorCode {
  StencilOutsideDomain,
  NonFiniteValue,
  DimensionMismatch,
  InvalidTolerance,
  NotComposable,
  ChartInvalid,
  EndpointMismatch,
  StratumMismatch,
  NotTransverse,
  SamplerExhausted,
  DegenerateRadius,
  MalformedPresentation,
  KTooLarge,
  UnknownGenerator,
  ConfigError,
  SchemaError,
};

inline const char *to_string(ErrorCode c) {
  switch (c) {
  case ErrorCode::StencilOutsideDomain: return "StencilOutsideDomain";
  case ErrorCode::NonFiniteValue: return "NonFiniteValue";
  case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  case ErrorCode::InvalidTolerance: return "InvalidTolerance";
  case ErrorCode::NotComposable: return "NotComposable";
  case ErrorCode::ChartInvalid: return "ChartInvalid";
  case ErrorCode::EndpointMismatch: return "EndpointMismatch";
  case ErrorCode::StratumMismatch: return "StratumMismatch";
  case ErrorCode::NotTransverse: return "NotTransverse";
  case ErrorCode::SamplerExhausted: return "SamplerExhausted";
  case ErrorCode::DegenerateRadius: return "DegenerateRadius";
  case ErrorCode::MalformedPresentation: return "MalformedPresentation";
  case ErrorCode::KTooLarge: return "KTooLarge";
  case ErrorCode::UnknownGenerator: return "UnknownGenerator";
  case ErrorCode::ConfigError: return "ConfigError";
  case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace egl
