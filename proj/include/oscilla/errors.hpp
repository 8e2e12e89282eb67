#pragma once

#include <stdexcept>
#include <string>

namespace oscilla {

enum class ErrorCode {
  // profile / config validation
  NonPositiveProfile,
  TooTall,
  BadPeriod,
  Config,
  NonPositiveQ0,
  DegenerateFit,
  MeshMismatch,
  // mesh / solver failures
  DegenerateMesh,
  ResourceLimit,
  NonFiniteWeight,
  NoConvergence,
  IncompatibleRHS,
  OutOfDomain,
  BoundViolated,
  NonDecreasingError,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

  // true for errors caused by bad user input rather than a failed computation
  bool is_validation() const {
    switch (code_) {
      case ErrorCode::NonPositiveProfile:
      case ErrorCode::TooTall:
      case ErrorCode::BadPeriod:
      case ErrorCode::Config:
      case ErrorCode::NonPositiveQ0:
      case ErrorCode::DegenerateFit:
      case ErrorCode::MeshMismatch:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

}  // namespace oscilla
