#pragma once

#include <stdexcept>
#include <string>

namespace clf {

enum class ErrorCode {
  schema,                // malformed or out-of-contract input file
  duplicate_lane_id,
  empty_trajectory,
  out_of_range,
  length_mismatch,
  empty_centerline,
  degenerate_polyline,
  too_few_points,
  no_foreground,
  shape_mismatch,
  invalid_spec,
  invalid_argument,
  io_error,
};

const char* to_string(ErrorCode code) noexcept;

/// All structured failures in this library throw Error; code() identifies
/// the contract that was violated, what() carries the locus.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::schema: return "SchemaError";
    case ErrorCode::duplicate_lane_id: return "DuplicateLaneId";
    case ErrorCode::empty_trajectory: return "EmptyTrajectory";
    case ErrorCode::out_of_range: return "OutOfRange";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::empty_centerline: return "EmptyCenterline";
    case ErrorCode::degenerate_polyline: return "DegeneratePolyline";
    case ErrorCode::too_few_points: return "TooFewPoints";
    case ErrorCode::no_foreground: return "NoForeground";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::invalid_spec: return "InvalidSpec";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::io_error: return "IoError";
  }
  return "Error";
}

}  // namespace clf
