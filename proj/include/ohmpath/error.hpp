#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ohmpath {

/// Error codes surfaced by the library. The CLI prints the code name and
/// maps every one of these to exit status 2.
enum class ErrorCode {
  MalformedJson,
  SelfLoop,
  DuplicateArc,
  NodeOutOfRange,
  TooFewNodes,
  DisconnectedGraph,
  NoHamiltonianPath,
  InconsistentEndpoints,
  DimensionMismatch,
  ConductanceOutOfRange,
  PathNotInGraph,
  UnknownNode,
  SolverFailure,
  NonSmoothPoint,
  InfeasibleConstraint,
  TooManyArcs,
  InvalidParameter,
};

inline std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateArc: return "DuplicateArc";
    case ErrorCode::NodeOutOfRange: return "NodeOutOfRange";
    case ErrorCode::TooFewNodes: return "TooFewNodes";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::NoHamiltonianPath: return "NoHamiltonianPath";
    case ErrorCode::InconsistentEndpoints: return "InconsistentEndpoints";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConductanceOutOfRange: return "ConductanceOutOfRange";
    case ErrorCode::PathNotInGraph: return "PathNotInGraph";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::NonSmoothPoint: return "NonSmoothPoint";
    case ErrorCode::InfeasibleConstraint: return "InfeasibleConstraint";
    case ErrorCode::TooManyArcs: return "TooManyArcs";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ohmpath
