#pragma once

#include <stdexcept>
#include <string>

namespace diraclab {

// Failure classes, grouped by how the CLI reports them:
// certification failures exit 1, numerical failures exit 2, config errors exit 3.
enum class ErrorCode {
  // mesh / input
  InvalidResolution,
  NonManifold,
  DegenerateFace,
  DegenerateFrame,
  ParseError,
  NonTriangleFace,
  MissingFrame,
  WrongMesh,
  // algebra
  ZeroSpinor,
  AllZeroSpinor,
  // certification
  NotElliptic,
  NotSelfAdjoint,
  FamilyNotClosed,
  // numerics
  InsufficientResolution,
  AsymmetryTooLarge,
  SolverFailure,
  AmbiguousRank,
  RankUnstable,
  WindowLeak,
  ClusterSplit,
  NoSymmetry,
  BoundaryNotPlanar,
  WeldFailure,
  MismatchBeyondTolerance,
  // configuration
  ConfigError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidResolution: return "InvalidResolution";
    case ErrorCode::NonManifold: return "NonManifold";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::DegenerateFrame: return "DegenerateFrame";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonTriangleFace: return "NonTriangleFace";
    case ErrorCode::MissingFrame: return "MissingFrame";
    case ErrorCode::WrongMesh: return "WrongMesh";
    case ErrorCode::ZeroSpinor: return "ZeroSpinor";
    case ErrorCode::AllZeroSpinor: return "AllZeroSpinor";
    case ErrorCode::NotElliptic: return "NotElliptic";
    case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorCode::FamilyNotClosed: return "FamilyNotClosed";
    case ErrorCode::InsufficientResolution: return "InsufficientResolution";
    case ErrorCode::AsymmetryTooLarge: return "AsymmetryTooLarge";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::AmbiguousRank: return "AmbiguousRank";
    case ErrorCode::RankUnstable: return "RankUnstable";
    case ErrorCode::WindowLeak: return "WindowLeak";
    case ErrorCode::ClusterSplit: return "ClusterSplit";
    case ErrorCode::NoSymmetry: return "NoSymmetry";
    case ErrorCode::BoundaryNotPlanar: return "BoundaryNotPlanar";
    case ErrorCode::WeldFailure: return "WeldFailure";
    case ErrorCode::MismatchBeyondTolerance: return "MismatchBeyondTolerance";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace diraclab
