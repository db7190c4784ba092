#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace streamsched {

/// Every failure the library reports carries one of these codes so callers
/// (and the CLI exit-code mapping) can branch without parsing messages.
enum class ErrorCode {
  kCycleDetected,
  kDanglingEdge,
  kZeroExecutors,
  kInvalidTopology,
  kInvalidCluster,
  kDimensionMismatch,
  kSlotCapacityExceeded,
  kInvalidConfig,
  kUnstableSystem,
  kNonFiniteGradient,
  kArchitectureMismatch,
  kCorruptCheckpoint,
  kKTooLarge,
  kSpaceTooLarge,
  kInsufficientSamples,
  kUnknownScheduler,
  kBadWindow,
  kScenarioMismatch,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kCycleDetected: return "cycle-detected";
    case ErrorCode::kDanglingEdge: return "dangling-edge";
    case ErrorCode::kZeroExecutors: return "zero-executors";
    case ErrorCode::kInvalidTopology: return "invalid-topology";
    case ErrorCode::kInvalidCluster: return "invalid-cluster";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kSlotCapacityExceeded: return "slot-capacity-exceeded";
    case ErrorCode::kInvalidConfig: return "config-invalid";
    case ErrorCode::kUnstableSystem: return "unstable-system";
    case ErrorCode::kNonFiniteGradient: return "non-finite-gradient";
    case ErrorCode::kArchitectureMismatch: return "architecture-mismatch";
    case ErrorCode::kCorruptCheckpoint: return "corrupt-checkpoint";
    case ErrorCode::kKTooLarge: return "k-too-large";
    case ErrorCode::kSpaceTooLarge: return "space-too-large";
    case ErrorCode::kInsufficientSamples: return "insufficient-samples";
    case ErrorCode::kUnknownScheduler: return "unknown-scheduler";
    case ErrorCode::kBadWindow: return "bad-window";
    case ErrorCode::kScenarioMismatch: return "scenario-mismatch";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace streamsched
