#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relife {

enum class ErrorCode {
  ZeroMass,
  IllegalTransition,
  ValidationFailed,
  UnknownMaterial,
  NotFound,
  SequenceGap,
  StorageFailure,
  ParseError,
  IoError,
  NoSharedFeatures,
  DuplicateId,
  AlreadyResolved,
  UnknownSubject,
  InvalidWeights,
  DuplicateName,
  UnknownReceiver,
  ProtocolViolation,
  BudgetExhausted,
  EmptyFeasibleSet,
  UnknownProduct,
  SpecialistTimeout,
  NoSession,
  InfeasibleChoice,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure surfaced by the library. The code is
/// stable and doubles as the `code` field of HTTP error bodies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace relife
