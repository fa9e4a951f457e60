#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ribbon {

/// Failure categories raised by the library. Each maps to one documented
/// precondition or degeneracy; the CLI turns them into exit codes.
enum class ErrorKind {
  InvalidInput,
  ParseError,
  DegenerateTangent,
  FlatProfile,
  SignalTooShort,
  NoVariation,
  AmbiguousSide,
  SeriesTooShort,
  ConditionMismatch,
  InsufficientTrials,
  ExclusionTooWide,
  NearZeroReference,
  DimensionMismatch,
  DegenerateLabels,
  UnsupportedResolution,
  UnpairedChannels,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace ribbon
