#include "ribbon/error.hpp"

namespace ribbon {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DegenerateTangent: return "DegenerateTangent";
    case ErrorKind::FlatProfile: return "FlatProfile";
    case ErrorKind::SignalTooShort: return "SignalTooShort";
    case ErrorKind::NoVariation: return "NoVariation";
    case ErrorKind::AmbiguousSide: return "AmbiguousSide";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::ConditionMismatch: return "ConditionMismatch";
    case ErrorKind::InsufficientTrials: return "InsufficientTrials";
    case ErrorKind::ExclusionTooWide: return "ExclusionTooWide";
    case ErrorKind::NearZeroReference: return "NearZeroReference";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::UnsupportedResolution: return "UnsupportedResolution";
    case ErrorKind::UnpairedChannels: return "UnpairedChannels";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ribbon
