#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>

#include "ribbon/signal.hpp"

namespace ribbon::trial_io {

/// One parsed JSON-lines record: metadata header, a frame, or nothing (blank).
using Record = std::variant<std::monostate, signal::TrialMeta, signal::RawFrame>;

/// Accepts `{"meta": {"load_g", "voltage_kV", "trial_id"}}` or
/// `{"t", "ch", "active", "ambient"}`. Throws ParseError otherwise.
Record parse_line(std::string_view line);

std::string format_meta(const signal::TrialMeta& meta);
std::string format_frame(const signal::RawFrame& frame);

void write_trial(const signal::TrialRecording& trial, std::ostream& out);
void write_trial_file(const signal::TrialRecording& trial, const std::string& path);

/// Reads a whole trial. The metadata line is optional; a second one is an
/// error.
signal::TrialRecording read_trial(std::istream& in);
signal::TrialRecording read_trial_file(const std::string& path);

}  // namespace ribbon::trial_io
