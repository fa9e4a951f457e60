#include "ribbon/trial_io.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "ribbon/error.hpp"

namespace ribbon::trial_io {

using nlohmann::json;

namespace {

std::int64_t as_count(const json& v, const char* name) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
  }
  fail(ErrorKind::ParseError, std::string("field '") + name + "' must be an integer count");
}

}  // namespace

Record parse_line(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return std::monostate{};

  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(ErrorKind::ParseError, "line is not a JSON object");

  try {
    if (j.contains("meta")) {
      const auto& m = j.at("meta");
      signal::TrialMeta meta;
      meta.load_g = m.value("load_g", 0.0);
      meta.voltage_kV = m.value("voltage_kV", 0.0);
      meta.trial_id = m.value("trial_id", std::string());
      return meta;
    }
    signal::RawFrame f;
    f.t = j.at("t").get<double>();
    f.channel = static_cast<int>(as_count(j.at("ch"), "ch"));
    f.active = as_count(j.at("active"), "active");
    f.ambient = as_count(j.at("ambient"), "ambient");
    return f;
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, e.what());
  }
}

std::string format_meta(const signal::TrialMeta& meta) {
  json j = {{"meta", {{"load_g", meta.load_g}, {"voltage_kV", meta.voltage_kV}, {"trial_id", meta.trial_id}}}};
  return j.dump();
}

std::string format_frame(const signal::RawFrame& frame) {
  json j = {{"t", frame.t}, {"ch", frame.channel}, {"active", frame.active}, {"ambient", frame.ambient}};
  return j.dump();
}

void write_trial(const signal::TrialRecording& trial, std::ostream& out) {
  out << format_meta(trial.meta) << '\n';
  for (const auto& f : trial.frames) out << format_frame(f) << '\n';
}

void write_trial_file(const signal::TrialRecording& trial, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write '" + path + "'");
  write_trial(trial, out);
}

signal::TrialRecording read_trial(std::istream& in) {
  signal::TrialRecording trial;
  bool have_meta = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      auto rec = parse_line(line);
      if (auto* meta = std::get_if<signal::TrialMeta>(&rec)) {
        if (have_meta || !trial.frames.empty()) {
          fail(ErrorKind::ParseError, "metadata must be the first record");
        }
        trial.meta = *meta;
        have_meta = true;
      } else if (auto* frame = std::get_if<signal::RawFrame>(&rec)) {
        trial.frames.push_back(*frame);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.message());
    }
  }
  return trial;
}

signal::TrialRecording read_trial_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open trial file '" + path + "'");
  try {
    return read_trial(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.message());
  }
}

}  // namespace ribbon::trial_io
