#include "ribbon/synth.hpp"

#include <cmath>
#include <json.hpp>
#include <numbers>
#include <numeric>

#include "ribbon/error.hpp"

namespace ribbon::synth {

using nlohmann::json;

double Rng::uniform() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  return r * std::cos(a);
}

void validate(const TrajectorySpec& spec) {
  const auto& a0 = spec.anchors.front();
  if (a0[0] != 1.0 || a0[1] != 1.0) fail(ErrorKind::InvalidInput, "first anchor must be (1, 1)");
  for (double d : spec.segment_durations) {
    if (!(d > 0.0)) fail(ErrorKind::InvalidInput, "segment durations must be > 0");
  }
  if (!(spec.speed_factor > 0.0)) fail(ErrorKind::InvalidInput, "speed_factor must be > 0");
  if (!(spec.sample_rate > 0.0)) fail(ErrorKind::InvalidInput, "sample_rate must be > 0");
  if (!(spec.noise_sigma >= 0.0)) fail(ErrorKind::InvalidInput, "noise_sigma must be >= 0");
  if (!(spec.rest_s >= 0.0) || !(spec.hold_s >= 0.0)) {
    fail(ErrorKind::InvalidInput, "rest_s and hold_s must be >= 0");
  }
  if (!(spec.channel_stagger >= 0.0 && spec.channel_stagger < 1.0)) {
    fail(ErrorKind::InvalidInput, "channel_stagger must lie in [0, 1)");
  }
  if (spec.ambient < 0 || !(spec.full_scale > 0.0)) {
    fail(ErrorKind::InvalidInput, "ambient must be >= 0 and full_scale > 0");
  }
  if (spec.buckling && !(spec.buckling->end > spec.buckling->begin && spec.buckling->begin >= 0.0)) {
    fail(ErrorKind::InvalidInput, "buckling interval must satisfy 0 <= begin < end");
  }
}

double motion_duration(const TrajectorySpec& spec) {
  return std::accumulate(spec.segment_durations.begin(), spec.segment_durations.end(), 0.0) /
         spec.speed_factor;
}

double trial_duration(const TrajectorySpec& spec) {
  return spec.rest_s + motion_duration(spec) + spec.hold_s;
}

std::array<double, 8> anchor_times(const TrajectorySpec& spec) {
  std::array<double, 8> t{};
  double cum = 0.0;
  t[0] = spec.rest_s;
  for (std::size_t k = 0; k < 7; ++k) {
    cum += spec.segment_durations[k];
    t[k + 1] = spec.rest_s + cum / spec.speed_factor;
  }
  return t;
}

std::optional<signal::Interval> buckling_window(const TrajectorySpec& spec) {
  if (!spec.buckling) return std::nullopt;
  return signal::Interval{spec.rest_s + spec.buckling->begin / spec.speed_factor,
                          spec.rest_s + spec.buckling->end / spec.speed_factor};
}

signal::StateTiming state_timing(const TrajectorySpec& spec) {
  const auto t = anchor_times(spec);
  signal::StateTiming timing;
  timing.n_states = 8;
  timing.start_time = t[0];
  timing.pre_contraction_end = t[6];
  timing.end_time = t[7];
  timing.exclusion = buckling_window(spec);
  return timing;
}

FeaturePair ideal_features(const TrajectorySpec& spec, double t) {
  // Nominal motion time at speed 1.
  const double m = (t - spec.rest_s) * spec.speed_factor;
  FeaturePair f = spec.anchors.back();
  if (m <= 0.0) {
    f = spec.anchors.front();
  } else {
    double start = 0.0;
    for (std::size_t k = 0; k < 7; ++k) {
      const double d = spec.segment_durations[k];
      if (m < start + d) {
        const double u = (m - start) / d;
        const auto& a = spec.anchors[k];
        const auto& b = spec.anchors[k + 1];
        f = {a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])};
        break;
      }
      start += d;
    }
  }
  if (spec.buckling && m > spec.buckling->begin && m < spec.buckling->end) {
    const double u = (m - spec.buckling->begin) / (spec.buckling->end - spec.buckling->begin);
    const double bump = spec.buckling->amplitude * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u));
    f[0] += bump;
    f[1] += bump;
  }
  return f;
}

signal::TrialRecording generate_trial(const TrajectorySpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  signal::TrialRecording trial;
  trial.meta = spec.meta;

  const double duration = trial_duration(spec);
  const auto count = static_cast<std::size_t>(std::floor(duration * spec.sample_rate + 1e-9)) + 1;
  trial.frames.reserve(2 * count);
  auto to_counts = [&](double feature) {
    const auto v = spec.ambient + std::llround(feature * spec.full_scale);
    return std::max<std::int64_t>(v, 0);
  };
  for (std::size_t i = 0; i < count; ++i) {
    const double t1 = static_cast<double>(i) / spec.sample_rate;
    const double t2 = t1 + spec.channel_stagger / spec.sample_rate;
    const double n1 = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
    const double n2 = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
    trial.frames.push_back({t1, 1, to_counts(ideal_features(spec, t1)[0] + n1), spec.ambient});
    trial.frames.push_back({t2, 2, to_counts(ideal_features(spec, t2)[1] + n2), spec.ambient});
  }
  return trial;
}

std::vector<signal::TrialRecording> generate_condition(const TrajectorySpec& spec, int n_trials,
                                                       std::uint64_t seed_base) {
  if (n_trials < 1) fail(ErrorKind::InvalidInput, "n_trials must be >= 1");
  std::vector<signal::TrialRecording> out;
  for (int k = 0; k < n_trials; ++k) {
    TrajectorySpec s = spec;
    s.seed = seed_base + static_cast<std::uint64_t>(k);
    s.meta.trial_id = spec.meta.trial_id + "-" + std::to_string(k + 1);
    out.push_back(generate_trial(s));
  }
  return out;
}

TrajectorySpec spec_from_json(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(ErrorKind::ParseError, "synth spec is not a JSON object");
  TrajectorySpec s;
  try {
    if (j.contains("anchors")) {
      const auto a = j["anchors"].get<std::vector<std::vector<double>>>();
      if (a.size() != 8) fail(ErrorKind::InvalidInput, "synth spec needs 8 anchors");
      for (std::size_t k = 0; k < 8; ++k) {
        if (a[k].size() != 2) fail(ErrorKind::InvalidInput, "anchors must be feature pairs");
        s.anchors[k] = {a[k][0], a[k][1]};
      }
    }
    if (j.contains("segment_durations")) {
      const auto d = j["segment_durations"].get<std::vector<double>>();
      if (d.size() != 7) fail(ErrorKind::InvalidInput, "synth spec needs 7 segment durations");
      std::copy(d.begin(), d.end(), s.segment_durations.begin());
    }
    s.speed_factor = j.value("speed_factor", s.speed_factor);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.sample_rate = j.value("sample_rate", s.sample_rate);
    s.seed = j.value("seed", s.seed);
    s.rest_s = j.value("rest_s", s.rest_s);
    s.hold_s = j.value("hold_s", s.hold_s);
    s.channel_stagger = j.value("channel_stagger", s.channel_stagger);
    s.ambient = j.value("ambient", s.ambient);
    s.full_scale = j.value("full_scale", s.full_scale);
    s.meta.load_g = j.value("load_g", s.meta.load_g);
    s.meta.voltage_kV = j.value("voltage_kV", s.meta.voltage_kV);
    s.meta.trial_id = j.value("trial_id", s.meta.trial_id);
    if (j.contains("buckling") && !j["buckling"].is_null()) {
      const auto& b = j["buckling"];
      s.buckling = BucklingSpec{b.at("begin").get<double>(), b.at("end").get<double>(),
                                b.at("amplitude").get<double>()};
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::ParseError, e.what());
  }
  validate(s);
  return s;
}

std::string spec_to_json(const TrajectorySpec& spec) {
  json anchors = json::array();
  for (const auto& a : spec.anchors) anchors.push_back({a[0], a[1]});
  json j = {{"anchors", anchors},
            {"segment_durations", spec.segment_durations},
            {"speed_factor", spec.speed_factor},
            {"noise_sigma", spec.noise_sigma},
            {"sample_rate", spec.sample_rate},
            {"seed", spec.seed},
            {"rest_s", spec.rest_s},
            {"hold_s", spec.hold_s},
            {"channel_stagger", spec.channel_stagger},
            {"ambient", spec.ambient},
            {"full_scale", spec.full_scale},
            {"load_g", spec.meta.load_g},
            {"voltage_kV", spec.meta.voltage_kV},
            {"trial_id", spec.meta.trial_id}};
  if (spec.buckling) {
    j["buckling"] = {{"begin", spec.buckling->begin},
                     {"end", spec.buckling->end},
                     {"amplitude", spec.buckling->amplitude}};
  }
  return j.dump(1);
}

geometry::RibbonCurve curve_from_curvature(const std::function<double(double)>& kappa_signed,
                                           double length, std::size_t n, int state_label,
                                           std::size_t anchor_index) {
  if (n < 5 || !(length > 0.0)) fail(ErrorKind::InvalidInput, "curve needs n >= 5 and length > 0");
  constexpr int kSub = 32;
  geometry::RibbonCurve curve;
  curve.state_label = state_label;
  curve.anchor_index = anchor_index;
  curve.unit = geometry::LengthUnit::mm;
  curve.points.reserve(n);

  const double ds = length / static_cast<double>(n - 1);
  const double h = ds / kSub;
  double x = 0.0, y = 0.0, theta = 0.0, s = 0.0;
  curve.points.push_back({x, y});
  for (std::size_t i = 1; i < n; ++i) {
    for (int k = 0; k < kSub; ++k) {
      // Midpoint rule on heading; the library sign convention is clockwise-positive.
      const double mid_theta = theta - 0.5 * h * kappa_signed(s + 0.5 * h);
      x += h * std::cos(mid_theta);
      y += h * std::sin(mid_theta);
      theta -= h * kappa_signed(s + 0.5 * h);
      s += h;
    }
    curve.points.push_back({x, y});
  }
  geometry::validate(curve);
  return curve;
}

}  // namespace ribbon::synth
