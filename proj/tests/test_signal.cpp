#include <doctest.h>

#include <cmath>
#include <functional>

#include "ribbon/error.hpp"
#include "ribbon/signal.hpp"
#include "ribbon/synth.hpp"

using namespace ribbon;
using signal::FeaturePair;
using signal::RawFrame;
using signal::Series;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

Series make_series(std::size_t n, double dt, const std::function<double(double)>& f) {
  Series s;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    s.t.push_back(t);
    s.v.push_back(f(t));
  }
  return s;
}

signal::TrialAverage ramp_average(double t_end, double dt) {
  signal::TrialAverage a;
  for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
    a.t.push_back(t);
    a.mean[0].push_back(100.0 - t);
    a.mean[1].push_back(200.0 - 2.0 * t);
    a.stddev[0].push_back(0.0);
    a.stddev[1].push_back(0.0);
  }
  return a;
}

signal::TrialRecording two_level_trial(double level1, double level2, double offset, std::string id) {
  signal::TrialRecording r;
  r.meta = {12.3, 4.0, std::move(id)};
  for (int i = 0; i < 200; ++i) {
    const double t = i * 0.01;
    const double bump = t > 1.0 ? 50.0 : 0.0;
    r.frames.push_back({t, 1, static_cast<std::int64_t>(level1 + bump + offset), 10});
    r.frames.push_back({t + 0.005, 2, static_cast<std::int64_t>(level2 + bump + offset), 10});
  }
  return r;
}

}  // namespace

TEST_SUITE("signal") {
  TEST_CASE("ambient correction") {
    CHECK(signal::ambient_correct({0.0, 1, 512, 12}).value == 500.0);
    CHECK_FALSE(signal::ambient_correct({0.0, 1, 512, 12}).clamped);
    CHECK(signal::ambient_correct({0.0, 1, 10, 10}).value == 0.0);
    CHECK_FALSE(signal::ambient_correct({0.0, 1, 10, 10}).clamped);
    const auto c = signal::ambient_correct({0.0, 1, 5, 9});
    CHECK(c.value == 0.0);
    CHECK(c.clamped);
  }

  TEST_CASE("trial validation") {
    signal::TrialRecording r;
    r.frames = {{0.0, 1, 5, 1}, {0.0, 3, 5, 1}};
    CHECK(kind_of([&] { signal::validate(r); }) == ErrorKind::InvalidInput);
    r.frames = {{0.1, 1, 5, 1}, {0.0, 2, 5, 1}};
    CHECK(kind_of([&] { signal::validate(r); }) == ErrorKind::InvalidInput);
    r.frames = {{0.0, 1, -5, 1}};
    CHECK(kind_of([&] { signal::validate(r); }) == ErrorKind::InvalidInput);
  }

  TEST_CASE("offset removal") {
    const auto c = make_series(100, 0.01, [](double) { return 42.0; });
    for (double v : signal::remove_offset(c).v) CHECK(v == 0.0);

    const auto ramp = make_series(300, 0.01, [](double t) { return t < 0.5 ? 100.0 : 100.0 + (t - 0.5); });
    const auto r = signal::remove_offset(ramp);
    for (std::size_t i = 0; i < ramp.size(); ++i) CHECK(r.v[i] == doctest::Approx(ramp.v[i] - 100.0));

    auto shifted = ramp;
    for (auto& v : shifted.v) v += 17.5;
    const auto r2 = signal::remove_offset(shifted);
    for (std::size_t i = 0; i < ramp.size(); ++i) CHECK(std::abs(r2.v[i] - r.v[i]) < 1e-9);

    const auto one = make_series(1, 0.01, [](double) { return 1.0; });
    CHECK(kind_of([&] { signal::remove_offset(one); }) == ErrorKind::SeriesTooShort);
  }

  TEST_CASE("interpolation clamps to the ends") {
    const auto s = make_series(3, 1.0, [](double t) { return 2.0 * t; });
    CHECK(signal::interpolate(s, -1.0) == 0.0);
    CHECK(signal::interpolate(s, 0.25) == doctest::Approx(0.5));
    CHECK(signal::interpolate(s, 9.0) == 4.0);
  }

  TEST_CASE("averaging identical and shifted trials") {
    const auto a = two_level_trial(300, 500, 0, "a");
    const auto b = two_level_trial(300, 500, 0, "b");
    const std::vector<signal::TrialRecording> same{a, b};
    const auto m = signal::average_trials(same);
    const auto ca = signal::correct_trial(a);
    for (std::size_t i = 0; i < m.t.size(); ++i) {
      CHECK(m.stddev[0][i] == 0.0);
      CHECK(m.stddev[1][i] == 0.0);
      CHECK(m.mean[0][i] == doctest::Approx(signal::interpolate(ca.ch[0], m.t[i])));
    }

    const auto c = two_level_trial(300, 500, 2, "c");
    const std::vector<signal::TrialRecording> shifted{a, c};
    const auto s = signal::average_trials(shifted);
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      CHECK(s.mean[0][i] == doctest::Approx(signal::interpolate(ca.ch[0], s.t[i]) + 1.0));
      CHECK(s.stddev[0][i] == doctest::Approx(std::sqrt(2.0)));
      CHECK(s.stddev[1][i] == doctest::Approx(std::sqrt(2.0)));
    }
  }

  TEST_CASE("averaging preconditions") {
    const auto a = two_level_trial(300, 500, 0, "a");
    const std::vector<signal::TrialRecording> single{a};
    CHECK(kind_of([&] { signal::average_trials(single); }) == ErrorKind::InsufficientTrials);
    auto b = a;
    b.meta.voltage_kV = 5.0;
    const std::vector<signal::TrialRecording> mixed{a, b};
    CHECK(kind_of([&] { signal::average_trials(mixed); }) == ErrorKind::ConditionMismatch);
  }

  TEST_CASE("noisy synthetic trials: std agrees with direct computation") {
    synth::TrajectorySpec spec;
    spec.noise_sigma = 0.01;
    const auto trials = synth::generate_condition(spec, 3, 11);
    const auto avg = signal::average_trials(trials);
    std::array<signal::TwoChannel, 3> corrected;
    for (int k = 0; k < 3; ++k) corrected[k] = signal::correct_trial(trials[k]);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < avg.t.size(); ++i) {
      for (int ch = 0; ch < 2; ++ch) {
        double v[3], mean = 0.0;
        for (int k = 0; k < 3; ++k) {
          v[k] = signal::interpolate(corrected[k].ch[ch], avg.t[i]);
          mean += v[k] / 3.0;
        }
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean) / 2.0;
        REQUIRE(avg.stddev[ch][i] == doctest::Approx(std::sqrt(var)).epsilon(1e-9));
        REQUIRE(avg.mean[ch][i] == doctest::Approx(mean).epsilon(1e-12));
        sum_sq += var / (spec.full_scale * spec.full_scale);
      }
    }
    const double rms = std::sqrt(sum_sq / (2.0 * static_cast<double>(avg.t.size())));
    CHECK(rms >= 0.002);
    CHECK(rms <= 0.05);
  }

  TEST_CASE("equally spaced state times") {
    signal::StateTiming timing;
    timing.end_time = 7.0;
    const auto t = signal::state_times(timing);
    REQUIRE(t.size() == 8);
    for (int k = 0; k < 8; ++k) CHECK(t[k] == doctest::Approx(static_cast<double>(k)));

    const auto anchors = signal::extract_states(ramp_average(7.0, 0.01), timing);
    REQUIRE(anchors.size() == 8);
    for (int k = 0; k < 8; ++k) {
      CHECK(anchors[k].state == k + 1);
      CHECK(anchors[k].features[0] == doctest::Approx(100.0 - k));
      CHECK(anchors[k].features[1] == doctest::Approx(200.0 - 2.0 * k));
    }
  }

  TEST_CASE("exclusion shifts states to the nearer boundary") {
    signal::StateTiming timing;
    timing.end_time = 7.0;
    timing.exclusion = signal::Interval{2.5, 3.5};
    const auto t = signal::state_times(timing);
    CHECK(t[3] == 2.5);
    timing.exclusion = signal::Interval{2.8, 3.5};
    CHECK(signal::state_times(timing)[3] == 2.8);
    timing.exclusion = signal::Interval{2.5, 3.2};
    CHECK(signal::state_times(timing)[3] == 3.2);

    timing.exclusion = signal::Interval{1.0, 5.0};
    CHECK(kind_of([&] { signal::state_times(timing); }) == ErrorKind::ExclusionTooWide);
    // Two states mapped onto the same boundary.
    timing.exclusion = signal::Interval{0.9, 3.5};
    CHECK(kind_of([&] { signal::state_times(timing); }) == ErrorKind::ExclusionTooWide);
  }

  TEST_CASE("state extraction recovers synthetic anchors") {
    synth::TrajectorySpec spec;
    const auto trials = synth::generate_condition(spec, 2, 1);
    const auto avg = signal::average_trials(trials);
    const auto anchors = signal::extract_states(avg, synth::state_timing(spec));
    const auto expect = synth::anchor_times(spec);
    const double dt = 1.0 / spec.sample_rate;
    for (int k = 0; k < 8; ++k) {
      CHECK(std::abs(anchors[k].t - expect[k]) <= dt);
      for (int ch = 0; ch < 2; ++ch) {
        const double want = spec.anchors[k][ch] * spec.full_scale;
        CHECK(std::abs(anchors[k].features[ch] - want) <= 0.15 * dt * spec.full_scale + 1.0);
      }
    }
  }

  TEST_CASE("first-state normalization") {
    std::vector<FeaturePair> s(8, FeaturePair{200, 400});
    s[4] = {100, 100};
    const auto n = signal::normalize_to_first_state(s, 1e-6);
    CHECK(n[4][0] == 0.5);
    CHECK(n[4][1] == 0.25);
    CHECK(n[0] == FeaturePair{1.0, 1.0});
    CHECK(n[1] == FeaturePair{1.0, 1.0});
    s[0] = {1e-9, 400};
    CHECK(kind_of([&] { signal::normalize_to_first_state(s, 1e-6); }) == ErrorKind::NearZeroReference);
  }

  TEST_CASE("end detection finds the final plateau") {
    synth::TrajectorySpec spec;
    const auto trials = synth::generate_condition(spec, 2, 5);
    const auto end = signal::detect_end_time(signal::average_trials(trials));
    REQUIRE(end.has_value());
    CHECK(std::abs(*end - synth::anchor_times(spec)[7]) <= 0.25);
  }

  TEST_CASE("calibration on synthetic trials") {
    synth::TrajectorySpec spec;
    spec.noise_sigma = 0.01;
    const auto trials = synth::generate_condition(spec, 3, 21);
    signal::CalibrationOptions opts;
    opts.timing = synth::state_timing(spec);
    const auto cal = signal::calibrate(trials, opts);
    REQUIRE(cal.dataset.samples.size() == 24);
    CHECK(cal.warnings.empty());
    for (const auto& s : cal.dataset.samples) {
      if (s.state == 1) CHECK(s.features == FeaturePair{1.0, 1.0});
      const auto& a = spec.anchors[static_cast<std::size_t>(s.state - 1)];
      CHECK(std::abs(s.features[0] - a[0]) < 0.06);
      CHECK(std::abs(s.features[1] - a[1]) < 0.06);
    }
    CHECK_FALSE(cal.manifold.empty());

    const std::vector<signal::TrialRecording> one{trials[0]};
    const auto single = signal::calibrate(one, opts);
    CHECK(single.dataset.samples.size() == 8);
    CHECK(single.warnings.size() == 1);
  }

  TEST_CASE("calibration reports timing problems") {
    synth::TrajectorySpec spec;
    const auto trials = synth::generate_condition(spec, 3, 1);
    signal::CalibrationOptions opts;
    opts.timing = synth::state_timing(spec);
    opts.timing.exclusion = signal::Interval{0.5, 6.0};
    CHECK(kind_of([&] { signal::calibrate(trials, opts); }) == ErrorKind::ExclusionTooWide);

    auto dark = trials;
    for (auto& tr : dark) {
      for (auto& f : tr.frames) {
        if (f.channel == 2 && f.t < 1.0) f.active = f.ambient;
      }
    }
    opts.timing.exclusion.reset();
    CHECK(kind_of([&] { signal::calibrate(dark, opts); }) == ErrorKind::NearZeroReference);
  }

  TEST_CASE("gain and offset invariance of the features") {
    synth::TrajectorySpec spec;
    spec.noise_sigma = 0.01;
    const auto trials = synth::generate_condition(spec, 3, 31);
    signal::CalibrationOptions opts;
    opts.timing = synth::state_timing(spec);
    const auto base = signal::calibrate(trials, opts);

    // Integer gains keep the counts exact.
    auto scaled = trials;
    for (auto& tr : scaled) {
      for (auto& f : tr.frames) {
        const std::int64_t g = f.channel == 1 ? 3 : 7;
        f.active = (f.active - f.ambient) * g + f.ambient;
      }
    }
    const auto gained = signal::calibrate(scaled, opts);
    for (std::size_t i = 0; i < base.dataset.samples.size(); ++i) {
      for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(gained.dataset.samples[i].features[c] - base.dataset.samples[i].features[c]) <= 1e-9);
      }
    }
  }
}
