#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

#include "fixtures.hpp"
#include "ribbon/error.hpp"
#include "ribbon/pipeline.hpp"
#include "ribbon/stream.hpp"
#include "ribbon/synth.hpp"

using namespace ribbon;

namespace {

// Model calibrated on three clean or noisy synthetic trials; built once.
const svm::MulticlassSvm& calibrated(double sigma) {
  static std::map<double, svm::MulticlassSvm> cache;
  auto it = cache.find(sigma);
  if (it == cache.end()) {
    synth::TrajectorySpec spec;
    spec.noise_sigma = sigma;
    const auto trials = synth::generate_condition(spec, 3, 42);
    signal::CalibrationOptions opts;
    opts.timing = synth::state_timing(spec);
    it = cache.emplace(sigma, pipeline::train_from_calibration(signal::calibrate(trials, opts))).first;
  }
  return it->second;
}

std::vector<int> visited_for(const synth::TrajectorySpec& spec, const svm::MulticlassSvm& model) {
  return pipeline::classify_trial(model, synth::generate_trial(spec)).report.visited;
}

const std::vector<int> kAllStates{1, 2, 3, 4, 5, 6, 7, 8};

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_SUITE("stream") {
  TEST_CASE("constant input at a training point yields one event") {
    const auto& model = calibrated(0.0);
    std::size_t row = 0;
    while (model.training.labels[row] != 3) ++row;
    const signal::FeaturePair ref{800.0, 650.0};
    std::vector<stream::PairedSample> samples;
    for (int i = 0; i < 200; ++i) {
      samples.push_back({i * 0.01, model.training.x[row][0] * ref[0], model.training.x[row][1] * ref[1]});
    }
    const auto r = stream::classify_stream(model, samples, ref);
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].state == 3);
    CHECK(r.events[0].t == 0.0);
    CHECK(r.samples.size() == 200);
  }

  TEST_CASE("noise-free trajectory visits every state in order") {
    synth::TrajectorySpec spec;
    CHECK(visited_for(spec, calibrated(0.0)) == kAllStates);
    for (double speed : {0.5, 2.0}) {
      spec.speed_factor = speed;
      CHECK(visited_for(spec, calibrated(0.0)) == kAllStates);
    }
  }

  TEST_CASE("faster motion gives earlier events") {
    synth::TrajectorySpec slow, fast;
    fast.speed_factor = 2.0;
    const auto& model = calibrated(0.0);
    const auto a = pipeline::classify_trial(model, synth::generate_trial(slow));
    const auto b = pipeline::classify_trial(model, synth::generate_trial(fast));
    REQUIRE(a.stream.events.size() == b.stream.events.size());
    for (std::size_t k = 1; k < a.stream.events.size(); ++k) {
      CHECK(b.stream.events[k].t < a.stream.events[k].t);
    }
  }

  TEST_CASE("debounce suppresses short blips") {
    const auto& model = calibrated(0.0);
    auto at = [&](int state) {
      std::size_t row = 0;
      while (model.training.labels[row] != state) ++row;
      return model.training.x[row];
    };
    std::vector<stream::PairedSample> samples;
    auto push = [&](int state, int n) {
      const auto x = at(state);
      for (int i = 0; i < n; ++i) samples.push_back({samples.size() * 0.01, x[0], x[1]});
    };
    push(1, 10);
    push(5, 2);
    push(1, 5);
    push(2, 3);
    const auto r = stream::classify_stream(model, samples, {1.0, 1.0});
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0].state == 1);
    CHECK(r.events[1].state == 2);
    CHECK(r.events[1].t == samples[19].t);

    stream::StreamOptions one;
    one.debounce = 1;
    CHECK(stream::classify_stream(model, samples, {1.0, 1.0}, one).events.size() == 4);
  }

  TEST_CASE("exclusion window blocks events") {
    const auto& model = calibrated(0.0);
    synth::TrajectorySpec spec;
    spec.buckling = synth::BucklingSpec{2.9, 3.6, 0.3};
    stream::StreamOptions opts;
    opts.exclusion = synth::buckling_window(spec);
    const auto r = pipeline::classify_trial(model, synth::generate_trial(spec), opts);
    for (const auto& e : r.stream.events) CHECK_FALSE(opts.exclusion->contains(e.t));
    CHECK(r.report.visited == kAllStates);
    bool any = false;
    for (const auto& s : r.stream.samples) any = any || s.excluded;
    CHECK(any);
  }

  TEST_CASE("incremental and batch classification agree") {
    const auto& model = calibrated(0.01);
    synth::TrajectorySpec spec;
    spec.noise_sigma = 0.01;
    spec.seed = 5;
    const auto trial = synth::generate_trial(spec);

    stream::StreamClassifier inc(model);
    std::vector<stream::ClassificationEvent> live;
    for (const auto& f : trial.frames) {
      for (const auto& e : inc.push(f)) live.push_back(e);
    }
    for (const auto& e : inc.finish()) live.push_back(e);

    const auto paired = stream::pair_channels(trial.frames);
    CHECK(paired.dropped == 0);
    const auto& ref = inc.result().reference;
    const auto batch = stream::classify_stream(model, paired.samples, ref);
    REQUIRE(batch.events.size() == live.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
      CHECK(live[i].t == batch.events[i].t);
      CHECK(live[i].state == batch.events[i].state);
    }
    CHECK(inc.result().samples.size() == batch.samples.size());
  }

  TEST_CASE("channel pairing") {
    std::vector<signal::RawFrame> frames;
    for (int i = 0; i < 10; ++i) {
      frames.push_back({i * 0.01, 1, 100 + i, 10});
      if (i != 4) frames.push_back({i * 0.01 + 0.004, 2, 200 + i, 10});
    }
    const auto p = stream::pair_channels(frames);
    CHECK(p.samples.size() == 9);
    CHECK(p.dropped == 1);
    CHECK(p.samples[0].t == 0.004);
    CHECK(p.samples[0].s1 == 90.0);
    CHECK(p.samples[0].s2 == 190.0);

    std::vector<signal::RawFrame> lone{{0.0, 1, 5, 1}};
    CHECK(kind_of([&] { stream::pair_channels(lone); }) == ErrorKind::UnpairedChannels);
  }

  TEST_CASE("classifier input errors") {
    const auto& model = calibrated(0.0);
    stream::StreamClassifier empty(model);
    CHECK(kind_of([&] { empty.finish(); }) == ErrorKind::InvalidInput);

    stream::StreamClassifier brief(model);
    brief.push({0.0, 1, 500, 10});
    brief.push({0.005, 2, 500, 10});
    CHECK(kind_of([&] { brief.finish(); }) == ErrorKind::SeriesTooShort);

    stream::StreamClassifier bad(model);
    CHECK(kind_of([&] { bad.push({0.0, 3, 500, 10}); }) == ErrorKind::InvalidInput);

    std::vector<stream::PairedSample> s{{0.0, 1.0, 1.0}};
    CHECK(kind_of([&] { stream::classify_stream(model, s, {0.0, 1.0}); }) == ErrorKind::NearZeroReference);
    std::vector<stream::PairedSample> backwards{{1.0, 1.0, 1.0}, {0.5, 1.0, 1.0}};
    CHECK(kind_of([&] { stream::classify_stream(model, backwards, {1.0, 1.0}); }) == ErrorKind::InvalidInput);
  }

  TEST_CASE("manifold distances") {
    const auto& model = calibrated(0.01);
    const auto& pts = model.training.x;
    std::vector<signal::FeaturePair> traj;
    for (const auto& r : pts) traj.push_back({r[0], r[1]});
    const auto exact = stream::manifold_report(traj, {}, pts, model.standardizer);
    CHECK(exact.max_distance == 0.0);
    CHECK(exact.mean_distance == 0.0);

    const svm::FeatureMatrix single{pts[0]};
    const auto z = model.standardizer.transform(pts[0]);
    const double delta = 0.037;
    const auto back = model.standardizer.inverse_transform(std::vector<double>{z[0] + delta * 0.6, z[1] - delta * 0.8});
    const std::vector<signal::FeaturePair> off{{back[0], back[1]}};
    const auto r = stream::manifold_report(off, {}, single, model.standardizer);
    CHECK(std::abs(r.max_distance - delta) <= 1e-9);

    CHECK(kind_of([&] { stream::manifold_report(off, {}, {}, model.standardizer); }) == ErrorKind::InvalidInput);
  }

  TEST_CASE("visited sequence keeps first occurrences") {
    std::vector<stream::ClassificationEvent> ev;
    for (int s : {1, 2, 3, 2, 3, 4, 4, 8}) ev.push_back({0.0, s, {}, 0, 0.0});
    CHECK(stream::visited_sequence(ev) == std::vector<int>{1, 2, 3, 4, 8});
  }

  TEST_CASE("noisy trials stay close to the calibration manifold") {
    const auto& model = calibrated(0.01);
    const double sigma = 0.02;
    const double bound = 3.0 * sigma * std::sqrt(2.0);
    double worst = 0.0;
    for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
      synth::TrajectorySpec spec;
      spec.noise_sigma = sigma;
      spec.seed = seed;
      const auto r = pipeline::classify_trial(model, synth::generate_trial(spec));
      worst = std::max(worst, r.report.mean_distance);
    }
    CHECK(worst < bound);
  }
}
