#include "ribbon/stream.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "numfmt.hpp"
#include "ribbon/error.hpp"

namespace ribbon::stream {

namespace {

void check_reference(const FeaturePair& ref, double floor) {
  for (std::size_t c = 0; c < 2; ++c) {
    if (!(std::abs(ref[c]) >= floor)) {
      fail(ErrorKind::NearZeroReference, "reference of channel " + std::to_string(c + 1) + " (" +
                                             detail::format_double(ref[c]) + ") below floor");
    }
  }
}

double median(std::vector<double> v) {
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

double default_window(std::span<const signal::RawFrame> frames) {
  std::vector<double> diffs;
  double last[2] = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  for (const auto& f : frames) {
    const auto c = static_cast<std::size_t>(f.channel - 1);
    if (!std::isnan(last[c])) diffs.push_back(f.t - last[c]);
    last[c] = f.t;
  }
  if (diffs.empty()) {
    fail(ErrorKind::UnpairedChannels, "cannot estimate the channel pairing window");
  }
  const double w = 0.5 * median(std::move(diffs));
  return w * (1.0 + 1e-9);
}

void check_frame(const signal::RawFrame& f) {
  if (f.channel != 1 && f.channel != 2) fail(ErrorKind::InvalidInput, "channel must be 1 or 2");
  if (!std::isfinite(f.t)) fail(ErrorKind::InvalidInput, "non-finite frame time");
}

// Debounced state-change detection shared by the batch and incremental paths.
bool gate(int label, bool first, bool excluded, int debounce, int& last_emitted, int& run_state,
          int& run_length) {
  if (label == run_state) {
    ++run_length;
  } else {
    run_state = label;
    run_length = 1;
  }
  if (first || (run_state != last_emitted && run_length >= debounce && !excluded)) {
    last_emitted = label;
    return true;
  }
  return false;
}

}  // namespace

PairingResult pair_channels(std::span<const signal::RawFrame> frames, std::optional<double> window) {
  PairingResult out;
  out.window = window ? *window : default_window(frames);
  std::optional<std::pair<double, double>> pending[2];
  for (const auto& f : frames) {
    check_frame(f);
    const auto c = static_cast<std::size_t>(f.channel - 1);
    const std::size_t o = 1 - c;
    const double v = signal::ambient_correct(f).value;
    if (pending[o] && std::abs(f.t - pending[o]->first) <= out.window) {
      const double s1 = c == 0 ? v : pending[o]->second;
      const double s2 = c == 1 ? v : pending[o]->second;
      out.samples.push_back({std::max(f.t, pending[o]->first), s1, s2});
      pending[o].reset();
      continue;
    }
    if (pending[o]) {
      ++out.dropped;
      pending[o].reset();
    }
    if (pending[c]) ++out.dropped;
    pending[c] = {f.t, v};
  }
  out.dropped += static_cast<std::size_t>(pending[0].has_value()) + pending[1].has_value();
  return out;
}

StreamResult classify_stream(const svm::MulticlassSvm& model, std::span<const PairedSample> samples,
                             const FeaturePair& reference, const StreamOptions& options) {
  check_reference(reference, options.normalization_floor);
  if (options.debounce < 1) fail(ErrorKind::InvalidInput, "debounce must be >= 1");
  StreamResult result;
  result.reference = reference;
  int last_emitted = 0;
  int run_state = 0;
  int run_length = 0;
  double last_t = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    if (s.t < last_t) fail(ErrorKind::InvalidInput, "samples are not time-ordered");
    last_t = s.t;
    const double x[2] = {s.s1 / reference[0], s.s2 / reference[1]};
    const auto p = svm::predict_detailed(model, x);
    const bool first = result.samples.empty();
    const bool excluded = options.exclusion && options.exclusion->contains(s.t);
    result.samples.push_back({s.t, {x[0], x[1]}, p.label, excluded});
    if (gate(p.label, first, excluded, options.debounce, last_emitted, run_state, run_length)) {
      result.events.push_back({s.t, p.label, {x[0], x[1]}, p.votes, p.vote_margin});
    }
  }
  return result;
}

StreamClassifier::StreamClassifier(const svm::MulticlassSvm& model, StreamOptions options)
    : model_(model), options_(std::move(options)) {
  if (model_.dimension() != 2) fail(ErrorKind::DimensionMismatch, "stream model must have 2 features");
  if (options_.debounce < 1) fail(ErrorKind::InvalidInput, "debounce must be >= 1");
  if (options_.reference) check_reference(*options_.reference, options_.normalization_floor);
}

std::vector<ClassificationEvent> StreamClassifier::push(const signal::RawFrame& frame) {
  check_frame(frame);
  if (frames_ > 0 && frame.t < last_t_) fail(ErrorKind::InvalidInput, "frames are not time-ordered");
  last_t_ = frame.t;
  ++frames_;

  std::vector<ClassificationEvent> events;
  if (!started_) {
    warmup_.push_back(frame);
    const double span = frame.t - warmup_.front().t;
    bool both = false;
    {
      int counts[2] = {0, 0};
      for (const auto& f : warmup_) ++counts[f.channel - 1];
      both = counts[0] >= 2 && counts[1] >= 2;
    }
    const bool ready = both && (options_.reference || span >= options_.reference_window_s);
    if (!ready) return events;
    start();
    auto buffered = std::move(warmup_);
    warmup_.clear();
    for (const auto& f : buffered) {
      if (auto e = feed(f)) events.push_back(*e);
    }
    return events;
  }
  if (auto e = feed(frame)) events.push_back(*e);
  return events;
}

std::vector<ClassificationEvent> StreamClassifier::finish() {
  std::vector<ClassificationEvent> events;
  if (!started_) {
    if (warmup_.empty()) fail(ErrorKind::InvalidInput, "stream contained no frames");
    if (!options_.reference) {
      fail(ErrorKind::SeriesTooShort, "stream ended before the reference window was covered");
    }
    start();
    auto buffered = std::move(warmup_);
    warmup_.clear();
    for (const auto& f : buffered) {
      if (auto e = feed(f)) events.push_back(*e);
    }
  }
  result_.dropped += static_cast<std::size_t>(pending_[0].has_value()) + pending_[1].has_value();
  pending_[0].reset();
  pending_[1].reset();
  if (result_.samples.empty()) fail(ErrorKind::UnpairedChannels, "no channel readings could be paired");
  return events;
}

void StreamClassifier::start() {
  window_ = options_.pairing_window ? *options_.pairing_window : default_window(warmup_);
  if (options_.reference) {
    result_.reference = *options_.reference;
  } else {
    const double stop = warmup_.front().t + options_.reference_window_s;
    double sum[2] = {0.0, 0.0};
    int n[2] = {0, 0};
    for (const auto& f : warmup_) {
      if (f.t >= stop) continue;
      const auto c = static_cast<std::size_t>(f.channel - 1);
      sum[c] += signal::ambient_correct(f).value;
      ++n[c];
    }
    if (n[0] == 0 || n[1] == 0) {
      fail(ErrorKind::SeriesTooShort, "reference window holds no reading for a channel");
    }
    result_.reference = {sum[0] / n[0], sum[1] / n[1]};
    check_reference(result_.reference, options_.normalization_floor);
  }
  started_ = true;
}

std::optional<ClassificationEvent> StreamClassifier::feed(const signal::RawFrame& f) {
  const auto c = static_cast<std::size_t>(f.channel - 1);
  const std::size_t o = 1 - c;
  const double v = signal::ambient_correct(f).value;
  if (pending_[o] && std::abs(f.t - pending_[o]->t) <= window_) {
    PairedSample s{std::max(f.t, pending_[o]->t), c == 0 ? v : pending_[o]->v,
                   c == 1 ? v : pending_[o]->v};
    pending_[o].reset();
    return step(s);
  }
  if (pending_[o]) {
    ++result_.dropped;
    pending_[o].reset();
  }
  if (pending_[c]) ++result_.dropped;
  pending_[c] = Pending{f.t, v};
  return std::nullopt;
}

std::optional<ClassificationEvent> StreamClassifier::step(const PairedSample& s) {
  const auto& ref = result_.reference;
  const double x[2] = {s.s1 / ref[0], s.s2 / ref[1]};
  const auto p = svm::predict_detailed(model_, x);
  const bool first = result_.samples.empty();
  const bool excluded = options_.exclusion && options_.exclusion->contains(s.t);
  result_.samples.push_back({s.t, {x[0], x[1]}, p.label, excluded});
  if (gate(p.label, first, excluded, options_.debounce, last_emitted_, run_state_, run_length_)) {
    ClassificationEvent e{s.t, p.label, {x[0], x[1]}, p.votes, p.vote_margin};
    result_.events.push_back(e);
    return e;
  }
  return std::nullopt;
}

std::vector<int> visited_sequence(std::span<const ClassificationEvent> events) {
  std::vector<int> out;
  std::set<int> seen;
  for (const auto& e : events) {
    if (seen.insert(e.state).second) out.push_back(e.state);
  }
  return out;
}

ManifoldReport manifold_report(std::span<const FeaturePair> trajectory,
                               std::span<const ClassificationEvent> events,
                               const svm::FeatureMatrix& reference_points,
                               const svm::FeatureStandardizer& standardizer) {
  if (reference_points.empty()) fail(ErrorKind::InvalidInput, "manifold reference is empty");
  std::vector<FeaturePair> ref;
  ref.reserve(reference_points.size());
  for (const auto& r : reference_points) {
    const auto z = standardizer.transform(r);
    ref.push_back({z[0], z[1]});
  }
  ManifoldReport rep;
  rep.visited = visited_sequence(events);
  rep.distances.reserve(trajectory.size());
  double sum = 0.0;
  for (const auto& p : trajectory) {
    const auto z = standardizer.transform(std::span<const double>(p.data(), 2));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : ref) {
      const double dx = z[0] - r[0];
      const double dy = z[1] - r[1];
      best = std::min(best, dx * dx + dy * dy);
    }
    const double d = std::sqrt(best);
    rep.distances.push_back(d);
    rep.max_distance = std::max(rep.max_distance, d);
    sum += d;
  }
  if (!rep.distances.empty()) rep.mean_distance = sum / static_cast<double>(rep.distances.size());
  return rep;
}

const svm::FeatureMatrix& manifold_points(const svm::MulticlassSvm& model) {
  return model.manifold.empty() ? model.training.x : model.manifold;
}

}  // namespace ribbon::stream
