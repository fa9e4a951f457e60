#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ribbon/signal.hpp"
#include "ribbon/svm.hpp"

namespace ribbon::stream {

using signal::FeaturePair;

/// Ambient-corrected readings of both channels, time-paired.
struct PairedSample {
  double t = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

struct ClassificationEvent {
  double t = 0.0;
  int state = 0;
  FeaturePair features{};
  int votes = 0;
  double vote_margin = 0.0;
};

struct ClassifiedSample {
  double t = 0.0;
  FeaturePair features{};
  int state = 0;
  /// Inside the exclusion window: classified but never emitted.
  bool excluded = false;
};

struct StreamOptions {
  /// A new state is reported once it has been predicted this many samples in
  /// a row. The first sample always reports.
  int debounce = 3;
  /// Events are not emitted inside this window; samples are still logged.
  std::optional<signal::Interval> exclusion;
  /// Per-channel first-state reference. When unset the mean of the first
  /// reference_window_s of the stream is used.
  std::optional<FeaturePair> reference;
  double reference_window_s = signal::kBaselineSeconds;
  double normalization_floor = 1e-3;
  /// Maximum |dt| between paired channel readings. When unset: half the
  /// median per-channel inter-sample interval of the warm-up frames.
  std::optional<double> pairing_window;
};

struct StreamResult {
  std::vector<ClassificationEvent> events;
  std::vector<ClassifiedSample> samples;
  std::size_t dropped = 0;
  FeaturePair reference{};
};

/// Classifies already-paired samples against a fixed reference.
/// Throws NearZeroReference when a reference channel is below the floor.
StreamResult classify_stream(const svm::MulticlassSvm& model, std::span<const PairedSample> samples,
                             const FeaturePair& reference, const StreamOptions& options = {});

struct PairingResult {
  std::vector<PairedSample> samples;
  std::size_t dropped = 0;
  double window = 0.0;
};

/// Pairs alternating channel readings whose timestamps differ by at most the
/// pairing window; the later timestamp labels the pair.
PairingResult pair_channels(std::span<const signal::RawFrame> frames,
                            std::optional<double> window = std::nullopt);

/// Incremental classifier over raw frames for files and live pipes. Frames
/// are buffered until the reference window is covered, then replayed.
class StreamClassifier {
 public:
  StreamClassifier(const svm::MulticlassSvm& model, StreamOptions options = {});

  /// Returns events confirmed by this frame (possibly several while the
  /// warm-up buffer is replayed).
  std::vector<ClassificationEvent> push(const signal::RawFrame& frame);

  /// Flushes a pending warm-up. Throws SeriesTooShort when no reference
  /// could be formed and UnpairedChannels when no pair was ever formed.
  std::vector<ClassificationEvent> finish();

  const StreamResult& result() const noexcept { return result_; }

 private:
  void start();
  std::optional<ClassificationEvent> feed(const signal::RawFrame& frame);
  std::optional<ClassificationEvent> step(const PairedSample& sample);

  const svm::MulticlassSvm& model_;
  StreamOptions options_;
  StreamResult result_;
  std::vector<signal::RawFrame> warmup_;
  bool started_ = false;
  double window_ = 0.0;
  double last_t_ = 0.0;
  std::size_t frames_ = 0;

  struct Pending {
    double t;
    double v;
  };
  std::optional<Pending> pending_[2];

  int last_emitted_ = 0;
  int run_state_ = 0;
  int run_length_ = 0;
};

struct ManifoldReport {
  std::vector<double> distances;
  double max_distance = 0.0;
  double mean_distance = 0.0;
  std::vector<int> visited;
};

/// States in order of first occurrence.
std::vector<int> visited_sequence(std::span<const ClassificationEvent> events);

/// Distance of every trajectory point to its nearest reference point, in
/// standardized feature units.
ManifoldReport manifold_report(std::span<const FeaturePair> trajectory,
                               std::span<const ClassificationEvent> events,
                               const svm::FeatureMatrix& reference_points,
                               const svm::FeatureStandardizer& standardizer);

/// Reference points for a model: its stored training trajectories, or its
/// training rows when none were stored.
const svm::FeatureMatrix& manifold_points(const svm::MulticlassSvm& model);

}  // namespace ribbon::stream
