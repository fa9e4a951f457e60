#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ribbon::signal {

/// One receiver reading with its emitter on, paired with the nearest
/// emitter-off (ambient) reading. Channels are 1 and 2.
struct RawFrame {
  double t = 0.0;
  int channel = 1;
  std::int64_t active = 0;
  std::int64_t ambient = 0;

  friend bool operator==(const RawFrame&, const RawFrame&) = default;
};

struct TrialMeta {
  double load_g = 0.0;
  double voltage_kV = 0.0;
  std::string trial_id;

  friend bool operator==(const TrialMeta&, const TrialMeta&) = default;
};

struct TrialRecording {
  TrialMeta meta;
  std::vector<RawFrame> frames;

  friend bool operator==(const TrialRecording&, const TrialRecording&) = default;
};

/// Non-decreasing time, finite non-negative values, both channels present.
void validate(const TrialRecording& trial);

struct CorrectedValue {
  double value = 0.0;
  bool clamped = false;
};

/// max(active - ambient, 0); `clamped` marks readings where ambient exceeded
/// the emitter-on value.
CorrectedValue ambient_correct(const RawFrame& frame);

struct Series {
  std::vector<double> t;
  std::vector<double> v;

  std::size_t size() const noexcept { return t.size(); }
  bool empty() const noexcept { return t.empty(); }
};

/// Linear interpolation, clamped to the end values outside the sample span.
double interpolate(const Series& s, double t);

using FeaturePair = std::array<double, 2>;

struct TwoChannel {
  std::array<Series, 2> ch;
  std::size_t clamped = 0;
};

/// Splits a recording by channel and applies ambient correction.
TwoChannel correct_trial(const TrialRecording& trial);

inline constexpr double kBaselineSeconds = 0.5;

/// Mean over samples with t < t_first + window. Throws SeriesTooShort when the
/// series does not span the window.
double baseline_mean(const Series& series, double window_s = kBaselineSeconds);

/// Subtracts the baseline mean from every sample.
Series remove_offset(const Series& series, double window_s = kBaselineSeconds);

struct ProcessedTrial {
  TrialMeta meta;
  TwoChannel signals;
};

struct TrialAverage {
  std::vector<double> t;
  std::array<std::vector<double>, 2> mean;
  std::array<std::vector<double>, 2> stddev;

  Series channel_mean(int ch) const;
};

/// Resamples every trial onto a uniform grid at the median inter-sample
/// interval (over the span all trials cover) and returns the pointwise mean
/// and sample standard deviation per channel.
///
/// Throws InsufficientTrials below two trials and ConditionMismatch when load
/// or voltage differ.
TrialAverage average_trials(std::span<const ProcessedTrial> trials);
TrialAverage average_trials(std::span<const TrialRecording> recordings);

/// Closed time interval excluded from state selection (sensor buckling).
struct Interval {
  double begin = 0.0;
  double end = 0.0;

  bool contains(double t) const noexcept { return t > begin && t < end; }
};

struct StateTiming {
  int n_states = 8;
  /// Time of state 1.
  double start_time = 0.0;
  /// End of the equally spaced span holding states 1..n-1. Defaults to
  /// start + (n-2)/(n-1) * (end - start), i.e. all states equally spaced.
  std::optional<double> pre_contraction_end;
  /// Full contraction; the last state sits here.
  double end_time = 0.0;
  std::optional<Interval> exclusion;
};

struct StateAnchor {
  int state = 0;
  double t = 0.0;
  FeaturePair features{};
};

/// State times for `timing`. States 1..n-1 are equally spaced over
/// [start, pre_contraction_end]; state n is pinned at end_time. A time inside
/// the exclusion moves to the nearer boundary (ties go earlier).
///
/// Throws ExclusionTooWide when the exclusion covers more than half of
/// [0, end_time] or swallows two state times.
std::vector<double> state_times(const StateTiming& timing);

/// Samples the two mean channels at the state times.
std::vector<StateAnchor> extract_states(const TrialAverage& mean, const StateTiming& timing);
std::vector<StateAnchor> extract_states(const std::array<Series, 2>& channels,
                                        const StateTiming& timing);

/// Divides each channel by its state-1 value. Throws NearZeroReference when a
/// state-1 magnitude is below `floor`.
std::vector<FeaturePair> normalize_to_first_state(std::span<const FeaturePair> states,
                                                  double floor);

struct EndDetection {
  double quiet_fraction = 0.01;
  double quiet_seconds = 1.0;
  double smoothing_seconds = 0.1;
};

/// Earliest time after the fastest motion from which both channels'
/// derivative magnitudes stay below quiet_fraction of their peak for
/// quiet_seconds. Empty when the series never settles.
std::optional<double> detect_end_time(const TrialAverage& mean, const EndDetection& options = {});

struct StateSample {
  FeaturePair features{};
  int state = 0;
  std::string trial_id;
};

struct StateDataset {
  std::vector<StateSample> samples;
};

struct CalibrationOptions {
  StateTiming timing;
  /// When unset, end_time in `timing` is replaced by detect_end_time.
  bool detect_end = false;
  double baseline_seconds = kBaselineSeconds;
  double adc_full_scale = 1000.0;
  /// Fraction of adc_full_scale below which a state-1 value is rejected.
  double reference_floor_fraction = 1e-6;
};

struct Calibration {
  StateDataset dataset;
  /// Mean-series anchors (raw corrected units).
  std::vector<StateAnchor> anchors;
  TrialAverage average;
  /// Offset-removed mean and band, as drawn for a calibration plot.
  TrialAverage deviation;
  /// First-state-normalized trajectories of every calibration trial, outside
  /// the exclusion window.
  std::vector<FeaturePair> manifold;
  double end_time = 0.0;
  std::size_t clamped = 0;
  std::vector<std::string> warnings;
};

/// Ambient correction, per-trial offset removal, trial averaging, state
/// extraction with buckling exclusion and first-state normalization.
/// A single trial is accepted with a warning.
Calibration calibrate(std::span<const TrialRecording> trials, const CalibrationOptions& options);

}  // namespace ribbon::signal
