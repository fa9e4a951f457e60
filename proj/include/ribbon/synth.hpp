#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ribbon/geometry.hpp"
#include "ribbon/signal.hpp"

namespace ribbon::synth {

using signal::FeaturePair;

/// Portable normal deviates: std::mt19937_64, uniforms from the top 53 bits
/// mapped to (0, 1], Box-Muller pairs (cosine branch first). Unlike
/// std::normal_distribution the sequence is identical across standard
/// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// Raised-cosine bump added to both channels. begin/end are motion time at
/// speed 1 (seconds after motion onset) and stretch with speed_factor.
struct BucklingSpec {
  double begin = 0.0;
  double end = 0.0;
  double amplitude = 0.0;
};

/// Synthetic stand-in for a curl through eight states in normalized-feature
/// space. These defaults are invented test values, not measurements.
inline constexpr std::array<FeaturePair, 8> kDefaultAnchors{{
    {1.00, 1.00},
    {0.96, 0.84},
    {0.87, 0.70},
    {0.75, 0.60},
    {0.61, 0.53},
    {0.47, 0.47},
    {0.35, 0.41},
    {0.25, 0.35},
}};

inline constexpr std::array<double, 7> kDefaultDurations{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.5};

struct TrajectorySpec {
  std::array<FeaturePair, 8> anchors = kDefaultAnchors;
  std::array<double, 7> segment_durations = kDefaultDurations;
  /// > 1 runs faster (higher drive voltage), < 1 slower.
  double speed_factor = 1.0;
  double noise_sigma = 0.0;
  double sample_rate = 100.0;
  std::uint64_t seed = 0;
  std::optional<BucklingSpec> buckling;
  /// Plateau at state 1 before motion starts and at state 8 after it ends.
  double rest_s = 0.5;
  double hold_s = 1.5;
  /// Delay of each channel-2 reading after its channel-1 reading, as a
  /// fraction of the sample period.
  double channel_stagger = 0.5;
  std::int64_t ambient = 10;
  double full_scale = 1000.0;
  signal::TrialMeta meta{12.3, 4.0, "synth"};
};

void validate(const TrajectorySpec& spec);

double motion_duration(const TrajectorySpec& spec);
double trial_duration(const TrajectorySpec& spec);
/// Times at which the noise-free trajectory passes each anchor.
std::array<double, 8> anchor_times(const TrajectorySpec& spec);

/// State timing that reproduces the generator's anchors (states 1..7 equally
/// spaced only when the first six durations are equal), with the buckling
/// window as exclusion.
signal::StateTiming state_timing(const TrajectorySpec& spec);

/// Buckling window in trial time, if any.
std::optional<signal::Interval> buckling_window(const TrajectorySpec& spec);

/// Noise-free features at trial time t, including any buckling bump.
FeaturePair ideal_features(const TrajectorySpec& spec, double t);

/// Alternating channel-1/channel-2 frames with constant ambient and
/// active = ambient + round(feature * full_scale). Deterministic per seed.
signal::TrialRecording generate_trial(const TrajectorySpec& spec);

/// n trials with seeds seed_base .. seed_base + n - 1 and ids <id>-1 .. <id>-n.
std::vector<signal::TrialRecording> generate_condition(const TrajectorySpec& spec, int n_trials,
                                                       std::uint64_t seed_base);

TrajectorySpec spec_from_json(const std::string& text);
std::string spec_to_json(const TrajectorySpec& spec);

/// Planar curve of the given length whose signed curvature (library sign
/// convention) follows `kappa_signed(s)`, starting at the origin heading +x.
geometry::RibbonCurve curve_from_curvature(const std::function<double(double)>& kappa_signed,
                                           double length, std::size_t n, int state_label,
                                           std::size_t anchor_index);

}  // namespace ribbon::synth
