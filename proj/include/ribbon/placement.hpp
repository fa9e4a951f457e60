#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "ribbon/geometry.hpp"

namespace ribbon::placement {

inline constexpr int kStateCount = 8;

/// Eight loading states resampled onto one shared station grid. Profiles are
/// filtered and normalized; their arclength is the common grid in mm.
struct StateCurveSet {
  std::vector<geometry::RibbonCurve> curves;
  std::vector<geometry::CurvatureProfile> profiles;
  /// Arc position of the anchoring point on the common grid (mm).
  double anchor_mm = 0.0;

  std::span<const double> grid() const { return profiles.front().arclength; }
  double length_mm() const { return profiles.front().arclength.back(); }
};

struct CurveSetOptions {
  std::size_t stations = geometry::kDefaultStations;
  double cutoff_ratio = 0.02;
  /// Converts curve units to mm (1 for curves already in mm).
  double mm_per_unit = 1.0;
};

/// Resample, compute curvature, zero-phase filter the signed curvature and
/// normalize each of the eight states. Curves may arrive in any order.
StateCurveSet build_state_curve_set(std::span<const geometry::RibbonCurve> curves,
                                    const CurveSetOptions& options = {});

/// Throws InvalidInput unless there are exactly 8 states labelled 1..8 with
/// profiles on one grid.
void validate(const StateCurveSet& set);

enum class Side { top, bottom };

std::string_view to_string(Side side) noexcept;

/// Which half of the ribbon, relative to the anchor, is scanned. `trailing`
/// runs toward the last digitized point.
enum class RibbonHalf { trailing, leading };

struct SensorRegion {
  /// Distance of the window centre from the anchor along the ribbon (mm).
  double center_mm = 0.0;
  double half_width_mm = 0.0;
  /// Unset until select_surface resolves it; unresolvable regions stay unset.
  std::optional<Side> side;
  double score = 0.0;

  friend bool operator==(const SensorRegion&, const SensorRegion&) = default;
};

struct ScoringOptions {
  double flip_weight = 0.25;
  double flat_score_floor = 1e-6;
  /// Window-mean signed curvature within this band counts as unsigned, so
  /// rounding noise on straight stretches does not register as a flip.
  double sign_deadband = 1e-6;
  RibbonHalf half = RibbonHalf::trailing;
};

inline constexpr double kDefaultWindowMm = 8.8;
inline constexpr double kDefaultStrideMm = 0.5;

/// Slides a window over one half of the ribbon. Each window scores
///   Var_states(window-mean kappa_norm) + w * flips / 7
/// where flips counts adjacent states whose window-mean signed curvature
/// changes sign. Windows are ranked by score (ties: smaller centre) and
/// suppressed within one window width of a better window.
///
/// Throws NoVariation when no window reaches the flat-score floor.
std::vector<SensorRegion> score_regions(const StateCurveSet& set, double window_mm,
                                        double stride_mm, const ScoringOptions& options = {});

struct SurfaceChoice {
  Side side = Side::top;
  /// State-averaged normalized signed curvature over the region.
  double mean_signed = 0.0;
};

inline constexpr double kAmbiguityFloor = 0.05;

/// Positive mean signed curvature bends toward the opposing ribbon and
/// stretches the lower surface, so the wells go on the bottom.
SurfaceChoice select_surface(const StateCurveSet& set, const SensorRegion& region,
                             RibbonHalf half = RibbonHalf::trailing,
                             double ambiguity_floor = kAmbiguityFloor);

/// Station indices whose anchor distance falls within the region on `half`.
std::vector<std::size_t> stations_in(const StateCurveSet& set, double center_mm,
                                     double half_width_mm, RibbonHalf half);

struct CurvatureRow {
  double station_mm = 0.0;
  int state = 0;
  double kappa_norm = 0.0;
  double kappa_signed_norm = 0.0;
};

struct PlacementReport {
  std::vector<CurvatureRow> rows;
  std::vector<SensorRegion> regions;
};

/// CSV: `station_mm,state,kappa_norm,kappa_signed_norm` rows (station outer,
/// state inner), then, when regions are present, a `# regions` line and a
/// `center_mm,half_width_mm,side,score` block. Sides print as top, bottom or
/// ambiguous.
void emit_placement_report(const StateCurveSet& set, std::span<const SensorRegion> regions,
                           std::ostream& out);

PlacementReport parse_placement_report(std::istream& in);

}  // namespace ribbon::placement
