#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ribbon::geometry {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

enum class LengthUnit { pixel, mm };

std::string_view to_string(LengthUnit unit) noexcept;
LengthUnit parse_length_unit(std::string_view text);

/// Ordered planar polyline digitized from one loading-state frame of the
/// upper ribbon. Points run tip to tip.
struct RibbonCurve {
  std::vector<Point2> points;
  int state_label = 1;
  std::size_t anchor_index = 0;
  LengthUnit unit = LengthUnit::mm;
};

/// Throws Error{InvalidInput} unless the curve has >= 5 finite points, no two
/// consecutive points coincide, and anchor_index is in range.
void validate(const RibbonCurve& curve);

/// Cumulative polyline length at every point, starting at 0.
std::vector<double> cumulative_arclength(std::span<const Point2> points);

enum class EndpointPolicy {
  /// Second-order one-sided stencils at the first and last point.
  one_sided,
  /// Copy the curvature of the nearest interior point.
  replicate,
};

struct DerivativeScheme {
  EndpointPolicy endpoints = EndpointPolicy::one_sided;
};

/// kappa_signed is positive where the curve, traversed in point order from
/// smaller to larger x, bends toward decreasing y in frame coordinates.
/// Reversing the point order flips the sign.
inline constexpr std::string_view kSignConvention = "positive=toward_decreasing_y(left_to_right)";

struct CurvatureProfile {
  std::vector<double> arclength;
  std::vector<double> kappa;
  std::vector<double> kappa_signed;
  LengthUnit unit = LengthUnit::mm;

  std::size_t size() const noexcept { return kappa.size(); }
};

/// Discrete curvature |x'y'' - y'x''| / (x'^2 + y'^2)^(3/2) on the point
/// index grid, central differences in the interior.
///
/// Throws DegenerateTangent when x'^2 + y'^2 < 1e-12 * diag^2 at any point,
/// diag being the bounding-box diagonal of the curve.
CurvatureProfile compute_curvature(const RibbonCurve& curve, DerivativeScheme scheme = {});

inline constexpr double kNormalizationFloor = 1e-12;

/// Divides kappa and kappa_signed by max(kappa). Throws FlatProfile when the
/// maximum does not exceed `floor`.
CurvatureProfile normalize_profile(const CurvatureProfile& profile,
                                   double floor = kNormalizationFloor);

/// Re-samples the polyline at `n` stations equally spaced in arc length.
/// Endpoints are preserved exactly; anchor_index is mapped to the nearest
/// station.
RibbonCurve resample_arclength(const RibbonCurve& curve, std::size_t n);

inline constexpr std::size_t kDefaultStations = 512;

/// Reads `x,y` rows (optional header line, optional blank lines). The anchor
/// defaults to the point nearest half arc length when not given.
RibbonCurve read_curve_csv(std::istream& in, int state_label, LengthUnit unit = LengthUnit::mm,
                           std::optional<std::size_t> anchor_index = std::nullopt);
RibbonCurve read_curve_csv_file(const std::string& path, int state_label,
                                LengthUnit unit = LengthUnit::mm,
                                std::optional<std::size_t> anchor_index = std::nullopt);

/// Extracts k from a file name ending in `_s<k>.csv`, if present.
std::optional<int> state_from_filename(std::string_view path);

}  // namespace ribbon::geometry
