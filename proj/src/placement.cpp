#include "ribbon/placement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "numfmt.hpp"
#include "ribbon/dsp.hpp"
#include "ribbon/error.hpp"

namespace ribbon::placement {

using geometry::CurvatureProfile;
using geometry::RibbonCurve;

std::string_view to_string(Side side) noexcept { return side == Side::top ? "top" : "bottom"; }

StateCurveSet build_state_curve_set(std::span<const RibbonCurve> curves,
                                    const CurveSetOptions& options) {
  if (curves.size() != kStateCount) {
    fail(ErrorKind::InvalidInput,
         "expected 8 state curves, got " + std::to_string(curves.size()));
  }
  if (!(options.mm_per_unit > 0.0)) fail(ErrorKind::InvalidInput, "mm_per_unit must be > 0");

  std::vector<const RibbonCurve*> ordered(kStateCount, nullptr);
  for (const auto& c : curves) {
    if (c.state_label < 1 || c.state_label > kStateCount) {
      fail(ErrorKind::InvalidInput, "state label " + std::to_string(c.state_label) + " outside 1..8");
    }
    auto& slot = ordered[static_cast<std::size_t>(c.state_label - 1)];
    if (slot) fail(ErrorKind::InvalidInput, "duplicate state " + std::to_string(c.state_label));
    slot = &c;
  }

  const auto coeffs = dsp::design_butterworth2({2, options.cutoff_ratio});

  StateCurveSet set;
  double total_length = 0.0;
  double anchor_fraction = 0.0;
  for (const RibbonCurve* c : ordered) {
    auto resampled = geometry::resample_arclength(*c, options.stations);
    auto profile = geometry::compute_curvature(resampled);

    auto filtered = dsp::apply_zero_phase(coeffs, profile.kappa_signed);
    profile.kappa_signed = std::move(filtered);
    for (std::size_t i = 0; i < profile.size(); ++i) {
      profile.kappa[i] = std::abs(profile.kappa_signed[i]);
    }
    try {
      profile = geometry::normalize_profile(profile);
    } catch (const Error& e) {
      throw Error(e.kind(), "state " + std::to_string(c->state_label) + ": " + e.message());
    }

    total_length += profile.arclength.back() * options.mm_per_unit;
    anchor_fraction += static_cast<double>(resampled.anchor_index) /
                       static_cast<double>(options.stations - 1);
    set.curves.push_back(std::move(resampled));
    set.profiles.push_back(std::move(profile));
  }

  const double length = total_length / kStateCount;
  std::vector<double> grid(options.stations);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    grid[j] = length * static_cast<double>(j) / static_cast<double>(options.stations - 1);
  }
  for (auto& p : set.profiles) {
    p.arclength = grid;
    p.unit = geometry::LengthUnit::mm;
  }
  set.anchor_mm = length * anchor_fraction / kStateCount;
  return set;
}

void validate(const StateCurveSet& set) {
  if (set.curves.size() != kStateCount || set.profiles.size() != kStateCount) {
    fail(ErrorKind::InvalidInput, "state curve set must hold exactly 8 states");
  }
  for (int k = 0; k < kStateCount; ++k) {
    if (set.curves[static_cast<std::size_t>(k)].state_label != k + 1) {
      fail(ErrorKind::InvalidInput, "state curve set must be ordered by state 1..8");
    }
  }
  const auto& ref = set.profiles.front().arclength;
  if (ref.size() < 2) fail(ErrorKind::InvalidInput, "state grid too short");
  for (const auto& p : set.profiles) {
    if (p.arclength.size() != ref.size() || p.kappa.size() != ref.size() ||
        p.kappa_signed.size() != ref.size()) {
      fail(ErrorKind::InvalidInput, "profiles do not share one station grid");
    }
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (std::abs(p.arclength[j] - ref[j]) > 1e-9) {
        fail(ErrorKind::InvalidInput, "profiles do not share one station grid");
      }
    }
  }
}

std::vector<std::size_t> stations_in(const StateCurveSet& set, double center_mm,
                                     double half_width_mm, RibbonHalf half) {
  const auto grid = set.grid();
  const double slack = 1e-9 * std::max(1.0, half_width_mm);
  const double lo = center_mm - half_width_mm - slack;
  const double hi = center_mm + half_width_mm + slack;
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double d = half == RibbonHalf::trailing ? grid[j] - set.anchor_mm : set.anchor_mm - grid[j];
    if (d >= lo && d <= hi) idx.push_back(j);
  }
  return idx;
}

namespace {

struct WindowStats {
  double mean_norm[kStateCount];
  double mean_signed[kStateCount];
};

WindowStats window_stats(const StateCurveSet& set, std::span<const std::size_t> idx) {
  WindowStats w{};
  const double inv = 1.0 / static_cast<double>(idx.size());
  for (int k = 0; k < kStateCount; ++k) {
    const auto& p = set.profiles[static_cast<std::size_t>(k)];
    double sn = 0.0;
    double ss = 0.0;
    for (std::size_t j : idx) {
      sn += p.kappa[j];
      ss += p.kappa_signed[j];
    }
    w.mean_norm[k] = sn * inv;
    w.mean_signed[k] = ss * inv;
  }
  return w;
}

double half_extent(const StateCurveSet& set, RibbonHalf half) {
  return half == RibbonHalf::trailing ? set.length_mm() - set.anchor_mm : set.anchor_mm;
}

int sign_of(double v, double deadband) { return (v > deadband) - (v < -deadband); }

}  // namespace

std::vector<SensorRegion> score_regions(const StateCurveSet& set, double window_mm,
                                        double stride_mm, const ScoringOptions& options) {
  validate(set);
  if (!(window_mm > 0.0)) fail(ErrorKind::InvalidInput, "window_mm must be > 0");
  if (!(stride_mm > 0.0)) fail(ErrorKind::InvalidInput, "stride_mm must be > 0");

  const double extent = half_extent(set, options.half);
  const double hw = window_mm / 2.0;

  std::vector<SensorRegion> candidates;
  for (long k = 1;; ++k) {
    const double lo = static_cast<double>(k) * stride_mm;
    if (!(lo + window_mm < extent)) break;
    const double center = lo + hw;
    const auto idx = stations_in(set, center, hw, options.half);
    if (idx.empty()) continue;

    const WindowStats w = window_stats(set, idx);
    const double mean = std::accumulate(std::begin(w.mean_norm), std::end(w.mean_norm), 0.0) /
                        kStateCount;
    double var = 0.0;
    for (double m : w.mean_norm) var += (m - mean) * (m - mean);
    var /= kStateCount;

    int flips = 0;
    for (int s = 0; s + 1 < kStateCount; ++s) {
      const double db = options.sign_deadband;
      if (sign_of(w.mean_signed[s], db) * sign_of(w.mean_signed[s + 1], db) < 0) ++flips;
    }
    const double score = var + options.flip_weight * flips / (kStateCount - 1.0);
    candidates.push_back({center, hw, std::nullopt, score});
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.center_mm < b.center_mm;
  });

  if (candidates.empty() || candidates.front().score < options.flat_score_floor) {
    fail(ErrorKind::NoVariation, "no window reaches the flat-score floor");
  }

  std::vector<SensorRegion> kept;
  for (const auto& c : candidates) {
    if (c.score < options.flat_score_floor) break;
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](const SensorRegion& r) {
      return std::abs(r.center_mm - c.center_mm) < window_mm;
    });
    if (clear) kept.push_back(c);
  }
  return kept;
}

SurfaceChoice select_surface(const StateCurveSet& set, const SensorRegion& region,
                             RibbonHalf half, double ambiguity_floor) {
  validate(set);
  const double extent = half_extent(set, half);
  if (region.center_mm - region.half_width_mm < 0.0 ||
      region.center_mm + region.half_width_mm > extent) {
    fail(ErrorKind::InvalidInput, "region lies outside the station grid");
  }
  const auto idx = stations_in(set, region.center_mm, region.half_width_mm, half);
  if (idx.empty()) fail(ErrorKind::InvalidInput, "region contains no stations");

  const WindowStats w = window_stats(set, idx);
  const double mean =
      std::accumulate(std::begin(w.mean_signed), std::end(w.mean_signed), 0.0) / kStateCount;
  if (std::abs(mean) < ambiguity_floor) {
    fail(ErrorKind::AmbiguousSide,
         "mean signed curvature " + detail::format_double(mean) + " below ambiguity floor");
  }
  return {mean > 0.0 ? Side::bottom : Side::top, mean};
}

void emit_placement_report(const StateCurveSet& set, std::span<const SensorRegion> regions,
                           std::ostream& out) {
  validate(set);
  using detail::format_double;
  out << "station_mm,state,kappa_norm,kappa_signed_norm\n";
  const auto grid = set.grid();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (int k = 0; k < kStateCount; ++k) {
      const auto& p = set.profiles[static_cast<std::size_t>(k)];
      out << format_double(grid[j]) << ',' << (k + 1) << ',' << format_double(p.kappa[j]) << ','
          << format_double(p.kappa_signed[j]) << '\n';
    }
  }
  if (regions.empty()) return;
  out << "# regions\n";
  out << "center_mm,half_width_mm,side,score\n";
  for (const auto& r : regions) {
    out << format_double(r.center_mm) << ',' << format_double(r.half_width_mm) << ','
        << (r.side ? to_string(*r.side) : std::string_view("ambiguous")) << ','
        << format_double(r.score) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double field(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  if (!detail::parse_double(text, v)) {
    fail(ErrorKind::ParseError, "bad number '" + text + "' at line " + std::to_string(line_no));
  }
  return v;
}

}  // namespace

PlacementReport parse_placement_report(std::istream& in) {
  PlacementReport report;
  std::string line;
  std::size_t line_no = 0;
  bool in_regions = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "# regions") {
      in_regions = true;
      continue;
    }
    if (line.rfind("station_mm", 0) == 0 || line.rfind("center_mm", 0) == 0) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 4) {
      fail(ErrorKind::ParseError, "expected 4 fields at line " + std::to_string(line_no));
    }
    if (!in_regions) {
      CurvatureRow row;
      row.station_mm = field(cells[0], line_no);
      row.state = static_cast<int>(field(cells[1], line_no));
      row.kappa_norm = field(cells[2], line_no);
      row.kappa_signed_norm = field(cells[3], line_no);
      report.rows.push_back(row);
    } else {
      SensorRegion r;
      r.center_mm = field(cells[0], line_no);
      r.half_width_mm = field(cells[1], line_no);
      if (cells[2] == "top") {
        r.side = Side::top;
      } else if (cells[2] == "bottom") {
        r.side = Side::bottom;
      } else if (cells[2] != "ambiguous") {
        fail(ErrorKind::ParseError, "unknown side '" + cells[2] + "'");
      }
      r.score = field(cells[3], line_no);
      report.regions.push_back(r);
    }
  }
  return report;
}

}  // namespace ribbon::placement
