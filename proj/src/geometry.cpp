#include "ribbon/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "ribbon/error.hpp"

namespace ribbon::geometry {

std::string_view to_string(LengthUnit unit) noexcept {
  return unit == LengthUnit::pixel ? "pixel" : "mm";
}

LengthUnit parse_length_unit(std::string_view text) {
  if (text == "mm") return LengthUnit::mm;
  if (text == "pixel" || text == "px") return LengthUnit::pixel;
  fail(ErrorKind::InvalidInput, "unknown length unit '" + std::string(text) + "'");
}

namespace {

void validate_polyline(std::span<const Point2> pts, std::size_t min_points) {
  if (pts.size() < min_points) {
    fail(ErrorKind::InvalidInput, "curve needs at least " + std::to_string(min_points) +
                                      " points, got " + std::to_string(pts.size()));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i].x) || !std::isfinite(pts[i].y)) {
      fail(ErrorKind::InvalidInput, "non-finite coordinate at point " + std::to_string(i));
    }
    if (i > 0 && pts[i] == pts[i - 1]) {
      fail(ErrorKind::InvalidInput, "consecutive duplicate points at index " + std::to_string(i));
    }
  }
}

double bbox_diagonal(std::span<const Point2> pts) {
  auto [xmin, xmax] = std::minmax_element(pts.begin(), pts.end(),
                                          [](const Point2& a, const Point2& b) { return a.x < b.x; });
  auto [ymin, ymax] = std::minmax_element(pts.begin(), pts.end(),
                                          [](const Point2& a, const Point2& b) { return a.y < b.y; });
  return std::hypot(xmax->x - xmin->x, ymax->y - ymin->y);
}

struct Derivs {
  double dx, dy, ddx, ddy;
};

Derivs central(std::span<const Point2> p, std::size_t i) {
  const Point2& a = p[i - 1];
  const Point2& b = p[i];
  const Point2& c = p[i + 1];
  return {(c.x - a.x) / 2.0, (c.y - a.y) / 2.0, c.x - 2.0 * b.x + a.x, c.y - 2.0 * b.y + a.y};
}

// Second-order one-sided stencils; `dir` = +1 at the head, -1 at the tail.
Derivs one_sided(std::span<const Point2> p, std::size_t i, int dir) {
  auto at = [&](int k) -> const Point2& { return p[static_cast<std::size_t>(static_cast<long>(i) + dir * k)]; };
  const double s = static_cast<double>(dir);
  return {s * (-3.0 * at(0).x + 4.0 * at(1).x - at(2).x) / 2.0,
          s * (-3.0 * at(0).y + 4.0 * at(1).y - at(2).y) / 2.0,
          2.0 * at(0).x - 5.0 * at(1).x + 4.0 * at(2).x - at(3).x,
          2.0 * at(0).y - 5.0 * at(1).y + 4.0 * at(2).y - at(3).y};
}

}  // namespace

void validate(const RibbonCurve& curve) {
  validate_polyline(curve.points, 5);
  if (curve.anchor_index >= curve.points.size()) {
    fail(ErrorKind::InvalidInput, "anchor_index out of range");
  }
}

std::vector<double> cumulative_arclength(std::span<const Point2> points) {
  std::vector<double> s(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    s[i] = s[i - 1] + std::hypot(points[i].x - points[i - 1].x, points[i].y - points[i - 1].y);
  }
  return s;
}

CurvatureProfile compute_curvature(const RibbonCurve& curve, DerivativeScheme scheme) {
  validate(curve);
  const auto& p = curve.points;
  const std::size_t n = p.size();
  const double diag = bbox_diagonal(p);
  const double tangent_floor = 1e-12 * diag * diag;

  CurvatureProfile out;
  out.unit = curve.unit;
  out.arclength = cumulative_arclength(p);
  out.kappa.assign(n, 0.0);
  out.kappa_signed.assign(n, 0.0);

  auto evaluate = [&](std::size_t i, const Derivs& d) {
    const double speed2 = d.dx * d.dx + d.dy * d.dy;
    if (!(speed2 >= tangent_floor) || speed2 == 0.0) {
      fail(ErrorKind::DegenerateTangent,
           "stationary tangent at point " + std::to_string(i) + " of state " +
               std::to_string(curve.state_label));
    }
    const double cross = d.dx * d.ddy - d.dy * d.ddx;
    const double k = -cross / std::pow(speed2, 1.5);
    out.kappa_signed[i] = k;
    out.kappa[i] = std::abs(k);
  };

  for (std::size_t i = 1; i + 1 < n; ++i) evaluate(i, central(p, i));

  switch (scheme.endpoints) {
    case EndpointPolicy::one_sided:
      evaluate(0, one_sided(p, 0, +1));
      evaluate(n - 1, one_sided(p, n - 1, -1));
      break;
    case EndpointPolicy::replicate:
      out.kappa_signed[0] = out.kappa_signed[1];
      out.kappa[0] = out.kappa[1];
      out.kappa_signed[n - 1] = out.kappa_signed[n - 2];
      out.kappa[n - 1] = out.kappa[n - 2];
      break;
  }
  return out;
}

CurvatureProfile normalize_profile(const CurvatureProfile& profile, double floor) {
  if (profile.kappa.empty()) fail(ErrorKind::FlatProfile, "empty profile");
  const double peak = *std::max_element(profile.kappa.begin(), profile.kappa.end());
  if (!(peak > floor)) {
    fail(ErrorKind::FlatProfile, "max curvature " + std::to_string(peak) + " at or below floor");
  }
  CurvatureProfile out = profile;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.kappa[i] = profile.kappa[i] / peak;
    out.kappa_signed[i] = profile.kappa_signed[i] / peak;
  }
  return out;
}

RibbonCurve resample_arclength(const RibbonCurve& curve, std::size_t n) {
  if (n < 5) fail(ErrorKind::InvalidInput, "resample count must be >= 5");
  validate_polyline(curve.points, 2);
  if (curve.anchor_index >= curve.points.size()) {
    fail(ErrorKind::InvalidInput, "anchor_index out of range");
  }
  const auto& p = curve.points;
  const auto s = cumulative_arclength(p);
  const double total = s.back();

  RibbonCurve out;
  out.state_label = curve.state_label;
  out.unit = curve.unit;
  out.points.resize(n);
  out.points.front() = p.front();
  out.points.back() = p.back();

  std::size_t seg = 0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 2 < p.size() && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double u = std::clamp((target - s[seg]) / len, 0.0, 1.0);
    out.points[k] = {p[seg].x + u * (p[seg + 1].x - p[seg].x),
                     p[seg].y + u * (p[seg + 1].y - p[seg].y)};
  }

  const double anchor_s = s[curve.anchor_index];
  out.anchor_index = static_cast<std::size_t>(
      std::lround(anchor_s / total * static_cast<double>(n - 1)));
  return out;
}

RibbonCurve read_curve_csv(std::istream& in, int state_label, LengthUnit unit,
                           std::optional<std::size_t> anchor_index) {
  RibbonCurve curve;
  curve.state_label = state_label;
  curve.unit = unit;

  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[line.find_first_not_of(" \t")] == '#') continue;

    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double x = 0.0;
    double y = 0.0;
    if (!(fields >> x >> y)) {
      if (first_content) {  // header row
        first_content = false;
        continue;
      }
      fail(ErrorKind::ParseError, "malformed curve row at line " + std::to_string(line_no));
    }
    first_content = false;
    curve.points.push_back({x, y});
  }

  if (anchor_index) {
    curve.anchor_index = *anchor_index;
  } else if (!curve.points.empty()) {
    const auto s = cumulative_arclength(curve.points);
    const double half = s.back() / 2.0;
    const auto it = std::lower_bound(s.begin(), s.end(), half);
    std::size_t idx = static_cast<std::size_t>(it - s.begin());
    if (idx > 0 && (idx == s.size() || half - s[idx - 1] <= s[idx] - half)) --idx;
    curve.anchor_index = idx;
  }
  validate(curve);
  return curve;
}

RibbonCurve read_curve_csv_file(const std::string& path, int state_label, LengthUnit unit,
                                std::optional<std::size_t> anchor_index) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open curve file '" + path + "'");
  try {
    return read_curve_csv(in, state_label, unit, anchor_index);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.message());
  }
}

std::optional<int> state_from_filename(std::string_view path) {
  static const std::regex pattern(R"(_s(\d+)\.csv$)", std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(path.begin(), path.end(), m, pattern)) {
    return std::stoi(m[1].str());
  }
  return std::nullopt;
}

}  // namespace ribbon::geometry
