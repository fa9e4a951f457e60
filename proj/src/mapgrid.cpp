#include "ribbon/mapgrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "numfmt.hpp"
#include "ribbon/error.hpp"

namespace ribbon::mapgrid {

double DecisionGrid::x_at(std::size_t i) const {
  return bounds.x_min + static_cast<double>(i) * (bounds.x_max - bounds.x_min) /
                            static_cast<double>(resolution - 1);
}

double DecisionGrid::y_at(std::size_t j) const {
  return bounds.y_min + static_cast<double>(j) * (bounds.y_max - bounds.y_min) /
                            static_cast<double>(resolution - 1);
}

Bounds default_bounds(const svm::MulticlassSvm& model, double margin) {
  if (model.training.x.empty()) {
    fail(ErrorKind::InvalidInput, "model carries no training rows; pass explicit bounds");
  }
  Bounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& r : model.training.x) {
    if (r.size() != 2) fail(ErrorKind::DimensionMismatch, "map needs 2-feature training rows");
    b.x_min = std::min(b.x_min, r[0]);
    b.x_max = std::max(b.x_max, r[0]);
    b.y_min = std::min(b.y_min, r[1]);
    b.y_max = std::max(b.y_max, r[1]);
  }
  const double wx = std::max(b.x_max - b.x_min, 1e-6);
  const double wy = std::max(b.y_max - b.y_min, 1e-6);
  return {b.x_min - margin * wx, b.x_max + margin * wx, b.y_min - margin * wy, b.y_max + margin * wy};
}

DecisionGrid rasterize(const svm::MulticlassSvm& model, const Bounds& bounds,
                       std::size_t resolution) {
  if (model.dimension() != 2) fail(ErrorKind::DimensionMismatch, "map needs a 2-feature model");
  if (resolution < 2 || resolution > kMaxResolution) {
    fail(ErrorKind::InvalidInput, "resolution must lie in [2, 4096]");
  }
  if (!(bounds.x_max > bounds.x_min) || !(bounds.y_max > bounds.y_min) ||
      !std::isfinite(bounds.x_min) || !std::isfinite(bounds.x_max) ||
      !std::isfinite(bounds.y_min) || !std::isfinite(bounds.y_max)) {
    fail(ErrorKind::InvalidInput, "map bounds are degenerate");
  }

  DecisionGrid grid;
  grid.bounds = bounds;
  grid.resolution = resolution;
  grid.labels.resize(resolution * resolution);
  for (std::size_t j = 0; j < resolution; ++j) {
    const double y = grid.y_at(j);
    for (std::size_t i = 0; i < resolution; ++i) {
      const double x[2] = {grid.x_at(i), y};
      grid.labels[j * resolution + i] = svm::predict(model, x);
    }
  }
  for (std::size_t k = 0; k < model.training.x.size(); ++k) {
    const auto& r = model.training.x[k];
    if (r[0] >= bounds.x_min && r[0] <= bounds.x_max && r[1] >= bounds.y_min && r[1] <= bounds.y_max) {
      grid.overlay.push_back({r[0], r[1], model.training.labels[k]});
    }
  }
  return grid;
}

std::array<std::uint8_t, 3> color_for(int label) {
  const int idx = ((label - 1) % 8 + 8) % 8;
  return kPalette[static_cast<std::size_t>(idx)];
}

void write_csv(const DecisionGrid& grid, std::ostream& out) {
  using detail::format_double;
  out << "x,y,label\n";
  for (std::size_t j = 0; j < grid.resolution; ++j) {
    const std::string y = format_double(grid.y_at(j));
    for (std::size_t i = 0; i < grid.resolution; ++i) {
      out << format_double(grid.x_at(i)) << ',' << y << ',' << grid.label(i, j) << '\n';
    }
  }
}

DecisionGrid read_csv(std::istream& in) {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == "x,y,label") continue;
    std::stringstream ss(line);
    std::string a, b, c;
    double x = 0.0, y = 0.0, l = 0.0;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c) ||
        !detail::parse_double(a, x) || !detail::parse_double(b, y) || !detail::parse_double(c, l)) {
      fail(ErrorKind::ParseError, "malformed map row at line " + std::to_string(line_no));
    }
    xs.push_back(x);
    ys.push_back(y);
    labels.push_back(static_cast<int>(l));
  }
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(labels.size()))));
  if (n < 2 || n * n != labels.size()) fail(ErrorKind::ParseError, "map rows do not form a square grid");
  DecisionGrid grid;
  grid.resolution = n;
  grid.bounds = {xs.front(), xs[n - 1], ys.front(), ys.back()};
  grid.labels = std::move(labels);
  return grid;
}

void write_ppm(const DecisionGrid& grid, std::ostream& out) {
  const std::size_t n = grid.resolution;
  if (n > kMaxResolution) fail(ErrorKind::UnsupportedResolution, "ppm resolution above 4096");
  if (n < 2) fail(ErrorKind::InvalidInput, "grid too small");

  std::vector<std::uint8_t> pixels(n * n * 3);
  for (std::size_t row = 0; row < n; ++row) {
    const std::size_t j = n - 1 - row;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = color_for(grid.label(i, j));
      std::copy(c.begin(), c.end(), pixels.begin() + static_cast<std::ptrdiff_t>((row * n + i) * 3));
    }
  }
  const auto& b = grid.bounds;
  for (const auto& p : grid.overlay) {
    const auto ci = std::llround((p.x - b.x_min) / (b.x_max - b.x_min) * static_cast<double>(n - 1));
    const auto cj = std::llround((p.y - b.y_min) / (b.y_max - b.y_min) * static_cast<double>(n - 1));
    const long long crow = static_cast<long long>(n) - 1 - cj;
    for (long long dr = -1; dr <= 1; ++dr) {
      for (long long dc = -1; dc <= 1; ++dc) {
        const long long r = crow + dr;
        const long long c = ci + dc;
        if (r < 0 || c < 0 || r >= static_cast<long long>(n) || c >= static_cast<long long>(n)) continue;
        const auto off = (static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)) * 3;
        pixels[off] = pixels[off + 1] = pixels[off + 2] = 0;
      }
    }
  }
  out << "P6 " << n << ' ' << n << " 255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

}  // namespace ribbon::mapgrid
