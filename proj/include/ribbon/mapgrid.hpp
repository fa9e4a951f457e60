#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "ribbon/svm.hpp"

namespace ribbon::mapgrid {

struct Bounds {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
};

struct OverlayPoint {
  double x = 0.0;
  double y = 0.0;
  int label = 0;
};

/// Decision labels sampled on a resolution x resolution lattice that includes
/// the bounds. Cell (i, j) sits at x_i = x_min + i*(x_max-x_min)/(res-1),
/// y_j likewise; labels are row-major with y outer.
struct DecisionGrid {
  Bounds bounds;
  std::size_t resolution = 0;
  std::vector<int> labels;
  std::vector<OverlayPoint> overlay;

  double x_at(std::size_t i) const;
  double y_at(std::size_t j) const;
  int label(std::size_t i, std::size_t j) const { return labels[j * resolution + i]; }
};

inline constexpr std::size_t kMaxResolution = 4096;
inline constexpr std::size_t kDefaultResolution = 512;

/// Training-feature bounding box grown by `margin` of its extent per side.
Bounds default_bounds(const svm::MulticlassSvm& model, double margin = 0.15);

/// Requires a 2-feature model, non-degenerate bounds and a resolution in
/// [2, 4096]. Training rows inside the bounds become the overlay.
DecisionGrid rasterize(const svm::MulticlassSvm& model, const Bounds& bounds,
                       std::size_t resolution = kDefaultResolution);

/// class k -> palette[(k - 1) mod 8]; red (open) through blue (contracted).
inline constexpr std::array<std::array<std::uint8_t, 3>, 8> kPalette{{
    {228, 26, 28},
    {255, 127, 0},
    {230, 200, 40},
    {77, 175, 74},
    {27, 158, 119},
    {102, 194, 245},
    {152, 78, 163},
    {31, 60, 200},
}};

std::array<std::uint8_t, 3> color_for(int label);

/// `x,y,label` header then one row per cell, y outer.
void write_csv(const DecisionGrid& grid, std::ostream& out);
/// Reads back labels and lattice coordinates written by write_csv.
DecisionGrid read_csv(std::istream& in);

/// Binary PPM, header `P6 <w> <h> 255\n`; top image row is y_max. Overlay
/// points are stamped as 3x3 black squares. Throws UnsupportedResolution
/// above 4096.
void write_ppm(const DecisionGrid& grid, std::ostream& out);

}  // namespace ribbon::mapgrid
