#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ribbon/geometry.hpp"
#include "ribbon/placement.hpp"
#include "ribbon/svm.hpp"
#include "ribbon/synth.hpp"

namespace fixture {

namespace fs = std::filesystem;

inline fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ribbon_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Raised-cosine bump of unit height on [center - half, center + half].
inline double bump(double s, double center, double half) {
  const double u = (s - center) / half;
  if (std::abs(u) >= 1.0) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * u));
}

struct Hotspot {
  double center_from_anchor = 0.0;  // mm along the trailing half
  double half_width = 3.0;
  std::vector<double> amplitude;    // one per state, fraction of the reference peak
};

inline constexpr double kRibbonLength = 100.0;
inline constexpr double kAnchorS = 50.0;
inline constexpr std::size_t kRawPoints = 4001;
inline constexpr double kReferencePeak = 0.05;  // 1/mm, on the leading half

// Eight curves sharing an identical reference feature on the leading half so
// that normalization is common to all states; across-state differences exist
// only inside the hotspots.
inline std::vector<ribbon::geometry::RibbonCurve> localized_curves(const std::vector<Hotspot>& spots,
                                                                   double mirror = 1.0) {
  std::vector<ribbon::geometry::RibbonCurve> curves;
  for (int k = 0; k < 8; ++k) {
    auto kappa = [&, k](double s) {
      double v = kReferencePeak * bump(s, 25.0, 5.0);
      for (const auto& h : spots) {
        v += kReferencePeak * h.amplitude[static_cast<std::size_t>(k)] *
             bump(s, kAnchorS + h.center_from_anchor, h.half_width);
      }
      return v;
    };
    auto c = ribbon::synth::curve_from_curvature(kappa, kRibbonLength, kRawPoints, k + 1, kRawPoints / 2);
    for (auto& p : c.points) p.y *= mirror;
    curves.push_back(std::move(c));
  }
  return curves;
}

inline const std::vector<double> kRisingAmplitudes{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
inline const std::vector<double> kFallingAmplitudes{0.8, 0.1, 0.7, 0.2, 0.6, 0.3, 0.5, 0.4};

inline void write_curve(const ribbon::geometry::RibbonCurve& c, const fs::path& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "x,y\n";
  for (const auto& p : c.points) out << p.x << "," << p.y << "\n";
}

// Two overlapping Gaussian blobs in the plane, labels +-1.
struct BinaryProblem {
  ribbon::svm::FeatureMatrix x;
  std::vector<int> y;
};

inline BinaryProblem random_binary(std::uint64_t seed, std::size_t n, double spread = 1.0) {
  ribbon::synth::Rng rng(seed);
  auto noise = [&](ribbon::synth::Rng& r) { return spread * r.normal(); };
  BinaryProblem p;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;
    p.x.push_back({label * 0.8 + noise(rng), label * 0.5 + noise(rng)});
    p.y.push_back(label);
  }
  return p;
}

// 8 classes x `per_class` samples scattered around the default synthetic anchors.
inline ribbon::svm::LabeledData anchor_clusters(std::uint64_t seed, int per_class, double sigma) {
  ribbon::synth::Rng rng(seed);
  auto noise = [&](ribbon::synth::Rng& r) { return sigma * r.normal(); };
  ribbon::svm::LabeledData d;
  for (int k = 0; k < 8; ++k) {
    const auto& a = ribbon::synth::kDefaultAnchors[static_cast<std::size_t>(k)];
    for (int r = 0; r < per_class; ++r) {
      d.x.push_back({a[0] + noise(rng), a[1] + noise(rng)});
      d.labels.push_back(k + 1);
    }
  }
  return d;
}

}  // namespace fixture
