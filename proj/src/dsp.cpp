#include "ribbon/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ribbon/error.hpp"

namespace ribbon::dsp {

void validate(const LowPassSpec& spec) {
  if (spec.order != 2) fail(ErrorKind::InvalidInput, "only order-2 Butterworth is supported");
  if (!(spec.cutoff_ratio > 0.0 && spec.cutoff_ratio < 0.5)) {
    fail(ErrorKind::InvalidInput,
         "cutoff_ratio must lie in (0, 0.5), got " + std::to_string(spec.cutoff_ratio));
  }
}

std::complex<double> BiquadCoefficients::response(double f) const {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * std::numbers::pi * f);
  const std::complex<double> z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

double BiquadCoefficients::magnitude_db(double f) const {
  return 20.0 * std::log10(std::abs(response(f)));
}

double BiquadCoefficients::dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }

std::pair<double, double> BiquadCoefficients::pole_moduli() const {
  const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 - 4.0 * a2, 0.0));
  const std::complex<double> p1 = (-a1 + disc) / 2.0;
  const std::complex<double> p2 = (-a1 - disc) / 2.0;
  return {std::abs(p1), std::abs(p2)};
}

BiquadCoefficients design_butterworth2(const LowPassSpec& spec) {
  validate(spec);
  const double k = std::tan(std::numbers::pi * spec.cutoff_ratio);
  const double k2 = k * k;
  const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k2);

  BiquadCoefficients c;
  c.b0 = k2 * norm;
  c.b1 = 2.0 * c.b0;
  c.b2 = c.b0;
  c.a1 = 2.0 * (k2 - 1.0) * norm;
  c.a2 = (1.0 - std::numbers::sqrt2 * k + k2) * norm;
  c.settle_length = static_cast<std::size_t>(std::ceil(3.0 / spec.cutoff_ratio));
  return c;
}

std::vector<double> filter_forward(const BiquadCoefficients& c, std::span<const double> signal) {
  std::vector<double> out(signal.size());
  if (signal.empty()) return out;
  // Steady state of the transposed form for a unit constant input.
  const double x0 = signal.front();
  double z2 = (c.b2 - c.a2) * x0;
  double z1 = (c.b1 - c.a1) * x0 + z2;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double x = signal[i];
    const double y = c.b0 * x + z1;
    z1 = c.b1 * x - c.a1 * y + z2;
    z2 = c.b2 * x - c.a2 * y;
    out[i] = y;
  }
  return out;
}

std::vector<double> apply_zero_phase(const BiquadCoefficients& c, std::span<const double> signal) {
  const std::size_t pad = c.settle_length;
  if (pad == 0) fail(ErrorKind::InvalidInput, "coefficients carry no settle length");
  if (signal.size() < 3 * pad) {
    fail(ErrorKind::SignalTooShort, "signal of " + std::to_string(signal.size()) +
                                        " samples, need at least " + std::to_string(3 * pad));
  }
  const std::size_t n = signal.size();

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  const double head = signal.front();
  const double tail = signal.back();
  for (std::size_t k = pad; k >= 1; --k) ext.push_back(2.0 * head - signal[k]);
  ext.insert(ext.end(), signal.begin(), signal.end());
  for (std::size_t k = 1; k <= pad; ++k) ext.push_back(2.0 * tail - signal[n - 1 - k]);

  auto fwd = filter_forward(c, ext);
  std::reverse(fwd.begin(), fwd.end());
  auto bwd = filter_forward(c, fwd);
  std::reverse(bwd.begin(), bwd.end());

  return {bwd.begin() + static_cast<std::ptrdiff_t>(pad),
          bwd.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace ribbon::dsp
