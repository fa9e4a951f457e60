#pragma once

#include <cstddef>
#include <complex>
#include <span>
#include <vector>

namespace ribbon::dsp {

/// Second-order Butterworth low-pass. The cutoff is a fraction of the
/// sampling frequency and must lie strictly below Nyquist.
struct LowPassSpec {
  int order = 2;
  double cutoff_ratio = 0.02;
};

void validate(const LowPassSpec& spec);

/// Direct-form biquad with a0 normalized to 1.
struct BiquadCoefficients {
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  /// ceil(3 / cutoff_ratio): reflective padding length and the minimum
  /// signal length is three times this.
  std::size_t settle_length = 0;

  /// H(e^{j 2 pi f}) with f in cycles per sample.
  std::complex<double> response(double f) const;
  double magnitude_db(double f) const;
  double dc_gain() const;
  /// Moduli of the two poles (roots of z^2 + a1 z + a2).
  std::pair<double, double> pole_moduli() const;
};

/// Bilinear transform with pre-warping, so the half-power point lands exactly
/// on the requested cutoff.
BiquadCoefficients design_butterworth2(const LowPassSpec& spec);

/// Single causal pass (transposed direct form II) starting from the
/// steady-state for a constant input equal to signal[0].
std::vector<double> filter_forward(const BiquadCoefficients& c, std::span<const double> signal);

/// Forward-backward filtering with odd-reflection padding of settle_length
/// samples on both ends. Throws SignalTooShort below 3 * settle_length.
std::vector<double> apply_zero_phase(const BiquadCoefficients& c, std::span<const double> signal);

}  // namespace ribbon::dsp
