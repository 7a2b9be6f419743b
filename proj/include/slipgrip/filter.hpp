#pragma once

#include <complex>

#include "slipgrip/time_series.hpp"

namespace slipgrip {

// Rational transfer function in s, coefficients in descending powers.
// The denominator degree must be >= the numerator degree.
struct ContinuousTF {
  Eigen::VectorXd numerator;
  Eigen::VectorXd denominator;

  void validate() const;
  std::complex<double> response(double omega_rad_s) const;
  double magnitude(double omega_rad_s) const { return std::abs(response(omega_rad_s)); }
};

// The analog conditioning filter for the piezo signal: an integrator-lead
// compensator G(s) = (100 s + 0.1) / (s^2 + 20 s). The integrator recovers
// applied force from the rate-type sensor output, the lead pole rolls off
// high-frequency noise.
ContinuousTF pvdf_filter_tf();

// Streaming second-order IIR section (direct form II transposed).
// Single-owner stateful object; identical inputs from identical state
// produce bit-identical outputs.
class DiscreteFilter {
 public:
  DiscreteFilter() = default;
  DiscreteFilter(double b0, double b1, double b2, double a1, double a2, double fs_hz);

  double step(double x);
  void reset() { s1_ = s2_ = 0.0; }

  double sample_rate() const { return fs_; }
  double b0() const { return b0_; }
  double b1() const { return b1_; }
  double b2() const { return b2_; }
  double a1() const { return a1_; }
  double a2() const { return a2_; }

  // Magnitude of the realized response at z = exp(j*omega/fs).
  double magnitude(double omega_rad_s) const;
  std::complex<double> response(double omega_rad_s) const;

 private:
  double b0_ = 1.0, b1_ = 0.0, b2_ = 0.0;
  double a1_ = 0.0, a2_ = 0.0;
  double fs_ = 1.0;
  double s1_ = 0.0, s2_ = 0.0;
};

inline constexpr double kMinFilterSampleRateHz = 200.0;
inline constexpr double kDefaultSampleRateHz = 1000.0;

// Discretizes the integrator-lead compensator at the given sample rate.
// Below 200 Hz the lead pole sits too close to Nyquist and warping distorts
// the response, so lower rates are rejected.
DiscreteFilter design_filter(double fs_hz);

// Runs the series through the filter, advancing its internal state. The
// series sample rate must match the filter design rate.
TimeSeries apply_filter(DiscreteFilter& filter, const TimeSeries& raw);

// p[k] = y[k]^2, the instantaneous power representation of the signal.
TimeSeries power_signal(const TimeSeries& filtered);

// First-order DC blocker, used to bleed the integrator's drift on long
// recordings. y[k] = g*(x[k] - x[k-1]) + a*y[k-1] with unity gain well above
// the corner.
class DcBlocker {
 public:
  DcBlocker() = default;
  DcBlocker(double time_constant_s, double fs_hz);

  double step(double x);
  void reset() { prev_in_ = prev_out_ = 0.0; }

 private:
  double pole_ = 0.0;
  double gain_ = 1.0;
  double prev_in_ = 0.0;
  double prev_out_ = 0.0;
};

struct SignalChainConfig {
  double output_gain = 1.0;
  bool dc_block = true;
  double dc_block_time_constant_s = 0.5;

  void validate() const;
};

// Conditioning chain applied to the raw sensor voltage before power
// extraction: integrator-lead filter, optional drift bleed, output gain.
class SignalChain {
 public:
  SignalChain(double fs_hz, const SignalChainConfig& config);

  double step(double raw);
  void reset();
  double sample_rate() const { return fs_; }

  TimeSeries process(const TimeSeries& raw);

 private:
  double fs_;
  SignalChainConfig config_;
  DiscreteFilter filter_;
  DcBlocker blocker_;
};

}  // namespace slipgrip
