#include "slipgrip/filter.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "slipgrip/rng.hpp"

namespace slipgrip {
namespace {

// Continuous-time impulse response of the integrator-lead compensator via
// dense RK4 on the state-space free response (x0 = B, y = C x). Kept
// independent of the discrete realization on purpose.
std::vector<double> rk4_impulse_response(double fs, double duration_s, int substeps) {
  const double a11 = 0.0, a12 = 1.0, a21 = 0.0, a22 = -20.0;
  const double c1 = 0.1, c2 = 100.0;
  double x1 = 0.0, x2 = 1.0;  // x(0) = B

  auto deriv = [&](double s1, double s2, double& d1, double& d2) {
    d1 = a11 * s1 + a12 * s2;
    d2 = a21 * s1 + a22 * s2;
  };

  const long n = std::lround(duration_s * fs);
  const double h = 1.0 / (fs * substeps);
  std::vector<double> y;
  y.reserve(n + 1);
  y.push_back(c1 * x1 + c2 * x2);
  for (long k = 0; k < n; ++k) {
    for (int s = 0; s < substeps; ++s) {
      double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
      deriv(x1, x2, k1a, k1b);
      deriv(x1 + 0.5 * h * k1a, x2 + 0.5 * h * k1b, k2a, k2b);
      deriv(x1 + 0.5 * h * k2a, x2 + 0.5 * h * k2b, k3a, k3b);
      deriv(x1 + h * k3a, x2 + h * k3b, k4a, k4b);
      x1 += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
      x2 += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    }
    y.push_back(c1 * x1 + c2 * x2);
  }
  return y;
}

TEST(ContinuousTF, SpotMagnitudes) {
  const ContinuousTF g = pvdf_filter_tf();
  // |G(j20)| = |0.1 + 2000j| / |-400 + 400j|
  EXPECT_NEAR(g.magnitude(20.0), 3.5355, 5e-4);
  // |G(j0.1)| = |0.1 + 10j| / |-0.01 + 2j|
  EXPECT_NEAR(g.magnitude(0.1), 5.000, 5e-3);
}

TEST(ContinuousTF, StrictlyProperRolloff) {
  const ContinuousTF g = pvdf_filter_tf();
  EXPECT_LT(g.magnitude(1e5), 1.1e-3);
  EXPECT_LT(g.magnitude(1e7), g.magnitude(1e5));
}

TEST(ContinuousTF, RejectsImproperRatio) {
  ContinuousTF tf;
  tf.numerator = Eigen::Vector3d(1.0, 0.0, 0.0);
  tf.denominator = Eigen::Vector2d(1.0, 1.0);
  EXPECT_THROW(tf.validate(), std::invalid_argument);
}

TEST(DesignFilter, RejectsLowSampleRate) {
  EXPECT_THROW(design_filter(199.0), std::invalid_argument);
  EXPECT_NO_THROW(design_filter(200.0));
}

TEST(DesignFilter, MagnitudeTracksAnalyticResponseWithinOnePercent) {
  const ContinuousTF g = pvdf_filter_tf();
  for (double fs : {200.0, 500.0, 1000.0, 2000.0, 4000.0}) {
    const DiscreteFilter filter = design_filter(fs);
    const double lo = 0.01, hi = 2.0 * std::numbers::pi * fs / 10.0;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double omega = lo * std::pow(hi / lo, i / 199.0);
      const double rel = std::abs(filter.magnitude(omega) / g.magnitude(omega) - 1.0);
      worst = std::max(worst, rel);
    }
    EXPECT_LT(worst, 0.01) << "fs = " << fs;
  }
}

TEST(DesignFilter, PreservesIntegratorPole) {
  // The feedback polynomial must keep its root at z = 1: 1 + a1 + a2 = 0.
  const DiscreteFilter filter = design_filter(1000.0);
  EXPECT_NEAR(1.0 + filter.a1() + filter.a2(), 0.0, 1e-12);
}

TEST(ApplyFilter, ImpulseResponseMatchesRk4Oracle) {
  const double fs = 1000.0;
  DiscreteFilter filter = design_filter(fs);
  const long n = 2000;  // 2 s

  Eigen::ArrayXd impulse = Eigen::ArrayXd::Zero(n);
  impulse[0] = 1.0;
  const TimeSeries response =
      apply_filter(filter, TimeSeries(0.0, 1.0 / fs, impulse, SignalUnit::kVolts));

  const std::vector<double> oracle = rk4_impulse_response(fs, 2.0, 100);
  // The sample at k = 0 straddles the jump discontinuity of the continuous
  // impulse response and carries the trapezoidal half-weight; compare from
  // the first full sample.
  double num = 0.0, den = 0.0;
  for (long k = 1; k < n; ++k) {
    const double d = response.values[k] * fs - oracle[k];
    num += d * d;
    den += oracle[k] * oracle[k];
  }
  const double rms_rel = std::sqrt(num / den);
  EXPECT_LT(rms_rel, 0.005);
}

TEST(ApplyFilter, ZeroInputZeroStateGivesExactZeros) {
  DiscreteFilter filter = design_filter(1000.0);
  const TimeSeries out =
      apply_filter(filter, TimeSeries(0.0, 1e-3, Eigen::ArrayXd::Zero(256), SignalUnit::kVolts));
  EXPECT_TRUE((out.values == 0.0).all());
}

TEST(ApplyFilter, ResetRestoresZeroState) {
  DiscreteFilter filter = design_filter(1000.0);
  Eigen::ArrayXd noise(64);
  Rng rng(3);
  for (int i = 0; i < noise.size(); ++i) noise[i] = rng.gaussian();
  apply_filter(filter, TimeSeries(0.0, 1e-3, noise, SignalUnit::kVolts));
  filter.reset();
  const TimeSeries out =
      apply_filter(filter, TimeSeries(0.0, 1e-3, Eigen::ArrayXd::Zero(64), SignalUnit::kVolts));
  EXPECT_TRUE((out.values == 0.0).all());
}

TEST(ApplyFilter, Linearity) {
  Rng rng(11);
  Eigen::ArrayXd x1(512), x2(512);
  for (int i = 0; i < 512; ++i) {
    x1[i] = 5.0 * rng.gaussian();
    x2[i] = 5.0 * rng.gaussian();
  }
  DiscreteFilter f1 = design_filter(1000.0);
  DiscreteFilter f2 = design_filter(1000.0);
  DiscreteFilter f3 = design_filter(1000.0);
  const auto y1 = apply_filter(f1, TimeSeries(0.0, 1e-3, x1, SignalUnit::kVolts));
  const auto y2 = apply_filter(f2, TimeSeries(0.0, 1e-3, x2, SignalUnit::kVolts));
  const auto y12 = apply_filter(f3, TimeSeries(0.0, 1e-3, x1 + x2, SignalUnit::kVolts));
  const double err = (y12.values - y1.values - y2.values).abs().maxCoeff();
  EXPECT_LT(err, 1e-9);
}

TEST(ApplyFilter, RejectsSampleRateMismatch) {
  DiscreteFilter filter = design_filter(1000.0);
  TimeSeries wrong(0.0, 1e-2, Eigen::ArrayXd::Zero(8), SignalUnit::kVolts);
  EXPECT_THROW(apply_filter(filter, wrong), std::invalid_argument);
}

TEST(ApplyFilter, DeterministicBitIdenticalOutput) {
  Rng rng(5);
  Eigen::ArrayXd x(256);
  for (int i = 0; i < 256; ++i) x[i] = rng.gaussian();
  const TimeSeries input(0.0, 1e-3, x, SignalUnit::kVolts);

  DiscreteFilter fa = design_filter(1000.0);
  DiscreteFilter fb = design_filter(1000.0);
  const auto ya = apply_filter(fa, input);
  const auto yb = apply_filter(fb, input);
  EXPECT_EQ(0, std::memcmp(ya.values.data(), yb.values.data(), sizeof(double) * 256));
}

TEST(PowerSignal, SquaresSamples) {
  Eigen::ArrayXd y(3);
  y << 0.0, -2.0, 1.5;
  const TimeSeries p = power_signal(TimeSeries(0.0, 1e-3, y, SignalUnit::kVolts));
  EXPECT_EQ(p.unit, SignalUnit::kVoltsSquared);
  EXPECT_DOUBLE_EQ(p.values[0], 0.0);
  EXPECT_DOUBLE_EQ(p.values[1], 4.0);
  EXPECT_DOUBLE_EQ(p.values[2], 2.25);
}

TEST(PowerSignal, SineMeanIsHalfAmplitudeSquared) {
  const double amplitude = 2.0, freq = 10.0, fs = 1000.0;
  const int n = 1000;  // exactly 10 periods
  Eigen::ArrayXd y(n);
  for (int k = 0; k < n; ++k) {
    y[k] = amplitude * std::sin(2.0 * std::numbers::pi * freq * k / fs);
  }
  const TimeSeries p = power_signal(TimeSeries(0.0, 1.0 / fs, y, SignalUnit::kVolts));
  EXPECT_NEAR(p.values.mean(), amplitude * amplitude / 2.0,
              0.01 * amplitude * amplitude / 2.0);
}

TEST(PowerSignal, NonNegativeAndEven) {
  Rng rng(17);
  Eigen::ArrayXd y(512);
  for (int i = 0; i < 512; ++i) y[i] = 10.0 * rng.gaussian();
  const TimeSeries series(0.0, 1e-3, y, SignalUnit::kVolts);
  const TimeSeries negated(0.0, 1e-3, -y, SignalUnit::kVolts);
  const TimeSeries p = power_signal(series);
  const TimeSeries pn = power_signal(negated);
  EXPECT_TRUE((p.values >= 0.0).all());
  EXPECT_TRUE((p.values == pn.values).all());  // exact sign elimination
}

TEST(DcBlocker, RemovesConstantOffset) {
  DcBlocker blocker(0.15, 1000.0);
  double y = 0.0;
  for (int k = 0; k < 3000; ++k) y = blocker.step(2.5);
  EXPECT_LT(std::abs(y), 1e-4);
}

}  // namespace
}  // namespace slipgrip
