#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

namespace slipgrip {

// Engineering unit carried alongside a sampled signal.
enum class SignalUnit {
  kVolts,
  kVoltsSquared,
  kNewtons,
  kDegrees,
  kDimensionless,
};

std::string to_string(SignalUnit unit);
SignalUnit unit_from_string(const std::string& name);

// Uniformly sampled signal. `dt` is the sample period in seconds and must be
// positive; samples must be finite.
struct TimeSeries {
  double t0 = 0.0;
  double dt = 1.0;
  Eigen::ArrayXd values;
  SignalUnit unit = SignalUnit::kDimensionless;

  TimeSeries() = default;
  TimeSeries(double t0_s, double dt_s, Eigen::ArrayXd samples, SignalUnit u);

  Eigen::Index size() const { return values.size(); }
  double time_at(Eigen::Index i) const { return t0 + static_cast<double>(i) * dt; }
  double sample_rate() const { return 1.0 / dt; }

  // Throws std::invalid_argument if dt <= 0 or any sample is non-finite.
  void validate() const;
};

// CSV I/O in the `t,value,unit` format, one row per sample, time printed
// with six decimal digits.
void write_csv(const TimeSeries& series, const std::filesystem::path& path);
TimeSeries read_csv(const std::filesystem::path& path);

}  // namespace slipgrip
