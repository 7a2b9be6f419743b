#pragma once

#include <filesystem>
#include <vector>

#include "slipgrip/time_series.hpp"

namespace slipgrip {

struct DetectorConfig {
  double high_bound = 3.0;     // turn-on threshold on the power signal [V^2]
  double low_bound = 1.0;      // turn-off threshold [V^2]
  double normalization = 1.0;  // power samples are divided by this before thresholding

  void validate() const;
};

// Two-bound hysteresis detector over the power signal:
//   output -> 1 when the signal is rising (u[k] >= u[k-1]) and u[k] >= HB,
//   output -> 0 when the signal is falling (u[k] <  u[k-1]) and u[k] <= LB,
//   otherwise the previous output holds.
// Equality with the previous sample counts as rising. Initial state is
// output 0 with a zero previous sample (no contact at startup).
class HysteresisDetector {
 public:
  HysteresisDetector() : HysteresisDetector(DetectorConfig{}) {}
  explicit HysteresisDetector(const DetectorConfig& config);

  bool step(double power);
  void reset();

  bool output() const { return output_; }
  double previous() const { return prev_u_; }
  const DetectorConfig& config() const { return config_; }

 private:
  DetectorConfig config_;
  double prev_u_ = 0.0;
  bool output_ = false;
};

struct SlipEvent {
  double onset_s = 0.0;
  double end_s = 0.0;
  double peak_power = 0.0;
};

// Batch wrapper: the maximal intervals where the detector output is 1,
// time-ordered and non-overlapping. An interval still active at the end of
// the series is closed at the last sample.
std::vector<SlipEvent> detect_events(const TimeSeries& power, HysteresisDetector detector);

// Event log CSV: `onset_s,end_s,peak_power`.
void write_events_csv(const std::vector<SlipEvent>& events, const std::filesystem::path& path);

}  // namespace slipgrip
