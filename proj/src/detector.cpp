#include "slipgrip/detector.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace slipgrip {

void DetectorConfig::validate() const {
  if (!(high_bound > low_bound) || !(low_bound > 0.0)) {
    throw std::invalid_argument("DetectorConfig: bounds must satisfy HB > LB > 0");
  }
  if (!(normalization > 0.0) || !std::isfinite(normalization)) {
    throw std::invalid_argument("DetectorConfig: normalization must be positive");
  }
}

HysteresisDetector::HysteresisDetector(const DetectorConfig& config) : config_(config) {
  config_.validate();
}

bool HysteresisDetector::step(double power) {
  if (!std::isfinite(power) || power < 0.0) {
    throw std::invalid_argument("HysteresisDetector: power sample must be finite and >= 0");
  }
  const double u = power / config_.normalization;
  if (u >= prev_u_ && u >= config_.high_bound) {
    output_ = true;
  } else if (u < prev_u_ && u <= config_.low_bound) {
    output_ = false;
  }
  // inside the dead band (or moving the "wrong" way) the output holds
  prev_u_ = u;
  return output_;
}

void HysteresisDetector::reset() {
  prev_u_ = 0.0;
  output_ = false;
}

std::vector<SlipEvent> detect_events(const TimeSeries& power, HysteresisDetector detector) {
  power.validate();
  std::vector<SlipEvent> events;
  bool active = false;
  SlipEvent current;
  for (Eigen::Index k = 0; k < power.size(); ++k) {
    const double u = power.values[k];
    const bool on = detector.step(u);
    if (on && !active) {
      active = true;
      current = SlipEvent{power.time_at(k), power.time_at(k), u};
    } else if (on && active) {
      current.end_s = power.time_at(k);
      current.peak_power = std::max(current.peak_power, u);
    } else if (!on && active) {
      active = false;
      events.push_back(current);
    }
  }
  if (active) events.push_back(current);
  return events;
}

void write_events_csv(const std::vector<SlipEvent>& events, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  out << "onset_s,end_s,peak_power\n";
  char line[96];
  for (const SlipEvent& e : events) {
    std::snprintf(line, sizeof(line), "%.6f,%.6f,%.12g\n", e.onset_s, e.end_s, e.peak_power);
    out << line;
  }
}

}  // namespace slipgrip
