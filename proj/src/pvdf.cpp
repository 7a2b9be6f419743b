#include "slipgrip/pvdf.hpp"

#include <cmath>
#include <stdexcept>

namespace slipgrip {

void PvdfParams::validate() const {
  if (!(capacitance_f > 0.0) || !std::isfinite(capacitance_f)) {
    throw std::invalid_argument("PvdfParams: capacitance must be positive");
  }
  if (!(charge_constant_c_per_n > 0.0) || !std::isfinite(charge_constant_c_per_n)) {
    throw std::invalid_argument("PvdfParams: charge constant must be positive");
  }
  if (noise_floor_v < 0.0) {
    throw std::invalid_argument("PvdfParams: noise floor must be non-negative");
  }
  if (!(leak_time_constant_s > 0.0)) {
    throw std::invalid_argument("PvdfParams: leak time constant must be positive");
  }
}

TimeSeries charge_to_voltage(const TimeSeries& force, const PvdfParams& params) {
  params.validate();
  force.validate();
  if (force.unit != SignalUnit::kNewtons) {
    throw std::invalid_argument("charge_to_voltage: force series must be in newtons");
  }

  const double gain = params.charge_constant_c_per_n / params.capacitance_f;
  const double decay = std::exp(-force.dt / params.leak_time_constant_s);

  Eigen::ArrayXd out(force.size());
  double v = 0.0;
  double prev_force = 0.0;  // no force history before the recording starts
  for (Eigen::Index k = 0; k < force.size(); ++k) {
    v = decay * v + gain * (force.values[k] - prev_force);
    prev_force = force.values[k];
    out[k] = v;
  }
  return TimeSeries(force.t0, force.dt, std::move(out), SignalUnit::kVolts);
}

}  // namespace slipgrip
