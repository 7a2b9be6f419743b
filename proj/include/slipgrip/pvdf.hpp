#pragma once

#include "slipgrip/time_series.hpp"

namespace slipgrip {

// Piezoelectric film parameters. The film converts applied force into charge
// (Q = d * F) which the measurement circuit turns into a voltage V = Q / C_p.
// Charge bleeds off the electrodes, so the sensed voltage tracks force *rate*
// and decays to zero under a static load.
struct PvdfParams {
  double capacitance_f = 1.0e-9;        // electrode capacitance C_p [F]
  double charge_constant_c_per_n = 25.0e-12;  // piezoelectric charge constant d [C/N]
  double noise_floor_v = 0.005;         // idle output bound [V]
  double leak_time_constant_s = 0.5;    // first-order electrode discharge

  void validate() const;
};

// Simulates the sensed voltage for a force history applied to the film.
// Discrete model: v[k] = exp(-dt/tau) * v[k-1] + (d/C_p) * (F[k] - F[k-1]),
// with zero force history before the first sample.
TimeSeries charge_to_voltage(const TimeSeries& force, const PvdfParams& params);

}  // namespace slipgrip
