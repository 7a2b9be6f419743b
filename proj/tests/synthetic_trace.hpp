#pragma once

// Shared builder for the labeled slip/disturbance traces used by the signal
// regression tests: scripted slip-burst and disturbance windows rendered
// through the sensor front-end.

#include <vector>

#include "slipgrip/plant.hpp"
#include "slipgrip/time_series.hpp"

namespace slipgrip::testing {

struct Window {
  double start_s;
  double end_s;
  bool contains(double t) const { return t >= start_s && t < end_s; }
};

struct LabeledTrace {
  TimeSeries raw;
  std::vector<Window> bursts;
  std::vector<Window> disturbances;  // drift and vibration windows combined
};

struct TraceLayout {
  double duration_s = 24.0;
  double fs_hz = 1000.0;
  std::vector<Window> bursts{{4.0, 4.15}, {10.0, 10.12}, {16.0, 16.10}};
  std::vector<Window> drift{{6.0, 8.0}, {20.5, 22.5}};
  std::vector<Window> vibration{{12.5, 14.5}, {18.0, 19.5}};
  double slip_velocity_mm_s = 12.0;
  double normal_force_n = 3.0;
  double taper_s = 0.08;  // slips decelerate instead of stopping dead
  std::uint64_t seed = 99;
};

inline LabeledTrace make_labeled_trace(const TraceLayout& layout = TraceLayout{}) {
  SensorSimParams params;
  // Hard, distinct slip jerks for the regression picture: the rectified
  // component dominates and the vibration band sits above the filter
  // corner, so each burst maps onto one clean power lobe.
  params.burst_offset = 0.3;
  params.burst_band_low_hz = 150.0;
  params.burst_band_high_hz = 450.0;
  SensorSim sim(params, layout.fs_hz, layout.seed);

  const long n = std::lround(layout.duration_s * layout.fs_hz);
  Eigen::ArrayXd samples(n);
  auto in_any = [](const std::vector<Window>& windows, double t) {
    for (const Window& w : windows) {
      if (w.contains(t)) return true;
    }
    return false;
  };
  // Slip speed ramps out toward the window end; a hard stop would put an
  // equal-and-opposite swing through the integrator.
  auto slip_speed = [&](double t) {
    for (const Window& w : layout.bursts) {
      if (!w.contains(t)) continue;
      const double fade = std::min(1.0, (w.end_s - t) / layout.taper_s);
      return layout.slip_velocity_mm_s * fade;
    }
    return 0.0;
  };
  for (long k = 0; k < n; ++k) {
    const double t = k / layout.fs_hz;
    const double v = slip_speed(t);
    samples[k] = sim.pvdf_sample(v, v > 0.0 ? layout.normal_force_n : 0.0,
                                 in_any(layout.drift, t), in_any(layout.vibration, t), t);
  }

  LabeledTrace trace;
  trace.raw = TimeSeries(0.0, 1.0 / layout.fs_hz, std::move(samples), SignalUnit::kVolts);
  trace.bursts = layout.bursts;
  for (const Window& w : layout.drift) trace.disturbances.push_back(w);
  for (const Window& w : layout.vibration) trace.disturbances.push_back(w);
  return trace;
}

}  // namespace slipgrip::testing
