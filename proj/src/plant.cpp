#include "slipgrip/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace slipgrip {

namespace {
constexpr double kGravity = 9.81;          // m/s^2
constexpr double kContactEpsN = 1e-3;      // sensor "touch" threshold
constexpr double kDegPerRad = 180.0 / std::numbers::pi;
}  // namespace

void CableParams::validate() const {
  if (!(youngs_modulus_n_mm2 > 0.0) || !(cross_section_mm2 > 0.0) || !(free_length_mm > 0.0)) {
    throw std::invalid_argument("CableParams: modulus, area and length must be positive");
  }
}

void HandParams::validate() const {
  cable.validate();
  if (!(pulley_radius_mm > 0.0) || !(takeup_radius_mm > 0.0)) {
    throw std::invalid_argument("HandParams: pulley/takeup radii must be positive");
  }
  if (!(band_stiffness_nmm_deg > 0.0) || band_preload_nmm < 0.0 ||
      !(preload_smoothing_deg > 0.0)) {
    throw std::invalid_argument("HandParams: elastic band parameters out of range");
  }
  if (!(rest_angle_deg >= 0.0) || !(max_angle_deg > rest_angle_deg)) {
    throw std::invalid_argument("HandParams: angle range out of order");
  }
  if (!(slider_max_mm > 0.0) || !(stall_force_n > 0.0)) {
    throw std::invalid_argument("HandParams: slider range and stall force must be positive");
  }
  if (!(slider_damping_ns_mm > 0.0) || !(finger_damping_nmms_deg > 0.0)) {
    throw std::invalid_argument("HandParams: damping must be positive");
  }
  if (!(contact_stiffness_n_deg > 0.0) || !(contact_arm_mm > 0.0)) {
    throw std::invalid_argument("HandParams: contact stiffness/arm must be positive");
  }
}

void SensorSimParams::validate() const {
  pvdf.validate();
  if (burst_gain < 0.0 || burst_offset < 0.0 || drift_amplitude_v < 0.0 ||
      vibration_rms_v < 0.0 || bend_noise_deg < 0.0) {
    throw std::invalid_argument("SensorSimParams: amplitudes must be non-negative");
  }
  if (!(burst_band_low_hz > 0.0) || !(burst_band_high_hz > burst_band_low_hz)) {
    throw std::invalid_argument("SensorSimParams: burst band out of order");
  }
  if (!(vibration_band_low_hz > 0.0) || !(vibration_band_high_hz > vibration_band_low_hz)) {
    throw std::invalid_argument("SensorSimParams: vibration band out of order");
  }
  if (!(drift_freq_hz > 0.0)) {
    throw std::invalid_argument("SensorSimParams: drift frequency must be positive");
  }
  if (!(output_clip_v > 0.0) || !(burst_amplitude_max_v > 0.0)) {
    throw std::invalid_argument("SensorSimParams: clip levels must be positive");
  }
}

BandNoise::BandNoise(double low_hz, double high_hz, double fs_hz) {
  if (!(low_hz > 0.0) || !(high_hz > low_hz) || !(high_hz < 0.5 * fs_hz)) {
    throw std::invalid_argument("BandNoise: band must satisfy 0 < lo < hi < fs/2");
  }
  const double f0 = std::sqrt(low_hz * high_hz);
  const double q = f0 / (high_hz - low_hz);
  const double w0 = 2.0 * std::numbers::pi * f0 / fs_hz;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  b0_ = alpha / a0;
  b1_ = 0.0;
  b2_ = -alpha / a0;
  a1_ = -2.0 * std::cos(w0) / a0;
  a2_ = (1.0 - alpha) / a0;

  // Normalize so unit-variance white input yields unit-RMS output.
  double s1 = 0.0, s2 = 0.0, npg = 0.0;
  for (int n = 0; n < 8192; ++n) {
    const double x = (n == 0) ? 1.0 : 0.0;
    const double y = b0_ * x + s1;
    s1 = b1_ * x - a1_ * y + s2;
    s2 = b2_ * x - a2_ * y;
    npg += y * y;
  }
  scale_ = npg > 0.0 ? 1.0 / std::sqrt(npg) : 1.0;
}

double BandNoise::step(Rng& rng) {
  const double x = rng.gaussian();
  const double y = b0_ * x + s1_;
  s1_ = b1_ * x - a1_ * y + s2_;
  s2_ = b2_ * x - a2_ * y;
  return scale_ * y;
}

SensorSim::SensorSim(const SensorSimParams& params, double fs_hz, std::uint64_t seed)
    : params_(params),
      burst_noise_(params.burst_band_low_hz, params.burst_band_high_hz, fs_hz),
      vibration_noise_(params.vibration_band_low_hz, params.vibration_band_high_hz, fs_hz),
      rng_(seed) {
  params.validate();
}

double SensorSim::pvdf_sample(double slip_velocity_mm_s, double normal_force_n, bool drift_on,
                              bool vibration_on, double t_s) {
  // Both noise generators advance every sample so disturbance windows do not
  // shift the random stream and the bandpass states stay warm.
  const double burst = burst_noise_.step(rng_);
  const double vibration = vibration_noise_.step(rng_);
  const double floor = rng_.uniform(-params_.pvdf.noise_floor_v, params_.pvdf.noise_floor_v);

  const double drive = params_.burst_gain * slip_velocity_mm_s * normal_force_n;
  const double amplitude =
      params_.burst_amplitude_max_v * std::tanh(drive / params_.burst_amplitude_max_v);
  double v = amplitude * (params_.burst_offset + burst) + floor;
  if (drift_on) {
    v += params_.drift_amplitude_v * std::sin(2.0 * std::numbers::pi * params_.drift_freq_hz * t_s);
  }
  if (vibration_on) {
    v += params_.vibration_rms_v * vibration;
  }
  return std::clamp(v, -params_.output_clip_v, params_.output_clip_v);
}

double SensorSim::bend_sample(double little_finger_deg) {
  return -little_finger_deg + params_.bend_noise_deg * rng_.gaussian();
}

HandPlant::HandPlant(const HandParams& params, std::optional<ObjectState> object)
    : params_(params), object_(std::move(object)) {
  params_.validate();
  state_.finger_deg.setConstant(params_.rest_angle_deg);
  state_.cable_tension_n.setZero();
  state_.contact_normal_n.setZero();
}

void HandPlant::release_object() {
  if (object_) {
    object_->released = true;
    object_->normal_force_n = 0.0;
    object_->tangential_load_n = 0.0;
    object_->slip_velocity_mm_s = 0.0;
  }
}

void HandPlant::add_mass(double kg) {
  if (object_) object_->mass_kg += kg;
}

void HandPlant::set_external_tangential(double newtons) {
  if (object_) object_->external_tangential_n = newtons;
}

void HandPlant::step(double duty, double dt) {
  if (!(dt > 0.0) || dt > 0.010 + 1e-12) {
    throw std::invalid_argument("HandPlant: dt must be in (0, 10 ms]");
  }
  if (std::abs(duty) > 0.85 + 1e-9) {
    throw std::invalid_argument("HandPlant: duty must be within [-0.85, 0.85]");
  }

  const double takeup_mm_deg = params_.takeup_radius_mm / kDegPerRad;
  const double k_cable = params_.cable.stiffness_n_per_mm();
  const bool object_coupled = object_ && !object_->released;

  // Cable tensions and contact loads from the current geometry.
  for (int i = 0; i < kNumFingers; ++i) {
    const double bend = state_.finger_deg[i] - params_.rest_angle_deg;
    const double stretch = state_.slider_mm - takeup_mm_deg * bend;
    state_.cable_tension_n[i] = std::max(0.0, k_cable * stretch);
    double normal = 0.0;
    if (object_coupled) {
      const double penetration = state_.finger_deg[i] - object_->contact_angle_deg;
      normal = std::max(0.0, params_.contact_stiffness_n_deg * penetration);
    }
    state_.contact_normal_n[i] = normal;
  }
  state_.contact = state_.contact_normal_n[static_cast<int>(Finger::kIndex)] > kContactEpsN;

  // Finger joints: overdamped torque balance. The convergence measure is
  // the realized state change, so coordinates parked at a travel limit
  // count as settled.
  max_rate_ = 0.0;
  for (int i = 0; i < kNumFingers; ++i) {
    if (blocked_[i]) {
      state_.finger_deg[i] = params_.rest_angle_deg;
      continue;
    }
    const double bend = state_.finger_deg[i] - params_.rest_angle_deg;
    const double tau_cable = state_.cable_tension_n[i] * params_.pulley_radius_mm;
    const double tau_band = params_.band_stiffness_nmm_deg * bend +
                            params_.band_preload_nmm *
                                std::tanh(bend / params_.preload_smoothing_deg);
    const double tau_contact = state_.contact_normal_n[i] * params_.contact_arm_mm;
    const double rate = (tau_cable - tau_band - tau_contact) / params_.finger_damping_nmms_deg;
    const double next =
        std::clamp(state_.finger_deg[i] + rate * dt, 0.0, params_.max_angle_deg);
    max_rate_ = std::max(max_rate_, std::abs(next - state_.finger_deg[i]) / dt);
    state_.finger_deg[i] = next;
  }

  // Slider: motor force against the summed cable pull.
  const double motor_force =
      direct_force_n_ ? *direct_force_n_ : duty * params_.stall_force_n;
  const double slider_rate =
      (motor_force - state_.cable_tension_n.sum()) / params_.slider_damping_ns_mm;
  const double next_slider =
      std::clamp(state_.slider_mm + slider_rate * dt, 0.0, params_.slider_max_mm);
  max_rate_ = std::max(max_rate_, std::abs(next_slider - state_.slider_mm) / dt);
  state_.slider_mm = next_slider;

  // Object stick-slip.
  if (object_coupled) {
    const double total_normal = state_.contact_normal_n.sum();
    if (!engaged_ && total_normal > kContactEpsN) engaged_ = true;
    const double weight = object_->mass_kg * kGravity + object_->external_tangential_n;
    const double tangential = engaged_ ? weight : 0.0;
    const double excess = tangential - object_->friction * total_normal;
    const double v = excess > 0.0 ? excess / object_->slip_damping_ns_mm : 0.0;
    object_->normal_force_n = total_normal;
    object_->tangential_load_n = tangential;
    object_->slip_velocity_mm_s = v;
    object_->slip_displacement_mm += v * dt;
  }

  const bool object_finite =
      !object_ || (std::isfinite(object_->slip_displacement_mm) &&
                   std::isfinite(object_->slip_velocity_mm_s) &&
                   std::isfinite(object_->normal_force_n));
  if (!state_.finger_deg.allFinite() || !std::isfinite(state_.slider_mm) || !object_finite) {
    std::ostringstream msg;
    msg << "HandPlant: state diverged (slider=" << state_.slider_mm
        << " mm, fingers=" << state_.finger_deg.transpose() << " deg";
    if (object_) msg << ", slip=" << object_->slip_displacement_mm << " mm";
    msg << ")";
    throw std::runtime_error(msg.str());
  }
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) {
    throw std::invalid_argument("log_spaced: need 0 < lo < hi and count >= 2");
  }
  std::vector<double> values(count);
  const double ratio = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) values[i] = lo * std::exp(ratio * i);
  values.back() = hi;
  return values;
}

std::vector<SweepRow> adaptive_sweep(const std::vector<double>& youngs_moduli,
                                     const HandParams& base, const SweepSettings& settings) {
  std::vector<SweepRow> rows;
  rows.reserve(youngs_moduli.size());
  const int settle_steps = std::max(1, static_cast<int>(settings.settle_window_s / settings.dt));
  const long max_steps = static_cast<long>(settings.max_sim_time_s / settings.dt);

  for (double modulus : youngs_moduli) {
    HandParams params = base;
    params.cable.youngs_modulus_n_mm2 = modulus;
    HandPlant plant(params, std::nullopt);
    plant.block_finger(settings.blocked);
    plant.set_direct_force(settings.actuation_force_n);

    int quiet = 0;
    bool converged = false;
    for (long k = 0; k < max_steps; ++k) {
      plant.step(0.0, settings.dt);
      quiet = plant.max_rate() < settings.rate_tolerance ? quiet + 1 : 0;
      if (quiet >= settle_steps) {
        converged = true;
        break;
      }
    }

    SweepRow row;
    row.youngs_modulus_n_mm2 = modulus;
    row.index_bend_deg = plant.finger_deg(Finger::kIndex) - params.rest_angle_deg;
    row.slider_travel_mm = plant.state().slider_mm;
    row.converged = converged;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace slipgrip
