#pragma once

#include <array>
#include <optional>
#include <vector>

#include "slipgrip/pvdf.hpp"
#include "slipgrip/rng.hpp"
#include "slipgrip/time_series.hpp"

namespace slipgrip {

inline constexpr int kNumFingers = 5;
enum class Finger { kIndex = 0, kMiddle = 1, kRing = 2, kLittle = 3, kThumb = 4 };

// Actuation cable material/geometry. Axial stiffness is E*A/L in N/mm.
struct CableParams {
  double youngs_modulus_n_mm2 = 2500.0;  // nylon monofilament
  double cross_section_mm2 = 0.153;      // ~0.44 mm line
  double free_length_mm = 250.0;         // routed up the finger and back to the lever

  double stiffness_n_per_mm() const {
    return youngs_modulus_n_mm2 * cross_section_mm2 / free_length_mm;
  }
  void validate() const;
};

// Lumped mechanics of the single-actuated, cable-driven hand. Each finger is
// one aggregate joint pulled by an elastic cable from the palm slider and
// returned by a preloaded elastic band. The slider and joints follow
// overdamped first-order dynamics toward the quasi-static force balance.
struct HandParams {
  CableParams cable{};
  double pulley_radius_mm = 10.0;    // cable torque arm about the joint
  double takeup_radius_mm = 8.0;     // cable length consumed per unit flexion
  double band_stiffness_nmm_deg = 0.2;
  double band_preload_nmm = 15.0;    // breakaway torque of the elastic band
  double preload_smoothing_deg = 1.5;
  double rest_angle_deg = 20.0;      // slight curl held by the bands
  double max_angle_deg = 95.0;
  double slider_max_mm = 25.0;
  double stall_force_n = 58.0;       // motor force at full duty
  double slider_damping_ns_mm = 0.1;
  double finger_damping_nmms_deg = 0.5;
  double contact_stiffness_n_deg = 2.0;  // object compliance seen by a fingertip
  double contact_arm_mm = 40.0;          // fingertip moment arm of the contact force

  void validate() const;
};

// Grasped object with Coulomb stick-slip at the contact: it slides only
// while the tangential load exceeds mu times the total normal force.
struct ObjectState {
  double mass_kg = 0.05;
  double friction = 0.9;
  double normal_force_n = 0.0;
  double tangential_load_n = 0.0;  // weight plus any external tangential force
  double slip_displacement_mm = 0.0;
  double slip_velocity_mm_s = 0.0;
  double external_tangential_n = 0.0;
  double contact_angle_deg = 40.0;  // finger flexion at which the object is touched
  double slip_damping_ns_mm = 0.3;
  bool released = false;
};

struct HandPlantState {
  double slider_mm = 0.0;
  Eigen::Array<double, kNumFingers, 1> finger_deg;
  Eigen::Array<double, kNumFingers, 1> cable_tension_n;
  Eigen::Array<double, kNumFingers, 1> contact_normal_n;
  bool contact = false;  // sensor finger (index) touching the object
};

// Synthetic sensor front-end. The piezo strip sees band-limited vibration
// whose amplitude scales with slip speed and contact pressure, plus a
// rectified component from the contact-force relaxation during slip; cable
// drift and desk vibration can be injected as disturbances.
struct SensorSimParams {
  PvdfParams pvdf{};
  double burst_gain = 25.0;  // V per (mm/s * N)
  double burst_band_low_hz = 50.0;
  double burst_band_high_hz = 400.0;
  double burst_offset = 0.10;  // rectified fraction of the burst amplitude
  double burst_amplitude_max_v = 5.0;  // vibration amplitude saturates at strong slips
  double output_clip_v = 10.0;  // acquisition rail; the raw sample is clamped here
  double drift_amplitude_v = 0.25;
  double drift_freq_hz = 0.3;
  double vibration_rms_v = 0.8;
  double vibration_band_low_hz = 30.0;
  double vibration_band_high_hz = 80.0;
  double bend_noise_deg = 0.2;

  void validate() const;
};

// Band-limited unit-RMS noise: white gaussian driving a second-order
// bandpass (zero DC gain), normalized by the section's noise power gain.
class BandNoise {
 public:
  BandNoise() = default;
  BandNoise(double low_hz, double high_hz, double fs_hz);

  double step(Rng& rng);

 private:
  double b0_ = 1.0, b1_ = 0.0, b2_ = 0.0, a1_ = 0.0, a2_ = 0.0;
  double s1_ = 0.0, s2_ = 0.0;
  double scale_ = 1.0;
};

class SensorSim {
 public:
  SensorSim(const SensorSimParams& params, double fs_hz, std::uint64_t seed);

  // Raw piezo voltage for the current mechanical state.
  double pvdf_sample(double slip_velocity_mm_s, double normal_force_n, bool drift_on,
                     bool vibration_on, double t_s);
  // Bend-sensor reading: negative of the little-finger flexion plus noise.
  double bend_sample(double little_finger_deg);

  const SensorSimParams& params() const { return params_; }

 private:
  SensorSimParams params_;
  BandNoise burst_noise_;
  BandNoise vibration_noise_;
  Rng rng_;
};

class HandPlant {
 public:
  HandPlant(const HandParams& params, std::optional<ObjectState> object);

  // Advances one control period. duty in [-0.85, 0.85]; dt in (0, 10 ms].
  // Throws std::runtime_error with a diagnostic if the state goes
  // non-finite.
  void step(double duty, double dt);

  // Holds a finger at its rest angle (adaptive-grasp study) regardless of
  // cable pull.
  void block_finger(Finger f) { blocked_[static_cast<int>(f)] = true; }
  // Applies a constant slider force instead of the duty->force motor map.
  void set_direct_force(double force_n) { direct_force_n_ = force_n; }
  // Marks the grasped object as taken away; contact coupling stops and slip
  // accounting freezes.
  void release_object();

  void add_mass(double kg);
  void set_external_tangential(double newtons);

  const HandPlantState& state() const { return state_; }
  const std::optional<ObjectState>& object() const { return object_; }
  const HandParams& params() const { return params_; }
  double finger_deg(Finger f) const { return state_.finger_deg[static_cast<int>(f)]; }
  double total_normal_n() const { return state_.contact_normal_n.sum(); }
  double max_rate() const { return max_rate_; }  // convergence measure of the last step

 private:
  HandParams params_;
  HandPlantState state_;
  std::optional<ObjectState> object_;
  std::array<bool, kNumFingers> blocked_{};
  std::optional<double> direct_force_n_;
  bool engaged_ = false;  // object has been gripped at least once
  double max_rate_ = 0.0;
};

struct SweepRow {
  double youngs_modulus_n_mm2 = 0.0;
  double index_bend_deg = 0.0;
  double slider_travel_mm = 0.0;
  bool converged = false;
};

struct SweepSettings {
  double actuation_force_n = 14.0;  // constant slider force for the study
  Finger blocked = Finger::kMiddle;
  double dt = 1e-3;
  double max_sim_time_s = 120.0;
  double rate_tolerance = 2e-4;     // steady once realized rates stay below this
  double settle_window_s = 0.5;
};

// Runs the blocked-finger elasticity study: for each Young's modulus the
// plant settles to steady state under a constant actuation force with the
// chosen finger held at its rest position; records the index-finger bend
// (relative to rest) and the slider travel. Rows that fail to settle are
// flagged.
std::vector<SweepRow> adaptive_sweep(const std::vector<double>& youngs_moduli,
                                     const HandParams& base, const SweepSettings& settings);

// Log-spaced modulus grid, endpoints included.
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace slipgrip
