#pragma once

#include <string>

namespace slipgrip {

// Integral grasp controller. While a slip event is active the duty cycle is
// ramped in proportion to the power signal (the reference power is zero) and
// clamped to the saturation limit. The integrator is reset when the object
// is released.
struct GraspIntegratorConfig {
  double ki = 0.2;               // duty per (V^2 * s)
  double saturation = 0.85;      // hard duty ceiling
  double pre_contact_duty = 0.30;  // constant duty while closing onto the object

  void validate() const;
};

class GraspIntegrator {
 public:
  GraspIntegrator() : GraspIntegrator(GraspIntegratorConfig{}) {}
  explicit GraspIntegrator(const GraspIntegratorConfig& config);

  // Advances the integrator and returns the commanded duty.
  double step(bool slip_active, double power, double dt);
  // Clears the integrator (release).
  void reset() { duty_ = 0.0; }
  // Seeds the integrator with the closing duty so the command is continuous
  // when control hands over at first contact.
  void seed_from_precontact() { duty_ = config_.pre_contact_duty; }

  double duty() const { return duty_; }
  const GraspIntegratorConfig& config() const { return config_; }

 private:
  GraspIntegratorConfig config_;
  double duty_ = 0.0;
};

// PI extension controller on the bend-sensor angle with a deadband on the
// error signal. Inside the deadband the command is exactly zero and the
// integrator is frozen. Outside, the error is shifted by the deadband
// halfwidth so the proportional term is continuous at the boundary. Output
// is clamped with conditional integration as anti-windup.
struct ExtensionPiConfig {
  double kp = 0.015;                 // duty per degree
  double ki = 0.005;                 // duty per (degree * s)
  double reference_deg = -20.0;      // bend-sensor reading of the neutral posture
  double deadband_halfwidth_deg = 4.0;  // half of the 8-degree error deadband
  double limit = 0.85;

  void validate() const;
};

class ExtensionPi {
 public:
  ExtensionPi() : ExtensionPi(ExtensionPiConfig{}) {}
  explicit ExtensionPi(const ExtensionPiConfig& config);

  // Returns a signed duty; negative retracts the slider (extension).
  double step(double angle_deg, double dt);
  void reset() { integrator_ = 0.0; }

  double error(double angle_deg) const { return config_.reference_deg - angle_deg; }
  bool within_deadband(double angle_deg) const;
  double integrator() const { return integrator_; }
  const ExtensionPiConfig& config() const { return config_; }

 private:
  ExtensionPiConfig config_;
  double integrator_ = 0.0;
};

enum class Mode { kIdle, kClosing, kHolding, kReleasing };

std::string to_string(Mode mode);

// User-intent/mode state machine:
//   Idle      -> Closing   on the grasp toggle (constant closing duty)
//   Closing   -> Holding   on first contact (integral grasp control)
//   Holding   -> Releasing on the release toggle (grasp integrator reset)
//   Releasing -> Idle      once the bend angle is back within the deadband
// No other transition is accepted.
class ModeMachine {
 public:
  struct Step {
    Mode mode;
    bool entered_holding;
    bool entered_releasing;
  };

  Step advance(bool toggle_grasp, bool contact, bool at_reference);

  Mode mode() const { return mode_; }
  bool contact_latched() const { return contact_latched_; }

 private:
  Mode mode_ = Mode::kIdle;
  bool contact_latched_ = false;
};

// Bundles the mode machine with both controllers and dispatches the duty
// command per mode. Advanced at a fixed control period.
class ControllerBank {
 public:
  struct Inputs {
    bool toggle_grasp = false;  // true = grasp intent, false = release intent
    bool contact = false;
    bool slip_active = false;
    double power = 0.0;     // V^2
    double bend_deg = 0.0;  // bend-sensor reading
  };

  struct Output {
    Mode mode = Mode::kIdle;
    double duty = 0.0;  // signed; negative retracts the slider
  };

  ControllerBank() = default;
  ControllerBank(const GraspIntegratorConfig& grasp, const ExtensionPiConfig& extension)
      : grasp_(grasp), extension_(extension) {}

  Output step(const Inputs& in, double dt);

  Mode mode() const { return machine_.mode(); }
  const GraspIntegrator& grasp() const { return grasp_; }
  const ExtensionPi& extension() const { return extension_; }

 private:
  ModeMachine machine_;
  GraspIntegrator grasp_;
  ExtensionPi extension_;
};

}  // namespace slipgrip
