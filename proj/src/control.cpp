#include "slipgrip/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slipgrip {

void GraspIntegratorConfig::validate() const {
  if (!(ki > 0.0) || !std::isfinite(ki)) {
    throw std::invalid_argument("GraspIntegratorConfig: ki must be positive");
  }
  if (!(saturation > 0.0) || saturation > 1.0) {
    throw std::invalid_argument("GraspIntegratorConfig: saturation must be in (0, 1]");
  }
  if (pre_contact_duty < 0.0 || pre_contact_duty > saturation) {
    throw std::invalid_argument(
        "GraspIntegratorConfig: pre-contact duty must be in [0, saturation]");
  }
}

GraspIntegrator::GraspIntegrator(const GraspIntegratorConfig& config) : config_(config) {
  config_.validate();
}

double GraspIntegrator::step(bool slip_active, double power, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("GraspIntegrator: dt must be positive");
  }
  if (!std::isfinite(power) || power < 0.0) {
    throw std::invalid_argument("GraspIntegrator: power must be finite and >= 0");
  }
  if (slip_active) {
    duty_ = std::clamp(duty_ + config_.ki * power * dt, 0.0, config_.saturation);
  }
  return duty_;
}

void ExtensionPiConfig::validate() const {
  if (!(kp >= 0.0) || !(ki >= 0.0) || !(kp + ki > 0.0)) {
    throw std::invalid_argument("ExtensionPiConfig: gains must be non-negative, not both zero");
  }
  if (!(deadband_halfwidth_deg >= 0.0)) {
    throw std::invalid_argument("ExtensionPiConfig: deadband halfwidth must be >= 0");
  }
  if (!(limit > 0.0) || limit > 1.0) {
    throw std::invalid_argument("ExtensionPiConfig: limit must be in (0, 1]");
  }
  if (!std::isfinite(reference_deg)) {
    throw std::invalid_argument("ExtensionPiConfig: reference must be finite");
  }
}

ExtensionPi::ExtensionPi(const ExtensionPiConfig& config) : config_(config) {
  config_.validate();
}

bool ExtensionPi::within_deadband(double angle_deg) const {
  return std::abs(error(angle_deg)) <= config_.deadband_halfwidth_deg;
}

double ExtensionPi::step(double angle_deg, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("ExtensionPi: dt must be positive");
  }
  const double e = error(angle_deg);
  if (std::abs(e) <= config_.deadband_halfwidth_deg) {
    return 0.0;  // integrator frozen inside the deadband
  }
  // Shift the error by the deadband halfwidth so the proportional term goes
  // to zero at the boundary instead of jumping.
  const double e_eff = e - std::copysign(config_.deadband_halfwidth_deg, e);
  const double unclamped = -(config_.kp * e_eff + integrator_ + config_.ki * e_eff * dt);
  const double command = std::clamp(unclamped, -config_.limit, config_.limit);
  if (command == unclamped) {
    integrator_ += config_.ki * e_eff * dt;  // conditional integration anti-windup
  }
  return command;
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kIdle:
      return "idle";
    case Mode::kClosing:
      return "closing";
    case Mode::kHolding:
      return "holding";
    case Mode::kReleasing:
      return "releasing";
  }
  return "idle";
}

ModeMachine::Step ModeMachine::advance(bool toggle_grasp, bool contact, bool at_reference) {
  bool entered_holding = false;
  bool entered_releasing = false;
  switch (mode_) {
    case Mode::kIdle:
      if (toggle_grasp) {
        mode_ = Mode::kClosing;
        contact_latched_ = false;
      }
      break;
    case Mode::kClosing:
      if (contact) {
        contact_latched_ = true;
        mode_ = Mode::kHolding;
        entered_holding = true;
      }
      break;
    case Mode::kHolding:
      if (!toggle_grasp) {
        mode_ = Mode::kReleasing;
        entered_releasing = true;
      }
      break;
    case Mode::kReleasing:
      if (at_reference) {
        mode_ = Mode::kIdle;
        contact_latched_ = false;
      }
      break;
  }
  return Step{mode_, entered_holding, entered_releasing};
}

ControllerBank::Output ControllerBank::step(const Inputs& in, double dt) {
  const bool at_reference = extension_.within_deadband(in.bend_deg);
  const ModeMachine::Step s = machine_.advance(in.toggle_grasp, in.contact, at_reference);
  if (s.entered_holding) {
    grasp_.seed_from_precontact();
  }
  if (s.entered_releasing) {
    grasp_.reset();
    extension_.reset();
  }

  Output out;
  out.mode = s.mode;
  switch (s.mode) {
    case Mode::kIdle:
      out.duty = 0.0;
      break;
    case Mode::kClosing:
      out.duty = grasp_.config().pre_contact_duty;
      break;
    case Mode::kHolding:
      out.duty = grasp_.step(in.slip_active, in.power, dt);
      break;
    case Mode::kReleasing:
      out.duty = extension_.step(in.bend_deg, dt);
      break;
  }
  return out;
}

}  // namespace slipgrip
