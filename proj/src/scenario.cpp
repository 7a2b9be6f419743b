#include "slipgrip/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "slipgrip/svg_plot.hpp"
#include "slipgrip/version.hpp"

namespace slipgrip {

using nlohmann::json;

namespace {

// Duty "steps" are maximal rises of the holding-phase duty cycle: samples
// where the duty increases, merged across pauses shorter than the gap, and
// kept only if the total rise is visible.
constexpr double kDutyStepMin = 0.02;
constexpr double kDutyStepGapS = 0.5;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

// --- strict JSON section reader with field-path diagnostics ---------------

class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) {
      throw std::invalid_argument("config: " + path_ + ": expected an object");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  double num(const std::string& key, double fallback) {
    touched_.insert(key);
    if (!node_.contains(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    touched_.insert(key);
    if (!node_.contains(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    touched_.insert(key);
    if (!node_.contains(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) fail(key, "expected true/false");
    return v.get<bool>();
  }

  std::string str(const std::string& key, const std::string& fallback) {
    touched_.insert(key);
    if (!node_.contains(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  const json* child(const std::string& key) {
    touched_.insert(key);
    if (!node_.contains(key)) return nullptr;
    return &node_.at(key);
  }

  std::string path_of(const std::string& key) const { return path_ + "/" + key; }

  // Rejects unknown keys so typos do not silently fall back to defaults.
  void finish() const {
    for (const auto& item : node_.items()) {
      if (!touched_.count(item.key())) {
        throw std::invalid_argument("config: " + path_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw std::invalid_argument("config: " + path_ + "/" + key + ": " + what);
  }

  const json& node_;
  std::string path_;
  std::set<std::string> touched_;
};

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path.string() + ": " + e.what());
  }
  return j;
}

HandParams parse_plant(const json* node, std::string path) {
  HandParams p;
  if (node == nullptr) return p;
  Section s(*node, path);
  if (const json* cable = s.child("cable")) {
    Section c(*cable, path + "/cable");
    p.cable.youngs_modulus_n_mm2 = c.num("youngs_modulus_n_mm2", p.cable.youngs_modulus_n_mm2);
    p.cable.cross_section_mm2 = c.num("cross_section_mm2", p.cable.cross_section_mm2);
    p.cable.free_length_mm = c.num("free_length_mm", p.cable.free_length_mm);
    c.finish();
  }
  p.pulley_radius_mm = s.num("pulley_radius_mm", p.pulley_radius_mm);
  p.takeup_radius_mm = s.num("takeup_radius_mm", p.takeup_radius_mm);
  p.band_stiffness_nmm_deg = s.num("band_stiffness_nmm_deg", p.band_stiffness_nmm_deg);
  p.band_preload_nmm = s.num("band_preload_nmm", p.band_preload_nmm);
  p.preload_smoothing_deg = s.num("preload_smoothing_deg", p.preload_smoothing_deg);
  p.rest_angle_deg = s.num("rest_angle_deg", p.rest_angle_deg);
  p.max_angle_deg = s.num("max_angle_deg", p.max_angle_deg);
  p.slider_max_mm = s.num("slider_max_mm", p.slider_max_mm);
  p.stall_force_n = s.num("stall_force_n", p.stall_force_n);
  p.slider_damping_ns_mm = s.num("slider_damping_ns_mm", p.slider_damping_ns_mm);
  p.finger_damping_nmms_deg = s.num("finger_damping_nmms_deg", p.finger_damping_nmms_deg);
  p.contact_stiffness_n_deg = s.num("contact_stiffness_n_deg", p.contact_stiffness_n_deg);
  p.contact_arm_mm = s.num("contact_arm_mm", p.contact_arm_mm);
  s.finish();
  return p;
}

json plant_to_json(const HandParams& p) {
  json j;
  j["cable"] = {{"youngs_modulus_n_mm2", p.cable.youngs_modulus_n_mm2},
                {"cross_section_mm2", p.cable.cross_section_mm2},
                {"free_length_mm", p.cable.free_length_mm}};
  j["pulley_radius_mm"] = p.pulley_radius_mm;
  j["takeup_radius_mm"] = p.takeup_radius_mm;
  j["band_stiffness_nmm_deg"] = p.band_stiffness_nmm_deg;
  j["band_preload_nmm"] = p.band_preload_nmm;
  j["preload_smoothing_deg"] = p.preload_smoothing_deg;
  j["rest_angle_deg"] = p.rest_angle_deg;
  j["max_angle_deg"] = p.max_angle_deg;
  j["slider_max_mm"] = p.slider_max_mm;
  j["stall_force_n"] = p.stall_force_n;
  j["slider_damping_ns_mm"] = p.slider_damping_ns_mm;
  j["finger_damping_nmms_deg"] = p.finger_damping_nmms_deg;
  j["contact_stiffness_n_deg"] = p.contact_stiffness_n_deg;
  j["contact_arm_mm"] = p.contact_arm_mm;
  return j;
}

ScenarioConfig parse_scenario(const json& root, const std::string& origin) {
  ScenarioConfig cfg;
  Section top(root, origin);

  if (const json* sc = top.child("scenario")) {
    Section s(*sc, origin + "/scenario");
    cfg.duration_s = s.num("duration_s", cfg.duration_s);
    cfg.sample_rate_hz = s.num("sample_rate_hz", cfg.sample_rate_hz);
    if (s.has("rng_seed")) {
      cfg.rng_seed = static_cast<std::uint64_t>(s.integer("rng_seed", 0));
    } else {
      s.integer("rng_seed", 0);  // mark touched
    }
    cfg.cable_drift = s.boolean("cable_drift", cfg.cable_drift);
    cfg.desk_vibration = s.boolean("desk_vibration", cfg.desk_vibration);
    if (const json* events = s.child("events")) {
      const std::string epath = origin + "/scenario/events";
      if (!events->is_array()) {
        throw std::invalid_argument("config: " + epath + ": expected an array");
      }
      int idx = 0;
      for (const json& item : *events) {
        const std::string ipath = epath + "[" + std::to_string(idx++) + "]";
        Section e(item, ipath);
        ScenarioEvent ev;
        ev.t_s = e.num("t", -1.0);
        const std::string type = e.str("type", "");
        if (type == "toggle") {
          const std::string value = e.str("value", "");
          if (value == "grasp") {
            ev.type = ScenarioEvent::Type::kToggleGrasp;
          } else if (value == "release") {
            ev.type = ScenarioEvent::Type::kToggleRelease;
          } else {
            throw std::invalid_argument("config: " + ipath +
                                        "/value: expected 'grasp' or 'release'");
          }
        } else if (type == "add_mass") {
          ev.type = ScenarioEvent::Type::kAddMass;
          ev.value = e.num("kg", 0.0);
        } else if (type == "apply_torque") {
          ev.type = ScenarioEvent::Type::kApplyTorque;
          ev.value = e.num("n_mm", 0.0);
          ev.duration_s = e.num("duration_s", 1.0);
        } else {
          throw std::invalid_argument(
              "config: " + ipath + "/type: expected toggle|add_mass|apply_torque, got '" + type +
              "'");
        }
        e.finish();
        cfg.events.push_back(ev);
      }
    }
    s.finish();
  }

  if (const json* ob = top.child("object")) {
    Section s(*ob, origin + "/object");
    cfg.object_present = s.boolean("present", cfg.object_present);
    cfg.object.mass_kg = s.num("mass_kg", cfg.object.mass_kg);
    cfg.object.friction = s.num("friction", cfg.object.friction);
    cfg.object.contact_angle_deg = s.num("contact_angle_deg", cfg.object.contact_angle_deg);
    cfg.object.slip_damping_ns_mm = s.num("slip_damping_ns_mm", cfg.object.slip_damping_ns_mm);
    cfg.object_radius_mm = s.num("radius_mm", cfg.object_radius_mm);
    cfg.drop_bound_mm = s.num("drop_bound_mm", cfg.drop_bound_mm);
    s.finish();
  }

  cfg.plant = parse_plant(top.child("plant"), origin + "/plant");

  if (const json* se = top.child("sensors")) {
    Section s(*se, origin + "/sensors");
    if (const json* pv = s.child("pvdf")) {
      Section p(*pv, origin + "/sensors/pvdf");
      cfg.sensors.pvdf.capacitance_f = p.num("capacitance_f", cfg.sensors.pvdf.capacitance_f);
      cfg.sensors.pvdf.charge_constant_c_per_n =
          p.num("charge_constant_c_per_n", cfg.sensors.pvdf.charge_constant_c_per_n);
      cfg.sensors.pvdf.noise_floor_v = p.num("noise_floor_v", cfg.sensors.pvdf.noise_floor_v);
      cfg.sensors.pvdf.leak_time_constant_s =
          p.num("leak_time_constant_s", cfg.sensors.pvdf.leak_time_constant_s);
      p.finish();
    }
    cfg.sensors.burst_gain = s.num("burst_gain", cfg.sensors.burst_gain);
    cfg.sensors.burst_band_low_hz = s.num("burst_band_low_hz", cfg.sensors.burst_band_low_hz);
    cfg.sensors.burst_band_high_hz = s.num("burst_band_high_hz", cfg.sensors.burst_band_high_hz);
    cfg.sensors.burst_offset = s.num("burst_offset", cfg.sensors.burst_offset);
    cfg.sensors.burst_amplitude_max_v =
        s.num("burst_amplitude_max_v", cfg.sensors.burst_amplitude_max_v);
    cfg.sensors.output_clip_v = s.num("output_clip_v", cfg.sensors.output_clip_v);
    cfg.sensors.drift_amplitude_v = s.num("drift_amplitude_v", cfg.sensors.drift_amplitude_v);
    cfg.sensors.drift_freq_hz = s.num("drift_freq_hz", cfg.sensors.drift_freq_hz);
    cfg.sensors.vibration_rms_v = s.num("vibration_rms_v", cfg.sensors.vibration_rms_v);
    cfg.sensors.vibration_band_low_hz =
        s.num("vibration_band_low_hz", cfg.sensors.vibration_band_low_hz);
    cfg.sensors.vibration_band_high_hz =
        s.num("vibration_band_high_hz", cfg.sensors.vibration_band_high_hz);
    cfg.sensors.bend_noise_deg = s.num("bend_noise_deg", cfg.sensors.bend_noise_deg);
    s.finish();
  }

  if (const json* si = top.child("signal")) {
    Section s(*si, origin + "/signal");
    cfg.chain.output_gain = s.num("output_gain", cfg.chain.output_gain);
    cfg.chain.dc_block = s.boolean("dc_block", cfg.chain.dc_block);
    cfg.chain.dc_block_time_constant_s =
        s.num("dc_block_time_constant_s", cfg.chain.dc_block_time_constant_s);
    s.finish();
  }

  if (const json* de = top.child("detector")) {
    Section s(*de, origin + "/detector");
    cfg.detector.high_bound = s.num("high_bound", cfg.detector.high_bound);
    cfg.detector.low_bound = s.num("low_bound", cfg.detector.low_bound);
    cfg.detector.normalization = s.num("normalization", cfg.detector.normalization);
    s.finish();
  }

  if (const json* gr = top.child("grasp")) {
    Section s(*gr, origin + "/grasp");
    cfg.grasp.ki = s.num("ki", cfg.grasp.ki);
    cfg.grasp.saturation = s.num("saturation", cfg.grasp.saturation);
    cfg.grasp.pre_contact_duty = s.num("pre_contact_duty", cfg.grasp.pre_contact_duty);
    s.finish();
  }

  if (const json* ex = top.child("extension")) {
    Section s(*ex, origin + "/extension");
    cfg.extension.kp = s.num("kp", cfg.extension.kp);
    cfg.extension.ki = s.num("ki", cfg.extension.ki);
    cfg.extension.reference_deg = s.num("reference_deg", cfg.extension.reference_deg);
    cfg.extension.deadband_halfwidth_deg =
        s.num("deadband_halfwidth_deg", cfg.extension.deadband_halfwidth_deg);
    cfg.extension.limit = s.num("limit", cfg.extension.limit);
    s.finish();
  }

  if (const json* xp = top.child("expect")) {
    Section s(*xp, origin + "/expect");
    if (s.has("min_duty_steps")) cfg.expect.min_duty_steps = s.integer("min_duty_steps", 0);
    else s.integer("min_duty_steps", 0);
    if (s.has("max_slip_mm")) cfg.expect.max_slip_mm = s.num("max_slip_mm", 0.0);
    else s.num("max_slip_mm", 0.0);
    if (s.has("final_bend_within_deadband")) {
      cfg.expect.final_bend_within_deadband = s.boolean("final_bend_within_deadband", false);
    } else {
      s.boolean("final_bend_within_deadband", false);
    }
    if (s.has("max_events")) cfg.expect.max_events = s.integer("max_events", 0);
    else s.integer("max_events", 0);
    if (s.has("max_abs_duty")) cfg.expect.max_abs_duty = s.num("max_abs_duty", 0.0);
    else s.num("max_abs_duty", 0.0);
    s.finish();
  }

  top.finish();
  return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  json& sc = j["scenario"];
  sc["duration_s"] = cfg.duration_s;
  sc["sample_rate_hz"] = cfg.sample_rate_hz;
  if (cfg.rng_seed) sc["rng_seed"] = *cfg.rng_seed;
  sc["cable_drift"] = cfg.cable_drift;
  sc["desk_vibration"] = cfg.desk_vibration;
  sc["events"] = json::array();
  for (const ScenarioEvent& ev : cfg.events) {
    json e;
    e["t"] = ev.t_s;
    switch (ev.type) {
      case ScenarioEvent::Type::kToggleGrasp:
        e["type"] = "toggle";
        e["value"] = "grasp";
        break;
      case ScenarioEvent::Type::kToggleRelease:
        e["type"] = "toggle";
        e["value"] = "release";
        break;
      case ScenarioEvent::Type::kAddMass:
        e["type"] = "add_mass";
        e["kg"] = ev.value;
        break;
      case ScenarioEvent::Type::kApplyTorque:
        e["type"] = "apply_torque";
        e["n_mm"] = ev.value;
        e["duration_s"] = ev.duration_s;
        break;
    }
    sc["events"].push_back(e);
  }

  j["object"] = {{"present", cfg.object_present},
                 {"mass_kg", cfg.object.mass_kg},
                 {"friction", cfg.object.friction},
                 {"contact_angle_deg", cfg.object.contact_angle_deg},
                 {"slip_damping_ns_mm", cfg.object.slip_damping_ns_mm},
                 {"radius_mm", cfg.object_radius_mm},
                 {"drop_bound_mm", cfg.drop_bound_mm}};
  j["plant"] = plant_to_json(cfg.plant);
  j["sensors"] = {{"pvdf",
                   {{"capacitance_f", cfg.sensors.pvdf.capacitance_f},
                    {"charge_constant_c_per_n", cfg.sensors.pvdf.charge_constant_c_per_n},
                    {"noise_floor_v", cfg.sensors.pvdf.noise_floor_v},
                    {"leak_time_constant_s", cfg.sensors.pvdf.leak_time_constant_s}}},
                  {"burst_gain", cfg.sensors.burst_gain},
                  {"burst_band_low_hz", cfg.sensors.burst_band_low_hz},
                  {"burst_band_high_hz", cfg.sensors.burst_band_high_hz},
                  {"burst_offset", cfg.sensors.burst_offset},
                  {"burst_amplitude_max_v", cfg.sensors.burst_amplitude_max_v},
                  {"output_clip_v", cfg.sensors.output_clip_v},
                  {"drift_amplitude_v", cfg.sensors.drift_amplitude_v},
                  {"drift_freq_hz", cfg.sensors.drift_freq_hz},
                  {"vibration_rms_v", cfg.sensors.vibration_rms_v},
                  {"vibration_band_low_hz", cfg.sensors.vibration_band_low_hz},
                  {"vibration_band_high_hz", cfg.sensors.vibration_band_high_hz},
                  {"bend_noise_deg", cfg.sensors.bend_noise_deg}};
  j["signal"] = {{"output_gain", cfg.chain.output_gain},
                 {"dc_block", cfg.chain.dc_block},
                 {"dc_block_time_constant_s", cfg.chain.dc_block_time_constant_s}};
  j["detector"] = {{"high_bound", cfg.detector.high_bound},
                   {"low_bound", cfg.detector.low_bound},
                   {"normalization", cfg.detector.normalization}};
  j["grasp"] = {{"ki", cfg.grasp.ki},
                {"saturation", cfg.grasp.saturation},
                {"pre_contact_duty", cfg.grasp.pre_contact_duty}};
  j["extension"] = {{"kp", cfg.extension.kp},
                    {"ki", cfg.extension.ki},
                    {"reference_deg", cfg.extension.reference_deg},
                    {"deadband_halfwidth_deg", cfg.extension.deadband_halfwidth_deg},
                    {"limit", cfg.extension.limit}};
  json expect = json::object();
  if (cfg.expect.min_duty_steps) expect["min_duty_steps"] = *cfg.expect.min_duty_steps;
  if (cfg.expect.max_slip_mm) expect["max_slip_mm"] = *cfg.expect.max_slip_mm;
  if (cfg.expect.final_bend_within_deadband) {
    expect["final_bend_within_deadband"] = *cfg.expect.final_bend_within_deadband;
  }
  if (cfg.expect.max_events) expect["max_events"] = *cfg.expect.max_events;
  if (cfg.expect.max_abs_duty) expect["max_abs_duty"] = *cfg.expect.max_abs_duty;
  j["expect"] = expect;
  return j;
}

std::vector<DutyStep> find_duty_steps(const std::vector<double>& t,
                                      const std::vector<double>& duty,
                                      const std::vector<std::string>& mode) {
  std::vector<DutyStep> steps;
  bool open = false;
  bool have_prev = false;
  double prev_duty = 0.0, base = 0.0, peak = 0.0, start_t = 0.0, last_rise_t = 0.0;

  auto close = [&]() {
    if (open && peak - base >= kDutyStepMin) {
      steps.push_back(DutyStep{start_t, peak - base});
    }
    open = false;
  };

  for (std::size_t k = 0; k < t.size(); ++k) {
    if (mode[k] != "holding") {
      close();
      have_prev = false;
      continue;
    }
    if (!have_prev) {
      prev_duty = duty[k];
      have_prev = true;
      continue;
    }
    if (duty[k] > prev_duty + 1e-12) {
      if (!open) {
        open = true;
        base = prev_duty;
        start_t = t[k];
      }
      peak = duty[k];
      last_rise_t = t[k];
    } else if (open && t[k] - last_rise_t > kDutyStepGapS) {
      close();
    }
    prev_duty = duty[k];
  }
  close();
  return steps;
}

std::vector<CheckResult> evaluate_checks(const ScenarioConfig& cfg, const RunReport& report) {
  std::vector<CheckResult> checks;
  std::ostringstream detail;
  if (cfg.expect.min_duty_steps) {
    const int n = static_cast<int>(report.duty_steps.size());
    detail.str("");
    detail << n << " duty step(s), need >= " << *cfg.expect.min_duty_steps;
    checks.push_back({"min_duty_steps", n >= *cfg.expect.min_duty_steps, detail.str()});
  }
  if (cfg.expect.max_slip_mm) {
    detail.str("");
    detail << "max slip " << report.max_slip_mm << " mm, bound " << *cfg.expect.max_slip_mm;
    checks.push_back(
        {"max_slip_mm", report.max_slip_mm <= *cfg.expect.max_slip_mm + 1e-12, detail.str()});
  }
  if (cfg.expect.final_bend_within_deadband && *cfg.expect.final_bend_within_deadband) {
    const double err = std::abs(report.final_bend_deg - cfg.extension.reference_deg);
    detail.str("");
    detail << "final bend " << report.final_bend_deg << " deg, reference "
           << cfg.extension.reference_deg << " +/- " << cfg.extension.deadband_halfwidth_deg;
    checks.push_back({"final_bend_within_deadband",
                      err <= cfg.extension.deadband_halfwidth_deg, detail.str()});
  }
  if (cfg.expect.max_events) {
    const int n = static_cast<int>(report.events.size());
    detail.str("");
    detail << n << " event(s), allowed <= " << *cfg.expect.max_events;
    checks.push_back({"max_events", n <= *cfg.expect.max_events, detail.str()});
  }
  if (cfg.expect.max_abs_duty) {
    detail.str("");
    detail << "max |duty| " << report.max_abs_duty << ", allowed " << *cfg.expect.max_abs_duty;
    checks.push_back(
        {"max_abs_duty", report.max_abs_duty <= *cfg.expect.max_abs_duty + 1e-12, detail.str()});
  }
  return checks;
}

json report_to_json(const RunReport& report) {
  json j;
  j["events"] = json::array();
  for (const SlipEvent& e : report.events) {
    j["events"].push_back(
        {{"onset_s", e.onset_s}, {"end_s", e.end_s}, {"peak_power", e.peak_power}});
  }
  j["duty_steps"] = json::array();
  for (const DutyStep& s : report.duty_steps) {
    j["duty_steps"].push_back({{"t_s", s.t_s}, {"magnitude", s.magnitude}});
  }
  j["max_slip_mm"] = report.max_slip_mm;
  j["final_bend_deg"] = report.final_bend_deg;
  j["max_abs_duty"] = report.max_abs_duty;
  j["checks"] = json::array();
  for (const CheckResult& c : report.checks) {
    j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  j["pass"] = report.pass();
  return j;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name, const std::filesystem::path& origin) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw std::runtime_error(origin.string() + ": missing column '" + name + "'");
  }
};

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  Table table;
  std::string line;
  auto split = [](const std::string& text) {
    std::vector<std::string> fields;
    std::stringstream row(text);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    return fields;
  };
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    table.rows.push_back(split(line));
  }
  return table;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(duration_s > 0.0)) {
    throw std::invalid_argument("config: /scenario/duration_s: must be positive");
  }
  if (!(sample_rate_hz >= kMinFilterSampleRateHz)) {
    throw std::invalid_argument("config: /scenario/sample_rate_hz: must be >= 200");
  }
  if (!rng_seed) {
    throw std::invalid_argument("config: /scenario/rng_seed: required for simulation runs");
  }
  double prev_t = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const ScenarioEvent& ev = events[i];
    const std::string path = "/scenario/events[" + std::to_string(i) + "]";
    if (ev.t_s < 0.0 || ev.t_s > duration_s) {
      throw std::invalid_argument("config: " + path + "/t: outside [0, duration]");
    }
    if (ev.t_s < prev_t) {
      throw std::invalid_argument("config: " + path + "/t: events must be time-ordered");
    }
    prev_t = ev.t_s;
  }
  plant.validate();
  sensors.validate();
  chain.validate();
  detector.validate();
  grasp.validate();
  extension.validate();
  if (object_present) {
    if (!(object.mass_kg >= 0.0) || !(object.friction > 0.0)) {
      throw std::invalid_argument("config: /object: mass must be >= 0 and friction > 0");
    }
    if (!(object.slip_damping_ns_mm > 0.0) || !(object_radius_mm > 0.0)) {
      throw std::invalid_argument("config: /object: damping and radius must be positive");
    }
  }
}

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  return parse_scenario(load_json_file(path), "");
}

std::string scenario_config_json(const ScenarioConfig& config) {
  return scenario_to_json(config).dump(2);
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

RunReport run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                       bool write_plot) {
  config.validate();
  std::filesystem::create_directories(out_dir);

  const double dt = 1.0 / config.sample_rate_hz;
  const long n = std::lround(config.duration_s * config.sample_rate_hz);

  HandPlant plant(config.plant,
                  config.object_present ? std::optional<ObjectState>(config.object) : std::nullopt);
  SensorSim sensors(config.sensors, config.sample_rate_hz, *config.rng_seed);
  SignalChain chain(config.sample_rate_hz, config.chain);
  HysteresisDetector detector(config.detector);
  ControllerBank bank(config.grasp, config.extension);

  std::vector<double> t_rows, raw_rows, filtered_rows, power_rows, duty_rows, bend_rows;
  std::vector<std::string> mode_rows;
  std::vector<int> slip_rows;
  t_rows.reserve(n);

  std::ofstream plant_csv = open_out(out_dir / "plant_trace.csv");
  plant_csv << "t,slider_mm,index_deg,middle_deg,ring_deg,little_deg,thumb_deg,normal_N,slip_mm,"
               "pvdf_raw_V\n";

  bool toggle = false;
  std::size_t next_event = 0;
  double torque_end = -1.0;
  Mode prev_mode = Mode::kIdle;
  double max_slip = 0.0;
  double max_abs_duty = 0.0;
  char line[256];
  std::string fault;

  for (long k = 0; k < n; ++k) {
    const double t = k * dt;

    while (next_event < config.events.size() && config.events[next_event].t_s <= t + 1e-9) {
      const ScenarioEvent& ev = config.events[next_event++];
      switch (ev.type) {
        case ScenarioEvent::Type::kToggleGrasp:
          toggle = true;
          break;
        case ScenarioEvent::Type::kToggleRelease:
          toggle = false;
          break;
        case ScenarioEvent::Type::kAddMass:
          plant.add_mass(ev.value);
          break;
        case ScenarioEvent::Type::kApplyTorque:
          plant.set_external_tangential(ev.value / config.object_radius_mm);
          torque_end = ev.t_s + ev.duration_s;
          break;
      }
    }
    if (torque_end >= 0.0 && t >= torque_end) {
      plant.set_external_tangential(0.0);
      torque_end = -1.0;
    }

    const auto& object = plant.object();
    const double slip_velocity = object ? object->slip_velocity_mm_s : 0.0;
    const double normal = object ? object->normal_force_n : 0.0;
    const double raw =
        sensors.pvdf_sample(slip_velocity, normal, config.cable_drift, config.desk_vibration, t);
    const double filtered = chain.step(raw);
    const double power = filtered * filtered;
    const bool slip = detector.step(power);
    const double bend = sensors.bend_sample(plant.finger_deg(Finger::kLittle));

    const ControllerBank::Output out =
        bank.step({toggle, plant.state().contact, slip, power, bend}, dt);
    if (out.mode == Mode::kReleasing && prev_mode != Mode::kReleasing) {
      plant.release_object();
    }
    prev_mode = out.mode;

    try {
      plant.step(out.duty, dt);
    } catch (const std::exception& e) {
      fault = e.what();  // keep the partial trace, mark the run, bail out
      break;
    }

    const double slip_mm = object ? object->slip_displacement_mm : 0.0;
    max_slip = std::max(max_slip, slip_mm);
    max_abs_duty = std::max(max_abs_duty, std::abs(out.duty));

    t_rows.push_back(t);
    raw_rows.push_back(raw);
    filtered_rows.push_back(filtered);
    power_rows.push_back(power);
    duty_rows.push_back(out.duty);
    bend_rows.push_back(bend);
    mode_rows.push_back(to_string(out.mode));
    slip_rows.push_back(slip ? 1 : 0);

    const auto& st = plant.state();
    std::snprintf(line, sizeof(line),
                  "%.6f,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", t, st.slider_mm,
                  st.finger_deg[0], st.finger_deg[1], st.finger_deg[2], st.finger_deg[3],
                  st.finger_deg[4], object ? object->normal_force_n : 0.0, slip_mm, raw);
    plant_csv << line;
  }
  plant_csv.close();

  auto as_series = [&](const std::vector<double>& rows, SignalUnit unit) {
    Eigen::ArrayXd values =
        Eigen::Map<const Eigen::ArrayXd>(rows.data(), static_cast<Eigen::Index>(rows.size()));
    return TimeSeries(0.0, dt, std::move(values), unit);
  };
  const TimeSeries raw_series = as_series(raw_rows, SignalUnit::kVolts);
  const TimeSeries filtered_series = as_series(filtered_rows, SignalUnit::kVolts);
  const TimeSeries power_series = as_series(power_rows, SignalUnit::kVoltsSquared);
  write_csv(raw_series, out_dir / "pvdf_raw.csv");
  write_csv(filtered_series, out_dir / "pvdf_filtered.csv");
  write_csv(power_series, out_dir / "power.csv");

  std::ofstream ctrl_csv = open_out(out_dir / "controller_trace.csv");
  ctrl_csv << "t,mode,duty,slip_active,power,bend_deg\n";
  for (std::size_t k = 0; k < t_rows.size(); ++k) {
    std::snprintf(line, sizeof(line), "%.6f,%s,%.12g,%d,%.12g,%.12g\n", t_rows[k],
                  mode_rows[k].c_str(), duty_rows[k], slip_rows[k], power_rows[k], bend_rows[k]);
    ctrl_csv << line;
  }
  ctrl_csv.close();

  RunReport report;
  report.events = detect_events(power_series, HysteresisDetector(config.detector));
  write_events_csv(report.events, out_dir / "events.csv");
  report.duty_steps = find_duty_steps(t_rows, duty_rows, mode_rows);
  report.max_slip_mm = max_slip;
  report.final_bend_deg = bend_rows.empty() ? 0.0 : bend_rows.back();
  report.max_abs_duty = max_abs_duty;
  report.checks = evaluate_checks(config, report);

  if (fault.empty()) {
    std::ofstream(out_dir / "report.json") << report_to_json(report).dump(2) << '\n';
  }

  const std::string config_dump = scenario_config_json(config);
  json manifest;
  manifest["tool"] = "slipgrip";
  manifest["version"] = kVersion;
  char hash_hex[24];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_dump)));
  manifest["config_hash"] = hash_hex;
  manifest["config"] = json::parse(config_dump);
  manifest["outputs"] = {"pvdf_raw.csv",   "pvdf_filtered.csv",    "power.csv",
                         "plant_trace.csv", "controller_trace.csv", "events.csv",
                         "report.json"};
  if (!fault.empty()) manifest["fault"] = fault;
  std::ofstream(out_dir / "manifest.json") << manifest.dump(2) << '\n';

  if (!fault.empty()) {
    throw std::runtime_error("simulation fault after " +
                             std::to_string(t_rows.size() ? t_rows.back() : 0.0) +
                             " s (partial traces in " + out_dir.string() + "): " + fault);
  }

  if (write_plot) {
    write_run_plot(out_dir / "plots.svg", t_rows, power_rows, duty_rows, bend_rows, report.events);
  }

  return report;
}

ProcessResult process_recording(const std::filesystem::path& csv_path,
                                const SignalChainConfig& chain_config,
                                const DetectorConfig& detector_config,
                                const std::filesystem::path& out_dir) {
  chain_config.validate();
  detector_config.validate();
  std::filesystem::create_directories(out_dir);

  const TimeSeries raw = read_csv(csv_path);
  SignalChain chain(raw.sample_rate(), chain_config);
  const TimeSeries filtered = chain.process(raw);
  const TimeSeries power = power_signal(filtered);
  const std::vector<SlipEvent> events =
      detect_events(power, HysteresisDetector(detector_config));

  const std::string stem = csv_path.stem().string();
  ProcessResult result;
  result.samples = static_cast<std::size_t>(raw.size());
  result.events = events;
  if (!events.empty()) result.first_event_s = events.front().onset_s;
  result.filtered_csv = out_dir / (stem + "_filtered.csv");
  result.power_csv = out_dir / (stem + "_power.csv");
  result.events_csv = out_dir / (stem + "_events.csv");
  write_csv(filtered, result.filtered_csv);
  write_csv(power, result.power_csv);
  write_events_csv(events, result.events_csv);
  return result;
}

void SweepConfig::validate() const {
  if (!(e_min > 0.0) || !(e_max > e_min)) {
    throw std::invalid_argument("config: /sweep: need 0 < e_min < e_max");
  }
  if (count < 2) {
    throw std::invalid_argument("config: /sweep/count: need at least 2 points");
  }
  if (!(band_travel_lo_mm > 0.0) || !(band_travel_hi_mm > band_travel_lo_mm)) {
    throw std::invalid_argument("config: /sweep: travel band out of order");
  }
  plant.validate();
}

SweepResult run_sweep(const SweepConfig& config, const std::filesystem::path& out_dir) {
  config.validate();
  std::filesystem::create_directories(out_dir);

  SweepResult result;
  result.rows = adaptive_sweep(log_spaced(config.e_min, config.e_max, config.count), config.plant,
                               config.settings);

  std::ofstream csv = open_out(out_dir / "sweep.csv");
  csv << "youngs_modulus_n_mm2,index_bend_deg,slider_travel_mm,converged\n";
  for (const SweepRow& row : result.rows) {
    csv << fmt(row.youngs_modulus_n_mm2) << ',' << fmt(row.index_bend_deg) << ','
        << fmt(row.slider_travel_mm) << ',' << (row.converged ? 1 : 0) << '\n';
    if (!row.converged) {
      result.all_converged = false;
      result.flags.push_back("row at E=" + fmt(row.youngs_modulus_n_mm2) + " did not converge");
    }
  }
  csv.close();

  // The acceptance band: contiguous grid points whose slider travel lies in
  // the target window.
  int first = -1, last = -1;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const double travel = result.rows[i].slider_travel_mm;
    if (travel >= config.band_travel_lo_mm && travel <= config.band_travel_hi_mm) {
      if (first < 0) first = static_cast<int>(i);
      last = static_cast<int>(i);
    }
  }
  if (first >= 0) {
    result.band = std::make_pair(result.rows[first].youngs_modulus_n_mm2,
                                 result.rows[last].youngs_modulus_n_mm2);
    if (first == last) {
      result.band_degenerate = true;
      result.flags.push_back("travel band contains a single grid point");
    }
  } else {
    result.flags.push_back("no grid point falls in the travel band");
  }

  json summary;
  summary["tool"] = "slipgrip";
  summary["version"] = kVersion;
  summary["band_found"] = result.band.has_value();
  if (result.band) {
    summary["band_e_lo"] = result.band->first;
    summary["band_e_hi"] = result.band->second;
  }
  summary["band_degenerate"] = result.band_degenerate;
  summary["all_converged"] = result.all_converged;
  summary["flags"] = result.flags;
  std::ofstream(out_dir / "sweep_summary.json") << summary.dump(2) << '\n';
  return result;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  const json root = load_json_file(path);
  Section top(root, "");
  SweepConfig cfg;
  if (const json* sw = top.child("sweep")) {
    Section s(*sw, "/sweep");
    cfg.e_min = s.num("e_min", cfg.e_min);
    cfg.e_max = s.num("e_max", cfg.e_max);
    cfg.count = s.integer("count", cfg.count);
    cfg.band_travel_lo_mm = s.num("band_travel_lo_mm", cfg.band_travel_lo_mm);
    cfg.band_travel_hi_mm = s.num("band_travel_hi_mm", cfg.band_travel_hi_mm);
    cfg.settings.actuation_force_n = s.num("actuation_force_n", cfg.settings.actuation_force_n);
    const std::string blocked = s.str("blocked_finger", "middle");
    if (blocked == "index") cfg.settings.blocked = Finger::kIndex;
    else if (blocked == "middle") cfg.settings.blocked = Finger::kMiddle;
    else if (blocked == "ring") cfg.settings.blocked = Finger::kRing;
    else if (blocked == "little") cfg.settings.blocked = Finger::kLittle;
    else if (blocked == "thumb") cfg.settings.blocked = Finger::kThumb;
    else {
      throw std::invalid_argument("config: /sweep/blocked_finger: unknown finger '" + blocked +
                                  "'");
    }
    cfg.settings.max_sim_time_s = s.num("max_sim_time_s", cfg.settings.max_sim_time_s);
    s.finish();
  }
  cfg.plant = parse_plant(top.child("plant"), "/plant");
  top.finish();
  return cfg;
}

std::vector<std::string> verify_report(const std::filesystem::path& trace_dir) {
  std::vector<std::string> mismatches;
  const json manifest = load_json_file(trace_dir / "manifest.json");
  const json stored = load_json_file(trace_dir / "report.json");
  const ScenarioConfig cfg = parse_scenario(manifest.at("config"), "");

  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max({1.0, std::abs(a), std::abs(b)}); };

  // Events: re-run the detector over the emitted power trace.
  const TimeSeries power = read_csv(trace_dir / "power.csv");
  const std::vector<SlipEvent> events = detect_events(power, HysteresisDetector(cfg.detector));
  const json& stored_events = stored.at("events");
  if (stored_events.size() != events.size()) {
    mismatches.push_back("event count: report " + std::to_string(stored_events.size()) +
                         ", recomputed " + std::to_string(events.size()));
  } else {
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (!close(stored_events[i].at("onset_s").get<double>(), events[i].onset_s) ||
          !close(stored_events[i].at("end_s").get<double>(), events[i].end_s) ||
          !close(stored_events[i].at("peak_power").get<double>(), events[i].peak_power)) {
        mismatches.push_back("event " + std::to_string(i) + " differs");
      }
    }
  }

  // Duty steps, final bend: from the controller trace.
  const Table ctrl = read_table(trace_dir / "controller_trace.csv");
  const int t_col = ctrl.column("t", "controller_trace.csv");
  const int mode_col = ctrl.column("mode", "controller_trace.csv");
  const int duty_col = ctrl.column("duty", "controller_trace.csv");
  const int bend_col = ctrl.column("bend_deg", "controller_trace.csv");
  std::vector<double> t_rows, duty_rows;
  std::vector<std::string> mode_rows;
  double final_bend = 0.0;
  for (const auto& row : ctrl.rows) {
    t_rows.push_back(std::stod(row[t_col]));
    duty_rows.push_back(std::stod(row[duty_col]));
    mode_rows.push_back(row[mode_col]);
    final_bend = std::stod(row[bend_col]);
  }
  const std::vector<DutyStep> steps = find_duty_steps(t_rows, duty_rows, mode_rows);
  if (stored.at("duty_steps").size() != steps.size()) {
    mismatches.push_back("duty step count: report " +
                         std::to_string(stored.at("duty_steps").size()) + ", recomputed " +
                         std::to_string(steps.size()));
  }
  if (!close(stored.at("final_bend_deg").get<double>(), final_bend)) {
    mismatches.push_back("final_bend_deg differs");
  }

  // Max slip: from the plant trace.
  const Table plant = read_table(trace_dir / "plant_trace.csv");
  const int slip_col = plant.column("slip_mm", "plant_trace.csv");
  double max_slip = 0.0;
  for (const auto& row : plant.rows) max_slip = std::max(max_slip, std::stod(row[slip_col]));
  if (!close(stored.at("max_slip_mm").get<double>(), max_slip)) {
    mismatches.push_back("max_slip_mm differs");
  }

  return mismatches;
}

}  // namespace slipgrip
