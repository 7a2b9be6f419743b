#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "slipgrip/control.hpp"
#include "slipgrip/detector.hpp"
#include "slipgrip/filter.hpp"
#include "slipgrip/plant.hpp"

namespace slipgrip {

struct ScenarioEvent {
  enum class Type { kToggleGrasp, kToggleRelease, kAddMass, kApplyTorque };
  double t_s = 0.0;
  Type type = Type::kToggleGrasp;
  double value = 0.0;      // kg for add_mass, N*mm for apply_torque
  double duration_s = 0.0; // torque window length
};

// One file fully determines a run: fixed step grid, seeded noise, scripted
// events, all module parameters, and the pass/fail expectations evaluated
// into the report.
struct ScenarioConfig {
  double duration_s = 75.0;
  double sample_rate_hz = kDefaultSampleRateHz;
  std::optional<std::uint64_t> rng_seed;  // mandatory for simulation runs
  bool cable_drift = false;
  bool desk_vibration = false;
  std::vector<ScenarioEvent> events;

  bool object_present = true;
  ObjectState object{};
  double object_radius_mm = 35.0;  // converts applied torque to tangential load
  double drop_bound_mm = 5.0;

  HandParams plant{};
  SensorSimParams sensors{};
  SignalChainConfig chain{};
  DetectorConfig detector{};
  GraspIntegratorConfig grasp{};
  ExtensionPiConfig extension{};

  struct Expectations {
    std::optional<int> min_duty_steps;
    std::optional<double> max_slip_mm;
    std::optional<bool> final_bend_within_deadband;
    std::optional<int> max_events;
    std::optional<double> max_abs_duty;
  } expect;

  void validate() const;
};

struct DutyStep {
  double t_s = 0.0;
  double magnitude = 0.0;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunReport {
  std::vector<SlipEvent> events;
  std::vector<DutyStep> duty_steps;
  double max_slip_mm = 0.0;
  double final_bend_deg = 0.0;
  double max_abs_duty = 0.0;
  std::vector<CheckResult> checks;

  bool pass() const;
};

// Runs the full closed loop (plant -> piezo -> filter -> power -> detector
// -> controllers -> plant) on one fixed grid and writes every trace, the
// report and a manifest into `out_dir`.
RunReport run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                       bool write_plot = false);

struct ProcessResult {
  std::size_t samples = 0;
  std::vector<SlipEvent> events;
  std::optional<double> first_event_s;  // contact proxy on recorded data
  std::filesystem::path filtered_csv;
  std::filesystem::path power_csv;
  std::filesystem::path events_csv;
};

// Offline signal chain over a recorded raw trace: emits filtered, power and
// event CSVs next to the report.
ProcessResult process_recording(const std::filesystem::path& csv_path,
                                const SignalChainConfig& chain_config,
                                const DetectorConfig& detector_config,
                                const std::filesystem::path& out_dir);

struct SweepConfig {
  double e_min = 50.0;
  double e_max = 10000.0;
  int count = 17;
  double band_travel_lo_mm = 3.0;
  double band_travel_hi_mm = 10.0;
  HandParams plant{};
  SweepSettings settings{};

  void validate() const;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<std::pair<double, double>> band;  // modulus interval of the travel band
  bool band_degenerate = false;
  bool all_converged = true;
  std::vector<std::string> flags;
};

SweepResult run_sweep(const SweepConfig& config, const std::filesystem::path& out_dir);

// Configuration files are JSON with flat sections mirroring the module
// parameter lists; unknown keys and type mismatches are reported with their
// field path.
ScenarioConfig load_scenario_config(const std::filesystem::path& path);
SweepConfig load_sweep_config(const std::filesystem::path& path);
std::string scenario_config_json(const ScenarioConfig& config);  // resolved echo
std::uint64_t fnv1a64(const std::string& text);

// Recomputes every report metric from the emitted trace files and compares
// against report.json. Returns the list of mismatches (empty = report is
// reproducible).
std::vector<std::string> verify_report(const std::filesystem::path& trace_dir);

}  // namespace slipgrip
