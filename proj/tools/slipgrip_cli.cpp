// Command-line front end: scenario simulation, offline recording
// processing, cable-elasticity sweeps and report verification.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "slipgrip/scenario.hpp"
#include "slipgrip/version.hpp"

namespace {

void print_report(const slipgrip::RunReport& report) {
  std::printf("slip events: %zu\n", report.events.size());
  std::printf("duty steps:  %zu", report.duty_steps.size());
  for (const auto& s : report.duty_steps) std::printf("  (+%.3f @ %.2fs)", s.magnitude, s.t_s);
  std::printf("\nmax slip:    %.3f mm\n", report.max_slip_mm);
  std::printf("final bend:  %.2f deg\n", report.final_bend_deg);
  for (const auto& c : report.checks) {
    std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PVDF slip-detection and grasp-control toolkit"};
  app.set_version_flag("--version", slipgrip::kVersion);
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> fs_override;
  bool plot = false;
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "override the scenario RNG seed");
  app.add_option("--fs", fs_override, "override the sample rate [Hz]");
  app.add_flag("--plot", plot, "also write an SVG plot of the run");

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "run a closed-loop scenario");
  simulate->add_option("config", config_path, "scenario config JSON")->required();

  std::string recording_path;
  double hb = 3.0, lb = 1.0, norm = 1.0, gain = 1.0;
  bool no_dc_block = false;
  auto* process = app.add_subcommand("process", "run the signal chain over a recorded CSV");
  process->add_option("csv", recording_path, "raw PVDF recording (t,value,unit)")->required();
  process->add_option("--high-bound", hb, "detector high bound")->capture_default_str();
  process->add_option("--low-bound", lb, "detector low bound")->capture_default_str();
  process->add_option("--normalization", norm, "power normalization")->capture_default_str();
  process->add_option("--gain", gain, "filter output gain")->capture_default_str();
  process->add_flag("--no-dc-block", no_dc_block, "disable the drift bleed stage");

  std::string sweep_config_path;
  auto* sweep = app.add_subcommand("sweep", "run the cable-elasticity study");
  sweep->add_option("config", sweep_config_path, "sweep config JSON")->required();

  std::string trace_dir;
  auto* report = app.add_subcommand("report", "recompute report metrics from emitted traces");
  report->add_option("trace-dir", trace_dir, "directory with a previous run")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      slipgrip::ScenarioConfig config = slipgrip::load_scenario_config(config_path);
      if (seed) config.rng_seed = *seed;
      if (fs_override) config.sample_rate_hz = *fs_override;
      const slipgrip::RunReport run = slipgrip::run_scenario(config, out_dir, plot);
      print_report(run);
      return run.pass() ? 0 : 1;
    }
    if (process->parsed()) {
      slipgrip::SignalChainConfig chain;
      chain.output_gain = gain;
      chain.dc_block = !no_dc_block;
      slipgrip::DetectorConfig detector{hb, lb, norm};
      const slipgrip::ProcessResult result =
          slipgrip::process_recording(recording_path, chain, detector, out_dir);
      std::printf("%zu samples, %zu event(s)\n", result.samples, result.events.size());
      for (const auto& e : result.events) {
        std::printf("  %.3fs .. %.3fs  peak %.3g\n", e.onset_s, e.end_s, e.peak_power);
      }
      if (result.first_event_s) {
        std::printf("first contact proxy: %.3fs\n", *result.first_event_s);
      }
      return 0;
    }
    if (sweep->parsed()) {
      slipgrip::SweepConfig config = slipgrip::load_sweep_config(sweep_config_path);
      const slipgrip::SweepResult result = slipgrip::run_sweep(config, out_dir);
      for (const auto& row : result.rows) {
        std::printf("E=%9.1f  bend=%6.2f deg  travel=%6.3f mm%s\n", row.youngs_modulus_n_mm2,
                    row.index_bend_deg, row.slider_travel_mm,
                    row.converged ? "" : "  [not converged]");
      }
      if (result.band) {
        std::printf("travel band [%g, %g] mm -> E in [%.1f, %.1f] N/mm^2\n",
                    config.band_travel_lo_mm, config.band_travel_hi_mm, result.band->first,
                    result.band->second);
      }
      for (const auto& flag : result.flags) std::printf("flag: %s\n", flag.c_str());
      return (result.all_converged && result.band && !result.band_degenerate) ? 0 : 1;
    }
    if (report->parsed()) {
      const std::vector<std::string> mismatches = slipgrip::verify_report(trace_dir);
      if (mismatches.empty()) {
        std::printf("report metrics reproduce from the emitted traces\n");
        return 0;
      }
      for (const auto& m : mismatches) std::printf("mismatch: %s\n", m.c_str());
      return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
