#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spadsim/compensator.hpp"
#include "spadsim/hwbudget.hpp"
#include "spadsim/keyrate.hpp"
#include "spadsim/sigmodel.hpp"

namespace spadsim {

/// Threshold grid: either an explicit list or a {min,max,count} span.
struct SweepSection {
  std::vector<double> thresholds;
  int channel = 0;
  /// A/B comparison: second scenario plus the matched-efficiency target.
  std::optional<Scenario> scenario_b;
  double target_p_pd = 0.05;
};

struct KeyRateSection {
  KeyRateParams params;
  std::vector<double> loss_db_grid;
  double reduction_factor = 10.0;
  /// Documented operating point for the dark-count key-rate gain: the gain
  /// curve crosses `gain_target` at `gain_target_loss_db` (when recorded).
  std::optional<double> gain_target;
  std::optional<double> gain_target_loss_db;
};

struct HwSection {
  RfLinkSpec rf;
  double rf_target_hz = 3e9;
  std::vector<WireSpec> wires;
  double delta_t_k = 100.0;
  double budget_mw = 250.0;
};

struct BenchSection {
  int trials = 5;
};

struct OutputSection {
  std::string dir = "out";
};

/// One JSON document drives every subcommand; unknown keys are rejected so a
/// run config can't silently misspell a parameter.
struct RunConfig {
  std::optional<Scenario> scenario;
  std::optional<CompensatorConfig> compensator;
  std::optional<SweepSection> sweep;
  std::optional<KeyRateSection> keyrate;
  std::optional<HwSection> hw;
  BenchSection bench;
  OutputSection output;
};

RunConfig run_config_from_json(const std::string& text);
RunConfig run_config_from_file(const std::filesystem::path& path);

/// Parses just a scenario object (the "scenario" section's payload).
Scenario scenario_from_json(const std::string& text);

}  // namespace spadsim
