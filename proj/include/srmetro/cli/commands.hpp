#pragma once

// Subcommand bodies. Each returns the JSON report, any CSV table, and a short
// human-readable summary; the executable decides where they go.

#include <cstdint>
#include <optional>
#include <string>

#include "srmetro/cli/scenario.hpp"

namespace srmetro::cli {

struct CommandResult {
  json report;
  std::string csv;
  std::string summary;
  int exit_code = 0;
};

/// Closed-form visibility and sensitivity for a scenario: pulse noise,
/// thermal envelope, and retention combined.
struct AnalyticFigures {
  double visibility = 1.0;
  double thermal_envelope = 1.0;
  std::optional<double> delta;  // absent for N = 0 or a vanished fringe
};
AnalyticFigures analytic_figures(const Scenario& scenario);

/// Ideal execution at r0 plus closed-form figures; a Monte Carlo estimate of
/// P is added when noise or thermal motion is configured.
CommandResult cmd_run(const Scenario& scenario, unsigned threads = 0);
/// Fringe over the scenario grid with fit and sensitivity. CSV: k1r0,P,stderr.
CommandResult cmd_scan(const Scenario& scenario, unsigned threads = 0);
/// Fitted sensitivity for each N in scenario.sweep. CSV: N,delta,heisenberg,shot_noise,visibility.
CommandResult cmd_sweep(const Scenario& scenario, unsigned threads = 0);
/// Closed form vs dense exponential on random cases, plus full-space leakage.
/// Throws OracleScaleExceeded above the full-space size limit.
CommandResult cmd_oracle_check(std::size_t n_atoms, std::size_t cases, std::uint64_t seed);
/// Preset list, or one preset's scenario document.
CommandResult cmd_presets(const std::optional<std::string>& name);

/// Report without wall-clock fields, for reproducibility comparisons.
json without_timing(json report);

std::string version();

}  // namespace srmetro::cli
