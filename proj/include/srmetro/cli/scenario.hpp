#pragma once

// Scenario files: the JSON description of an experiment consumed by the CLI.
//
//   {
//     "name": "rb",
//     "ensemble": {"n_atoms": 64, "length_um": 20000, "positions": [...], "seed": 1},
//     "protocol": {"n_pairs": 10, "k1_rad_per_um": 0.0314159, "r0_um": 10},
//     "noise":    {"dS_rad": 0.1, "dPhi_rad": 0.01, "retention": 1,
//                  "perturb_decode": false, "perturb_pi_half": false},
//     "thermal":  {"vm_um_per_us": 0.01, "tau_us": 100},
//     "scan":     {"r0_min": 0, "r0_max": 5, "points": 90},
//     "mc":       {"trials": 500},
//     "sweep":    {"n_pairs": [1, 2, 4, 8, 16, 32]}
//   }
//
// Every section is optional; unknown keys are rejected. Lengths are um, times
// us, velocities um/us, wavenumbers rad/um.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "srmetro/dynamics.hpp"
#include "srmetro/errors.hpp"

namespace srmetro::cli {

using json = nlohmann::ordered_json;

/// Invalid scenario entry; key() is the dotted path, e.g. "noise.dS_rad".
class ConfigError : public InvalidInput {
 public:
  ConfigError(std::string key, const std::string& message)
      : InvalidInput("config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct Scenario {
  std::string name;

  struct Ensemble {
    std::size_t n_atoms = 64;
    std::optional<double> length_um;  // default 100 lambda1
    std::optional<std::vector<double>> positions;
    std::uint64_t seed = kDefaultSeed;
  } ensemble;

  struct Protocol {
    int n_pairs = 1;
    double k1_rad_per_um = 2.0 * kPi / 200.0;
    double r0_um = 0.0;
  } protocol;

  std::optional<NoiseParams> noise;
  std::optional<ThermalParams> thermal;

  struct Scan {
    double r0_min = 0.0;
    double r0_max = 0.0;
    int points = 90;
  };
  std::optional<Scan> scan;

  struct Mc {
    std::size_t trials = 500;
  } mc;

  struct Sweep {
    std::vector<int> n_pairs{1, 2, 4, 8, 16, 32};
  } sweep;
};

/// Strict parse; throws ConfigError naming the offending key.
Scenario scenario_from_json(const json& doc);
json to_json(const Scenario& scenario);

/// Domain checks beyond parsing (counts, signs, ranges).
void validate(const Scenario& scenario);

struct PresetInfo {
  std::string name;
  std::string description;
  std::vector<std::string> notes;
};

std::vector<PresetInfo> list_presets();
/// Throws ConfigError("preset", ...) for unknown names.
Scenario preset(const std::string& name);
/// Notes attached to a preset name; empty for anything else.
std::vector<std::string> preset_notes(const std::string& name);

/// Per-key command-line overrides; they shadow file and preset values.
struct Overrides {
  std::optional<int> n_pairs;
  std::optional<double> k1;
  std::optional<double> lambda1;  // sets k1 = 2 pi / lambda1
  std::optional<double> r0;
  std::optional<std::size_t> n_atoms;
  std::optional<double> length;
  std::optional<double> dS;
  std::optional<double> dPhi;
  std::optional<double> retention;
  std::optional<bool> perturb_decode;
  std::optional<double> vm;
  std::optional<double> tau;
  std::optional<double> r0_min;
  std::optional<double> r0_max;
  std::optional<int> points;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<int>> sweep_n_pairs;
  bool no_noise = false;
  bool no_thermal = false;
};

void apply_overrides(Scenario& scenario, const Overrides& overrides);

/// Resolves preset < file < overrides. A file holding a full report is accepted;
/// its echoed "config" is used.
Scenario resolve_scenario(const std::optional<std::string>& preset_name,
                          const std::optional<std::string>& config_path,
                          const Overrides& overrides);

ProtocolConfig to_protocol_config(const Scenario& scenario);

/// Scan section grid, or 60 points per fringe period over 1.5 periods.
std::vector<double> scan_grid(const Scenario& scenario);

}  // namespace srmetro::cli
