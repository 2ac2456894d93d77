#include "srmetro/cli/app.hpp"

#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srmetro/cli/commands.hpp"

namespace srmetro::cli {

namespace {

struct Common {
  std::optional<std::string> preset;
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::string> csv;
  unsigned threads = 0;
  Overrides overrides;
};

template <typename T>
CLI::Option* optional_opt(CLI::App* app, const std::string& name, std::optional<T>& target,
                          const std::string& help) {
  return app->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

void add_scenario_options(CLI::App* app, Common& c, bool n_pairs_scalar) {
  optional_opt(app, "--preset", c.preset, "built-in scenario (see `presets`)");
  optional_opt(app, "--config", c.config, "scenario JSON, or a report written by --out");
  optional_opt(app, "--out", c.out, "write the JSON report here");
  app->add_option("--threads", c.threads, "Monte Carlo worker threads (0 = all cores)");

  auto& o = c.overrides;
  optional_opt(app, "--seed", o.seed, "master seed for positions and Monte Carlo");
  optional_opt(app, "--trials", o.trials, "Monte Carlo trials per point");
  if (n_pairs_scalar) optional_opt(app, "--n-pairs", o.n_pairs, "pulse-pair count N");
  optional_opt(app, "--k1", o.k1, "wavenumber k1 (rad/um)");
  optional_opt(app, "--lambda1", o.lambda1, "wavelength lambda1 (um); sets k1 = 2 pi/lambda1");
  optional_opt(app, "--r0", o.r0, "displacement r0 (um)");
  optional_opt(app, "--n-atoms", o.n_atoms, "atom count");
  optional_opt(app, "--length", o.length, "ensemble length (um)");
  optional_opt(app, "--dS", o.dS, "pulse-area noise std (rad)");
  optional_opt(app, "--dPhi", o.dPhi, "pulse-phase noise std (rad)");
  optional_opt(app, "--retention", o.retention, "atom retention fraction at readout");
  optional_opt(app, "--perturb-decode", o.perturb_decode, "also perturb decode pulses (true/false)");
  optional_opt(app, "--vm", o.vm, "most probable speed v_m (um/us)");
  optional_opt(app, "--tau", o.tau, "free-flight time tau (us)");
  optional_opt(app, "--r0-min", o.r0_min, "scan start (um)");
  optional_opt(app, "--r0-max", o.r0_max, "scan end (um)");
  optional_opt(app, "--points", o.points, "scan points");
  app->add_flag("--no-noise", o.no_noise, "drop the noise section");
  app->add_flag("--no-thermal", o.no_thermal, "drop the thermal section");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

// Summary to `out`; with a CSV and no --csv path the table takes stdout and
// the summary moves to `err`.
int emit(const CommandResult& r, const Common& c, std::ostream& out, std::ostream& err) {
  if (c.out) write_file(*c.out, r.report.dump(2) + "\n");
  if (r.csv.empty()) {
    out << r.summary;
  } else if (c.csv) {
    write_file(*c.csv, r.csv);
    out << r.summary;
  } else {
    err << r.summary;
    out << r.csv;
  }
  return r.exit_code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Superradiant displacement metrology simulator", "srmetro"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  Common run_c, scan_c, sweep_c, oracle_c, presets_c;

  auto* run = app.add_subcommand("run", "single protocol execution with analytic figures");
  add_scenario_options(run, run_c, true);

  auto* scan = app.add_subcommand("scan", "fringe scan, cosine fit and sensitivity");
  add_scenario_options(scan, scan_c, true);
  optional_opt(scan, "--csv", scan_c.csv, "write the k1r0,P,stderr table here (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "fitted sensitivity against N");
  add_scenario_options(sweep, sweep_c, false);
  optional_opt(sweep, "--csv", sweep_c.csv, "write the table here (default stdout)");
  sweep->add_option_function<std::vector<int>>(
           "--n-pairs", [&](const std::vector<int>& v) { sweep_c.overrides.sweep_n_pairs = v; },
           "comma-separated N values")
      ->delimiter(',');

  auto* oracle = app.add_subcommand("oracle-check", "closed form vs brute-force references");
  std::size_t oracle_atoms = 3;
  std::size_t oracle_cases = 50;
  std::uint64_t oracle_seed = kDefaultSeed;
  oracle->add_option("--n-atoms", oracle_atoms, "atoms (full-space limit 4)")->capture_default_str();
  oracle->add_option("--cases", oracle_cases, "random cases")->capture_default_str();
  oracle->add_option("--seed", oracle_seed, "case seed")->capture_default_str();
  optional_opt(oracle, "--out", oracle_c.out, "write the JSON report here");

  auto* presets = app.add_subcommand("presets", "list presets, or print one as a scenario file");
  std::optional<std::string> preset_name;
  optional_opt(presets, "name", preset_name, "preset to print");
  optional_opt(presets, "--out", presets_c.out, "write the JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    auto scenario_for = [](const Common& c) {
      return resolve_scenario(c.preset, c.config, c.overrides);
    };
    if (*run) return emit(cmd_run(scenario_for(run_c), run_c.threads), run_c, out, err);
    if (*scan) return emit(cmd_scan(scenario_for(scan_c), scan_c.threads), scan_c, out, err);
    if (*sweep) return emit(cmd_sweep(scenario_for(sweep_c), sweep_c.threads), sweep_c, out, err);
    if (*oracle) {
      return emit(cmd_oracle_check(oracle_atoms, oracle_cases, oracle_seed), oracle_c, out, err);
    }
    if (*presets) return emit(cmd_presets(preset_name), presets_c, out, err);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace srmetro::cli
