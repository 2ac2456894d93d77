// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance            all criteria
//   acceptance --only 3   one criterion
//
// Exit status is 0 only if every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srmetro/analysis.hpp"
#include "srmetro/cli/commands.hpp"
#include "srmetro/noise.hpp"
#include "srmetro/oracle.hpp"

using namespace srmetro;
using namespace srmetro::cli;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "  ok    " : "  FAIL  ") + what);
  }
};

std::string f(const char* spec, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, spec, a);
  return buf;
}

std::string f(const char* spec, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, spec, a, b);
  return buf;
}

std::string f(const char* spec, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, spec, a, b, c);
  return buf;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

constexpr double kRbK1 = 2.0 * kPi / 200.0;

// 1. Ideal signal equals -cos(4 N k1 r0) within 1e-10.
Outcome ideal_signal_criterion() {
  Outcome o;
  const auto start = Clock::now();
  double worst = 0.0;
  int runs = 0;
  for (std::size_t n_atoms : {8u, 64u}) {
    for (int n : {1, 2, 4, 8, 16, 32}) {
      ProtocolConfig cfg;
      cfg.n_pairs = n;
      cfg.k1 = kRbK1;
      cfg.n_atoms = n_atoms;
      cfg.seed = 1000 + 10 * n + n_atoms;  // fresh random positions per case
      const double period = 200.0 / (4.0 * n);
      std::vector<double> grid;
      for (int i = 0; i < 40; ++i) grid.push_back(-period + 3.0 * period * i / 39.0);
      const FringeScan scan = scan_fringe(cfg, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        worst = std::max(worst, std::abs(scan.P[i] - ideal_signal(n, kRbK1, grid[i])));
        ++runs;
      }
    }
  }
  const double t = seconds_since(start);
  o.check(worst < 1e-10, f("max |P + cos(4 N k1 r0)| = %.2e over %g runs (tol 1e-10)", worst, runs));
  o.check(t < 5.0, f("runtime %.2f s (limit 5 s)", t));
  return o;
}

// 2. Ideal sensitivity equals 1/4N; shot-noise column 1/sqrt(4N).
Outcome heisenberg_criterion() {
  Outcome o;
  Scenario s;
  s.ensemble.n_atoms = 8;
  s.sweep.n_pairs = {1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
  const CommandResult r = cmd_sweep(s);
  double worst_rel = 0.0;
  bool csv_exact = true;
  bool shot_exact = true;
  std::istringstream csv(r.csv);
  std::string line;
  std::getline(csv, line);
  o.check(line == "N,delta,heisenberg,shot_noise,visibility", "CSV header " + line);
  for (const auto& row : r.report["results"]["rows"]) {
    const int n = row["N"].get<int>();
    const auto& sens = row["sensitivity"];
    worst_rel = std::max(worst_rel, std::abs(sens["delta"].get<double>() * 4.0 * n - 1.0));
    shot_exact = shot_exact && sens["shot_noise"].get<double>() == 1.0 / std::sqrt(4.0 * n) &&
                 sens["heisenberg"].get<double>() == 1.0 / (4.0 * n);
    std::getline(csv, line);
    std::istringstream cells(line);
    std::string cn, cdelta;
    std::getline(cells, cn, ',');
    std::getline(cells, cdelta, ',');
    csv_exact = csv_exact && cdelta == f("%.12g", 1.0 / (4.0 * n));
  }
  o.check(worst_rel < 1e-12, f("max |delta 4N - 1| = %.2e for N = 1..64 (tol 1e-12)", worst_rel));
  o.check(csv_exact, "CSV delta column prints 1/(4N) to all 12 digits");
  o.check(shot_exact, "heisenberg = 1/(4N), shot_noise = 1/sqrt(4N) exactly");

  for (int n : {16, 32}) {
    Scenario one;
    one.protocol.n_pairs = n;
    const auto sens = cmd_run(one).report["results"]["sensitivity"];
    const double inv_h = 1.0 / sens["heisenberg"].get<double>();
    const double inv_s = 1.0 / sens["shot_noise"].get<double>();
    const bool ok = inv_h == 4.0 * n && std::round(inv_s) == (n == 16 ? 8.0 : 11.0);
    o.check(ok, f("N = %g: 1/%g vs shot noise 1/%.2f", n, inv_h, inv_s));
  }
  return o;
}

// 3. Noisy fringes: N = 16, 32 at dS = 0.1, dPhi = 0.01 with 500 trials per point.
Outcome noisy_fringe_criterion() {
  Outcome o;
  const auto start = Clock::now();
  struct Case {
    int n;
    double visibility;
    double inv_delta;
  };
  for (const Case c : {Case{16, 0.92, 55.0}, Case{32, 0.84, 98.0}}) {
    const Scenario s = preset("noisy-n" + std::to_string(c.n));
    if (s.mc.trials < 500) o.check(false, "preset has fewer than 500 trials");
    const auto res = cmd_scan(s).report["results"];
    const double freq = res["fit"]["frequency"].get<double>();
    const double v = res["fit"]["visibility"].get<double>();
    const double delta = res["sensitivity"]["delta"].get<double>();
    o.check(std::abs(freq / (4.0 * c.n) - 1.0) <= 0.01,
            f("N = %g: fitted f = %.3f vs 4N = %g (tol 1%%)", c.n, freq, 4.0 * c.n));
    o.check(std::abs(v - c.visibility) <= 0.03,
            f("N = %g: visibility %.4f vs %.2f (tol 0.03)", c.n, v, c.visibility));
    const double rel = delta * c.inv_delta - 1.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "N = %d: delta = 1/%.2f, %+.1f%% from 1/%g (tol 10%%)", c.n,
                  1.0 / delta, 100.0 * rel, c.inv_delta);
    o.check(std::abs(rel) <= 0.10, buf);
  }
  const double t = seconds_since(start);
  o.check(t < 120.0, f("runtime %.1f s (limit 120 s)", t));
  return o;
}

// 4. Monte Carlo sensitivity vs [4N(1 - N dS^2/2)]^-1 + dPhi/sqrt(4N) within 3 SE.
Outcome analytic_vs_mc_criterion() {
  Outcome o;
  int cell = 0;
  for (int n : {8, 16, 32}) {
    for (double ds : {0.05, 0.1}) {
      for (double dphi : {0.0, 0.01}) {
        Scenario s;
        s.name = "cell";
        s.protocol.n_pairs = n;
        s.protocol.k1_rad_per_um = kRbK1;
        s.ensemble.seed = 4000 + static_cast<std::uint64_t>(cell++);
        s.noise = NoiseParams{ds, dphi, 1.0};
        s.mc.trials = 500;
        const auto res = cmd_scan(s).report["results"];
        const double mc = res["sensitivity"]["delta"].get<double>();
        const double se = res["sensitivity"]["delta_stderr"].get<double>();
        const double an = analytic_noisy_sensitivity(n, ds, dphi);
        const double z = (mc - an) / se;
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "N = %2d dS = %.2f dPhi = %.2f: MC %.6f +- %.6f, formula %.6f, %+.1f SE",
                      n, ds, dphi, mc, se, an, z);
        o.check(std::abs(z) <= 3.0, buf);
      }
    }
  }
  return o;
}

// 5. Thermal Rb scenario.
Outcome thermal_criterion() {
  Outcome o;
  const double env = thermal_envelope(10, kRbK1, 0.01, 100.0);
  o.check(std::abs(env - 0.82) <= 0.005, f("analytic envelope %.4f vs 0.82 (tol 0.005)", env));
  const double sens = thermal_sensitivity(10, kRbK1, 0.01, 100.0);
  o.check(std::abs(sens * 32.0 - 1.0) <= 0.03,
          f("analytic sensitivity %.5f = 1/%.2f vs 1/32 (tol 3%%)", sens, 1.0 / sens));

  const Scenario rb = preset("rb");
  const auto run = cmd_run(rb).report["results"];
  o.check(run["analytic"]["thermal_envelope"].get<double>() == env &&
              std::abs(run["sensitivity"]["delta"].get<double>() / sens - 1.0) < 1e-12,
          "run --preset rb reports the same envelope and sensitivity");

  o.check(rb.mc.trials >= 2000, f("rb preset uses %g trials per point (>= 2000)", rb.mc.trials));
  const auto scan = cmd_scan(rb).report["results"];
  const double v = scan["fit"]["visibility"].get<double>();
  const double se = scan["fit"]["visibility_stderr"].get<double>();
  o.check(scan["source"] == "mc_thermal", "scan source is the thermal Monte Carlo");
  o.check(std::abs(v - 0.82) <= 0.03, f("MC thermal visibility %.4f +- %.4f vs 0.82 (tol 0.03)", v, se));
  return o;
}

// 6. Closed form vs dense exponential at N_a = 5; full-space leakage at N_a <= 4.
Outcome oracle_criterion() {
  Outcome o;
  Rng rng = make_rng(6, {stream::kOracleCases});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> area(0.0, 2.0 * kPi);
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const AtomEnsemble e = AtomEnsemble::uniform(5, 400.0, rng);
    ExcitationState st{std::vector<cplx>(5), std::vector<cplx>(5)};
    for (std::size_t j = 0; j < 5; ++j) {
      st.amp_b[j] = {unit(rng), unit(rng)};
      st.amp_a[j] = {unit(rng), unit(rng)};
    }
    st = st.scaled(1.0 / std::sqrt(st.norm_squared()));
    const Pulse p{area(rng), 3.0 * kRbK1 * unit(rng), kPi * unit(rng)};
    const ExcitationState closed = apply_pulse(st, e, p);
    const ExcitationState dense = oracle::expm_apply(oracle::generator_matrix(e, p), st);
    for (std::size_t j = 0; j < 5; ++j) {
      worst = std::max({worst, std::abs(closed.amp_b[j] - dense.amp_b[j]),
                        std::abs(closed.amp_a[j] - dense.amp_a[j])});
    }
  }
  o.check(worst < 1e-9, f("N_a = 5, 200 cases: max amplitude deviation %.2e (tol 1e-9)", worst));

  double leak = 0.0;
  double dev = 0.0;
  int checks = 0;
  for (std::size_t n = 1; n <= oracle::kMaxFullSpaceAtoms; ++n) {
    for (int c = 0; c < 20; ++c) {
      const AtomEnsemble e = AtomEnsemble::uniform(n, 400.0, rng);
      const Pulse p = c == 0   ? Pulse{kPi, kRbK1, 0.0}
                      : c == 1 ? Pulse{kPi / 2.0, 0.0, 0.0}
                               : Pulse{area(rng), 3.0 * kRbK1 * unit(rng), kPi * unit(rng)};
      const auto rep = oracle::full_space_check(e, p, kRbK1 * unit(rng));
      leak = std::max(leak, rep.max_leakage);
      dev = std::max(dev, rep.max_closed_form_deviation);
      ++checks;
    }
  }
  o.check(leak < 1e-10, f("full space N_a = 1..4, %g pulses: max leakage %.2e (tol 1e-10)", checks, leak));
  o.check(dev < 1e-9, f("full space vs closed form: %.2e (tol 1e-9)", dev));
  const auto cli = cmd_oracle_check(4, 50, 6);
  o.check(cli.exit_code == 0, "oracle-check --n-atoms 4 passes");
  return o;
}

// 7. Property suite.
Outcome property_criterion() {
  Outcome o;
  Rng rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> area(0.0, 2.0 * kPi);

  // Unitarity per pulse.
  {
    const AtomEnsemble e = AtomEnsemble::uniform(64, 2000.0, rng);
    ExcitationState st = make_timed_dicke(e, Level::b, kRbK1);
    double drift = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const double before = st.norm_squared();
      st = apply_pulse(st, e, Pulse{area(rng), 2.0 * kRbK1 * unit(rng), kPi * unit(rng)});
      drift = std::max(drift, std::abs(st.norm_squared() - before));
    }
    o.check(drift < 1e-12, f("norm drift per pulse %.2e over 2000 pulses (tol 1e-12)", drift));
  }

  // Encode/decode reversibility.
  {
    double worst = 0.0;
    for (int n = 1; n <= 32; ++n) {
      const AtomEnsemble e = AtomEnsemble::uniform(32, 2000.0, rng);
      ExcitationState st{std::vector<cplx>(32), std::vector<cplx>(32)};
      for (std::size_t j = 0; j < 32; ++j) {
        st.amp_b[j] = {unit(rng), unit(rng)};
        st.amp_a[j] = {unit(rng), unit(rng)};
      }
      st = st.scaled(1.0 / std::sqrt(st.norm_squared()));
      const auto enc = encode_sequence(st, e, n, kRbK1, ideal_pulses());
      const auto dec = decode_sequence(enc, e, n, kRbK1, ideal_pulses());
      worst = std::max(worst, 1.0 - fidelity(st, dec));
    }
    o.check(worst <= 1e-9, f("decode(encode(psi)) infidelity %.2e for N = 1..32 (tol 1e-9)", worst));
  }

  // Parity in r0 and position independence.
  {
    double parity = 0.0;
    double spread = 0.0;
    for (int c = 0; c < 40; ++c) {
      const int n = 1 + c % 16;
      const double r0 = 20.0 * unit(rng);
      ProtocolConfig cfg;
      cfg.n_pairs = n;
      cfg.k1 = kRbK1;
      cfg.n_atoms = 16;
      cfg.seed = 700 + c;
      cfg.r0 = r0;
      const double plus = run_protocol(cfg).P;
      cfg.r0 = -r0;
      parity = std::max(parity, std::abs(plus - run_protocol(cfg).P));
      cfg.r0 = r0;
      cfg.seed += 1000;
      cfg.ensemble_length = 1.0 + 5000.0 * std::abs(unit(rng));
      spread = std::max(spread, std::abs(plus - run_protocol(cfg).P));
    }
    o.check(parity < 1e-10, f("|P(r0) - P(-r0)| max %.2e (tol 1e-10)", parity));
    o.check(spread < 1e-10, f("P across position draws and lengths differs by %.2e (tol 1e-10)", spread));
  }

  // Small-r0 expansion of P_b.
  {
    double worst = 0.0;
    for (int n : {1, 4, 16, 32}) {
      for (double phase : {0.001, 0.01, 0.05, 0.099}) {
        ProtocolConfig cfg;
        cfg.n_pairs = n;
        cfg.k1 = kRbK1;
        cfg.n_atoms = 16;
        cfg.r0 = phase / (4.0 * n * kRbK1);
        const double pb = run_protocol(cfg).P_b;
        const double approx = 4.0 * n * n * kRbK1 * kRbK1 * cfg.r0 * cfg.r0;
        worst = std::max(worst, std::abs(pb / approx - 1.0));
      }
    }
    o.check(worst < 0.01, f("P_b vs 4 N^2 k1^2 r0^2 for 4 N k1 r0 < 0.1: max rel. error %.2e (tol 1%%)", worst));
  }
  return o;
}

// 8. Determinism across threads and from echoed configs.
Outcome determinism_criterion() {
  Outcome o;
  Scenario noisy = preset("noisy-n16");
  noisy.mc.trials = 60;
  Scenario hot = preset("rb");
  hot.mc.trials = 60;
  Scenario sweep = preset("noisy-n16");
  sweep.scan.reset();
  sweep.sweep.n_pairs = {2, 5};
  sweep.mc.trials = 40;

  struct Job {
    const char* name;
    std::function<CommandResult(const Scenario&, unsigned)> cmd;
    Scenario scenario;
  };
  const Job jobs[] = {
      {"scan (pulse noise)", cmd_scan, noisy},
      {"scan (thermal)", cmd_scan, hot},
      {"run (thermal)", cmd_run, hot},
      {"sweep (pulse noise)", cmd_sweep, sweep},
  };
  for (const auto& job : jobs) {
    const CommandResult base = job.cmd(job.scenario, 1);
    const std::string ref = without_timing(base.report).dump();
    bool threads_ok = true;
    for (unsigned t : {2u, 3u, 8u}) {
      const CommandResult again = job.cmd(job.scenario, t);
      threads_ok = threads_ok && without_timing(again.report).dump() == ref && again.csv == base.csv;
    }
    o.check(threads_ok, std::string(job.name) + ": identical for 1, 2, 3, 8 threads");

    const std::string path = "/tmp/srmetro_acceptance_report.json";
    std::ofstream(path) << base.report.dump(2);
    const Scenario echoed = resolve_scenario(std::nullopt, path, Overrides{});
    const CommandResult replay = job.cmd(echoed, 4);
    o.check(without_timing(replay.report).dump() == ref && replay.csv == base.csv,
            std::string(job.name) + ": re-run from the written report is bit-identical");
  }
  return o;
}

struct Criterion {
  int id;
  const char* title;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "ideal signal -cos(4 N k1 r0)", ideal_signal_criterion},
    {2, "Heisenberg scaling 1/4N", heisenberg_criterion},
    {3, "noisy fringes at N = 16, 32", noisy_fringe_criterion},
    {4, "analytic vs Monte Carlo sensitivity", analytic_vs_mc_criterion},
    {5, "thermal Rb scenario", thermal_criterion},
    {6, "oracle equivalence", oracle_criterion},
    {7, "property suite", property_criterion},
    {8, "determinism", determinism_criterion},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  bool verbose = true;
  app.add_option("--only", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
  app.add_flag("!--quiet", verbose, "print only the PASS/FAIL lines");
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s  %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                seconds_since(start));
    if (verbose) {
      for (const auto& d : o.details) std::printf("%s\n", d.c_str());
    }
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
