#include "srmetro/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "srmetro/analysis.hpp"
#include "srmetro/noise.hpp"
#include "srmetro/oracle.hpp"

#ifndef SRMETRO_VERSION
#define SRMETRO_VERSION "0.0.0"
#endif

namespace srmetro::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// CSV cells carry 12 significant digits. Simulated fringes accumulate ~1e-13 of
// rounding over long pulse trains, so further digits are noise; the JSON report
// keeps full precision.
std::string cell(double v) { return fmt("%.12g", v); }

json header(const char* command, const Scenario& s) {
  json r;
  r["tool"] = "srmetro";
  r["version"] = version();
  r["command"] = command;
  r["seed"] = s.ensemble.seed;
  r["config"] = to_json(s);
  return r;
}

void finish(json& report, Clock::time_point start) {
  report["duration_s"] = std::chrono::duration<double>(Clock::now() - start).count();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

bool is_stochastic(const Scenario& s) {
  const bool noisy = s.noise && (s.noise->dS > 0.0 || s.noise->dPhi > 0.0);
  const bool hot = s.thermal && s.thermal->v_m > 0.0 && s.thermal->tau > 0.0;
  return noisy || hot;
}

ScanSource pick_source(const Scenario& s) {
  if (!is_stochastic(s)) return ScanSource::ideal;
  const bool noisy = s.noise && (s.noise->dS > 0.0 || s.noise->dPhi > 0.0);
  return noisy ? ScanSource::mc : ScanSource::mc_thermal;
}

json limits_json(int n) {
  if (n < 1) return json{{"heisenberg", nullptr}, {"shot_noise", nullptr}};
  return json{{"heisenberg", 1.0 / (4.0 * n)}, {"shot_noise", 1.0 / std::sqrt(4.0 * n)}};
}

json fit_json(const FitResult& f) {
  return json{{"visibility", f.visibility},
              {"frequency", f.frequency},
              {"phase", f.phase},
              {"residual_rms", f.residual_rms},
              {"visibility_stderr", optional_number(f.visibility_stderr)},
              {"frequency_stderr", optional_number(f.frequency_stderr)}};
}

json sensitivity_json(const SensitivityReport& s) {
  return json{{"delta", s.delta},
              {"delta_stderr", optional_number(s.delta_stderr)},
              {"heisenberg", s.heisenberg},
              {"shot_noise", s.shot_noise},
              {"ratio_to_heisenberg", s.ratio_to_heisenberg},
              {"ratio_to_shot_noise", s.ratio_to_shot_noise}};
}

json analytic_json(const AnalyticFigures& a) {
  return json{{"visibility", a.visibility},
              {"thermal_envelope", a.thermal_envelope},
              {"delta", optional_number(a.delta)}};
}

struct FittedScan {
  FringeScan scan;
  std::optional<FitResult> fit;
  std::optional<SensitivityReport> sensitivity;
  std::string fit_error;
};

FittedScan fitted_scan(const Scenario& s, const std::vector<double>& grid, unsigned threads) {
  FittedScan out;
  const ProtocolConfig cfg = to_protocol_config(s);
  out.scan = scan_fringe(cfg, grid, pick_source(s), s.mc.trials, threads);
  const int n = s.protocol.n_pairs;
  if (n < 1) {
    out.fit_error = "N = 0 has no fringe to fit";
    return out;
  }
  try {
    out.fit = fit_cosine(out.scan, 4.0 * n);
    out.sensitivity = sensitivity_from_fit(*out.fit, n);
  } catch (const FitDegeneracy& e) {
    out.fit_error = e.what();
  } catch (const NoFringe& e) {
    out.fit_error = e.what();
  }
  return out;
}

std::string lambda1_fraction(double f) { return "lambda1/" + fmt("%.4f", f); }

}  // namespace

std::string version() { return SRMETRO_VERSION; }

json without_timing(json report) {
  report.erase("duration_s");
  return report;
}

AnalyticFigures analytic_figures(const Scenario& s) {
  AnalyticFigures a;
  const int n = s.protocol.n_pairs;
  const double k1 = s.protocol.k1_rad_per_um;
  double pulse_v = 1.0;
  double eta = 1.0;
  double phase_term = 0.0;
  if (s.noise) {
    pulse_v = analytic_noisy_visibility(n, s.noise->dS);
    eta = s.noise->retention;
    if (n >= 1) phase_term = s.noise->dPhi / std::sqrt(4.0 * n);
  }
  if (s.thermal) a.thermal_envelope = thermal_envelope(n, k1, s.thermal->v_m, s.thermal->tau);
  a.visibility = eta * pulse_v * a.thermal_envelope;
  if (n >= 1 && a.visibility > 0.0) a.delta = 1.0 / (4.0 * n * a.visibility) + phase_term;
  return a;
}

CommandResult cmd_run(const Scenario& s, unsigned threads) {
  const auto start = Clock::now();
  const ProtocolConfig cfg = to_protocol_config(s);
  const int n = cfg.n_pairs;

  ProtocolConfig ideal = cfg;
  ideal.pulse_noise.reset();
  ideal.thermal.reset();
  const double eta = s.noise ? s.noise->retention : 1.0;
  const Readout r = execute_protocol(make_ensemble(ideal), n, cfg.k1, cfg.r0, ideal_pulses(), 0.0, eta);
  const double signal = ideal_signal(n, cfg.k1, cfg.r0);
  const AnalyticFigures a = analytic_figures(s);

  CommandResult out;
  out.report = header("run", s);
  json res;
  res["readout"] = {{"P_b", r.P_b}, {"P_a", r.P_a}, {"P", r.P}};
  res["ideal_signal"] = signal;
  json analytic = analytic_json(a);
  analytic["expected_P"] = a.visibility * signal;
  res["analytic"] = std::move(analytic);

  std::ostringstream sum;
  sum << "N = " << n << ", k1 = " << cfg.k1 << " rad/um, r0 = " << cfg.r0 << " um\n";
  sum << "ideal readout: P = " << fmt("%.10f", r.P) << " (P_b = " << fmt("%.6f", r.P_b)
      << ", P_a = " << fmt("%.6f", r.P_a) << ")\n";
  sum << "analytic visibility " << fmt("%.6f", a.visibility);
  if (s.thermal) sum << " (thermal envelope " << fmt("%.6f", a.thermal_envelope) << ")";
  sum << "\n";

  if (is_stochastic(s)) {
    const McResult mc = pick_source(s) == ScanSource::mc
                            ? mc_fringe(cfg, {cfg.r0}, s.mc.trials, threads)
                            : mc_thermal_fringe(cfg, {cfg.r0}, s.mc.trials, threads);
    res["monte_carlo"] = {{"trials", mc.trials},
                          {"mean_P", mc.mean_P.front()},
                          {"stderr_P", mc.stderr_P.front()}};
    sum << "Monte Carlo (" << mc.trials << " trials): P = " << fmt("%.6f", mc.mean_P.front())
        << " +- " << fmt("%.6f", mc.stderr_P.front()) << "\n";
  }

  json sens = limits_json(n);
  sens["delta"] = optional_number(a.delta);
  if (a.delta && n >= 1) {
    sens["ratio_to_heisenberg"] = *a.delta * 4.0 * n;
    sens["ratio_to_shot_noise"] = *a.delta * std::sqrt(4.0 * n);
  }
  res["sensitivity"] = sens;
  if (n >= 1) {
    res["resolution_um"] = 2.0 * kPi / cfg.k1 / (4.0 * n);
    sum << "sensitivity " << (a.delta ? fmt("%.6g", *a.delta) + " = 1/" + fmt("%.2f", 1.0 / *a.delta) : "n/a")
        << "; Heisenberg 1/" << 4 * n << ", shot noise 1/" << fmt("%.2f", std::sqrt(4.0 * n))
        << "\n";
    sum << "fringe period lambda1/(4N) = " << fmt("%.6g", 2.0 * kPi / cfg.k1 / (4.0 * n))
        << " um\n";
  }
  const auto notes = preset_notes(s.name);
  if (!notes.empty()) {
    res["notes"] = notes;
    for (const auto& note : notes) sum << "note: " << note << "\n";
  }
  out.report["results"] = std::move(res);
  finish(out.report, start);
  out.summary = sum.str();
  return out;
}

CommandResult cmd_scan(const Scenario& s, unsigned threads) {
  const auto start = Clock::now();
  const auto grid = scan_grid(s);
  const FittedScan fs = fitted_scan(s, grid, threads);
  const int n = s.protocol.n_pairs;
  const double k1 = s.protocol.k1_rad_per_um;

  CommandResult out;
  out.report = header("scan", s);
  json res;
  res["source"] = std::string(to_string(fs.scan.source));
  res["trials"] = fs.scan.source == ScanSource::ideal ? 1 : s.mc.trials;

  std::ostringstream csv;
  csv << "k1r0,P,stderr\n";
  json table_err = json::array();
  for (std::size_t i = 0; i < fs.scan.P.size(); ++i) {
    csv << cell(fs.scan.grid[i]) << "," << cell(fs.scan.P[i]) << ",";
    if (fs.scan.stderr_P) {
      csv << cell((*fs.scan.stderr_P)[i]);
      table_err.push_back((*fs.scan.stderr_P)[i]);
    }
    csv << "\n";
  }
  res["table"] = {{"k1r0", fs.scan.grid},
                  {"P", fs.scan.P},
                  {"stderr", fs.scan.stderr_P ? table_err : json(nullptr)}};

  std::ostringstream sum;
  sum << "scan: " << grid.size() << " points, source " << to_string(fs.scan.source);
  if (fs.scan.source != ScanSource::ideal) sum << ", " << s.mc.trials << " trials/point";
  sum << "\n";

  if (fs.fit) {
    res["fit"] = fit_json(*fs.fit);
    res["period"] = {{"k1r0", 2.0 * kPi / fs.fit->frequency},
                     {"um", 2.0 * kPi / (fs.fit->frequency * k1)},
                     {"lambda1_fraction", lambda1_fraction(fs.fit->frequency)}};
    res["sensitivity"] = sensitivity_json(*fs.sensitivity);
    sum << "fit: V = " << fmt("%.4f", fs.fit->visibility) << ", f = "
        << fmt("%.4f", fs.fit->frequency) << " (expected " << 4 * n << "), period "
        << lambda1_fraction(fs.fit->frequency) << "\n";
    sum << "sensitivity " << fmt("%.6g", fs.sensitivity->delta) << " = 1/"
        << fmt("%.2f", 1.0 / fs.sensitivity->delta) << "; Heisenberg 1/" << 4 * n
        << ", shot noise 1/" << fmt("%.2f", std::sqrt(4.0 * n)) << "\n";
  } else {
    res["fit"] = nullptr;
    res["fit_error"] = fs.fit_error;
    sum << "fit unavailable: " << fs.fit_error << "\n";
  }
  res["analytic"] = analytic_json(analytic_figures(s));
  res["limits"] = limits_json(n);
  out.report["results"] = std::move(res);
  finish(out.report, start);
  out.csv = csv.str();
  out.summary = sum.str();
  return out;
}

CommandResult cmd_sweep(const Scenario& s, unsigned threads) {
  const auto start = Clock::now();
  CommandResult out;
  out.report = header("sweep", s);
  std::ostringstream csv;
  csv << "N,delta,heisenberg,shot_noise,visibility\n";
  std::ostringstream sum;
  sum << "   N        delta    1/delta   Heisenberg   shot noise   visibility\n";
  json rows = json::array();
  for (int n : s.sweep.n_pairs) {
    Scenario one = s;
    one.protocol.n_pairs = n;
    one.scan.reset();
    const FittedScan fs = fitted_scan(one, scan_grid(one), threads);
    if (!fs.fit) throw FitDegeneracy("N = " + std::to_string(n) + ": " + fs.fit_error);
    const auto& sens = *fs.sensitivity;
    const AnalyticFigures a = analytic_figures(one);
    csv << n << "," << cell(sens.delta) << "," << cell(sens.heisenberg) << ","
        << cell(sens.shot_noise) << "," << cell(fs.fit->visibility) << "\n";
    json row;
    row["N"] = n;
    row["source"] = std::string(to_string(fs.scan.source));
    row["fit"] = fit_json(*fs.fit);
    row["sensitivity"] = sensitivity_json(sens);
    row["analytic"] = analytic_json(a);
    rows.push_back(std::move(row));
    char line[160];
    std::snprintf(line, sizeof line, "%4d %12.6g %10.3f %12.6g %12.6g %12.6f\n", n, sens.delta,
                  1.0 / sens.delta, sens.heisenberg, sens.shot_noise, fs.fit->visibility);
    sum << line;
  }
  out.report["results"] = {{"rows", std::move(rows)}};
  finish(out.report, start);
  out.csv = csv.str();
  out.summary = sum.str();
  return out;
}

CommandResult cmd_oracle_check(std::size_t n_atoms, std::size_t cases, std::uint64_t seed) {
  const auto start = Clock::now();
  if (n_atoms > oracle::kMaxFullSpaceAtoms) {
    throw OracleScaleExceeded("--n-atoms " + std::to_string(n_atoms) + " > " +
                              std::to_string(oracle::kMaxFullSpaceAtoms));
  }
  if (n_atoms < 1) throw InvalidInput("--n-atoms must be >= 1");
  if (cases < 1) throw InvalidInput("--cases must be >= 1");

  Rng rng = make_rng(seed, {stream::kOracleCases, n_atoms});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> area_dist(0.0, 2.0 * kPi);
  const double k1 = 2.0 * kPi / 200.0;

  auto random_state = [&](std::size_t n) {
    ExcitationState st{std::vector<cplx>(n), std::vector<cplx>(n)};
    for (std::size_t j = 0; j < n; ++j) {
      st.amp_b[j] = {unit(rng), unit(rng)};
      st.amp_a[j] = {unit(rng), unit(rng)};
    }
    return st.scaled(1.0 / std::sqrt(st.norm_squared()));
  };
  auto random_pulse = [&] { return Pulse{area_dist(rng), 3.0 * k1 * unit(rng), kPi * unit(rng)}; };
  auto max_dev = [](const ExcitationState& x, const ExcitationState& y) {
    double d = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      d = std::max({d, std::abs(x.amp_b[j] - y.amp_b[j]), std::abs(x.amp_a[j] - y.amp_a[j])});
    }
    return d;
  };

  double pulse_dev = 0.0, seq_dev = 0.0, herm = 0.0, norm_drift = 0.0;
  double leakage = 0.0, full_dev = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const AtomEnsemble e = AtomEnsemble::uniform(n_atoms, 400.0, rng);
    const ExcitationState st = random_state(n_atoms);
    const Pulse p = random_pulse();
    const auto gen = oracle::generator_matrix(e, p);
    herm = std::max(herm, gen.hermiticity_error());
    const ExcitationState closed = apply_pulse(st, e, p);
    pulse_dev = std::max(pulse_dev, max_dev(closed, oracle::expm_apply(gen, st)));
    norm_drift = std::max(norm_drift, std::abs(closed.norm_squared() - 1.0));

    // Encode train of two pairs against a product of dense exponentials.
    const ExcitationState train = encode_sequence(st, e, 2, k1, ideal_pulses());
    ExcitationState dense = st;
    for (int i = 0; i < 2; ++i) {
      dense = oracle::expm_apply(oracle::generator_matrix(e, Pulse{kPi, +k1, 0.0}), dense);
      dense = oracle::expm_apply(oracle::generator_matrix(e, Pulse{kPi, -k1, 0.0}), dense);
    }
    seq_dev = std::max(seq_dev, max_dev(train, dense));

    const auto full = oracle::full_space_check(e, p, 3.0 * k1 * unit(rng));
    leakage = std::max(leakage, full.max_leakage);
    full_dev = std::max(full_dev, full.max_closed_form_deviation);
  }

  struct Check {
    const char* name;
    double value;
    double tolerance;
  };
  const Check checks[] = {
      {"closed_form_vs_expm", pulse_dev, 1e-9},
      {"encode_train_vs_expm", seq_dev, 1e-9},
      {"generator_hermiticity", herm, 1e-14},
      {"norm_drift", norm_drift, 1e-12},
      {"full_space_leakage", leakage, 1e-10},
      {"full_space_vs_closed_form", full_dev, 1e-9},
  };

  CommandResult out;
  out.report["tool"] = "srmetro";
  out.report["version"] = version();
  out.report["command"] = "oracle-check";
  out.report["seed"] = seed;
  out.report["config"] = {{"n_atoms", n_atoms}, {"cases", cases}, {"seed", seed}};
  json list = json::array();
  bool all = true;
  std::ostringstream sum;
  for (const auto& c : checks) {
    const bool ok = c.value < c.tolerance;
    all = all && ok;
    list.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", ok}});
    char line[160];
    std::snprintf(line, sizeof line, "%-28s %-4s %.3e (< %.0e)\n", c.name, ok ? "ok" : "FAIL",
                  c.value, c.tolerance);
    sum << line;
  }
  out.report["results"] = {{"checks", std::move(list)},
                           {"full_space_dimension", std::pow(3.0, static_cast<double>(n_atoms))},
                           {"pass", all}};
  finish(out.report, start);
  sum << (all ? "all checks passed" : "oracle check FAILED") << " (" << n_atoms << " atoms, "
      << cases << " cases)\n";
  out.summary = sum.str();
  out.exit_code = all ? 0 : 1;
  return out;
}

CommandResult cmd_presets(const std::optional<std::string>& name) {
  CommandResult out;
  if (name) {
    out.report = to_json(preset(*name));
    out.summary = out.report.dump(2) + "\n";
    return out;
  }
  out.report["tool"] = "srmetro";
  out.report["version"] = version();
  out.report["command"] = "presets";
  json list = json::array();
  std::ostringstream sum;
  for (const auto& p : list_presets()) {
    list.push_back({{"name", p.name},
                    {"description", p.description},
                    {"notes", p.notes},
                    {"config", to_json(preset(p.name))}});
    sum << p.name << "\n  " << p.description << "\n";
    for (const auto& note : p.notes) sum << "  note: " << note << "\n";
  }
  out.report["presets"] = std::move(list);
  out.summary = sum.str();
  return out;
}

}  // namespace srmetro::cli
