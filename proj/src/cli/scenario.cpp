#include "srmetro/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string_view>

#include "srmetro/analysis.hpp"

namespace srmetro::cli {

namespace {

constexpr std::size_t kMaxAtoms = 10'000'000;
constexpr int kMaxPairs = 1'000'000;
constexpr int kMaxPoints = 1'000'000;

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError(join(path, item.key()), "unknown key");
    }
  }
}

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
  return v;
}

std::int64_t get_integer(const json& j, const std::string& key) {
  if (j.is_number_unsigned()) {
    const auto u = j.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) throw ConfigError(key, "out of range");
    return static_cast<std::int64_t>(u);
  }
  if (j.is_number_integer()) return j.get<std::int64_t>();
  throw ConfigError(key, "expected an integer");
}

std::uint64_t get_seed(const json& j, const std::string& key) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) throw ConfigError(key, "must be >= 0");
  throw ConfigError(key, "expected an unsigned integer");
}

bool get_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) throw ConfigError(key, "expected true or false");
  return j.get<bool>();
}

template <typename F>
void with_key(const json& obj, const std::string& path, std::string_view key, F&& f) {
  auto it = obj.find(std::string(key));
  if (it != obj.end()) f(*it, join(path, key));
}

void parse_ensemble(const json& j, Scenario::Ensemble& e) {
  const std::string p = "ensemble";
  require_object(j, p);
  reject_unknown(j, p, {"n_atoms", "length_um", "positions", "seed"});
  with_key(j, p, "n_atoms", [&](const json& v, const std::string& k) {
    const auto n = get_integer(v, k);
    if (n < 1) throw ConfigError(k, "must be >= 1");
    e.n_atoms = static_cast<std::size_t>(n);
  });
  with_key(j, p, "length_um", [&](const json& v, const std::string& k) {
    if (v.is_null()) {
      e.length_um.reset();
      return;
    }
    e.length_um = get_number(v, k);
  });
  with_key(j, p, "positions", [&](const json& v, const std::string& k) {
    if (v.is_null()) {
      e.positions.reset();
      return;
    }
    if (!v.is_array()) throw ConfigError(k, "expected an array of numbers");
    std::vector<double> xs;
    xs.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      xs.push_back(get_number(v[i], k + "[" + std::to_string(i) + "]"));
    }
    e.positions = std::move(xs);
  });
  with_key(j, p, "seed", [&](const json& v, const std::string& k) { e.seed = get_seed(v, k); });
  // Explicit positions define the atom count.
  if (e.positions) {
    if (j.contains("n_atoms") && e.n_atoms != e.positions->size()) {
      throw ConfigError("ensemble.n_atoms", "does not match the number of positions");
    }
    e.n_atoms = e.positions->size();
  }
}

void parse_protocol(const json& j, Scenario::Protocol& pr) {
  const std::string p = "protocol";
  require_object(j, p);
  reject_unknown(j, p, {"n_pairs", "k1_rad_per_um", "r0_um"});
  with_key(j, p, "n_pairs", [&](const json& v, const std::string& k) {
    const auto n = get_integer(v, k);
    if (n < 0 || n > kMaxPairs) throw ConfigError(k, "must be in [0, 1000000]");
    pr.n_pairs = static_cast<int>(n);
  });
  with_key(j, p, "k1_rad_per_um",
           [&](const json& v, const std::string& k) { pr.k1_rad_per_um = get_number(v, k); });
  with_key(j, p, "r0_um", [&](const json& v, const std::string& k) { pr.r0_um = get_number(v, k); });
}

NoiseParams parse_noise(const json& j) {
  const std::string p = "noise";
  require_object(j, p);
  reject_unknown(j, p, {"dS_rad", "dPhi_rad", "retention", "perturb_decode", "perturb_pi_half"});
  NoiseParams n;
  with_key(j, p, "dS_rad", [&](const json& v, const std::string& k) { n.dS = get_number(v, k); });
  with_key(j, p, "dPhi_rad", [&](const json& v, const std::string& k) { n.dPhi = get_number(v, k); });
  with_key(j, p, "retention",
           [&](const json& v, const std::string& k) { n.retention = get_number(v, k); });
  with_key(j, p, "perturb_decode",
           [&](const json& v, const std::string& k) { n.perturb_decode = get_bool(v, k); });
  with_key(j, p, "perturb_pi_half",
           [&](const json& v, const std::string& k) { n.perturb_pi_half = get_bool(v, k); });
  return n;
}

ThermalParams parse_thermal(const json& j) {
  const std::string p = "thermal";
  require_object(j, p);
  reject_unknown(j, p, {"vm_um_per_us", "tau_us"});
  ThermalParams t;
  with_key(j, p, "vm_um_per_us", [&](const json& v, const std::string& k) { t.v_m = get_number(v, k); });
  with_key(j, p, "tau_us", [&](const json& v, const std::string& k) { t.tau = get_number(v, k); });
  return t;
}

Scenario::Scan parse_scan(const json& j) {
  const std::string p = "scan";
  require_object(j, p);
  reject_unknown(j, p, {"r0_min", "r0_max", "points"});
  Scenario::Scan s;
  with_key(j, p, "r0_min", [&](const json& v, const std::string& k) { s.r0_min = get_number(v, k); });
  with_key(j, p, "r0_max", [&](const json& v, const std::string& k) { s.r0_max = get_number(v, k); });
  with_key(j, p, "points", [&](const json& v, const std::string& k) {
    const auto n = get_integer(v, k);
    if (n < 1 || n > kMaxPoints) throw ConfigError(k, "must be in [1, 1000000]");
    s.points = static_cast<int>(n);
  });
  return s;
}

void parse_mc(const json& j, Scenario::Mc& mc) {
  const std::string p = "mc";
  require_object(j, p);
  reject_unknown(j, p, {"trials"});
  with_key(j, p, "trials", [&](const json& v, const std::string& k) {
    const auto n = get_integer(v, k);
    if (n < 1) throw ConfigError(k, "must be >= 1");
    mc.trials = static_cast<std::size_t>(n);
  });
}

void parse_sweep(const json& j, Scenario::Sweep& sw) {
  const std::string p = "sweep";
  require_object(j, p);
  reject_unknown(j, p, {"n_pairs"});
  with_key(j, p, "n_pairs", [&](const json& v, const std::string& k) {
    if (!v.is_array()) throw ConfigError(k, "expected an array of integers");
    std::vector<int> ns;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string ik = k + "[" + std::to_string(i) + "]";
      const auto n = get_integer(v[i], ik);
      if (n < 1 || n > kMaxPairs) throw ConfigError(ik, "must be in [1, 1000000]");
      ns.push_back(static_cast<int>(n));
    }
    sw.n_pairs = std::move(ns);
  });
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", "'" + path + "' is not valid JSON: " + e.what());
  }
}

Scenario rb_scenario() {
  Scenario s;
  s.name = "rb";
  s.ensemble.n_atoms = 64;
  s.protocol.n_pairs = 10;
  s.protocol.k1_rad_per_um = 2.0 * kPi / 200.0;
  s.protocol.r0_um = 1.25;  // 4 N k1 r0 = pi/2, the steepest fringe point
  s.thermal = ThermalParams{0.01, 100.0};
  s.mc.trials = 2000;
  return s;
}

Scenario pr_yso_scenario() {
  Scenario s;
  s.name = "pr-yso";
  s.ensemble.n_atoms = 64;
  s.protocol.n_pairs = 10;
  s.protocol.k1_rad_per_um = 2.0 * kPi / 0.6;
  s.protocol.r0_um = 0.00375;  // quarter fringe
  return s;
}

Scenario noisy_scenario(int n) {
  Scenario s;
  s.name = "noisy-n" + std::to_string(n);
  s.ensemble.n_atoms = 64;
  s.protocol.n_pairs = n;
  s.protocol.k1_rad_per_um = 2.0 * kPi / 200.0;
  s.noise = NoiseParams{0.1, 0.01, 1.0};
  // 1.5 fringe periods, 60 points per period.
  const double period = 200.0 / (4.0 * n);
  s.scan = Scenario::Scan{0.0, period * 89.0 / 60.0, 90};
  s.mc.trials = 500;
  return s;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "",
                 {"name", "ensemble", "protocol", "noise", "thermal", "scan", "mc", "sweep"});
  Scenario s;
  with_key(doc, "", "name", [&](const json& v, const std::string& k) {
    if (!v.is_string()) throw ConfigError(k, "expected a string");
    s.name = v.get<std::string>();
  });
  with_key(doc, "", "ensemble", [&](const json& v, const std::string&) { parse_ensemble(v, s.ensemble); });
  with_key(doc, "", "protocol", [&](const json& v, const std::string&) { parse_protocol(v, s.protocol); });
  with_key(doc, "", "noise", [&](const json& v, const std::string&) {
    if (!v.is_null()) s.noise = parse_noise(v);
  });
  with_key(doc, "", "thermal", [&](const json& v, const std::string&) {
    if (!v.is_null()) s.thermal = parse_thermal(v);
  });
  with_key(doc, "", "scan", [&](const json& v, const std::string&) {
    if (!v.is_null()) s.scan = parse_scan(v);
  });
  with_key(doc, "", "mc", [&](const json& v, const std::string&) { parse_mc(v, s.mc); });
  with_key(doc, "", "sweep", [&](const json& v, const std::string&) { parse_sweep(v, s.sweep); });
  validate(s);
  return s;
}

json to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  json ens;
  ens["n_atoms"] = s.ensemble.n_atoms;
  if (s.ensemble.length_um) ens["length_um"] = *s.ensemble.length_um;
  if (s.ensemble.positions) ens["positions"] = *s.ensemble.positions;
  ens["seed"] = s.ensemble.seed;
  doc["ensemble"] = std::move(ens);
  doc["protocol"] = {{"n_pairs", s.protocol.n_pairs},
                     {"k1_rad_per_um", s.protocol.k1_rad_per_um},
                     {"r0_um", s.protocol.r0_um}};
  if (s.noise) {
    doc["noise"] = {{"dS_rad", s.noise->dS},
                    {"dPhi_rad", s.noise->dPhi},
                    {"retention", s.noise->retention},
                    {"perturb_decode", s.noise->perturb_decode},
                    {"perturb_pi_half", s.noise->perturb_pi_half}};
  }
  if (s.thermal) doc["thermal"] = {{"vm_um_per_us", s.thermal->v_m}, {"tau_us", s.thermal->tau}};
  if (s.scan) {
    doc["scan"] = {{"r0_min", s.scan->r0_min}, {"r0_max", s.scan->r0_max}, {"points", s.scan->points}};
  }
  doc["mc"] = {{"trials", s.mc.trials}};
  doc["sweep"] = {{"n_pairs", s.sweep.n_pairs}};
  return doc;
}

void validate(const Scenario& s) {
  const auto& e = s.ensemble;
  if (e.positions) {
    if (e.positions->empty()) throw ConfigError("ensemble.positions", "must not be empty");
    if (e.positions->size() != e.n_atoms) {
      throw ConfigError("ensemble.n_atoms", "does not match the number of positions");
    }
  }
  if (e.n_atoms < 1 || e.n_atoms > kMaxAtoms) throw ConfigError("ensemble.n_atoms", "must be in [1, 10000000]");
  if (e.length_um && !(*e.length_um > 0.0 && std::isfinite(*e.length_um))) {
    throw ConfigError("ensemble.length_um", "must be > 0");
  }
  const auto& p = s.protocol;
  if (p.n_pairs < 0 || p.n_pairs > kMaxPairs) throw ConfigError("protocol.n_pairs", "must be in [0, 1000000]");
  if (!(p.k1_rad_per_um > 0.0) || !std::isfinite(p.k1_rad_per_um)) {
    throw ConfigError("protocol.k1_rad_per_um", "must be > 0");
  }
  if (!std::isfinite(p.r0_um)) throw ConfigError("protocol.r0_um", "must be finite");
  if (s.noise) {
    if (!(s.noise->dS >= 0.0)) throw ConfigError("noise.dS_rad", "must be >= 0");
    if (!(s.noise->dPhi >= 0.0)) throw ConfigError("noise.dPhi_rad", "must be >= 0");
    if (!(s.noise->retention > 0.0 && s.noise->retention <= 1.0)) {
      throw ConfigError("noise.retention", "must be in (0, 1]");
    }
  }
  if (s.thermal) {
    if (!(s.thermal->v_m >= 0.0) || !std::isfinite(s.thermal->v_m)) {
      throw ConfigError("thermal.vm_um_per_us", "must be >= 0");
    }
    if (!(s.thermal->tau >= 0.0) || !std::isfinite(s.thermal->tau)) {
      throw ConfigError("thermal.tau_us", "must be >= 0");
    }
  }
  if (s.scan) {
    if (!std::isfinite(s.scan->r0_min)) throw ConfigError("scan.r0_min", "must be finite");
    if (!std::isfinite(s.scan->r0_max)) throw ConfigError("scan.r0_max", "must be finite");
    if (s.scan->points < 1 || s.scan->points > kMaxPoints) {
      throw ConfigError("scan.points", "must be in [1, 1000000]");
    }
    if (s.scan->points > 1 && !(s.scan->r0_max > s.scan->r0_min)) {
      throw ConfigError("scan.r0_max", "must exceed scan.r0_min");
    }
  }
  if (s.mc.trials < 1) throw ConfigError("mc.trials", "must be >= 1");
  if (s.sweep.n_pairs.empty()) throw ConfigError("sweep.n_pairs", "must not be empty");
  for (int n : s.sweep.n_pairs) {
    if (n < 1 || n > kMaxPairs) throw ConfigError("sweep.n_pairs", "entries must be in [1, 1000000]");
  }
}

std::vector<PresetInfo> list_presets() {
  return {
      {"rb", "87Rb cold cloud: lambda1 = 200 um, N = 10, v_m = 0.01 um/us, tau = 100 us", {}},
      {"pr-yso", "Pr:Y2SiO5 crystal: lambda1 = 0.6 um, N = 10, atoms frozen", preset_notes("pr-yso")},
      {"noisy-n16", "Gaussian pulse noise dS = 0.1, dPhi = 0.01, N = 16, 500 trials per point", {}},
      {"noisy-n32", "Gaussian pulse noise dS = 0.1, dPhi = 0.01, N = 32, 500 trials per point", {}},
  };
}

std::vector<std::string> preset_notes(const std::string& name) {
  if (name == "pr-yso") {
    return {"fringe period lambda1/(4N) = 15 nm; a 7.5 nm resolution for this crystal "
            "would need a further factor of 2 that lambda1/(4N) does not produce"};
  }
  return {};
}

Scenario preset(const std::string& name) {
  if (name == "rb") return rb_scenario();
  if (name == "pr-yso") return pr_yso_scenario();
  if (name == "noisy-n16") return noisy_scenario(16);
  if (name == "noisy-n32") return noisy_scenario(32);
  std::string known;
  for (const auto& p : list_presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
}

void apply_overrides(Scenario& s, const Overrides& o) {
  if (o.no_noise) s.noise.reset();
  if (o.no_thermal) s.thermal.reset();
  if (o.n_pairs) s.protocol.n_pairs = *o.n_pairs;
  if (o.k1 && o.lambda1) throw ConfigError("protocol.k1_rad_per_um", "--k1 and --lambda1 are exclusive");
  if (o.k1) s.protocol.k1_rad_per_um = *o.k1;
  if (o.lambda1) {
    if (!(*o.lambda1 > 0.0)) throw ConfigError("protocol.k1_rad_per_um", "--lambda1 must be > 0");
    s.protocol.k1_rad_per_um = 2.0 * kPi / *o.lambda1;
  }
  if (o.r0) s.protocol.r0_um = *o.r0;
  if (o.n_atoms) {
    if (s.ensemble.positions) {
      throw ConfigError("ensemble.n_atoms", "cannot override the count of explicit positions");
    }
    s.ensemble.n_atoms = *o.n_atoms;
  }
  if (o.length) s.ensemble.length_um = *o.length;
  if (o.seed) s.ensemble.seed = *o.seed;
  if (o.dS || o.dPhi || o.retention || o.perturb_decode) {
    if (!s.noise) s.noise = NoiseParams{};
    if (o.dS) s.noise->dS = *o.dS;
    if (o.dPhi) s.noise->dPhi = *o.dPhi;
    if (o.retention) s.noise->retention = *o.retention;
    if (o.perturb_decode) s.noise->perturb_decode = *o.perturb_decode;
  }
  if (o.vm || o.tau) {
    if (!s.thermal) s.thermal = ThermalParams{};
    if (o.vm) s.thermal->v_m = *o.vm;
    if (o.tau) s.thermal->tau = *o.tau;
  }
  if (o.r0_min || o.r0_max || o.points) {
    if (!s.scan) {
      // Start from the default grid's extent so a lone --points is meaningful.
      const auto grid = default_r0_grid(std::max(s.protocol.n_pairs, 1), s.protocol.k1_rad_per_um);
      s.scan = Scenario::Scan{grid.front(), grid.back(), static_cast<int>(grid.size())};
    }
    if (o.r0_min) s.scan->r0_min = *o.r0_min;
    if (o.r0_max) s.scan->r0_max = *o.r0_max;
    if (o.points) s.scan->points = *o.points;
  }
  if (o.trials) s.mc.trials = *o.trials;
  if (o.sweep_n_pairs) s.sweep.n_pairs = *o.sweep_n_pairs;
}

Scenario resolve_scenario(const std::optional<std::string>& preset_name,
                          const std::optional<std::string>& config_path,
                          const Overrides& overrides) {
  json merged = preset_name ? to_json(preset(*preset_name)) : json::object();
  if (config_path) {
    json file = read_json_file(*config_path);
    // A report written by --out carries its resolved scenario under "config".
    if (file.is_object() && file.contains("config") && file.contains("tool")) {
      file = file["config"];
    }
    require_object(file, "");
    // Explicit positions in the file replace the preset's atom count.
    if (file.contains("ensemble") && file["ensemble"].is_object() &&
        file["ensemble"].contains("positions") && !file["ensemble"].contains("n_atoms") &&
        merged.contains("ensemble")) {
      merged["ensemble"].erase("n_atoms");
    }
    merged.merge_patch(file);
  }
  Scenario s = scenario_from_json(merged);
  apply_overrides(s, overrides);
  validate(s);
  return s;
}

ProtocolConfig to_protocol_config(const Scenario& s) {
  validate(s);
  ProtocolConfig c;
  c.n_pairs = s.protocol.n_pairs;
  c.k1 = s.protocol.k1_rad_per_um;
  c.n_atoms = s.ensemble.n_atoms;
  c.r0 = s.protocol.r0_um;
  c.ensemble_length = s.ensemble.length_um.value_or(0.0);
  c.positions = s.ensemble.positions;
  c.pulse_noise = s.noise;
  c.thermal = s.thermal;
  c.seed = s.ensemble.seed;
  return c;
}

std::vector<double> scan_grid(const Scenario& s) {
  if (!s.scan) return default_r0_grid(std::max(s.protocol.n_pairs, 1), s.protocol.k1_rad_per_um);
  const auto& sc = *s.scan;
  std::vector<double> grid(static_cast<std::size_t>(sc.points));
  if (sc.points == 1) {
    grid[0] = sc.r0_min;
    return grid;
  }
  const double step = (sc.r0_max - sc.r0_min) / (sc.points - 1);
  for (int i = 0; i < sc.points; ++i) grid[static_cast<std::size_t>(i)] = sc.r0_min + step * i;
  grid.back() = sc.r0_max;
  return grid;
}

}  // namespace srmetro::cli
