#include "srmetro/dynamics.hpp"

#include <cmath>
#include <span>
#include <string>

#include "srmetro/errors.hpp"
#include "srmetro/noise.hpp"

namespace srmetro {

namespace {

// In-place rotation of every atom's (b, a) pair. phasor[j] = e^{i k x_j} for the
// pulse wavenumber; the optical phase is folded in here.
void rotate_inplace(ExcitationState& s, std::span<const cplx> phasor, bool conjugate,
                    const Pulse& pulse) {
  const double theta = 0.5 * pulse.area;
  const double c = std::cos(theta);
  const cplx is = cplx(0.0, std::sin(theta)) * std::polar(1.0, pulse.phase);
  const cplx is_conj_phase = cplx(0.0, std::sin(theta)) * std::polar(1.0, -pulse.phase);
  const std::size_t n = s.size();
  for (std::size_t j = 0; j < n; ++j) {
    const cplx e = conjugate ? std::conj(phasor[j]) : phasor[j];
    const cplx b = s.amp_b[j];
    const cplx a = s.amp_a[j];
    s.amp_b[j] = c * b + is * e * a;
    s.amp_a[j] = c * a + is_conj_phase * std::conj(e) * b;
  }
}

// e^{i k x_j} tables for one set of positions, reused across a pulse train.
class PhaseTable {
 public:
  PhaseTable(std::span<const double> xs, double k1)
      : xs_(xs), k1_(k1), plus_(xs.size(), cplx(1.0, 0.0)) {
    if (k1 != 0.0) {
      for (std::size_t j = 0; j < xs.size(); ++j) plus_[j] = std::polar(1.0, k1 * xs[j]);
    }
  }

  void apply(ExcitationState& s, const Pulse& pulse) {
    if (pulse.k == k1_) {
      rotate_inplace(s, plus_, false, pulse);
    } else if (pulse.k == -k1_) {
      rotate_inplace(s, plus_, true, pulse);
    } else {
      scratch_.resize(xs_.size());
      for (std::size_t j = 0; j < xs_.size(); ++j) scratch_[j] = std::polar(1.0, pulse.k * xs_[j]);
      rotate_inplace(s, scratch_, false, pulse);
    }
  }

 private:
  std::span<const double> xs_;
  double k1_;
  std::vector<cplx> plus_;
  std::vector<cplx> scratch_;
};

void check_sized(const ExcitationState& s, const AtomEnsemble& e) {
  if (s.amp_b.size() != e.size() || s.amp_a.size() != e.size()) {
    throw InvalidInput("state sized for " + std::to_string(s.amp_b.size()) +
                       " atoms, ensemble has " + std::to_string(e.size()));
  }
}

void run_encode(ExcitationState& s, PhaseTable& table, int n_pairs, double k1,
                const PulseSource& source) {
  for (int i = 0; i < n_pairs; ++i) {
    table.apply(s, source(Stage::encode, Pulse{kPi, +k1, 0.0}));
    table.apply(s, source(Stage::encode, Pulse{kPi, -k1, 0.0}));
  }
}

void run_decode(ExcitationState& s, PhaseTable& table, int n_pairs, double k1,
                const PulseSource& source) {
  for (int i = 0; i < n_pairs; ++i) {
    table.apply(s, source(Stage::decode, Pulse{kPi, -k1, 0.0}));
    table.apply(s, source(Stage::decode, Pulse{kPi, +k1, 0.0}));
  }
}

void check_pairs(int n_pairs) {
  if (n_pairs < 0) throw InvalidInput("pulse-pair count N must be >= 0");
}

}  // namespace

void Pulse::validate() const {
  if (!std::isfinite(area) || !std::isfinite(k) || !std::isfinite(phase)) {
    throw InvalidInput("pulse fields must be finite");
  }
  if (area < 0.0) throw InvalidInput("pulse area must be >= 0");
}

PulseSource ideal_pulses() {
  return [](Stage, const Pulse& p) { return p; };
}

ExcitationState apply_pulse(const ExcitationState& state, const AtomEnsemble& ensemble,
                            const Pulse& pulse) {
  check_sized(state, ensemble);
  ExcitationState out = state;
  PhaseTable table(ensemble.positions(), pulse.k);
  table.apply(out, pulse);
  return out;
}

ExcitationState apply_pi_half_ba(const ExcitationState& state) {
  if (state.amp_a.size() != state.amp_b.size()) throw InvalidInput("malformed state");
  const double r = 1.0 / std::sqrt(2.0);
  const cplx i{0.0, 1.0};
  ExcitationState out = state;
  for (std::size_t j = 0; j < state.size(); ++j) {
    out.amp_b[j] = r * (state.amp_b[j] + i * state.amp_a[j]);
    out.amp_a[j] = r * (state.amp_a[j] + i * state.amp_b[j]);
  }
  return out;
}

ExcitationState encode_sequence(const ExcitationState& state, const AtomEnsemble& ensemble,
                                int n_pairs, double k1, const PulseSource& source) {
  check_sized(state, ensemble);
  check_pairs(n_pairs);
  ExcitationState out = state;
  PhaseTable table(ensemble.positions(), k1);
  run_encode(out, table, n_pairs, k1, source);
  return out;
}

ExcitationState decode_sequence(const ExcitationState& state, const AtomEnsemble& ensemble,
                                int n_pairs, double k1, const PulseSource& source) {
  check_sized(state, ensemble);
  check_pairs(n_pairs);
  ExcitationState out = state;
  PhaseTable table(ensemble.positions(), k1);
  run_decode(out, table, n_pairs, k1, source);
  return out;
}

void ProtocolConfig::validate() const {
  if (n_pairs < 0) throw InvalidInput("n_pairs must be >= 0");
  if (!(k1 > 0.0) || !std::isfinite(k1)) throw InvalidInput("k1 must be > 0");
  if (!std::isfinite(r0)) throw InvalidInput("r0 must be finite");
  if (positions) {
    if (positions->empty()) throw InvalidInput("positions must not be empty");
  } else {
    if (n_atoms < 1) throw InvalidInput("n_atoms must be >= 1");
    if (!std::isfinite(ensemble_length)) throw InvalidInput("ensemble length must be finite");
  }
  if (pulse_noise) pulse_noise->validate();
  if (thermal) thermal->validate();
}

AtomEnsemble make_ensemble(const ProtocolConfig& config) {
  config.validate();
  if (config.positions) return AtomEnsemble(*config.positions);
  const double length = config.ensemble_length > 0.0 ? config.ensemble_length
                                                      : 100.0 * config.lambda1();
  Rng rng = make_rng(config.seed, {stream::kPositions});
  return AtomEnsemble::uniform(config.n_atoms, length, rng);
}

Readout execute_protocol(const AtomEnsemble& ensemble, int n_pairs, double k1, double r0,
                         const PulseSource& source, double drift_time, double retention) {
  check_pairs(n_pairs);
  const std::size_t n = ensemble.size();

  ExcitationState s = make_timed_dicke(ensemble, Level::b, 0.0);
  PhaseTable zero(ensemble.positions(), 0.0);
  zero.apply(s, source(Stage::prepare, Pulse{kPi / 2.0, 0.0, 0.0}));

  {
    PhaseTable table(ensemble.positions(), k1);
    run_encode(s, table, n_pairs, k1, source);
  }

  const AtomEnsemble moved =
      drift_time != 0.0 ? displace(drift(ensemble, drift_time), r0) : displace(ensemble, r0);
  {
    PhaseTable table(moved.positions(), k1);
    run_decode(s, table, n_pairs, k1, source);
  }
  PhaseTable zero_moved(moved.positions(), 0.0);
  zero_moved.apply(s, source(Stage::readout, Pulse{kPi / 2.0, 0.0, 0.0}));

  // |b_0>, |a_0> on the final positions have uniform amplitude 1/sqrt(N_a).
  cplx proj_b{0.0, 0.0};
  cplx proj_a{0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    proj_b += s.amp_b[j];
    proj_a += s.amp_a[j];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  Readout r;
  r.P_b = retention * std::norm(proj_b) * inv_n;
  r.P_a = retention * std::norm(proj_a) * inv_n;
  r.P = r.P_b - r.P_a;
  return r;
}

Readout run_trial(const AtomEnsemble& ensemble, const ProtocolConfig& config, Rng& rng) {
  PulseSource source = config.pulse_noise ? noisy_pulses(*config.pulse_noise, rng)
                                          : ideal_pulses();
  const double retention = config.pulse_noise ? config.pulse_noise->retention : 1.0;
  // Drawn unconditionally so the pulse stream is the same with or without the
  // thermal model.
  const std::uint64_t velocity_seed = rng();
  if (config.thermal && config.thermal->v_m > 0.0 && config.thermal->tau != 0.0) {
    Rng vel_rng(velocity_seed);
    auto vs = sample_thermal_velocities(vel_rng, config.thermal->v_m, ensemble.size());
    return execute_protocol(ensemble.with_velocities(std::move(vs)), config.n_pairs,
                            config.k1, config.r0, source, config.thermal->tau, retention);
  }
  return execute_protocol(ensemble, config.n_pairs, config.k1, config.r0, source, 0.0,
                          retention);
}

Readout run_protocol(const ProtocolConfig& config) {
  const AtomEnsemble ensemble = make_ensemble(config);
  Rng rng = make_rng(config.seed, {stream::kSingleRun});
  return run_trial(ensemble, config, rng);
}

double ideal_signal(int n_pairs, double k1, double r0) {
  return -std::cos(4.0 * static_cast<double>(n_pairs) * k1 * r0);
}

}  // namespace srmetro
