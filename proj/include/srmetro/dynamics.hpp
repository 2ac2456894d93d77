#pragma once

// Pulse unitaries on the single-excitation manifold and the Ramsey protocol:
// prepare |b_0>, pi/2, encode N pulse pairs, displace, decode, pi/2, read out.

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "srmetro/ensemble.hpp"
#include "srmetro/params.hpp"
#include "srmetro/rng.hpp"

namespace srmetro {

inline constexpr double kPi = std::numbers::pi;

/// One coherent pulse exp[i (area/2) sum_j (e^{i(k x_j + phase)} s+_j + h.c.)]
/// with s+_j = |b_j><a_j|. area in rad, k in rad/um (signed), phase in rad.
struct Pulse {
  double area = kPi;
  double k = 0.0;
  double phase = 0.0;

  void validate() const;
  bool operator==(const Pulse&) const = default;
};

/// Which part of the protocol a pulse belongs to; noise providers key on it.
enum class Stage { prepare, encode, decode, readout };

/// Maps each ideal pulse of the sequence to the pulse actually applied.
using PulseSource = std::function<Pulse(Stage, const Pulse&)>;

PulseSource ideal_pulses();

ExcitationState apply_pulse(const ExcitationState& state, const AtomEnsemble& ensemble,
                            const Pulse& pulse);

/// Per-atom rotation (|b> + i|a>)/sqrt2, (|a> + i|b>)/sqrt2; same as apply_pulse
/// with area pi/2, k = 0, phase 0.
ExcitationState apply_pi_half_ba(const ExcitationState& state);

/// 2N pi pulses, alternating k = +k1 then k = -k1 in application order.
ExcitationState encode_sequence(const ExcitationState& state, const AtomEnsemble& ensemble,
                                int n_pairs, double k1, const PulseSource& source);

/// Inverse train (U1 U2)^N: in application order k = -k1 then k = +k1, repeated.
/// With ideal pulses decode(encode(s)) == s exactly, including the global phase.
ExcitationState decode_sequence(const ExcitationState& state, const AtomEnsemble& ensemble,
                                int n_pairs, double k1, const PulseSource& source);

struct ProtocolConfig {
  int n_pairs = 1;             // N
  double k1 = 2.0 * kPi / 200.0;  // rad/um
  std::size_t n_atoms = 64;
  double r0 = 0.0;             // um, applied between encode and decode
  double ensemble_length = 0.0;  // um; <= 0 means 100 lambda1
  std::optional<std::vector<double>> positions;  // overrides n_atoms/length when set
  std::optional<NoiseParams> pulse_noise;
  std::optional<ThermalParams> thermal;
  std::uint64_t seed = kDefaultSeed;

  double lambda1() const { return 2.0 * kPi / k1; }
  void validate() const;
};

struct Readout {
  double P_b = 0.0;
  double P_a = 0.0;
  double P = 0.0;  // P_b - P_a
};

/// Ensemble described by the config; positions drawn from the config seed.
AtomEnsemble make_ensemble(const ProtocolConfig& config);

/// Full protocol on a fixed ensemble with an explicit pulse source. If
/// drift_time is nonzero the ensemble must carry velocities. Readout projects on
/// |b_0>, |a_0> built from the final lab-frame positions, scaled by retention.
Readout execute_protocol(const AtomEnsemble& ensemble, int n_pairs, double k1, double r0,
                         const PulseSource& source, double drift_time = 0.0,
                         double retention = 1.0);

/// One stochastic realization: draws pulse noise and thermal velocities (when
/// configured) from rng.
Readout run_trial(const AtomEnsemble& ensemble, const ProtocolConfig& config, Rng& rng);

/// Single protocol run; randomness comes from the config seed.
Readout run_protocol(const ProtocolConfig& config);

/// -cos(4 N k1 r0)
double ideal_signal(int n_pairs, double k1, double r0);

}  // namespace srmetro
