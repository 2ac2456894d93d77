#pragma once

// Pulse-noise and thermal-motion models, their closed-form visibility and
// sensitivity figures, and the Monte Carlo fringe engine.

#include <cstdint>
#include <vector>

#include "srmetro/dynamics.hpp"
#include "srmetro/params.hpp"
#include "srmetro/rng.hpp"

namespace srmetro {

/// area += Normal(0, dS^2), phase += Normal(0, dPhi^2); k untouched.
Pulse perturb_pulse(const Pulse& pulse, Rng& rng, const NoiseParams& params);

/// Pulse source drawing from rng. The returned callable references rng, which
/// must outlive it.
PulseSource noisy_pulses(const NoiseParams& params, Rng& rng);

struct McResult {
  std::vector<double> grid;    // k1 r0 (rad)
  std::vector<double> mean_P;
  std::vector<double> stderr_P;  // sample stddev / sqrt(trials)
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Averages run_trial over `trials` independent realizations per grid point
/// (r0 values in um). Trial (i, t) uses the stream derived from
/// (seed, i, t), so the result is bit-identical for any thread count.
/// threads == 0 picks the hardware concurrency.
McResult mc_fringe(const ProtocolConfig& config, const std::vector<double>& r0_grid,
                   std::size_t trials, unsigned threads = 0);

/// As mc_fringe but requires the thermal model; pulse noise is optional.
McResult mc_thermal_fringe(const ProtocolConfig& config, const std::vector<double>& r0_grid,
                           std::size_t trials, unsigned threads = 0);

/// [4N(1 - N dS^2/2)]^-1 + dPhi / sqrt(4N), in units of k1 r0.
double analytic_noisy_sensitivity(int n_pairs, double dS, double dPhi);

/// 1 - N dS^2 / 2
double analytic_noisy_visibility(int n_pairs, double dS);

/// exp(-2 (N k1 v_m tau)^2)
double thermal_envelope(int n_pairs, double k1, double v_m, double tau);

/// exp(eps^2 N^2) / 4N with eps = sqrt(2) k1 v_m tau.
double thermal_sensitivity(int n_pairs, double k1, double v_m, double tau);

}  // namespace srmetro
