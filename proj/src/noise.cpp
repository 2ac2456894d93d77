#include "srmetro/noise.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "srmetro/errors.hpp"

namespace srmetro {

void NoiseParams::validate() const {
  if (!(dS >= 0.0) || !std::isfinite(dS)) throw InvalidInput("dS must be >= 0");
  if (!(dPhi >= 0.0) || !std::isfinite(dPhi)) throw InvalidInput("dPhi must be >= 0");
  if (!(retention > 0.0 && retention <= 1.0)) throw InvalidInput("retention must be in (0, 1]");
}

void ThermalParams::validate() const {
  if (!(v_m >= 0.0) || !std::isfinite(v_m)) throw InvalidInput("v_m must be >= 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidInput("tau must be >= 0");
}

Pulse perturb_pulse(const Pulse& pulse, Rng& rng, const NoiseParams& params) {
  Pulse out = pulse;
  // Both draws happen even for zero widths so the stream layout is fixed.
  std::normal_distribution<double> unit(0.0, 1.0);
  const double area_draw = unit(rng);
  const double phase_draw = unit(rng);
  out.area += params.dS * area_draw;
  out.phase += params.dPhi * phase_draw;
  return out;
}

PulseSource noisy_pulses(const NoiseParams& params, Rng& rng) {
  return [params, &rng](Stage stage, const Pulse& ideal) {
    switch (stage) {
      case Stage::encode:
        return perturb_pulse(ideal, rng, params);
      case Stage::decode:
        return params.perturb_decode ? perturb_pulse(ideal, rng, params) : ideal;
      case Stage::prepare:
      case Stage::readout:
        return params.perturb_pi_half ? perturb_pulse(ideal, rng, params) : ideal;
    }
    return ideal;
  };
}

namespace {

McResult run_monte_carlo(const ProtocolConfig& config, const std::vector<double>& r0_grid,
                         std::size_t trials, unsigned threads) {
  config.validate();
  if (trials < 1) throw InvalidInput("trials must be >= 1");
  if (r0_grid.empty()) throw InvalidInput("grid must not be empty");

  const AtomEnsemble ensemble = make_ensemble(config);
  const std::size_t n_points = r0_grid.size();
  const std::size_t n_jobs = n_points * trials;
  std::vector<double> slots(n_jobs);

  auto work = [&](std::size_t begin, std::size_t end) {
    ProtocolConfig local = config;
    for (std::size_t job = begin; job < end; ++job) {
      const std::size_t point = job / trials;
      const std::size_t trial = job % trials;
      local.r0 = r0_grid[point];
      Rng rng = make_rng(config.seed, {stream::kTrial, point, trial});
      slots[job] = run_trial(ensemble, local, rng).P;
    }
  };

  unsigned n_threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_jobs));
  if (n_threads <= 1) {
    work(0, n_jobs);
  } else {
    std::vector<std::exception_ptr> errors(n_threads);
    {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (n_jobs + n_threads - 1) / n_threads;
      for (unsigned t = 0; t < n_threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n_jobs, begin + chunk);
        pool.emplace_back([&, t, begin, end] {
          try {
            work(begin, end);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  McResult result;
  result.trials = trials;
  result.seed = config.seed;
  result.grid.resize(n_points);
  result.mean_P.resize(n_points);
  result.stderr_P.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double* p = slots.data() + i * trials;
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) sum += p[t];
    const double mean = sum / static_cast<double>(trials);
    double ss = 0.0;
    for (std::size_t t = 0; t < trials; ++t) ss += (p[t] - mean) * (p[t] - mean);
    const double sd = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;
    result.grid[i] = config.k1 * r0_grid[i];
    result.mean_P[i] = mean;
    result.stderr_P[i] = sd / std::sqrt(static_cast<double>(trials));
  }
  return result;
}

}  // namespace

McResult mc_fringe(const ProtocolConfig& config, const std::vector<double>& r0_grid,
                   std::size_t trials, unsigned threads) {
  if (!config.pulse_noise) throw InvalidInput("mc_fringe requires pulse noise parameters");
  return run_monte_carlo(config, r0_grid, trials, threads);
}

McResult mc_thermal_fringe(const ProtocolConfig& config, const std::vector<double>& r0_grid,
                           std::size_t trials, unsigned threads) {
  if (!config.thermal) throw InvalidInput("mc_thermal_fringe requires thermal parameters");
  return run_monte_carlo(config, r0_grid, trials, threads);
}

double analytic_noisy_visibility(int n_pairs, double dS) {
  return 1.0 - static_cast<double>(n_pairs) * dS * dS / 2.0;
}

double analytic_noisy_sensitivity(int n_pairs, double dS, double dPhi) {
  if (n_pairs < 1) throw InvalidInput("N must be >= 1");
  if (dS < 0.0 || dPhi < 0.0) throw InvalidInput("noise widths must be >= 0");
  const double n4 = 4.0 * static_cast<double>(n_pairs);
  const double v = analytic_noisy_visibility(n_pairs, dS);
  if (v <= 0.0) throw DegenerateVisibility("N dS^2 / 2 >= 1: no fringe visibility left");
  return 1.0 / (n4 * v) + dPhi / std::sqrt(n4);
}

double thermal_envelope(int n_pairs, double k1, double v_m, double tau) {
  if (n_pairs < 0 || k1 < 0.0 || v_m < 0.0 || tau < 0.0) {
    throw InvalidInput("thermal_envelope arguments must be >= 0");
  }
  const double x = static_cast<double>(n_pairs) * k1 * v_m * tau;
  return std::exp(-2.0 * x * x);
}

double thermal_sensitivity(int n_pairs, double k1, double v_m, double tau) {
  if (n_pairs < 1) throw InvalidInput("N must be >= 1");
  if (k1 < 0.0 || v_m < 0.0 || tau < 0.0) throw InvalidInput("thermal arguments must be >= 0");
  const double eps = std::sqrt(2.0) * k1 * v_m * tau;
  const double n = static_cast<double>(n_pairs);
  return std::exp(eps * eps * n * n) / (4.0 * n);
}

}  // namespace srmetro
