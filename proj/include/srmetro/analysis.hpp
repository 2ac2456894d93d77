#pragma once

// Fringe scans, cosine fitting, and sensitivity figures.

#include <optional>
#include <string_view>
#include <vector>

#include "srmetro/dynamics.hpp"

namespace srmetro {

enum class ScanSource { ideal, mc, mc_thermal };

std::string_view to_string(ScanSource source);
ScanSource scan_source_from_string(std::string_view name);

struct FringeScan {
  std::vector<double> grid;  // k1 r0 (rad), strictly increasing
  std::vector<double> P;
  ScanSource source = ScanSource::ideal;
  std::optional<std::vector<double>> stderr_P;

  void validate() const;
};

/// Model P = -V cos(f x + theta), x = k1 r0.
struct FitResult {
  double visibility = 0.0;
  double frequency = 0.0;
  double phase = 0.0;
  double residual_rms = 0.0;
  // Propagated from per-point standard errors when the scan has them.
  std::optional<double> visibility_stderr;
  std::optional<double> frequency_stderr;
  std::optional<double> visibility_frequency_cov;
};

struct SensitivityReport {
  double delta = 0.0;  // phase sensitivity in units of k1 r0
  double heisenberg = 0.0;
  double shot_noise = 0.0;
  double ratio_to_heisenberg = 0.0;
  double ratio_to_shot_noise = 0.0;
  std::optional<double> delta_stderr;
};

/// r0 grid with 60 points per fringe period covering 1.5 periods.
std::vector<double> default_r0_grid(int n_pairs, double k1);

/// Evaluates the signal at each r0 (um). The ideal source strips noise and
/// thermal motion from the config; the Monte Carlo sources average `trials` runs.
FringeScan scan_fringe(const ProtocolConfig& config, const std::vector<double>& r0_grid,
                       ScanSource source = ScanSource::ideal, std::size_t trials = 1,
                       unsigned threads = 0);

/// Least squares at fixed frequency over the two quadratures, golden-section
/// search on the frequency within +-10% of f_hint, then a Gauss-Newton polish
/// of (quadratures, frequency).
FitResult fit_cosine(const FringeScan& scan, double f_hint);

/// Single-shot projection noise at the steepest point of the fitted fringe:
/// delta = 1 / (f V).
SensitivityReport sensitivity_from_fit(const FitResult& fit, int n_pairs);

FringeScan apply_retention(const FringeScan& scan, double eta);

}  // namespace srmetro
