#include "srmetro/analysis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "srmetro/errors.hpp"
#include "srmetro/noise.hpp"

namespace srmetro {

std::string_view to_string(ScanSource source) {
  switch (source) {
    case ScanSource::ideal:
      return "ideal";
    case ScanSource::mc:
      return "mc";
    case ScanSource::mc_thermal:
      return "mc_thermal";
  }
  return "ideal";
}

ScanSource scan_source_from_string(std::string_view name) {
  if (name == "ideal") return ScanSource::ideal;
  if (name == "mc") return ScanSource::mc;
  if (name == "mc_thermal") return ScanSource::mc_thermal;
  throw InvalidInput("unknown scan source '" + std::string(name) + "'");
}

void FringeScan::validate() const {
  if (grid.size() != P.size()) throw InvalidInput("scan grid and signal lengths differ");
  if (stderr_P && stderr_P->size() != P.size()) {
    throw InvalidInput("scan stderr and signal lengths differ");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidInput("scan grid must be strictly increasing");
  }
}

std::vector<double> default_r0_grid(int n_pairs, double k1) {
  if (n_pairs < 1) throw InvalidInput("default grid needs N >= 1");
  if (!(k1 > 0.0)) throw InvalidInput("k1 must be > 0");
  constexpr int kPointsPerPeriod = 60;
  constexpr int kPoints = 90;  // 1.5 periods
  const double period = 2.0 * kPi / (4.0 * n_pairs * k1);
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) grid[i] = period * i / kPointsPerPeriod;
  return grid;
}

FringeScan scan_fringe(const ProtocolConfig& config, const std::vector<double>& r0_grid,
                       ScanSource source, std::size_t trials, unsigned threads) {
  if (r0_grid.empty()) throw InvalidInput("scan grid must not be empty");
  for (std::size_t i = 1; i < r0_grid.size(); ++i) {
    if (!(r0_grid[i] > r0_grid[i - 1])) throw InvalidInput("scan grid must be strictly increasing");
  }
  config.validate();

  FringeScan scan;
  scan.source = source;
  if (source == ScanSource::ideal) {
    ProtocolConfig ideal = config;
    ideal.thermal.reset();
    const double eta = config.pulse_noise ? config.pulse_noise->retention : 1.0;
    ideal.pulse_noise.reset();
    const AtomEnsemble ensemble = make_ensemble(ideal);
    scan.grid.reserve(r0_grid.size());
    scan.P.reserve(r0_grid.size());
    for (double r0 : r0_grid) {
      scan.grid.push_back(config.k1 * r0);
      scan.P.push_back(
          execute_protocol(ensemble, config.n_pairs, config.k1, r0, ideal_pulses(), 0.0, eta).P);
    }
  } else {
    const McResult mc = source == ScanSource::mc ? mc_fringe(config, r0_grid, trials, threads)
                                                 : mc_thermal_fringe(config, r0_grid, trials, threads);
    scan.grid = mc.grid;
    scan.P = mc.mean_P;
    scan.stderr_P = mc.stderr_P;
  }
  return scan;
}

namespace {

struct LinearFit {
  double a = 0.0;  // cos coefficient
  double b = 0.0;  // sin coefficient
  double ss = 0.0;
};

LinearFit fit_at_frequency(const FringeScan& scan, double f) {
  double cc = 0.0, ss = 0.0, cs = 0.0, yc = 0.0, ys = 0.0;
  for (std::size_t i = 0; i < scan.grid.size(); ++i) {
    const double c = std::cos(f * scan.grid[i]);
    const double s = std::sin(f * scan.grid[i]);
    cc += c * c;
    ss += s * s;
    cs += c * s;
    yc += scan.P[i] * c;
    ys += scan.P[i] * s;
  }
  const double det = cc * ss - cs * cs;
  LinearFit out;
  if (std::abs(det) < 1e-300) {
    out.ss = std::numeric_limits<double>::infinity();
    return out;
  }
  out.a = (yc * ss - ys * cs) / det;
  out.b = (ys * cc - yc * cs) / det;
  for (std::size_t i = 0; i < scan.grid.size(); ++i) {
    const double r = scan.P[i] - out.a * std::cos(f * scan.grid[i]) - out.b * std::sin(f * scan.grid[i]);
    out.ss += r * r;
  }
  return out;
}

double sum_squares(const FringeScan& scan, double a, double b, double f) {
  double ss = 0.0;
  for (std::size_t i = 0; i < scan.grid.size(); ++i) {
    const double r = scan.P[i] - a * std::cos(f * scan.grid[i]) - b * std::sin(f * scan.grid[i]);
    ss += r * r;
  }
  return ss;
}

Eigen::MatrixX3d jacobian(const FringeScan& scan, double a, double b, double f) {
  Eigen::MatrixX3d j(static_cast<Eigen::Index>(scan.grid.size()), 3);
  for (std::size_t i = 0; i < scan.grid.size(); ++i) {
    const double x = scan.grid[i];
    const double c = std::cos(f * x);
    const double s = std::sin(f * x);
    const auto r = static_cast<Eigen::Index>(i);
    j(r, 0) = c;
    j(r, 1) = s;
    j(r, 2) = x * (-a * s + b * c);
  }
  return j;
}

}  // namespace

FitResult fit_cosine(const FringeScan& scan, double f_hint) {
  scan.validate();
  if (scan.grid.size() < 5) throw FitDegeneracy("cosine fit needs at least 5 points");
  if (!(f_hint > 0.0)) throw FitDegeneracy("frequency hint must be > 0");
  const double span = scan.grid.back() - scan.grid.front();
  if (span * f_hint < kPi) throw FitDegeneracy("scan spans less than half a fringe period");

  // Golden-section search of the profiled residual over f.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.9 * f_hint;
  double hi = 1.1 * f_hint;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fit_at_frequency(scan, x1).ss;
  double f2 = fit_at_frequency(scan, x2).ss;
  while (hi - lo > 1e-12 * f_hint) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fit_at_frequency(scan, x1).ss;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fit_at_frequency(scan, x2).ss;
    }
  }
  double f = 0.5 * (lo + hi);
  LinearFit lin = fit_at_frequency(scan, f);
  double a = lin.a;
  double b = lin.b;
  double ss = lin.ss;

  // Gauss-Newton polish; golden section only resolves f to ~sqrt(eps).
  const Eigen::Map<const Eigen::VectorXd> y(scan.P.data(), static_cast<Eigen::Index>(scan.P.size()));
  for (int iter = 0; iter < 20; ++iter) {
    const Eigen::MatrixX3d j = jacobian(scan, a, b, f);
    Eigen::VectorXd r(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double x = scan.grid[static_cast<std::size_t>(i)];
      r(i) = y(i) - a * std::cos(f * x) - b * std::sin(f * x);
    }
    const Eigen::Vector3d step = j.colPivHouseholderQr().solve(r);
    const double ss_new = sum_squares(scan, a + step(0), b + step(1), f + step(2));
    if (!(ss_new < ss)) break;
    a += step(0);
    b += step(1);
    f += step(2);
    ss = ss_new;
  }

  FitResult fit;
  fit.visibility = std::hypot(a, b);
  fit.frequency = f;
  // -V cos(f x + theta) = -V cos(theta) cos(f x) + V sin(theta) sin(f x)
  fit.phase = std::atan2(b, -a);
  fit.residual_rms = std::sqrt(ss / static_cast<double>(scan.grid.size()));

  if (scan.stderr_P) {
    const Eigen::MatrixX3d j = jacobian(scan, a, b, f);
    const Eigen::Matrix3d jtj_inv = (j.transpose() * j).inverse();
    Eigen::Matrix3d meat = Eigen::Matrix3d::Zero();
    for (Eigen::Index i = 0; i < j.rows(); ++i) {
      const double s = (*scan.stderr_P)[static_cast<std::size_t>(i)];
      meat += s * s * j.row(i).transpose() * j.row(i);
    }
    const Eigen::Matrix3d cov = jtj_inv * meat * jtj_inv;
    Eigen::Vector3d dv(0.0, 0.0, 0.0);
    if (fit.visibility > 0.0) dv = Eigen::Vector3d(a / fit.visibility, b / fit.visibility, 0.0);
    const Eigen::Vector3d df(0.0, 0.0, 1.0);
    fit.visibility_stderr = std::sqrt(dv.dot(cov * dv));
    fit.frequency_stderr = std::sqrt(cov(2, 2));
    fit.visibility_frequency_cov = dv.dot(cov * df);
  }
  return fit;
}

SensitivityReport sensitivity_from_fit(const FitResult& fit, int n_pairs) {
  if (n_pairs < 1) throw InvalidInput("sensitivity needs N >= 1");
  if (!(fit.visibility > 0.0)) throw NoFringe("fitted visibility is zero: no fringe");
  if (!(fit.frequency > 0.0)) throw NoFringe("fitted frequency is not positive");
  const double n4 = 4.0 * static_cast<double>(n_pairs);
  SensitivityReport rep;
  rep.delta = 1.0 / (fit.frequency * fit.visibility);
  rep.heisenberg = 1.0 / n4;
  rep.shot_noise = 1.0 / std::sqrt(n4);
  rep.ratio_to_heisenberg = rep.delta / rep.heisenberg;
  rep.ratio_to_shot_noise = rep.delta / rep.shot_noise;
  if (fit.visibility_stderr && fit.frequency_stderr) {
    const double rv = *fit.visibility_stderr / fit.visibility;
    const double rf = *fit.frequency_stderr / fit.frequency;
    const double rvf = fit.visibility_frequency_cov.value_or(0.0) / (fit.visibility * fit.frequency);
    rep.delta_stderr = rep.delta * std::sqrt(std::max(0.0, rv * rv + rf * rf + 2.0 * rvf));
  }
  return rep;
}

FringeScan apply_retention(const FringeScan& scan, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidInput("retention must be in (0, 1]");
  FringeScan out = scan;
  for (auto& p : out.P) p *= eta;
  if (out.stderr_P) {
    for (auto& s : *out.stderr_P) s *= eta;
  }
  return out;
}

}  // namespace srmetro
