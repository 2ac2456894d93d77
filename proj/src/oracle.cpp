#include "srmetro/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srmetro/errors.hpp"

namespace srmetro::oracle {

double DenseGenerator::hermiticity_error() const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

DenseGenerator generator_matrix(const AtomEnsemble& ensemble, const Pulse& pulse) {
  const std::size_t n = ensemble.size();
  if (n > kMaxDenseAtoms) {
    throw OracleScaleExceeded(std::to_string(n) + " atoms > " + std::to_string(kMaxDenseAtoms));
  }
  pulse.validate();
  const auto xs = ensemble.positions();
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx e = std::polar(0.5 * pulse.area, pulse.k * xs[j] + pulse.phase);
    const auto b = static_cast<Eigen::Index>(2 * j);
    g(b, b + 1) = e;             // <b_j| s+_j |a_j>
    g(b + 1, b) = std::conj(e);  // <a_j| s-_j |b_j>
  }
  return DenseGenerator(std::move(g));
}

Eigen::VectorXcd expm_i_times(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v) {
  if (m.rows() != m.cols() || m.cols() != v.size()) {
    throw InvalidInput("expm: dimension mismatch");
  }
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  const int steps = std::max(1, static_cast<int>(std::ceil(norm1)));
  const Eigen::MatrixXcd a = cplx(0.0, 1.0 / steps) * m;

  Eigen::VectorXcd out = v;
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXcd term = out;
    Eigen::VectorXcd sum = out;
    for (int k = 1; k < 200; ++k) {
      term = (a * term) / static_cast<double>(k);
      sum += term;
      if (term.norm() <= 1e-16 * sum.norm()) break;
    }
    out = sum;
  }
  return out;
}

ExcitationState expm_apply(const DenseGenerator& gen, const ExcitationState& state) {
  const std::size_t n = gen.n_atoms();
  if (state.amp_b.size() != n || state.amp_a.size() != n) {
    throw InvalidInput("expm_apply: state and generator dimensions differ");
  }
  Eigen::VectorXcd v(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    v(2 * j) = state.amp_b[j];
    v(2 * j + 1) = state.amp_a[j];
  }
  const Eigen::VectorXcd w = expm_i_times(gen.matrix(), v);
  ExcitationState out{std::vector<cplx>(n), std::vector<cplx>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.amp_b[j] = w(2 * j);
    out.amp_a[j] = w(2 * j + 1);
  }
  return out;
}

namespace {

// Per-atom level digits in base 3.
constexpr int kC = 0;
constexpr int kB = 1;
constexpr int kA = 2;

std::size_t pow3(std::size_t n) {
  std::size_t p = 1;
  for (std::size_t i = 0; i < n; ++i) p *= 3;
  return p;
}

int digit(std::size_t index, std::size_t atom) {
  for (std::size_t i = 0; i < atom; ++i) index /= 3;
  return static_cast<int>(index % 3);
}

std::size_t single_excitation_index(std::size_t atom, int level) {
  return static_cast<std::size_t>(level) * pow3(atom);
}

}  // namespace

FullSpaceReport full_space_check(const AtomEnsemble& ensemble, const Pulse& pulse,
                                 double dicke_k) {
  const std::size_t n = ensemble.size();
  if (n > kMaxFullSpaceAtoms) {
    throw OracleScaleExceeded(std::to_string(n) + " atoms > " +
                              std::to_string(kMaxFullSpaceAtoms) + " for full-space check");
  }
  pulse.validate();
  const std::size_t dim = pow3(n);
  const auto xs = ensemble.positions();

  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    for (std::size_t j = 0; j < n; ++j) {
      const int lv = digit(idx, j);
      const cplx e = std::polar(0.5 * pulse.area, pulse.k * xs[j] + pulse.phase);
      const std::size_t stride = pow3(j);
      if (lv == kA) {
        // s+_j |..a_j..> = |..b_j..>
        const std::size_t to = idx - (kA - kB) * stride;
        g(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(idx)) += e;
      } else if (lv == kB) {
        const std::size_t to = idx + (kA - kB) * stride;
        g(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(idx)) += std::conj(e);
      }
    }
  }

  const ExcitationState dicke = make_timed_dicke(ensemble, Level::b, dicke_k);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < n; ++j) {
    psi(static_cast<Eigen::Index>(single_excitation_index(j, kB))) = dicke.amp_b[j];
  }
  const Eigen::VectorXcd out = expm_i_times(g, psi);

  FullSpaceReport report;
  report.dimension = dim;
  for (std::size_t idx = 0; idx < dim; ++idx) {
    int excited = 0;
    for (std::size_t j = 0; j < n; ++j) excited += digit(idx, j) != kC ? 1 : 0;
    if (excited != 1) {
      report.max_leakage =
          std::max(report.max_leakage, std::abs(out(static_cast<Eigen::Index>(idx))));
    }
  }

  const ExcitationState closed = apply_pulse(dicke, ensemble, pulse);
  for (std::size_t j = 0; j < n; ++j) {
    const auto ib = static_cast<Eigen::Index>(single_excitation_index(j, kB));
    const auto ia = static_cast<Eigen::Index>(single_excitation_index(j, kA));
    report.max_closed_form_deviation =
        std::max({report.max_closed_form_deviation, std::abs(out(ib) - closed.amp_b[j]),
                  std::abs(out(ia) - closed.amp_a[j])});
  }
  return report;
}

}  // namespace srmetro::oracle
