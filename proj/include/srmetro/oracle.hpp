#pragma once

// Brute-force references for the closed-form pulse action. Small sizes only.

#include <Eigen/Dense>

#include "srmetro/dynamics.hpp"
#include "srmetro/ensemble.hpp"

namespace srmetro::oracle {

inline constexpr std::size_t kMaxDenseAtoms = 64;
inline constexpr std::size_t kMaxFullSpaceAtoms = 4;

/// Hermitian generator G of a pulse on the 2 N_a dimensional single-excitation
/// space; the pulse unitary is exp(i G). Row/column 2j is (atom j, level b),
/// 2j+1 is (atom j, level a).
class DenseGenerator {
 public:
  explicit DenseGenerator(Eigen::MatrixXcd m) : m_(std::move(m)) {}
  const Eigen::MatrixXcd& matrix() const { return m_; }
  std::size_t n_atoms() const { return static_cast<std::size_t>(m_.rows() / 2); }
  double hermiticity_error() const;

 private:
  Eigen::MatrixXcd m_;
};

DenseGenerator generator_matrix(const AtomEnsemble& ensemble, const Pulse& pulse);

/// exp(i G) state by scaled Taylor series.
ExcitationState expm_apply(const DenseGenerator& gen, const ExcitationState& state);

/// exp(i M) v for a general square matrix; the series stops once a term falls
/// below 1e-16 of the running sum.
Eigen::VectorXcd expm_i_times(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v);

struct FullSpaceReport {
  std::size_t dimension = 0;       // 3^N_a
  double max_leakage = 0.0;        // largest amplitude outside one-excitation states
  double max_closed_form_deviation = 0.0;  // vs apply_pulse on the manifold
};

/// Exponentiates the pulse generator on the full {c, b, a}^N_a space, applies it
/// to the embedded timed Dicke state |b_k>, and measures what leaves the
/// single-excitation manifold.
FullSpaceReport full_space_check(const AtomEnsemble& ensemble, const Pulse& pulse,
                                 double dicke_k = 0.0);

}  // namespace srmetro::oracle
