#pragma once

// Atomic ensemble geometry and single-excitation collective states.
//
// Units throughout the library: lengths in um, wavenumbers in rad/um,
// times in us, velocities in um/us.

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "srmetro/rng.hpp"

namespace srmetro {

using cplx = std::complex<double>;

enum class Level { a, b };

/// Positions (um) and optional velocities (um/us) of N_a atoms on the x axis.
class AtomEnsemble {
 public:
  explicit AtomEnsemble(std::vector<double> positions,
                        std::optional<std::vector<double>> velocities = std::nullopt);

  /// N_a atoms uniform on [0, length).
  static AtomEnsemble uniform(std::size_t n_atoms, double length, Rng& rng);

  std::size_t size() const { return positions_.size(); }
  std::span<const double> positions() const { return positions_; }
  bool has_velocities() const { return velocities_.has_value(); }
  std::span<const double> velocities() const;

  AtomEnsemble with_velocities(std::vector<double> velocities) const;

  bool operator==(const AtomEnsemble&) const = default;

 private:
  std::vector<double> positions_;
  std::optional<std::vector<double>> velocities_;
};

/// Amplitudes over (atom j, level) in the single-excitation manifold: amp_b[j]
/// multiplies |c...b_j...c>, amp_a[j] multiplies |c...a_j...c>.
struct ExcitationState {
  std::vector<cplx> amp_b;
  std::vector<cplx> amp_a;

  std::size_t size() const { return amp_b.size(); }
  double norm_squared() const;
  ExcitationState scaled(cplx factor) const;
};

ExcitationState make_timed_dicke(const AtomEnsemble& ensemble, Level level, double k);

/// <s1|s2>
cplx overlap(const ExcitationState& s1, const ExcitationState& s2);

/// |<s1|s2>|^2
double fidelity(const ExcitationState& s1, const ExcitationState& s2);

AtomEnsemble displace(const AtomEnsemble& ensemble, double d);

/// Free flight x_j -> x_j + v_j t. Throws InvalidState without velocities.
AtomEnsemble drift(const AtomEnsemble& ensemble, double t);

/// 1-D Maxwell-Boltzmann component: Normal(0, v_m / sqrt(2)), where v_m is the
/// most probable 3-D speed sqrt(2 k_B T / m).
std::vector<double> sample_thermal_velocities(Rng& rng, double v_m, std::size_t n_atoms);

}  // namespace srmetro
