#include "srmetro/ensemble.hpp"

#include <cmath>
#include <random>
#include <string>

#include "srmetro/errors.hpp"

namespace srmetro {

AtomEnsemble::AtomEnsemble(std::vector<double> positions,
                           std::optional<std::vector<double>> velocities)
    : positions_(std::move(positions)), velocities_(std::move(velocities)) {
  if (positions_.empty()) throw InvalidInput("ensemble must contain at least one atom");
  for (double x : positions_) {
    if (!std::isfinite(x)) throw InvalidInput("atom positions must be finite");
  }
  if (velocities_) {
    if (velocities_->size() != positions_.size()) {
      throw InvalidInput("velocity list length " + std::to_string(velocities_->size()) +
                         " does not match atom count " + std::to_string(positions_.size()));
    }
    for (double v : *velocities_) {
      if (!std::isfinite(v)) throw InvalidInput("atom velocities must be finite");
    }
  }
}

AtomEnsemble AtomEnsemble::uniform(std::size_t n_atoms, double length, Rng& rng) {
  if (n_atoms == 0) throw InvalidInput("n_atoms must be >= 1");
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidInput("ensemble length must be > 0");
  std::uniform_real_distribution<double> dist(0.0, length);
  std::vector<double> xs(n_atoms);
  for (auto& x : xs) x = dist(rng);
  return AtomEnsemble(std::move(xs));
}

std::span<const double> AtomEnsemble::velocities() const {
  if (!velocities_) throw InvalidState("ensemble has no velocities");
  return *velocities_;
}

AtomEnsemble AtomEnsemble::with_velocities(std::vector<double> velocities) const {
  return AtomEnsemble(positions_, std::move(velocities));
}

double ExcitationState::norm_squared() const {
  double n = 0.0;
  for (const auto& c : amp_b) n += std::norm(c);
  for (const auto& c : amp_a) n += std::norm(c);
  return n;
}

ExcitationState ExcitationState::scaled(cplx factor) const {
  ExcitationState out = *this;
  for (auto& c : out.amp_b) c *= factor;
  for (auto& c : out.amp_a) c *= factor;
  return out;
}

ExcitationState make_timed_dicke(const AtomEnsemble& ensemble, Level level, double k) {
  const std::size_t n = ensemble.size();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  ExcitationState s{std::vector<cplx>(n), std::vector<cplx>(n)};
  auto& target = (level == Level::b) ? s.amp_b : s.amp_a;
  const auto xs = ensemble.positions();
  for (std::size_t j = 0; j < n; ++j) target[j] = std::polar(inv_sqrt_n, k * xs[j]);
  return s;
}

cplx overlap(const ExcitationState& s1, const ExcitationState& s2) {
  if (s1.amp_b.size() != s2.amp_b.size() || s1.amp_a.size() != s2.amp_a.size() ||
      s1.amp_a.size() != s1.amp_b.size()) {
    throw InvalidInput("overlap: states sized for different ensembles");
  }
  cplx sum{0.0, 0.0};
  for (std::size_t j = 0; j < s1.size(); ++j) {
    sum += std::conj(s1.amp_b[j]) * s2.amp_b[j] + std::conj(s1.amp_a[j]) * s2.amp_a[j];
  }
  return sum;
}

double fidelity(const ExcitationState& s1, const ExcitationState& s2) {
  return std::norm(overlap(s1, s2));
}

AtomEnsemble displace(const AtomEnsemble& ensemble, double d) {
  std::vector<double> xs(ensemble.positions().begin(), ensemble.positions().end());
  for (auto& x : xs) x += d;
  if (ensemble.has_velocities()) {
    const auto vs = ensemble.velocities();
    return AtomEnsemble(std::move(xs), std::vector<double>(vs.begin(), vs.end()));
  }
  return AtomEnsemble(std::move(xs));
}

AtomEnsemble drift(const AtomEnsemble& ensemble, double t) {
  if (!ensemble.has_velocities()) throw InvalidState("drift requires atom velocities");
  const auto vs = ensemble.velocities();
  std::vector<double> xs(ensemble.positions().begin(), ensemble.positions().end());
  for (std::size_t j = 0; j < xs.size(); ++j) xs[j] += vs[j] * t;
  return AtomEnsemble(std::move(xs), std::vector<double>(vs.begin(), vs.end()));
}

std::vector<double> sample_thermal_velocities(Rng& rng, double v_m, std::size_t n_atoms) {
  if (!(v_m >= 0.0) || !std::isfinite(v_m)) throw InvalidInput("v_m must be >= 0");
  std::vector<double> vs(n_atoms, 0.0);
  if (v_m == 0.0) return vs;
  std::normal_distribution<double> dist(0.0, v_m / std::sqrt(2.0));
  for (auto& v : vs) v = dist(rng);
  return vs;
}

}  // namespace srmetro
