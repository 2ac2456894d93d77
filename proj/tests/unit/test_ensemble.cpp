#include <cmath>
#include <numeric>

#include "doctest.h"
#include "srmetro/dynamics.hpp"
#include "srmetro/ensemble.hpp"
#include "srmetro/errors.hpp"

using namespace srmetro;

namespace {

AtomEnsemble random_ensemble(std::size_t n, std::uint64_t seed, double length = 500.0) {
  Rng rng(seed);
  return AtomEnsemble::uniform(n, length, rng);
}

// Direct summation (1/N_a) sum_j e^{i (k2 - k1) x_j}, written without the library.
cplx direct_dicke_overlap(const AtomEnsemble& e, double k1, double k2) {
  cplx sum{0.0, 0.0};
  for (double x : e.positions()) sum += std::exp(cplx(0.0, (k2 - k1) * x));
  return sum / static_cast<double>(e.size());
}

}  // namespace

TEST_CASE("ensemble construction rejects empty and mismatched input") {
  CHECK_THROWS_AS(AtomEnsemble(std::vector<double>{}), InvalidInput);
  CHECK_THROWS_AS(AtomEnsemble({1.0, 2.0}, std::vector<double>{0.1}), InvalidInput);
  CHECK_THROWS_AS(AtomEnsemble({NAN}), InvalidInput);
  const AtomEnsemble e({3.0, -1.0, 2.0});
  CHECK(e.size() == 3);
  CHECK_FALSE(e.has_velocities());
}

TEST_CASE("timed Dicke state at k = 0 is uniform in the chosen level") {
  const auto e = random_ensemble(7, 1);
  const auto s = make_timed_dicke(e, Level::b, 0.0);
  for (std::size_t j = 0; j < e.size(); ++j) {
    CHECK(std::abs(s.amp_b[j] - cplx(1.0 / std::sqrt(7.0), 0.0)) < 1e-15);
    CHECK(s.amp_a[j] == cplx(0.0, 0.0));
  }
}

TEST_CASE("half-wavelength spacing flips the sign") {
  const double k = 0.37;
  const double lambda = 2.0 * kPi / k;
  const AtomEnsemble e({0.0, lambda / 2.0});
  const auto s = make_timed_dicke(e, Level::b, k);
  CHECK(std::abs(s.amp_b[0] - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
  CHECK(std::abs(s.amp_b[1] - cplx(-1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
}

TEST_CASE("self overlap of a random-position |a_k> is one") {
  const auto e = random_ensemble(20, 2);
  const auto s = make_timed_dicke(e, Level::a, 0.0314);
  const cplx o = overlap(s, s);
  CHECK(std::abs(o - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("overlap matches direct summation and level orthogonality") {
  const auto e = random_ensemble(10, 3);
  const double k = 0.21;
  const double kp = -0.53;
  const cplx o = overlap(make_timed_dicke(e, Level::b, k), make_timed_dicke(e, Level::b, kp));
  CHECK(std::abs(o - direct_dicke_overlap(e, k, kp)) < 1e-12);
  CHECK(std::abs(overlap(make_timed_dicke(e, Level::b, 0.0), make_timed_dicke(e, Level::a, 0.0))) ==
        0.0);
}

TEST_CASE("overlap rejects states of different sizes") {
  const auto s1 = make_timed_dicke(random_ensemble(3, 4), Level::b, 0.0);
  const auto s2 = make_timed_dicke(random_ensemble(4, 4), Level::b, 0.0);
  CHECK_THROWS_AS(overlap(s1, s2), InvalidInput);
}

TEST_CASE("timed Dicke properties over random inputs") {
  Rng rng(99);
  std::uniform_real_distribution<double> kdist(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto e = random_ensemble(1 + trial % 17, 1000 + trial);
    const double k = kdist(rng);
    const double k2 = kdist(rng);
    const auto s = make_timed_dicke(e, trial % 2 ? Level::a : Level::b, k);
    const auto s2 = make_timed_dicke(e, Level::b, k2);
    CHECK(std::abs(s.norm_squared() - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(overlap(s, s)) - 1.0) < 1e-12);
    CHECK(std::abs(overlap(s, s2) - std::conj(overlap(s2, s))) < 1e-14);

    // Displacing the atoms by d is the same as multiplying |b_k> by e^{ikd}.
    const double d = kdist(rng) * 10.0;
    const auto moved = make_timed_dicke(displace(e, d), Level::b, k);
    const auto phased = make_timed_dicke(e, Level::b, k).scaled(std::exp(cplx(0.0, k * d)));
    CHECK(std::abs(overlap(moved, phased) - cplx(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("displace") {
  const AtomEnsemble e({1.0, 2.0});
  CHECK(displace(e, 0.0) == e);
  const auto m = displace(e, 0.5);
  CHECK(m.positions()[0] == 1.5);
  CHECK(m.positions()[1] == 2.5);
  const auto big = random_ensemble(12, 5);
  const auto back = displace(displace(big, 3.7), -3.7);
  for (std::size_t j = 0; j < big.size(); ++j) {
    CHECK(std::abs(back.positions()[j] - big.positions()[j]) < 1e-12);
  }
  const auto with_v = e.with_velocities({0.1, 0.2});
  CHECK(displace(with_v, 1.0).velocities()[1] == 0.2);
}

TEST_CASE("drift") {
  const AtomEnsemble e({0.0, 0.0}, std::vector<double>{1.0, -1.0});
  CHECK(drift(e, 0.0) == e);
  const auto d = drift(e, 2.0);
  CHECK(d.positions()[0] == 2.0);
  CHECK(d.positions()[1] == -2.0);
  CHECK_THROWS_AS(drift(AtomEnsemble({1.0}), 1.0), InvalidState);

  const AtomEnsemble uniform_v({0.3, 1.7, -2.2}, std::vector<double>{0.25, 0.25, 0.25});
  const auto a = drift(uniform_v, 4.0);
  const auto b = displace(uniform_v, 0.25 * 4.0);
  CHECK(a == b);
}

TEST_CASE("thermal velocity sampling") {
  Rng zero_rng(1);
  for (double v : sample_thermal_velocities(zero_rng, 0.0, 10)) CHECK(v == 0.0);
  CHECK_THROWS_AS(sample_thermal_velocities(zero_rng, -1.0, 3), InvalidInput);

  Rng rng(12345);
  const auto vs = sample_thermal_velocities(rng, 0.01, 100000);
  const double mean = std::accumulate(vs.begin(), vs.end(), 0.0) / vs.size();
  double ss = 0.0;
  for (double v : vs) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (vs.size() - 1));
  CHECK(std::abs(sd / (0.01 / std::sqrt(2.0)) - 1.0) < 0.01);

  Rng r1(7), r2(7);
  CHECK(sample_thermal_velocities(r1, 0.02, 50) == sample_thermal_velocities(r2, 0.02, 50));
}
