#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

#include "rotwave/dynamics.hpp"
#include "rotwave/wavepacket.hpp"

using namespace rotwave;

namespace {
SHExpansion elliptic14() {
  WavePacketSpec s;
  s.n = 14.0;
  s.eta = 0.5;
  return build_asymmetric(s);
}
SHExpansion circular_symmetric14() {
  WavePacketSpec s;
  s.n = 14.0;
  s.eta = 1.0;
  return symmetrize(build_asymmetric(s), s);
}
}  // namespace

TEST_CASE("zero time is the identity") {
  const auto wp = elliptic14();
  const auto out = evolve(wp, RigidRotor{1.0}, 0.0);
  CHECK(max_coefficient_difference(wp, out) == 0.0);
}

TEST_CASE("rigid rotor revives exactly at T_rev and at T_rev/2") {
  const auto wp = elliptic14();
  const auto ts = time_scales(EnergyModel{RigidRotor{1.0}}, i_bar(wp));
  CHECK(max_coefficient_difference(wp, evolve(wp, RigidRotor{1.0}, ts.t_rev)) < 1e-10);
  // I(I+1) is even, so the half period already revives every packet
  CHECK(max_coefficient_difference(wp, evolve(wp, RigidRotor{1.0}, 0.5 * ts.t_rev)) < 1e-10);
}

TEST_CASE("evolution is unitary and composes") {
  const auto wp = elliptic14();
  const EnergyModel m{RigidRotor{1.0}};
  for (const double t : {0.37, 12.9, 4001.7})
    CHECK(norm(evolve(wp, m, t)) == Catch::Approx(1.0).margin(1e-13));
  const double t1 = 0.8137, t2 = 2.4143;
  const auto split = evolve(evolve(wp, m, t1), m, t2);
  const auto direct = evolve(wp, m, t1 + t2);
  CHECK(max_coefficient_difference(split, direct) < 1e-12);
}

TEST_CASE("symmetric circular packet slides by pi/2 at the quarter period") {
  const auto wp = circular_symmetric14();
  const auto ts = time_scales(EnergyModel{RigidRotor{1.0}}, i_bar(wp));
  const auto evolved = evolve(wp, RigidRotor{1.0}, 0.25 * ts.t_rev);
  CHECK(max_coefficient_difference(evolved, rotate_z(wp, 0.5 * kPi)) < 1e-10);
}

TEST_CASE("symmetric circular packet slides by -3pi/4 every eighth period") {
  const auto wp = circular_symmetric14();
  const auto ts = time_scales(EnergyModel{RigidRotor{1.0}}, i_bar(wp));
  const double t0 = 0.123 * ts.t_rev;
  const auto a = evolve(wp, RigidRotor{1.0}, t0 + ts.t_rev / 8.0);
  const auto b = rotate_z(evolve(wp, RigidRotor{1.0}, t0), -0.75 * kPi);
  CHECK(max_coefficient_difference(a, b) < 1e-10);
}

TEST_CASE("time scales of the rigid rotor") {
  const auto ts = time_scales(EnergyModel{RigidRotor{1.0}}, 13.5);
  CHECK(ts.t_rev == Catch::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(ts.t_cl == Catch::Approx(2.0 * kPi / 28.0).epsilon(1e-14));
  CHECK(ts.t_rev > ts.t_cl);
  CHECK_THROWS_AS(time_scales(EnergyModel{RigidRotor{1.0}}, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(time_scales(EnergyModel{RigidRotor{0.0}}, 2.0), std::invalid_argument);
}

TEST_CASE("linear-in-x polynomial reduces to the rigid rotor") {
  const double a = 0.73;
  for (const double ibar : {1.0, 9.5, 13.5}) {
    const auto tp = time_scales(EnergyModel{PolynomialEnergy{a, 0.0}}, ibar);
    const auto tr = time_scales(EnergyModel{RigidRotor{a}}, ibar);
    CHECK(tp.t_rev == Catch::Approx(tr.t_rev).epsilon(1e-12));
    CHECK(tp.t_cl == Catch::Approx(tr.t_cl).epsilon(1e-12));
  }
}

TEST_CASE("quadratic term shifts the revival period") {
  const PolynomialEnergy p{7.5, -0.004};
  const auto ts = time_scales(EnergyModel{p}, 10.0);
  CHECK(std::isfinite(ts.t_rev));
  CHECK(ts.t_rev > 0.0);
  CHECK(ts.t_rev != Catch::Approx(2.0 * kPi / 7.5).epsilon(1e-6));
  // analytic second derivative: E'' = 2a + 2b(6 I^2 + 6 I + 1)
  const double d2 = 2.0 * 7.5 + 2.0 * -0.004 * (6.0 * 100.0 + 60.0 + 1.0);
  CHECK(ts.t_rev == Catch::Approx(2.0 * kPi / (0.5 * d2)).epsilon(1e-12));
}

TEST_CASE("tabulated stencil approaches the analytic derivatives") {
  const PolynomialEnergy p{7.5, -0.004};
  TabulatedLevels tab;
  for (int i = 0; i <= 40; i += 2) tab.levels[i] = energy_at(EnergyModel{p}, i);
  const auto approx = time_scales(EnergyModel{tab}, 10.0);
  const auto exact = time_scales(EnergyModel{p}, 10.0);
  CHECK(approx.t_rev == Catch::Approx(exact.t_rev).epsilon(0.01));
  CHECK(approx.t_cl == Catch::Approx(exact.t_cl).epsilon(0.01));
}

TEST_CASE("degenerate spectra are rejected") {
  TabulatedLevels flat;
  for (int i = 0; i <= 20; i += 2) flat.levels[i] = 1.0;
  CHECK_THROWS_AS(time_scales(EnergyModel{flat}, 5.0), degenerate_spectrum_error);
}

TEST_CASE("tabulated evolution requires every populated level") {
  const auto wp = elliptic14();
  TabulatedLevels tab;
  for (int i = 0; i <= 8; ++i) tab.levels[i] = static_cast<double>(i) * (i + 1);
  try {
    evolve(wp, tab, 0.3);
    FAIL("expected missing_level_error");
  } catch (const missing_level_error& e) {
    CHECK(e.i == 9);
  }
}

TEST_CASE("tabulated levels must be monotone") {
  TabulatedLevels bad;
  bad.levels[0] = 0.0;
  bad.levels[2] = 2.0;
  bad.levels[4] = 1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("polynomial fit round-trips exactly generated levels") {
  std::map<int, double> levels;
  for (int i = 0; i <= 30; ++i) {
    const double x = static_cast<double>(i) * (i + 1);
    levels[i] = 7.5 * x - 0.004 * x * x;
  }
  const auto fit = fit_polynomial(levels);
  CHECK(fit.model.a == Catch::Approx(7.5).margin(1e-9));
  CHECK(fit.model.b == Catch::Approx(-0.004).margin(1e-9));
  CHECK(fit.rms < 1e-9);

  std::map<int, double> pure;
  for (int i = 2; i <= 26; i += 2) pure[i] = 1.3 * i * (i + 1);
  const auto fit2 = fit_polynomial(pure);
  CHECK(fit2.model.b == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("polynomial fit stays inside the noise envelope") {
  // Monte-Carlo oracle: with known sigma the 2x2 normal equations give the
  // parameter variances; the recovered values must sit inside 3 sigma.
  const double a = 7.5, b = -0.004, sigma = 0.05;
  std::mt19937_64 rng(20240817);
  std::normal_distribution<double> g(0.0, sigma);
  std::map<int, double> levels;
  long double s22 = 0, s23 = 0, s44 = 0;
  for (int i = 0; i <= 30; i += 2) {
    const double x = static_cast<double>(i) * (i + 1);
    levels[i] = a * x + b * x * x + g(rng);
    s22 += static_cast<long double>(x) * x;
    s23 += static_cast<long double>(x) * x * x;
    s44 += static_cast<long double>(x) * x * x * x;
  }
  const long double det = s22 * s44 - s23 * s23;
  const double var_a = static_cast<double>(sigma * sigma * s44 / det);
  const double var_b = static_cast<double>(sigma * sigma * s22 / det);
  const auto fit = fit_polynomial(levels);
  CHECK(std::abs(fit.model.a - a) < 3.0 * std::sqrt(var_a));
  CHECK(std::abs(fit.model.b - b) < 3.0 * std::sqrt(var_b));
  CHECK(fit.rms < 3.0 * sigma);
}

TEST_CASE("fit needs at least three levels") {
  std::map<int, double> two{{0, 0.0}, {2, 6.0}};
  CHECK_THROWS_AS(fit_polynomial(two), insufficient_data_error);
}
