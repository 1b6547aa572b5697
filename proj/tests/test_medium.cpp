#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pgas/averaging.hpp"
#include "pgas/medium.hpp"

using namespace pgas;

namespace {
bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}
// Canonical two-level test background: density 1/4 on the first half period,
// 7/4 on the second, period one. Its exact effective-medium numbers are
// rational and serve as golden values throughout.
MediumProfile two_level() { return MediumProfile::piecewise(0.25, 1.75, 0.5, 1.0); }
}  // namespace

TEST_CASE("mean-free antiderivative of a two-level field is a triangle wave") {
  // f = 4 on the first half cell, 4/7 on the second; <f> = 16/7.
  const int n = 1024;
  ArrayXd f(n);
  for (int i = 0; i < n; ++i) f[i] = (i < n / 2) ? 4.0 : 4.0 / 7.0;
  CHECK(close_rel(mean_periodic(f), 16.0 / 7.0, 1e-15));
  const ArrayXd F = fluct_antideriv(f, 1.0);
  CHECK(close_rel(mean_periodic(F), 0.0, 1e-15));
  // <[[f]]^2> = 3/49 exactly. The midpoint second moment carries an O(h^2)
  // quadrature term, so check the raw value loosely and the Richardson
  // extrapolation over {n/2, n} tightly.
  const double m_fine = mean_product(F, F);
  CHECK(close_rel(m_fine, 3.0 / 49.0, 1e-5));
  ArrayXd fc(n / 2);
  for (int i = 0; i < n / 2; ++i) fc[i] = (i < n / 4) ? 4.0 : 4.0 / 7.0;
  const ArrayXd Fc = fluct_antideriv(fc, 1.0);
  const double m_coarse = mean_product(Fc, Fc);
  CHECK(close_rel((4 * m_fine - m_coarse) / 3, 3.0 / 49.0, 1e-12));
}

TEST_CASE("profile evaluation wraps periodically") {
  const auto m = two_level();
  CHECK(m.rho0(0.1) == 0.25);
  CHECK(m.rho0(0.6) == 1.75);
  CHECK(m.rho0(1.1) == 0.25);
  CHECK(m.rho0(-0.9) == 0.25);   // same phase as 0.1
  CHECK(m.rho0(-0.4) == 1.75);
  const auto s = MediumProfile::sinusoid(1.0, 1.0);
  CHECK(close_rel(s.rho0(0.25), 1.0, 1e-15));
  CHECK(close_rel(s.rho0(0.0), 2.0, 1e-15));
  CHECK(close_rel(s.rho0(103.5), s.rho0(0.5), 1e-12));
}

TEST_CASE("effective coefficients of the two-level background") {
  const auto m = two_level();
  GasEOS eos;
  const auto c = homog_coeffs(m, eos, 1 << 14);
  CHECK(close_rel(c.mean_Kinv, 16.0 / 7.0, 1e-12));
  CHECK(close_rel(c.mu, 3.0 / 256.0, 1e-10));
  CHECK(close_rel(c.zeta, 48.0 / 343.0, 1e-10));
  CHECK(close_rel(c.nu, 759.0 / 65536.0, 1e-10));
  CHECK(c.nu_positive);

  // Effective linear sound speed sqrt(G(p*)/<K^-1>).
  const double c_eff = std::sqrt(eos_G(eos, eos.p_star) / c.mean_Kinv);
  CHECK(close_rel(c_eff, 0.78262379212492643, 1e-12));
}

TEST_CASE("effective coefficients in the mass-coordinate frame") {
  const auto m = two_level();
  GasEOS eos;
  const auto c = homog_coeffs_lagrangian(m, eos, 1 << 14);
  // Density averages to one over a mass period, so <K^-1> = 1 there, and the
  // frame-invariant dispersion parameters mu, nu keep their values.
  CHECK(close_rel(c.mean_Kinv, 1.0, 1e-12));
  CHECK(close_rel(c.mu, 3.0 / 256.0, 1e-10));
  CHECK(close_rel(c.zeta, 3.0 / 256.0, 1e-10));
  CHECK(close_rel(c.nu, 759.0 / 65536.0, 1e-10));
  const double c_eff = std::sqrt(eos_G(eos, eos.p_star) / c.mean_Kinv);
  CHECK(close_rel(c_eff, 1.1832159566199232, 1e-12));
}

TEST_CASE("coefficient computation meets its runtime budget") {
  const auto m = two_level();
  GasEOS eos;
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = homog_coeffs(m, eos, 1 << 14);
  const auto t1 = std::chrono::steady_clock::now();
  CHECK(c.mu > 0);
  CHECK(std::chrono::duration<double>(t1 - t0).count() < 1.0);
}

TEST_CASE("mass coordinate map round trip") {
  const auto m = two_level();
  Grid1D grid{-3.0, 5.0, 257, CoordKind::eulerian_chi};
  const auto map = mass_coordinate_map(m, grid);
  CHECK(close_rel(map.chi_to_x(0.0), 0.0, 1e-15));
  // One full period carries unit mass for this profile.
  CHECK(close_rel(map.chi_to_x(1.0), 1.0, 1e-15));
  CHECK(close_rel(map.chi_to_x(0.5), 0.125, 1e-15));
  for (double chi : {-2.7, -0.3, 0.1, 0.4999, 0.75, 3.2, 4.9}) {
    const double x = map.chi_to_x(chi);
    CHECK(close_rel(map.x_to_chi(x), chi, 1e-10));
  }
  for (double x : {-1.5, -0.2, 0.0625, 0.6, 2.25}) {
    CHECK(close_rel(map.chi_to_x(map.x_to_chi(x)), x, 1e-10));
  }
}

TEST_CASE("mass coordinate map handles a density touching zero") {
  const auto m = MediumProfile::sinusoid(1.0, 1.0);  // 1 + cos(2 pi chi)
  Grid1D grid{0.0, 2.0, 64, CoordKind::eulerian_chi};
  const auto map = mass_coordinate_map(m, grid);
  // x(chi) = chi + sin(2 pi chi)/(2 pi).
  const double chi = 0.3;
  CHECK(close_rel(map.chi_to_x(chi),
                  chi + std::sin(2 * M_PI * chi) / (2 * M_PI), 1e-14));
  for (double x : {0.01, 0.25, 0.5, 0.75, 1.25, 1.9999}) {
    const double c2 = map.x_to_chi(x);
    CHECK(close_rel(map.chi_to_x(c2), x, 1e-10));
  }
}

TEST_CASE("stiffness field sampled on a mass grid") {
  const auto m = two_level();
  GasEOS eos;
  Grid1D grid{0.0, 4.0, 256, CoordKind::lagrangian_x};
  const ArrayXd K = sample_K(m, eos, grid);
  // Values must come from the two-level set {1/4, 7/4}.
  int n_low = 0, n_high = 0;
  for (int i = 0; i < K.size(); ++i) {
    if (std::abs(K[i] - 0.25) < 1e-12) ++n_low;
    if (std::abs(K[i] - 1.75) < 1e-12) ++n_high;
  }
  CHECK(n_low + n_high == K.size());
  // Mass fractions: the light phase carries mass 1/8 per unit mass period,
  // so an eighth of the Lagrangian cells see the light phase.
  CHECK(n_low == K.size() / 8);
}

TEST_CASE("random profile construction is reproducible and normalized") {
  RandomProfileParams params;
  params.grid_n = 2048;
  params.L = 16.0;
  params.n_smooth = 2000;
  params.seed = 42;
  const auto prof1 = random_profile(params);
  const auto prof2 = random_profile(params);
  REQUIRE(prof1.tab_samples.size() == 2048);
  CHECK((prof1.tab_samples == prof2.tab_samples).all());
  // Mean renormalized to one, clipped positive.
  CHECK(close_rel(mean_periodic(prof1.tab_samples), 1.0, 1e-13));
  CHECK(prof1.tab_samples.minCoeff() > 0.0);

  params.seed = 43;
  const auto prof3 = random_profile(params);
  CHECK(!(prof3.tab_samples == prof1.tab_samples).all());

  // More smoothing brings the modulation closer to the plain sinusoid.
  RandomProfileParams heavy = params;
  heavy.n_smooth = 20000;
  const auto prof4 = random_profile(heavy);
  ArrayXd base(prof4.tab_samples.size());
  const double dx = 2 * params.L / params.grid_n;
  for (int i = 0; i < base.size(); ++i) {
    const double x = -params.L + i * dx;
    base[i] = 1.0 + 0.8 * std::sin(2 * M_PI * x);
  }
  const double dev4 = (prof4.tab_samples - base).abs().maxCoeff();
  const double dev3 = (prof3.tab_samples - base).abs().maxCoeff();
  CHECK(dev4 < dev3);
}

TEST_CASE("tabulated profile integrates like its interpolant") {
  // Tabulate the two-level profile finely; the mass map of the tabulated
  // version must agree with the exact one to interpolation accuracy.
  const auto exact = two_level();
  const int n = 4096;
  ArrayXd samples(n);
  for (int i = 0; i < n; ++i) samples[i] = exact.rho0(i / double(n));
  const auto tab = MediumProfile::tabulated_nodes(0.0, 1.0, samples);
  Grid1D grid{0.0, 1.0, 16, CoordKind::eulerian_chi};
  const auto map_t = mass_coordinate_map(tab, grid);
  const auto map_e = mass_coordinate_map(exact, grid);
  for (double chi : {0.2, 0.5, 0.8, 1.7, -0.4}) {
    CHECK(close_rel(map_t.chi_to_x(chi), map_e.chi_to_x(chi), 1e-3));
  }
  CHECK(close_rel(map_t.chi_to_x(1.0), 1.0, 1e-12));
}

TEST_CASE("validation rejects bad profiles") {
  CHECK_THROWS_AS(MediumProfile::piecewise(-1.0, 1.75), std::invalid_argument);
  CHECK_THROWS_AS(MediumProfile::piecewise(0.25, 1.75, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(MediumProfile::sinusoid(1.0, 2.0), std::invalid_argument);
  RandomProfileParams p;
  p.grid_n = 2;  // too small
  p.L = 1.0;
  CHECK_THROWS_AS(random_profile(p), std::invalid_argument);
}
