#pragma once
// Background media: periodic (piecewise-constant or sinusoidal), randomly
// modulated quasi-periodic, or tabulated density profiles, plus the derived
// quantities the solvers and diagnostics need:
//   - effective-medium (homogenized) coefficients <K^-1>, mu, zeta, nu
//   - the mass-coordinate map x(chi) = integral of rho and its inverse
//   - the stiffness-ratio field K sampled on a mass-coordinate grid.
//
// Two coefficient averaging frames are provided. homog_coeffs treats the
// profile's own coordinate as the homogenization cell (so the two-level
// profile with levels {1/4, 7/4} and equal halves yields <K^-1> = 16/7);
// homog_coeffs_lagrangian averages over one mass-coordinate period (yielding
// <K^-1> = 1 for the same profile, since density averages to one). mu and nu
// are identical in both frames; <K^-1> and zeta are frame-dependent, and the
// effective sound speed sqrt(G(p*)/<K^-1>) differs accordingly. Solver-facing
// scenario wiring uses the Lagrangian frame; the shape-direct frame is the
// one the coefficient golden values and the traveling-wave construction use.

#include <cstdint>
#include <string>

#include "pgas/eos.hpp"
#include "pgas/grid.hpp"
#include "pgas/util.hpp"

namespace pgas {

enum class MediumKind {
  piecewise_constant,
  sinusoidal,
  random_modulated,
  tabulated
};

struct RandomProfileParams {
  double K_A{1}, K_B{1};
  double sigma_A{0.24}, sigma_B{0.015};
  std::int64_t n_smooth{320000};
  std::uint64_t seed{1};
  int grid_n{0};
  double L{0};  // builds on [-L, L]

  void validate() const {
    PGAS_CHECK_ARG(K_A >= 0 && K_B >= 0, "random profile: decay rates >= 0");
    PGAS_CHECK_ARG(sigma_A >= 0 && sigma_B >= 0,
                   "random profile: noise intensities >= 0");
    PGAS_CHECK_ARG(n_smooth >= 0, "random profile: n_smooth >= 0");
    PGAS_CHECK_ARG(grid_n >= 4, "random profile: grid_n too small");
    PGAS_CHECK_ARG(L > 0, "random profile: domain half-length must be > 0");
  }
};

struct MediumProfile {
  MediumKind kind{MediumKind::sinusoidal};
  double delta{1.0};  // homogenization period
  std::string description;

  // piecewise-constant: density rho_low on the first duty-fraction of the
  // period, rho_high on the rest
  double pwc_rho_low{0.25}, pwc_rho_high{1.75}, pwc_duty{0.5};

  // sinusoidal: rho = mean + amplitude * cos(2 pi wavenumber chi / delta)
  double sin_mean{1.0}, sin_amplitude{1.0}, sin_wavenumber{1.0};

  // random_modulated / tabulated: node samples rho(tab_lo + i * dchi),
  // dchi = (tab_hi - tab_lo)/m, periodically extended
  double tab_lo{0}, tab_hi{1};
  ArrayXd tab_samples;
  RandomProfileParams random_params;  // provenance when kind is random
  // Node cumulative integral cache for tabulated kinds, built on first use
  // (single-threaded access assumed, like the rest of the library).
  mutable ArrayXd tab_cum_cache;

  double rho0(double chi) const;
  ArrayXd rho0(const ArrayXd& chi) const;
  // Length of one structural period of the profile shape.
  double shape_period() const;
  // Mass contained in one structural period.
  double mass_per_period() const;
  // Antiderivative of the density anchored at chi = 0: integral_0^chi rho.
  double mass_antideriv(double chi) const;
  void validate() const;
  std::string to_json() const;

  static MediumProfile piecewise(double rho_low, double rho_high,
                                 double duty = 0.5, double delta = 1.0);
  static MediumProfile sinusoid(double mean, double amplitude,
                                double wavenumber = 1.0, double delta = 1.0);
  static MediumProfile constant(double rho);
  static MediumProfile tabulated_nodes(double lo, double hi, ArrayXd samples,
                                       double delta = 1.0);
};

struct HomogCoeffs {
  double mean_Kinv{1};
  double mu{0};
  double zeta{0};
  double nu{0};
  double delta{1};
  bool nu_positive{true};  // records the sign check on nu

  void validate() const {
    PGAS_CHECK_ARG(mean_Kinv > 0, "coeffs: <K^-1> must be positive");
    PGAS_CHECK_ARG(mu >= 0 && zeta >= 0, "coeffs: mu, zeta must be >= 0");
    PGAS_CHECK_ARG(delta > 0, "coeffs: delta must be positive");
  }
};

// Coordinate map between Eulerian position chi and Lagrangian mass
// coordinate x, anchored so x(0) = 0. Forward and inverse evaluation are
// backed by the profile's exact antiderivative (closed form for analytic
// kinds, cellwise-linear integral for tabulated kinds); the sample arrays
// record the map on the grid it was requested for.
struct CoordinateMap {
  MediumProfile profile;
  ArrayXd chi_samples, x_samples, rho_samples;

  double chi_to_x(double chi) const;
  double x_to_chi(double x) const;
  ArrayXd chi_to_x(const ArrayXd& chi) const;
  ArrayXd x_to_chi(const ArrayXd& x) const;
};

// Shape-direct coefficients: the profile's own coordinate is the unit cell.
HomogCoeffs homog_coeffs(const MediumProfile& profile, const GasEOS& eos,
                         int n_quad);

// Mass-frame coefficients: averages taken over one mass-coordinate period.
HomogCoeffs homog_coeffs_lagrangian(const MediumProfile& profile,
                                    const GasEOS& eos, int n_quad);

CoordinateMap mass_coordinate_map(const MediumProfile& profile,
                                  const Grid1D& grid);

// K(x) = v*/v0(x) on a mass-coordinate grid (uses the inverse map).
ArrayXd sample_K(const MediumProfile& profile, const GasEOS& eos,
                 const Grid1D& lagrangian_grid);

MediumProfile random_profile(const RandomProfileParams& params);

}  // namespace pgas
