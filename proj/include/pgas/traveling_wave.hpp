#pragma once
// Solitary traveling waves of the homogenized dispersive model: the profile
// problem for a wave of speed V riding on the quiescent background, a
// phase-plane separatrix construction of the initial guess, Newton
// refinement of the second- and fourth-order profile equations on uniform
// grids, and wave-speed measurement from run records.

#include <string>
#include <utility>
#include <vector>

#include "pgas/eos.hpp"
#include "pgas/medium.hpp"
#include "pgas/run_record.hpp"
#include "pgas/util.hpp"

namespace pgas {

enum class TwModelOrder { second, fourth };

const char* to_string(TwModelOrder order);

// Profile problem for a solitary wave u(x - V t), p = p_star + V u on the
// background (p_star, u = 0). With ' = d/dxi the second-order profile
// equation is
//   -u'' + alpha0 u + (alpha1 / 2) (u')^2
//        - alpha2 (Gint(p_star + V u) - Gint(p_star)) = 0,
// where Gint is the antiderivative of the stiffness G with Gint(0) = 0. The
// fourth-order variant adds c4 u'''' with c4 = delta^2 nu / mu. Profiles
// decay at the rate of the linearization about the origin; solitary waves
// exist only when the origin is a saddle, i.e. beta_lin > 0.
struct TravelingWaveProblem {
  double V{0};
  HomogCoeffs coeffs;
  GasEOS eos{};

  double alpha0() const;  // 1 / (delta^2 mu)
  double alpha1() const;  // G'(p_star) / (V <K^-1>)
  double alpha2() const;  // 1 / (delta^2 mu V^3 <K^-1>)
  // Curvature of the profile equation at the origin,
  //   beta_lin = alpha0 - alpha2 V G(p_star)
  //            = (1 - G(p_star) / (V^2 <K^-1>)) / (delta^2 mu);
  // positive exactly when |V| exceeds the effective sound speed.
  double beta_lin() const;
  double sonic_speed() const;  // sqrt(G(p_star) / <K^-1>)
  double c4() const;           // delta^2 nu / mu
  void validate() const;       // V nonzero and finite, mu > 0
};

struct TravelingWaveSolution {
  ArrayXd xi;  // uniform grid, symmetric about the peak at xi = 0
  ArrayXd u;   // velocity profile (zero at both ends)
  ArrayXd p;   // p_star + V * u
  double V{0};
  double residual_norm{0};  // max-norm of the discrete profile residual
  int iterations{0};        // Newton iterations spent (0 for a raw guess)
  TwModelOrder model_order{TwModelOrder::second};
  // Max-norm residual after each Newton iteration (empty for a raw guess;
  // concatenated across continuation stages for the fourth-order solve).
  std::vector<double> residual_history;

  void validate() const;
};

// Discrete residual of the profile equation on the solution's own grid
// (centered second differences; Dirichlet ends, and for the fourth-order
// stencil the two layers beyond each end are clamped to zero). Boundary
// entries of the returned array are zero.
ArrayXd tw_residual(const TravelingWaveProblem& prob,
                    const TravelingWaveSolution& sol);

// Phase-plane separatrix shot. Launches from eps * (1, sqrt(beta_lin)) along
// the unstable direction of the saddle at the origin (eps = 1e-8, sign
// matched to V), integrates the profile ODE with an adaptive
// Dormand-Prince 5(4) stepper at tolerance 1e-12 up to the turning point,
// and assembles the symmetric homoclinic pulse on a uniform grid of
// half-width xi_half (<= 0 selects the default 12 / sqrt(beta_lin)) with n
// points, peak at xi = 0 and exact zeros at the ends.
// Throws std::domain_error when the origin is not a saddle (|V| at or below
// sonic_speed()) and std::runtime_error when the trajectory escapes without
// turning; the escape message carries the tail of the phase-plane trace.
TravelingWaveSolution separatrix_guess(const TravelingWaveProblem& prob,
                                       double xi_half = 0.0, int n = 4096);

// Newton refinement of the second-order profile on the guess's grid.
// Residuals and the tridiagonal Jacobian solves run in extended precision,
// and every iterate is symmetrized about the peak. Stops once the max-norm
// residual drops below tol; throws std::runtime_error (message carries the
// residual history) after three consecutive residual doublings, if an
// iterate leaves the positive-pressure region, or when max_iter is
// exhausted. The default tol sits just above the extended-precision noise
// floor of the centered second difference at the default grid (~6e-12).
TravelingWaveSolution newton_refine_2nd(const TravelingWaveProblem& prob,
                                        const TravelingWaveSolution& guess,
                                        double tol = 1e-11, int max_iter = 40);

// Fourth-order profile solve. Re-grids the second-order solution onto a
// uniform grid of half-width 12 / Re(lambda), where lambda is the decaying
// root of c4 L^4 - L^2 + beta_lin = 0, then continues in the fourth-order
// coefficient over fractions {1/4, 1/2, 3/4, 1} of c4, Newton iterating with
// an extended-precision pentadiagonal banded solve at each stage. With
// c4 == 0 the equation and result coincide with the second-order refinement
// on the same grid. Error behavior matches newton_refine_2nd; the returned
// iteration count is the total across continuation stages. The default tol
// allows for the noise floor of the fourth difference, which loses about
// 16 |u| eps / h^4 per entry even at extended precision (~1e-10 at the
// default grid).
TravelingWaveSolution newton_solve_4th(const TravelingWaveProblem& prob,
                                       const TravelingWaveSolution& guess2,
                                       double tol = 1e-9, int max_iter = 40,
                                       int n = 1024);

// Least-squares speed of the leading pressure pulse across the snapshots of
// a run. Per snapshot the global maximum of p is sharpened by quadratic
// sub-cell interpolation; the measurement is ambiguous (std::runtime_error)
// if another local maximum whose height above the ambient (rightmost cell)
// is at least 25% of the leading pulse's lies within `window` of it, or if
// the maximum sits on the domain edge. Requires at least two snapshots.
struct WaveSpeedMeasurement {
  double speed{0};
  std::vector<double> times;
  std::vector<double> positions;  // sub-cell peak positions per snapshot
};

WaveSpeedMeasurement measure_wave_speed(const RunRecord& rec, double window);

// Time trace of a field at a fixed coordinate: one (t, value) pair per
// snapshot, linearly interpolated between cell centers (clamped at the
// ends).
std::vector<std::pair<double, double>> point_trace(const RunRecord& rec,
                                                   const std::string& field,
                                                   double x);

// Writes {stem}_wave.csv (columns xi,u,p under a hash-stamped header) and
// {stem}_wave.json (speed, residual, iterations, model order, coefficients).
// Returns the file names written, relative to out_dir.
std::vector<std::string> write_wave_files(const TravelingWaveProblem& prob,
                                          const TravelingWaveSolution& sol,
                                          const std::string& out_dir,
                                          const std::string& stem);

}  // namespace pgas
