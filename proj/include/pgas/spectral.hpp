#pragma once
// Fourier pseudospectral solvers:
//  - primitive-variable compressible Euler in the spatial (Eulerian) frame,
//    classic RK4, plain collocation by default (optional 2/3-rule dealiasing
//    for marginally resolved media): the workhorse for entropy-conservation
//    runs;
//  - the effective dispersive two-equation model in the mass (Lagrangian)
//    frame, SSP-RK3 with modal inversion of the mixed space-time terms and
//    2/3-rule dealiasing of the nonlinear products.

#include <optional>
#include <vector>

#include "pgas/eos.hpp"
#include "pgas/fourier.hpp"
#include "pgas/grid.hpp"
#include "pgas/medium.hpp"
#include "pgas/run_record.hpp"
#include "pgas/state.hpp"

namespace pgas {

struct SpectralEulerConfig {
  SpectralGrid grid;
  GasEOS eos;
  double cfl{0.9};
  double t_end{0};
  std::vector<double> output_times;  // strictly increasing, within (0, t_end]
  // Stop instead of throwing when the state leaves the physical region; the
  // partial record is returned with aborted=true.
  bool abort_on_nonfinite{true};
  // Strip the top third of the modes from the assembled right-hand sides
  // (2/3 rule). Off by default: the plain collocation scheme is the
  // reference method; switch on when the medium is only marginally resolved
  // and quadratic aliasing would otherwise feed a slow secular instability.
  bool dealias{false};

  void validate() const;
};

RunRecord solve_euler_primitive(const SpectralEulerConfig& cfg,
                                const EulerPrimState& init);

struct HomogConfig {
  SpectralGrid grid;  // Lagrangian frame
  GasEOS eos;
  HomogCoeffs coeffs;
  double cfl{0.5};
  double t_end{0};
  std::vector<double> output_times;
  bool include_delta4{true};   // keep the fourth-order dispersive term
  bool include_N{false};       // add the quintic-order nonlinear source
  double N_beta{0};            // free coefficient inside that source
  bool dealias{true};
  std::optional<double> fixed_dt;      // overrides the CFL choice when set
  std::vector<double> probe_positions; // record p(probe, t) every step

  void validate() const;
};

RunRecord solve_homogenized(const HomogConfig& cfg, const PUState& init);

}  // namespace pgas
