#pragma once

// High-order shock-capturing finite-volume solvers:
//   (a) the 1D Euler equations in Eulerian conservation form (rho, rho*u, E),
//   (b) the Lagrangian variable-coefficient p-system in the field variables (p, u).
// Both use componentwise WENO5 reconstruction on local characteristic fields and a
// ten-stage fourth-order strong-stability-preserving Runge-Kutta integrator.

#include <optional>
#include <vector>

#include "pgas/eos.hpp"
#include "pgas/grid.hpp"
#include "pgas/run_record.hpp"
#include "pgas/state.hpp"
#include "pgas/util.hpp"

namespace pgas {

enum class FvBoundary {
  periodic,                 // wrap-around ghost cells
  wall_left_outflow_right,  // reflecting wall at the left edge, zeroth-order outflow at the right
  outflow,                  // zeroth-order extrapolation at both edges
};

const char* to_string(FvBoundary bc);

// Configuration shared by both finite-volume solvers.
struct SolverConfig {
  Grid1D grid;                 // cell-centered mesh
  GasEOS eos{};
  double cfl = 0.9;            // Courant number, strictly inside (0, 1)
  int order = 5;               // reconstruction order (only 5 is implemented)
  FvBoundary bc = FvBoundary::periodic;
  bool abort_on_nonfinite = true;

  void validate() const;
};

// Conserved cell averages for the Euler system.
struct EulerConservedState {
  ArrayXd rho;
  ArrayXd momentum;
  ArrayXd energy;
  double t = 0.0;

  void validate() const;
};

EulerConservedState euler_conserved_from_primitive(const EulerPrimState& prim,
                                                   const GasEOS& eos, double t = 0.0);
EulerPrimState euler_primitive_from_conserved(const EulerConservedState& cons,
                                              const GasEOS& eos);

// Advance the Euler equations. Snapshots carry primitive fields (rho, u, p) at the
// requested output times plus the initial and final states. Conserved totals
// (mass, momentum, energy) are recorded as scalar series at every output time.
RunRecord solve_euler(const EulerConservedState& ic, const SolverConfig& cfg, double t_end,
                      const std::vector<double>& output_times);

// Advance the Lagrangian p-system  p_t + c^2(K, p) u_x = 0,  u_t + p_x = 0  with
// c^2 = c_*^2 K(x) (p/p_*)^(1+1/gamma). The state must carry the medium factor K
// sampled on the same Lagrangian grid (PUState::K). Snapshots carry (p, u).
RunRecord solve_psystem(const PUState& ic, const SolverConfig& cfg, double t_end,
                        const std::vector<double>& output_times);

// Front tracking. For each snapshot: let p_r be the pressure in the rightmost cell
// (the undisturbed state ahead of the front) and d_j = p_j - p_r. The front is the
// rightmost position where d exceeds threshold_fraction * max_j(d_j), located by
// linear interpolation between cell centers. Snapshots with no crossing (e.g. a
// constant state) yield an empty entry.
struct FrontTrack {
  std::vector<double> times;                    // one entry per snapshot
  std::vector<std::optional<double>> positions; // matching entries; nullopt = no front

  // Number of snapshots with a detected front.
  std::size_t detections() const;
  // Least-squares slope of the front path restricted to detections with
  // t >= t_min + window_lo_fraction * (t_max - t_min). Requires >= 2 points.
  std::optional<double> fitted_speed(double window_lo_fraction = 0.5) const;
};

std::optional<double> front_position_in_snapshot(const FieldSnapshot& snap,
                                                 double threshold_fraction);
FrontTrack front_position(const RunRecord& record, double threshold_fraction);

}  // namespace pgas
