#pragma once
// Field bundles passed between solvers and diagnostics. All are
// struct-of-arrays over one grid; conversions that need an equation of state
// take it explicitly.

#include <cmath>

#include "pgas/eos.hpp"
#include "pgas/grid.hpp"
#include "pgas/util.hpp"

namespace pgas {

// Eulerian primitive variables (density, velocity, pressure).
struct EulerPrimState {
  ArrayXd rho, u, p;

  void validate() const {
    PGAS_CHECK_ARG(rho.size() == u.size() && u.size() == p.size(),
                   "state: field sizes must match");
    PGAS_CHECK_ARG(rho.size() >= 2, "state: too few cells");
    PGAS_CHECK_DOMAIN((rho > 0).all(), "state: density must be positive");
    PGAS_CHECK_DOMAIN((p > 0).all(), "state: pressure must be positive");
  }
};

// Lagrangian wave variables for the p-system (pressure, velocity). The
// finite-volume p-system solver additionally needs the medium factor K(x)
// sampled on its grid; `K` points at that array (not owned). The homogenized
// spectral solver ignores `K`.
struct PUState {
  ArrayXd p, u;
  double t = 0.0;
  const ArrayXd* K = nullptr;

  void validate() const {
    PGAS_CHECK_ARG(p.size() == u.size(), "state: field sizes must match");
    PGAS_CHECK_ARG(p.size() >= 2, "state: too few cells");
    PGAS_CHECK_DOMAIN((p > 0).all(), "state: pressure must be positive");
    PGAS_CHECK_ARG(std::isfinite(t), "state: time must be finite");
    if (K != nullptr) {
      PGAS_CHECK_ARG(K->size() == p.size(), "state: K sample count must match fields");
      PGAS_CHECK_DOMAIN((*K > 0).all(), "state: K must be positive");
    }
  }
};

}  // namespace pgas
