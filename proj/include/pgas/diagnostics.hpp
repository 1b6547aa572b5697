#pragma once
// Entropy accounting, local entropy production, the front-speed shock
// criterion, and linear stability/dispersion analysis of the effective
// model in its three forms (high-order-in-time, xxt-stabilized, and the
// LeVeque-Yong-style form).

#include <complex>
#include <vector>

#include "pgas/eos.hpp"
#include "pgas/medium.hpp"
#include "pgas/run_record.hpp"
#include "pgas/state.hpp"

namespace pgas {

// ---------------------------------------------------------------------------
// Entropy

// Delta-chi * sum_j rho_j log(p_j / rho_j^gamma) over an Eulerian snapshot
// carrying rho and p fields.
double total_entropy(const FieldSnapshot& snap, const GasEOS& eos);
double total_entropy(const ArrayXd& rho, const ArrayXd& p, double dchi,
                     const GasEOS& eos);

struct EntropyChange {
  double ds_total{0};
  std::vector<std::pair<double, double>> series;  // (t, total entropy)
};

EntropyChange entropy_change(const RunRecord& rec, const GasEOS& eos);

struct LepResult {
  double max_abs{0};
  // (t, max_j |eta|) for each consecutive snapshot pair, stamped at the
  // later time.
  std::vector<std::pair<double, double>> series;
  ArrayXd eta_last;  // field from the final pair (interior cells)
};

// Discrete entropy-inequality residual
//   eta^n_j = (S^n_j - S^{n-1}_j)/dt + (psi^n_{j+1} - psi^n_{j-1})/(2 dchi)
// with S = rho log(p/rho^gamma), psi = u S, over uniformly spaced snapshots.
LepResult local_entropy_production(const RunRecord& rec, const GasEOS& eos);

// ---------------------------------------------------------------------------
// Front-speed criterion

struct CmaxResult {
  double lagrangian{0};  // harmonic mean of c = sqrt(gamma p*/v0) per period
  double eulerian{0};    // harmonic mean of c_E = v0 c per period
};

// Harmonic averages of the ambient sound speed over one structural period of
// the background (state ahead of the front: p = p*, v = v0). For media whose
// density touches zero the Lagrangian integrand is non-integrable; the value
// returned is then the fixed-quadrature surrogate and the Eulerian number is
// the meaningful one.
CmaxResult c_max(const MediumProfile& profile, const GasEOS& eos,
                 int n_quad = 1 << 13);

enum class ShockClass { dispersive, shock_forming, ambiguous };

struct ShockClassification {
  ShockClass verdict{ShockClass::ambiguous};
  double front_speed{0};
  double c_max_eulerian{0};
  double margin{0};  // (speed - c_max)/c_max
};

// Front-speed classifier: measures the leading-edge speed from the record's
// pressure snapshots and compares against the Eulerian c_max; |margin| < 5%
// is ambiguous.
ShockClassification shock_classifier(const RunRecord& rec,
                                     const MediumProfile& profile,
                                     const GasEOS& eos);

// ---------------------------------------------------------------------------
// Dispersion and stability

struct DispersionResult {
  double omega_plus{0}, omega_minus{0};
  double c{0};              // long-wave speed sqrt(G(p*)/<K^-1>)
  double small_k_c2{0};     // coefficient of (delta k)^2 in omega/(c k)
  double small_k_c4{0};     // coefficient of (delta k)^4
  bool nu_nonnegative{true};
};

DispersionResult dispersion_omega(double k, const HomogCoeffs& coeffs,
                                  const GasEOS& eos);

struct StabilityParams {
  double beta1{0}, beta2{0}, beta3{0}, beta_tilde{0};

  static StabilityParams from(const HomogCoeffs& coeffs, const GasEOS& eos);
  void validate() const {
    PGAS_CHECK_ARG(beta1 > 0, "stability: beta1 must be > 0");
    PGAS_CHECK_ARG(beta2 > 0, "stability: beta2 must be > 0");
    PGAS_CHECK_ARG(beta3 >= 0, "stability: beta3 must be >= 0");
    PGAS_CHECK_ARG(beta_tilde > 0, "stability: beta_tilde must be > 0");
  }
};

struct StabilityDelta4Result {
  bool unstable{false};
  double max_growth{0};                      // max Im(omega)
  std::vector<std::complex<double>> roots_Y; // roots of the cubic in Y
  std::vector<std::complex<double>> omegas;  // +/- sqrt of each root
};

// High-order-in-time form: omega^2 = Y with Y + beta2 Y^2 + beta3 Y^3 =
// beta1 k^2; roots via companion matrix.
StabilityDelta4Result stability_delta4(double k, const StabilityParams& sp);

struct StabilityLyResult {
  std::complex<double> omega_plus, omega_minus;
  double cutoff{0};  // sqrt(beta1/beta_tilde)
};

// LeVeque-Yong-style form: omega = +/- |k| sqrt(beta1 - beta_tilde k^2).
StabilityLyResult stability_ly(double k, const StabilityParams& sp);

}  // namespace pgas
