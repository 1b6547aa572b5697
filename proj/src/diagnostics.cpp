#include "pgas/diagnostics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "pgas/fv.hpp"

namespace pgas {

// ---------------------------------------------------------------------------
// Entropy

double total_entropy(const ArrayXd& rho, const ArrayXd& p, double dchi,
                     const GasEOS& eos) {
  PGAS_CHECK_ARG(rho.size() == p.size() && rho.size() >= 2,
                 "total_entropy: field sizes must match");
  PGAS_CHECK_ARG(dchi > 0, "total_entropy: dchi must be positive");
  PGAS_CHECK_DOMAIN((rho > 0).all() && (p > 0).all(),
                    "total_entropy: rho and p must be positive");
  KahanSum<double> acc;
  for (Eigen::Index j = 0; j < rho.size(); ++j)
    acc.add(rho[j] * (std::log(p[j]) - eos.gamma * std::log(rho[j])));
  return dchi * acc.value();
}

double total_entropy(const FieldSnapshot& snap, const GasEOS& eos) {
  PGAS_CHECK_ARG(snap.grid.kind == CoordKind::eulerian_chi,
                 "total_entropy: snapshot must be on an Eulerian grid");
  return total_entropy(snap.field("rho"), snap.field("p"), snap.grid.dx(), eos);
}

namespace {

void check_common_grid(const RunRecord& rec) {
  PGAS_CHECK_ARG(rec.snapshots.size() >= 2,
                 "record must contain at least two snapshots");
  const Grid1D& g0 = rec.snapshots.front().grid;
  for (const auto& s : rec.snapshots) {
    PGAS_CHECK_ARG(s.grid.n == g0.n && s.grid.lo == g0.lo &&
                       s.grid.hi == g0.hi && s.grid.kind == g0.kind,
                   "record snapshots must share one grid");
  }
}

}  // namespace

EntropyChange entropy_change(const RunRecord& rec, const GasEOS& eos) {
  check_common_grid(rec);
  EntropyChange out;
  for (const auto& s : rec.snapshots)
    out.series.emplace_back(s.t, total_entropy(s, eos));
  out.ds_total = out.series.back().second - out.series.front().second;
  return out;
}

LepResult local_entropy_production(const RunRecord& rec, const GasEOS& eos) {
  check_common_grid(rec);
  const auto& snaps = rec.snapshots;
  const double dt0 = snaps[1].t - snaps[0].t;
  PGAS_CHECK_ARG(dt0 > 0, "lep: snapshots must advance in time");
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    const double dt = snaps[i].t - snaps[i - 1].t;
    PGAS_CHECK_ARG(std::abs(dt - dt0) <= 1e-6 * dt0,
                   "lep: snapshots must be uniformly spaced in time");
  }
  const int n = snaps[0].grid.n;
  const double dchi = snaps[0].grid.dx();

  auto entropy_fields = [&](const FieldSnapshot& s, ArrayXd& S, ArrayXd& psi) {
    const ArrayXd& rho = s.field("rho");
    const ArrayXd& p = s.field("p");
    const ArrayXd& u = s.field("u");
    PGAS_CHECK_DOMAIN((rho > 0).all() && (p > 0).all(),
                      "lep: rho and p must be positive");
    S = rho * (p.log() - eos.gamma * rho.log());
    psi = u * S;
  };

  LepResult out;
  ArrayXd S_prev, psi_prev, S_cur, psi_cur;
  entropy_fields(snaps[0], S_prev, psi_prev);
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    entropy_fields(snaps[i], S_cur, psi_cur);
    const double dt = snaps[i].t - snaps[i - 1].t;
    ArrayXd eta = ArrayXd::Zero(n);
    double step_max = 0;
    for (int j = 1; j + 1 < n; ++j) {
      eta[j] = (S_cur[j] - S_prev[j]) / dt +
               (psi_cur[j + 1] - psi_cur[j - 1]) / (2 * dchi);
      step_max = std::max(step_max, std::abs(eta[j]));
    }
    out.series.emplace_back(snaps[i].t, step_max);
    out.max_abs = std::max(out.max_abs, step_max);
    if (i + 1 == snaps.size()) out.eta_last = eta;
    S_prev.swap(S_cur);
    psi_prev.swap(psi_cur);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Front-speed criterion

CmaxResult c_max(const MediumProfile& profile, const GasEOS& eos, int n_quad) {
  profile.validate();
  eos.validate();
  PGAS_CHECK_ARG(n_quad >= 16, "c_max: n_quad too small");
  const double period = profile.shape_period();
  KahanSum<double> inv_c, inv_cE;
  for (int j = 0; j < n_quad; ++j) {
    const double chi = (j + 0.5) / n_quad * period;
    const double rho = profile.rho0(chi);
    PGAS_CHECK_DOMAIN(rho > 0, "c_max: density must be positive");
    const double v0 = eos.v_star / rho;
    const auto cs = eos_sound_speeds(eos, eos.p_star, v0);
    inv_c.add(1.0 / cs.lagrangian);
    inv_cE.add(1.0 / cs.eulerian);
  }
  CmaxResult out;
  out.lagrangian = n_quad / inv_c.value();
  out.eulerian = n_quad / inv_cE.value();
  return out;
}

ShockClassification shock_classifier(const RunRecord& rec,
                                     const MediumProfile& profile,
                                     const GasEOS& eos) {
  check_common_grid(rec);
  PGAS_CHECK_ARG(rec.snapshots.front().has("p"),
                 "classifier: record must carry pressure fields");

  // Track the front at 5% of each snapshot's peak deviation over the state
  // ahead, then fit its speed over the later half of the run.
  const FrontTrack track = front_position(rec, 0.05);
  PGAS_CHECK_ARG(track.detections() >= 3, "classifier: too few front detections");
  const std::optional<double> speed = track.fitted_speed(0.5);
  PGAS_CHECK_ARG(speed.has_value(), "classifier: cannot fit a front speed");

  ShockClassification out;
  out.front_speed = *speed;
  out.c_max_eulerian = c_max(profile, eos).eulerian;
  out.margin = (*speed - out.c_max_eulerian) / out.c_max_eulerian;
  if (out.margin > 0.05)
    out.verdict = ShockClass::shock_forming;
  else if (out.margin < -0.05)
    out.verdict = ShockClass::dispersive;
  else
    out.verdict = ShockClass::ambiguous;
  return out;
}

// ---------------------------------------------------------------------------
// Dispersion and stability

DispersionResult dispersion_omega(double k, const HomogCoeffs& coeffs,
                                  const GasEOS& eos) {
  coeffs.validate();
  eos.validate();
  DispersionResult out;
  out.c = std::sqrt(eos_G(eos, eos.p_star) / coeffs.mean_Kinv);
  out.small_k_c2 = -0.5 * coeffs.mu;
  out.small_k_c4 = 0.125 * (3 * coeffs.mu * coeffs.mu - 4 * coeffs.nu);
  out.nu_nonnegative = coeffs.nu >= 0;
  const double d2 = coeffs.delta * coeffs.delta;
  const double denom =
      1.0 + coeffs.mu * d2 * k * k + coeffs.nu * d2 * d2 * std::pow(k, 4);
  PGAS_CHECK_DOMAIN(denom > 0,
                    "dispersion: negative modal prefactor (nu < 0 pathology)");
  out.omega_plus = out.c * k / std::sqrt(denom);
  out.omega_minus = -out.omega_plus;
  return out;
}

StabilityParams StabilityParams::from(const HomogCoeffs& coeffs,
                                      const GasEOS& eos) {
  coeffs.validate();
  eos.validate();
  const double G = eos_G(eos, eos.p_star);
  const double d = coeffs.delta;
  StabilityParams sp;
  sp.beta1 = G / coeffs.mean_Kinv;
  sp.beta2 = d * d * d * coeffs.mu * coeffs.mean_Kinv / G;
  sp.beta3 = std::pow(d, 4) * coeffs.zeta / (G * G * coeffs.mean_Kinv);
  sp.beta_tilde = d * d * coeffs.mu * G;
  sp.validate();
  return sp;
}

StabilityDelta4Result stability_delta4(double k, const StabilityParams& sp) {
  sp.validate();
  StabilityDelta4Result out;
  const double rhs = sp.beta1 * k * k;

  // Roots of beta3 Y^3 + beta2 Y^2 + Y - rhs = 0.
  if (sp.beta3 > 0) {
    // Companion matrix of the monic cubic Y^3 + a Y^2 + b Y + c.
    const double a = sp.beta2 / sp.beta3;
    const double b = 1.0 / sp.beta3;
    const double c = -rhs / sp.beta3;
    Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
    comp(0, 2) = -c;
    comp(1, 2) = -b;
    comp(2, 2) = -a;
    comp(1, 0) = 1;
    comp(2, 1) = 1;
    Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
    for (int i = 0; i < 3; ++i) out.roots_Y.push_back(es.eigenvalues()[i]);
  } else {
    // Quadratic beta2 Y^2 + Y - rhs = 0.
    const std::complex<double> disc(1.0 + 4.0 * sp.beta2 * rhs, 0.0);
    const std::complex<double> sq = std::sqrt(disc);
    out.roots_Y.push_back((-1.0 + sq) / (2 * sp.beta2));
    out.roots_Y.push_back((-1.0 - sq) / (2 * sp.beta2));
  }

  for (const auto& Y : out.roots_Y) {
    const std::complex<double> w = std::sqrt(Y);
    out.omegas.push_back(w);
    out.omegas.push_back(-w);
  }
  for (const auto& w : out.omegas)
    out.max_growth = std::max(out.max_growth, w.imag());
  out.unstable = out.max_growth > 0;
  return out;
}

StabilityLyResult stability_ly(double k, const StabilityParams& sp) {
  sp.validate();
  StabilityLyResult out;
  out.cutoff = std::sqrt(sp.beta1 / sp.beta_tilde);
  const double radicand = sp.beta1 - sp.beta_tilde * k * k;
  const double ak = std::abs(k);
  if (radicand >= 0) {
    out.omega_plus = ak * std::sqrt(radicand);
    out.omega_minus = -out.omega_plus;
  } else {
    const double g = ak * std::sqrt(-radicand);
    out.omega_plus = std::complex<double>(0, g);
    out.omega_minus = std::complex<double>(0, -g);
  }
  return out;
}

}  // namespace pgas
