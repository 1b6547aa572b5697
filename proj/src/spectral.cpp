#include "pgas/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace pgas {

namespace {

bool all_finite(const ArrayXd& a) { return a.allFinite(); }

}  // namespace

// ---------------------------------------------------------------------------
// Primitive-variable Euler solver

void SpectralEulerConfig::validate() const {
  grid.validate();
  eos.validate();
  PGAS_CHECK_ARG(cfl > 0 && cfl <= 2.0, "spectral euler: cfl in (0, 2]");
  PGAS_CHECK_ARG(t_end > 0, "spectral euler: t_end must be positive");
}

namespace {

struct EulerRhs {
  const SpectralGrid& grid;
  const GasEOS& eos;
  bool dealias{false};

  void strip(ArrayXd& f) const {
    Eigen::ArrayXcd fhat = fft_forward(f);
    dealias_23(fhat, grid.n);
    f = fft_inverse(fhat, grid.n);
  }

  void operator()(const EulerPrimState& s, EulerPrimState& out) const {
    const double L = grid.L_half;
    const ArrayXd dm = fourier_diff(s.rho * s.u, L, 1);
    const ArrayXd du = fourier_diff(s.u, L, 1);
    const ArrayXd dp = fourier_diff(s.p, L, 1);
    out.rho = -dm;
    out.u = -(s.u * du) - dp / s.rho;
    out.p = -(s.u * dp) - eos.gamma * s.p * du;
    if (dealias) {
      strip(out.rho);
      strip(out.u);
      strip(out.p);
    }
  }
};

}  // namespace

RunRecord solve_euler_primitive(const SpectralEulerConfig& cfg,
                                const EulerPrimState& init) {
  cfg.validate();
  init.validate();
  PGAS_CHECK_ARG(init.rho.size() == cfg.grid.n,
                 "spectral euler: initial state size != grid size");

  RunRecord rec;
  rec.config["solver"] = "spectral_euler";
  rec.config["n"] = std::to_string(cfg.grid.n);
  rec.config["L_half"] = fmt_g17(cfg.grid.L_half);
  rec.config["cfl"] = fmt_g17(cfg.cfl);
  rec.config["t_end"] = fmt_g17(cfg.t_end);
  rec.config["gamma"] = fmt_g17(cfg.eos.gamma);
  rec.config["p_star"] = fmt_g17(cfg.eos.p_star);
  rec.config["v_star"] = fmt_g17(cfg.eos.v_star);
  rec.config["delta"] = "1";
  rec.config["seed"] = "0";
  rec.config["dealias"] = cfg.dealias ? "1" : "0";

  const Grid1D g1 = cfg.grid.as_grid(CoordKind::eulerian_chi);
  auto emit = [&](double t, const EulerPrimState& s) {
    FieldSnapshot snap;
    snap.t = t;
    snap.grid = g1;
    snap.names = {"rho", "u", "p"};
    snap.fields = {s.rho, s.u, s.p};
    rec.add_snapshot(std::move(snap));
  };

  EulerPrimState s = init;
  emit(0.0, s);

  const std::vector<double> targets = output_schedule(0.0, cfg.t_end, cfg.output_times);
  const double dx = cfg.grid.dx();
  const EulerRhs rhs{cfg.grid, cfg.eos, cfg.dealias};
  EulerPrimState k1, k2, k3, k4, tmp;

  double t = 0.0;
  for (double target : targets) {
    while (t < target - 1e-13 * cfg.t_end) {
      // Positivity first: the sound speed needs rho, p > 0.
      if (!((s.rho > 0).all() && (s.p > 0).all())) {
        rec.aborted = true;
        rec.abort_reason = "state left the physical region (rho or p <= 0)";
        return rec;
      }
      const double cmax =
          (s.u.abs() + (cfg.eos.gamma * s.p / s.rho).sqrt()).maxCoeff();
      double dt = cfg.cfl * dx / cmax;
      if (!(dt > 0) || dt < 1e-12 * cfg.t_end) {
        rec.aborted = true;
        rec.abort_reason = "time step collapsed";
        return rec;
      }
      dt = std::min(dt, target - t);

      rhs(s, k1);
      tmp.rho = s.rho + 0.5 * dt * k1.rho;
      tmp.u = s.u + 0.5 * dt * k1.u;
      tmp.p = s.p + 0.5 * dt * k1.p;
      rhs(tmp, k2);
      tmp.rho = s.rho + 0.5 * dt * k2.rho;
      tmp.u = s.u + 0.5 * dt * k2.u;
      tmp.p = s.p + 0.5 * dt * k2.p;
      rhs(tmp, k3);
      tmp.rho = s.rho + dt * k3.rho;
      tmp.u = s.u + dt * k3.u;
      tmp.p = s.p + dt * k3.p;
      rhs(tmp, k4);
      const double w = dt / 6.0;
      s.rho += w * (k1.rho + 2 * k2.rho + 2 * k3.rho + k4.rho);
      s.u += w * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
      s.p += w * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
      t += dt;

      if (cfg.abort_on_nonfinite &&
          !(all_finite(s.rho) && all_finite(s.u) && all_finite(s.p))) {
        rec.aborted = true;
        rec.abort_reason = "nonfinite values in state";
        return rec;
      }
    }
    t = target;
    emit(t, s);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Homogenized dispersive model

void HomogConfig::validate() const {
  grid.validate();
  eos.validate();
  coeffs.validate();
  PGAS_CHECK_ARG(cfl > 0 && cfl <= 2.0, "homog: cfl in (0, 2]");
  PGAS_CHECK_ARG(t_end > 0, "homog: t_end must be positive");
  if (fixed_dt) PGAS_CHECK_ARG(*fixed_dt > 0, "homog: fixed_dt must be positive");
  if (include_delta4)
    PGAS_CHECK_ARG(coeffs.nu > 0,
                   "homog: fourth-order term requires nu > 0");
}

namespace {

struct HomogWork {
  // Precomputed modal factors.
  ArrayXd k, inv_op;
  // Scratch fields reused across evaluations.
  ArrayXd u_x, p_x, p_xx, G, G1, R;
  ArrayXd p_xxx, p_xxxx, u_xx, u_xxx, u_xxxx, G2, G3, G4;
};

// Quintic-order nonlinear source; every variable is a field over the grid.
ArrayXd nonlinear_source(const HomogConfig& cfg, const HomogWork& w) {
  const double Ki = cfg.coeffs.mean_Kinv;
  const double nu = cfg.coeffs.nu;
  const double beta = cfg.N_beta;
  const ArrayXd& G = w.G;
  const ArrayXd& G1 = w.G1;
  const ArrayXd& G2 = w.G2;
  const ArrayXd& G3 = w.G3;
  const ArrayXd& G4 = w.G4;
  const ArrayXd& px = w.p_x;
  const ArrayXd& pxx = w.p_xx;
  const ArrayXd& pxxx = w.p_xxx;
  const ArrayXd& pxxxx = w.p_xxxx;
  const ArrayXd& ux = w.u_x;
  const ArrayXd& uxx = w.u_xx;
  const ArrayXd& uxxx = w.u_xxx;
  const ArrayXd& uxxxx = w.u_xxxx;

  ArrayXd acc = beta * (2 * G1 / G * pxx - G2 / G * px.square());
  acc += -6 * G1 * pxxx * uxx;
  acc += -G1 * pxx * uxxx;
  acc += -6 * G1.square() / G * px.square() * uxxx;
  acc += -(8 * G1.square() / G + 6 * G2) * px * pxx * uxx;
  acc += -6 * G2 * px * pxxx * ux;
  acc += -6 * G1 * G2 / G * px.cube() * uxx;
  acc += beta / Ki * (G2 / G - 2 * G1.square()) * ux.square();
  acc += 1.0 / Ki * (2 * G1.square() - 6 * G * G2) * ux * uxx.square();
  acc += 1.0 / Ki * (2 * G1.square() - G * G2) * ux.square() * uxxx;
  acc += 1.0 / Ki * (2 * G1.cube() / G - G1 * G2) * pxx * ux.cube();
  acc += (-9 * G1 * G2 / G - 3 * G3) * px.square() * pxx * ux;
  acc += -2 * G1 * G3 / G * px.pow(4) * ux;
  acc += 1.0 / Ki * (4 * G1.cube() / G - 4 * G1 * G2 - 6 * G * G3) * px *
         ux.square() * uxx;
  acc += 1.0 / Ki *
         (2 * G1.square() * G2 / G - 2 * G2.square() - 2 * G1 * G3 - G * G4) *
         px.square() * ux.cube();
  acc += G1 * pxxxx * ux;
  acc += -2 * G1 * px * uxxxx;
  acc += -2 * G1.square() / G * pxx.square() * ux;
  return (nu / Ki) * acc;
}

}  // namespace

RunRecord solve_homogenized(const HomogConfig& cfg, const PUState& init) {
  cfg.validate();
  init.validate();
  PGAS_CHECK_ARG(init.p.size() == cfg.grid.n,
                 "homog: initial state size != grid size");

  RunRecord rec;
  rec.config["solver"] = "spectral_homog";
  rec.config["n"] = std::to_string(cfg.grid.n);
  rec.config["L_half"] = fmt_g17(cfg.grid.L_half);
  rec.config["cfl"] = fmt_g17(cfg.cfl);
  rec.config["t_end"] = fmt_g17(cfg.t_end);
  rec.config["gamma"] = fmt_g17(cfg.eos.gamma);
  rec.config["p_star"] = fmt_g17(cfg.eos.p_star);
  rec.config["v_star"] = fmt_g17(cfg.eos.v_star);
  rec.config["delta"] = fmt_g17(cfg.coeffs.delta);
  rec.config["seed"] = "0";
  rec.config["mean_Kinv"] = fmt_g17(cfg.coeffs.mean_Kinv);
  rec.config["mu"] = fmt_g17(cfg.coeffs.mu);
  rec.config["zeta"] = fmt_g17(cfg.coeffs.zeta);
  rec.config["nu"] = fmt_g17(cfg.coeffs.nu);
  rec.config["include_delta4"] = cfg.include_delta4 ? "1" : "0";
  rec.config["include_N"] = cfg.include_N ? "1" : "0";
  rec.config["dealias"] = cfg.dealias ? "1" : "0";

  const int n = cfg.grid.n;
  const double L = cfg.grid.L_half;
  const double Ki = cfg.coeffs.mean_Kinv;
  const double d2mu = cfg.coeffs.delta * cfg.coeffs.delta * cfg.coeffs.mu;
  const double d4 = std::pow(cfg.coeffs.delta, 4);

  HomogWork w;
  w.k = cfg.grid.wavenumbers();
  w.inv_op = 1.0 + d2mu * w.k.square();
  if (cfg.include_delta4) w.inv_op += d4 * cfg.coeffs.nu * w.k.pow(4);

  const Grid1D g1 = cfg.grid.as_grid(CoordKind::lagrangian_x);
  auto emit = [&](double t, const PUState& s) {
    FieldSnapshot snap;
    snap.t = t;
    snap.grid = g1;
    snap.names = {"p", "u"};
    snap.fields = {s.p, s.u};
    rec.add_snapshot(std::move(snap));
  };

  // Probe bookkeeping: nearest cell per probe position.
  std::vector<int> probe_cells;
  for (double pos : cfg.probe_positions) {
    PGAS_CHECK_ARG(pos >= -L && pos <= L, "homog: probe outside domain");
    int j = static_cast<int>(std::floor((pos + L) / cfg.grid.dx()));
    j = std::clamp(j, 0, n - 1);
    probe_cells.push_back(j);
  }
  auto record_probes = [&](double t, const PUState& s) {
    for (std::size_t i = 0; i < probe_cells.size(); ++i)
      rec.add_scalar("probe_" + std::to_string(i), t, s.p[probe_cells[i]]);
  };

  PUState s = init;
  if (cfg.dealias) {
    ArrayXcd ph = fft_forward(s.p);
    ArrayXcd uh = fft_forward(s.u);
    dealias_23(ph, n);
    dealias_23(uh, n);
    s.p = fft_inverse(ph, n);
    s.u = fft_inverse(uh, n);
  }
  emit(0.0, s);
  record_probes(0.0, s);

  const double e1 = 1.0 + 1.0 / cfg.eos.gamma;
  const double Gscale = cfg.eos.c_star_sq();
  // dG/dp at p: Gscale * e1 * (p/p*)^(e1-1) / p*.
  auto eval_G = [&](const ArrayXd& p, ArrayXd& G, ArrayXd& G1) {
    const ArrayXd r = p / cfg.eos.p_star;
    G = Gscale * r.pow(e1);
    G1 = (Gscale * e1 / cfg.eos.p_star) * r.pow(e1 - 1.0);
  };

  // Time derivative of (p, u). Returns false if evaluation hit an
  // unphysical state.
  auto rhs = [&](const PUState& in, PUState& out) -> bool {
    if (!((in.p > 0).all())) return false;
    ArrayXcd ph = fft_forward(in.p);
    ArrayXcd uh = fft_forward(in.u);
    ArrayXcd tmp = uh;
    for (int m = 0; m <= n / 2; ++m)
      tmp[m] = std::complex<double>(0, w.k[m]) * uh[m];
    tmp[n / 2] = 0;
    w.u_x = fft_inverse(tmp, n);
    for (int m = 0; m <= n / 2; ++m)
      tmp[m] = std::complex<double>(0, w.k[m]) * ph[m];
    tmp[n / 2] = 0;
    w.p_x = fft_inverse(tmp, n);
    for (int m = 0; m <= n / 2; ++m) tmp[m] = -w.k[m] * w.k[m] * ph[m];
    w.p_xx = fft_inverse(tmp, n);

    eval_G(in.p, w.G, w.G1);
    w.R = -(w.G / Ki) * w.u_x + d2mu * (w.G1 / Ki) * w.p_xx * w.u_x;

    if (cfg.include_N) {
      for (int m = 0; m <= n / 2; ++m) {
        const double k2 = w.k[m] * w.k[m];
        tmp[m] = std::complex<double>(0, -w.k[m] * k2) * ph[m];
      }
      tmp[n / 2] = 0;
      w.p_xxx = fft_inverse(tmp, n);
      for (int m = 0; m <= n / 2; ++m) tmp[m] = std::pow(w.k[m], 4) * ph[m];
      w.p_xxxx = fft_inverse(tmp, n);
      for (int m = 0; m <= n / 2; ++m) tmp[m] = -w.k[m] * w.k[m] * uh[m];
      w.u_xx = fft_inverse(tmp, n);
      for (int m = 0; m <= n / 2; ++m) {
        const double k2 = w.k[m] * w.k[m];
        tmp[m] = std::complex<double>(0, -w.k[m] * k2) * uh[m];
      }
      tmp[n / 2] = 0;
      w.u_xxx = fft_inverse(tmp, n);
      for (int m = 0; m <= n / 2; ++m) tmp[m] = std::pow(w.k[m], 4) * uh[m];
      w.u_xxxx = fft_inverse(tmp, n);
      // Higher derivatives of G for the quintic source.
      w.G2.resize(n);
      w.G3.resize(n);
      w.G4.resize(n);
      for (int j = 0; j < n; ++j) {
        w.G2[j] = eos_G_deriv(cfg.eos, in.p[j], 2);
        w.G3[j] = eos_G_deriv(cfg.eos, in.p[j], 3);
        w.G4[j] = eos_G_deriv(cfg.eos, in.p[j], 4);
      }
      w.R += d4 * nonlinear_source(cfg, w);
    }

    ArrayXcd Rh = fft_forward(w.R);
    if (cfg.dealias) dealias_23(Rh, n);
    for (int m = 0; m <= n / 2; ++m) Rh[m] /= w.inv_op[m];
    out.p = fft_inverse(Rh, n);
    out.u = -w.p_x;
    return true;
  };

  const std::vector<double> targets = output_schedule(0.0, cfg.t_end, cfg.output_times);
  const double dx = cfg.grid.dx();
  PUState k1, k2, s1, s2;

  double t = 0.0;
  for (double target : targets) {
    while (t < target - 1e-13 * cfg.t_end) {
      double dt;
      if (cfg.fixed_dt) {
        dt = *cfg.fixed_dt;
      } else {
        const double pmax = s.p.maxCoeff();
        if (!(pmax > 0) || !all_finite(s.p)) {
          rec.aborted = true;
          rec.abort_reason = "state left the physical region (p <= 0)";
          return rec;
        }
        const double ceff = std::sqrt(eos_G(cfg.eos, pmax) / Ki);
        dt = cfg.cfl * dx / ceff;
      }
      dt = std::min(dt, target - t);

      // SSP-RK3 (Shu-Osher form).
      bool ok = rhs(s, k1);
      if (ok) {
        s1.p = s.p + dt * k1.p;
        s1.u = s.u + dt * k1.u;
        ok = rhs(s1, k2);
      }
      if (ok) {
        s2.p = 0.75 * s.p + 0.25 * (s1.p + dt * k2.p);
        s2.u = 0.75 * s.u + 0.25 * (s1.u + dt * k2.u);
        ok = rhs(s2, k1);
      }
      if (ok) {
        s.p = (s.p + 2.0 * (s2.p + dt * k1.p)) / 3.0;
        s.u = (s.u + 2.0 * (s2.u + dt * k1.u)) / 3.0;
      }
      if (!ok || !(all_finite(s.p) && all_finite(s.u))) {
        rec.aborted = true;
        rec.abort_reason = "nonfinite values or unphysical pressure";
        return rec;
      }
      t += dt;
      record_probes(t, s);
    }
    t = target;
    emit(t, s);
  }
  return rec;
}

}  // namespace pgas
