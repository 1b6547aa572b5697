#include "pgas/fv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>

#include "pgas/util.hpp"

namespace pgas {
namespace {

constexpr int kNg = 3;  // ghost cells per side required by the WENO5 stencil

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;
using Eigen::Index;

// ---------------------------------------------------------------------------
// WENO5 edge reconstruction (vectorized over interfaces).
//
// Inputs are cell averages at offsets -2..+2 relative to a center cell; the
// result is the reconstructed point value at the center cell's right edge.
// Weights follow the classic smoothness-indicator construction; the single
// division per call keeps the per-interface cost low.
// ---------------------------------------------------------------------------
struct WenoScratch {
  ArrayXd s0, s1, s2, a0, a1, a2;
  void resize(Index m) {
    s0.resize(m);
    s1.resize(m);
    s2.resize(m);
    a0.resize(m);
    a1.resize(m);
    a2.resize(m);
  }
};

using CSeg = Eigen::Ref<const ArrayXd>;

void weno5_edge(const CSeg& fm2, const CSeg& fm1, const CSeg& f0, const CSeg& fp1,
                const CSeg& fp2, WenoScratch& w, ArrayXd& out) {
  constexpr double k1312 = 13.0 / 12.0;
  constexpr double eps = 1e-6;
  w.s0 = k1312 * (fm2 - 2.0 * fm1 + f0).square() + 0.25 * (fm2 - 4.0 * fm1 + 3.0 * f0).square();
  w.s1 = k1312 * (fm1 - 2.0 * f0 + fp1).square() + 0.25 * (fm1 - fp1).square();
  w.s2 = k1312 * (f0 - 2.0 * fp1 + fp2).square() + 0.25 * (3.0 * f0 - 4.0 * fp1 + fp2).square();
  w.s0 = (w.s0 + eps).square();
  w.s1 = (w.s1 + eps).square();
  w.s2 = (w.s2 + eps).square();
  // Unnormalized weights: d_k / (eps + beta_k)^2, multiplied through by the
  // product of all three (eps + beta_j)^2 so only one division is needed.
  w.a0 = 0.1 * (w.s1 * w.s2);
  w.a1 = 0.6 * (w.s0 * w.s2);
  w.a2 = 0.3 * (w.s0 * w.s1);
  out = (w.a0 * (2.0 * fm2 - 7.0 * fm1 + 11.0 * f0) + w.a1 * (-fm1 + 5.0 * f0 + 2.0 * fp1) +
         w.a2 * (2.0 * f0 + 5.0 * fp1 - fp2)) /
        (6.0 * (w.a0 + w.a1 + w.a2));
}

// ---------------------------------------------------------------------------
// Shared integrator plumbing
// ---------------------------------------------------------------------------

struct StepScan {
  double smax = 0.0;
  bool ok = true;
  std::string why;
};

std::string describe_cell(const Grid1D& grid, Index j, const char* what, double value) {
  std::ostringstream os;
  os << what << " at cell " << j << " (coordinate " << fmt_g17(grid.center(j))
     << "): value " << fmt_g17(value);
  return os.str();
}

// Ten-stage fourth-order strong-stability-preserving Runge-Kutta step.
// `rhs(q, dq)` evaluates the semi-discrete right-hand side; `check(q)` returns
// a failure description (empty on success) and is called after every stage.
template <std::size_t NC, class Rhs, class Check>
std::string ssprk104_step(std::array<ArrayXd, NC>& q, std::array<ArrayXd, NC>& q2,
                          std::array<ArrayXd, NC>& dq, double dt, Rhs&& rhs, Check&& check) {
  const double c6 = dt / 6.0;
  for (std::size_t c = 0; c < NC; ++c) q2[c] = q[c];
  for (int stage = 1; stage <= 5; ++stage) {
    rhs(q, dq);
    for (std::size_t c = 0; c < NC; ++c) q[c] += c6 * dq[c];
    if (std::string why = check(q); !why.empty()) return why;
  }
  for (std::size_t c = 0; c < NC; ++c) {
    q2[c] = (1.0 / 25.0) * q2[c] + (9.0 / 25.0) * q[c];
    q[c] = 15.0 * q2[c] - 5.0 * q[c];
  }
  if (std::string why = check(q); !why.empty()) return why;
  for (int stage = 6; stage <= 9; ++stage) {
    rhs(q, dq);
    for (std::size_t c = 0; c < NC; ++c) q[c] += c6 * dq[c];
    if (std::string why = check(q); !why.empty()) return why;
  }
  rhs(q, dq);
  for (std::size_t c = 0; c < NC; ++c) q[c] = q2[c] + 0.6 * q[c] + 0.1 * dt * dq[c];
  return check(q);
}

// Generic driver: output scheduling, CFL control with one halved-step retry,
// abort bookkeeping. `Sys` provides NC, rhs(), scan(), snapshot(), record_totals().
template <class Sys>
RunRecord integrate(Sys& sys, typename Sys::State q, double t0, double t_end,
                    const std::vector<double>& output_times, const SolverConfig& cfg) {
  RunRecord rec;
  sys.echo_config(rec);

  const double dx = cfg.grid.dx();
  const double span = t_end - t0;
  const double time_eps = 1e-12 * std::max(1.0, std::abs(t_end));
  const double cfl_max = std::min(1.0, 1.1 * cfg.cfl);
  const std::vector<double> targets = output_schedule(t0, t_end, output_times);

  typename Sys::State q2 = q, dq = q, q_save = q;

  auto emit = [&](double t, const typename Sys::State& s) {
    sys.snapshot(rec, t, s);
    sys.record_totals(rec, t, s);
  };

  auto abort_run = [&](double t, const typename Sys::State& s, const std::string& why) {
    rec.aborted = true;
    rec.abort_reason = why + " (t = " + fmt_g17(t) + ")";
    sys.snapshot(rec, t, s);  // diagnostic state dump
    return rec;
  };

  StepScan scan = sys.scan(q);
  if (!scan.ok) return abort_run(t0, q, "initial state invalid: " + scan.why);
  emit(t0, q);

  double t = t0;
  std::size_t next_target = 0;
  while (t < t_end - time_eps) {
    while (next_target < targets.size() && targets[next_target] <= t + time_eps) ++next_target;
    const double target = next_target < targets.size() ? targets[next_target] : t_end;

    double dt = cfg.cfl * dx / scan.smax;
    bool hits_target = false;
    if (t + dt >= target - time_eps) {
      dt = target - t;
      hits_target = true;
    }
    if (dt < 1e-13 * std::max(1.0, span))
      return abort_run(t, q, "time step collapsed (max signal speed " + fmt_g17(scan.smax) + ")");

    for (std::size_t c = 0; c < Sys::NC; ++c) q_save[c] = q[c];
    int attempts = 0;
    while (true) {
      std::string why = ssprk104_step<Sys::NC>(
          q, q2, dq, dt, [&](const typename Sys::State& s, typename Sys::State& d) { sys.rhs(s, d); },
          [&](const typename Sys::State& s) {
            StepScan sc = sys.scan(s);
            return sc.ok ? std::string() : sc.why;
          });
      if (!why.empty()) return abort_run(t, q, why);
      scan = sys.scan(q);  // also provides smax for the next step
      const double courant = scan.smax * dt / dx;
      if (courant <= cfl_max) break;
      if (++attempts > 1)
        return abort_run(t, q, "Courant number " + fmt_g17(courant) +
                                   " still exceeds limit after halved-step retry");
      for (std::size_t c = 0; c < Sys::NC; ++c) q[c] = q_save[c];
      dt *= 0.5;
      hits_target = false;
    }

    t = hits_target ? target : t + dt;
    if (hits_target) {
      emit(t, q);
      ++next_target;
    }
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Euler system in Eulerian conservation form
// ---------------------------------------------------------------------------
class EulerSystem {
 public:
  static constexpr std::size_t NC = 3;
  using State = std::array<ArrayXd, NC>;  // rho, momentum, energy (interior cells)

  EulerSystem(const SolverConfig& cfg) : cfg_(cfg), n_(cfg.grid.n), m_(cfg.grid.n + 1) {
    const Index N = n_ + 2 * kNg;
    for (ArrayXd* a : {&rho_, &mom_, &ene_, &u_, &p_, &H_}) a->resize(N);
    for (ArrayXd* a :
         {&sq_ratio_, &uh_, &Hh_, &ch_, &inv_c_, &b1_, &L00_, &L01_, &L02_, &L10_, &L11_,
          &L12_, &L20_, &L21_, &L22_, &wl0_, &wl1_, &wl2_, &wr0_, &wr1_, &wr2_, &rhoL_, &momL_,
          &eneL_, &rhoR_, &momR_, &eneR_, &uL_, &uR_, &pL_, &pR_, &SL_, &SR_, &Sst_, &tL_, &tR_,
          &facL_, &facR_, &f0L_, &f1L_, &f2L_, &f0R_, &f1R_, &f2R_, &g0L_, &g1L_, &g2L_, &g0R_,
          &g1R_, &g2R_, &flux0_, &flux1_, &flux2_})
      a->resize(m_);
    for (auto& row : W_)
      for (ArrayXd& a : row) a.resize(m_);
    bad_.resize(m_);
    ws_.resize(m_);
    scan_p_.resize(n_);
    scan_s_.resize(n_);
  }

  void echo_config(RunRecord& rec) const {
    rec.config["solver"] = "fv_euler";
    rec.config["scheme"] = "weno5_char_hllc_ssprk104";
    rec.config["frame"] = "eulerian_chi";
    rec.config["n"] = std::to_string(n_);
    rec.config["lo"] = fmt_g17(cfg_.grid.lo);
    rec.config["hi"] = fmt_g17(cfg_.grid.hi);
    rec.config["cfl"] = fmt_g17(cfg_.cfl);
    rec.config["bc"] = to_string(cfg_.bc);
    rec.config["gamma"] = fmt_g17(cfg_.eos.gamma);
    rec.config["p_star"] = fmt_g17(cfg_.eos.p_star);
    rec.config["v_star"] = fmt_g17(cfg_.eos.v_star);
    rec.config["delta"] = "1";
    rec.config["seed"] = "0";
  }

  StepScan scan(const State& q) {
    StepScan out;
    const double gm1 = cfg_.eos.gamma - 1.0;
    scan_p_ = gm1 * (q[2] - 0.5 * q[1].square() / q[0]);
    Index jr, jp;
    const double rho_min = q[0].minCoeff(&jr);
    const double p_min = scan_p_.minCoeff(&jp);
    if (!(rho_min > 0.0)) {
      out.ok = false;
      out.why = describe_cell(cfg_.grid, jr, "positivity loss: density", rho_min);
      return out;
    }
    if (!(p_min > 0.0)) {
      out.ok = false;
      out.why = describe_cell(cfg_.grid, jp, "positivity loss: pressure", p_min);
      return out;
    }
    scan_s_ = (q[1] / q[0]).abs() + (cfg_.eos.gamma * scan_p_ / q[0]).sqrt();
    out.smax = scan_s_.maxCoeff();
    if (cfg_.abort_on_nonfinite && !std::isfinite(out.smax)) {
      out.ok = false;
      out.why = "non-finite state detected";
    }
    return out;
  }

  void rhs(const State& q, State& dq) {
    const double g = cfg_.eos.gamma;
    const double gm1 = g - 1.0;

    rho_.segment(kNg, n_) = q[0];
    mom_.segment(kNg, n_) = q[1];
    ene_.segment(kNg, n_) = q[2];
    fill_ghosts();
    u_ = mom_ / rho_;
    p_ = gm1 * (ene_ - 0.5 * mom_ * u_);
    H_ = (ene_ + p_) / rho_;

    auto seg = [&](const ArrayXd& a, int j) { return a.segment(j, m_); };

    // Local characteristic frame from the Roe average of the adjacent cells
    // (interface i sits between padded cells i+2 and i+3).
    sq_ratio_ = (seg(rho_, 3) / seg(rho_, 2)).sqrt();  // sqrt(rho_r)/sqrt(rho_l)
    uh_ = (seg(u_, 2) + sq_ratio_ * seg(u_, 3)) / (1.0 + sq_ratio_);
    Hh_ = (seg(H_, 2) + sq_ratio_ * seg(H_, 3)) / (1.0 + sq_ratio_);
    ch_ = (gm1 * (Hh_ - 0.5 * uh_.square())).max(1e-100).sqrt();
    inv_c_ = ch_.inverse();
    b1_ = gm1 * inv_c_.square();

    L00_ = 0.5 * (0.5 * b1_ * uh_.square() + uh_ * inv_c_);
    L01_ = -0.5 * (b1_ * uh_ + inv_c_);
    L02_ = 0.5 * b1_;
    L10_ = 1.0 - 0.5 * b1_ * uh_.square();
    L11_ = b1_ * uh_;
    L12_ = -b1_;
    L20_ = 0.5 * (0.5 * b1_ * uh_.square() - uh_ * inv_c_);
    L21_ = 0.5 * (inv_c_ - b1_ * uh_);
    L22_ = 0.5 * b1_;

    for (int j = 0; j < 6; ++j) {
      W_[0][j] = L00_ * seg(rho_, j) + L01_ * seg(mom_, j) + L02_ * seg(ene_, j);
      W_[1][j] = L10_ * seg(rho_, j) + L11_ * seg(mom_, j) + L12_ * seg(ene_, j);
      W_[2][j] = L20_ * seg(rho_, j) + L21_ * seg(mom_, j) + L22_ * seg(ene_, j);
    }
    weno5_edge(W_[0][0], W_[0][1], W_[0][2], W_[0][3], W_[0][4], ws_, wl0_);
    weno5_edge(W_[1][0], W_[1][1], W_[1][2], W_[1][3], W_[1][4], ws_, wl1_);
    weno5_edge(W_[2][0], W_[2][1], W_[2][2], W_[2][3], W_[2][4], ws_, wl2_);
    weno5_edge(W_[0][5], W_[0][4], W_[0][3], W_[0][2], W_[0][1], ws_, wr0_);
    weno5_edge(W_[1][5], W_[1][4], W_[1][3], W_[1][2], W_[1][1], ws_, wr1_);
    weno5_edge(W_[2][5], W_[2][4], W_[2][3], W_[2][2], W_[2][1], ws_, wr2_);

    // Back-transform with the Roe-frame right eigenvectors.
    rhoL_ = wl0_ + wl1_ + wl2_;
    momL_ = uh_ * rhoL_ + ch_ * (wl2_ - wl0_);
    eneL_ = Hh_ * (wl0_ + wl2_) + uh_ * ch_ * (wl2_ - wl0_) + 0.5 * uh_.square() * wl1_;
    rhoR_ = wr0_ + wr1_ + wr2_;
    momR_ = uh_ * rhoR_ + ch_ * (wr2_ - wr0_);
    eneR_ = Hh_ * (wr0_ + wr2_) + uh_ * ch_ * (wr2_ - wr0_) + 0.5 * uh_.square() * wr1_;

    // Guard: where reconstruction leaves the physical region (possible next to
    // near-vacuum cells), fall back to the first-order interface states. The
    // evolved cell averages are never floored or clipped.
    bad_ = (rhoL_ <= 0.0) || (rhoR_ <= 0.0);
    rhoL_ = bad_.select(seg(rho_, 2), rhoL_);
    momL_ = bad_.select(seg(mom_, 2), momL_);
    eneL_ = bad_.select(seg(ene_, 2), eneL_);
    rhoR_ = bad_.select(seg(rho_, 3), rhoR_);
    momR_ = bad_.select(seg(mom_, 3), momR_);
    eneR_ = bad_.select(seg(ene_, 3), eneR_);
    uL_ = momL_ / rhoL_;
    uR_ = momR_ / rhoR_;
    pL_ = gm1 * (eneL_ - 0.5 * momL_ * uL_);
    pR_ = gm1 * (eneR_ - 0.5 * momR_ * uR_);
    bad_ = (pL_ <= 0.0) || (pR_ <= 0.0);
    fallback_interfaces_ += static_cast<std::size_t>(bad_.count());
    rhoL_ = bad_.select(seg(rho_, 2), rhoL_);
    momL_ = bad_.select(seg(mom_, 2), momL_);
    eneL_ = bad_.select(seg(ene_, 2), eneL_);
    uL_ = bad_.select(seg(u_, 2), uL_);
    pL_ = bad_.select(seg(p_, 2), pL_);
    rhoR_ = bad_.select(seg(rho_, 3), rhoR_);
    momR_ = bad_.select(seg(mom_, 3), momR_);
    eneR_ = bad_.select(seg(ene_, 3), eneR_);
    uR_ = bad_.select(seg(u_, 3), uR_);
    pR_ = bad_.select(seg(p_, 3), pR_);

    // HLLC flux. Signal bounds blend the reconstructed states with the Roe frame.
    tL_ = (g * pL_ / rhoL_).sqrt();  // cL
    tR_ = (g * pR_ / rhoR_).sqrt();  // cR
    SL_ = (uL_ - tL_).min(uh_ - ch_);
    SR_ = (uR_ + tR_).max(uh_ + ch_);
    tL_ = SL_ - uL_;  // dL < 0
    tR_ = SR_ - uR_;  // dR > 0
    Sst_ = (pR_ - pL_ + rhoL_ * uL_ * tL_ - rhoR_ * uR_ * tR_) /
           (rhoL_ * tL_ - rhoR_ * tR_);

    f0L_ = momL_;
    f1L_ = momL_ * uL_ + pL_;
    f2L_ = uL_ * (eneL_ + pL_);
    f0R_ = momR_;
    f1R_ = momR_ * uR_ + pR_;
    f2R_ = uR_ * (eneR_ + pR_);

    // Star-region states (clamped denominators keep unused lanes finite).
    facL_ = rhoL_ * tL_ / (SL_ - Sst_).min(-1e-300);
    facR_ = rhoR_ * tR_ / (SR_ - Sst_).max(1e-300);
    g0L_ = f0L_ + SL_ * (facL_ - rhoL_);
    g1L_ = f1L_ + SL_ * (facL_ * Sst_ - momL_);
    g2L_ = f2L_ + SL_ * (facL_ * (eneL_ / rhoL_ + (Sst_ - uL_) * (Sst_ + pL_ / (rhoL_ * tL_))) - eneL_);
    g0R_ = f0R_ + SR_ * (facR_ - rhoR_);
    g1R_ = f1R_ + SR_ * (facR_ * Sst_ - momR_);
    g2R_ = f2R_ + SR_ * (facR_ * (eneR_ / rhoR_ + (Sst_ - uR_) * (Sst_ + pR_ / (rhoR_ * tR_))) - eneR_);

    flux0_ = (SL_ >= 0.0).select(f0L_, (Sst_ >= 0.0).select(g0L_, (SR_ > 0.0).select(g0R_, f0R_)));
    flux1_ = (SL_ >= 0.0).select(f1L_, (Sst_ >= 0.0).select(g1L_, (SR_ > 0.0).select(g1R_, f1R_)));
    flux2_ = (SL_ >= 0.0).select(f2L_, (Sst_ >= 0.0).select(g2L_, (SR_ > 0.0).select(g2R_, f2R_)));

    const double inv_dx = 1.0 / cfg_.grid.dx();
    dq[0] = -inv_dx * (flux0_.segment(1, n_) - flux0_.segment(0, n_));
    dq[1] = -inv_dx * (flux1_.segment(1, n_) - flux1_.segment(0, n_));
    dq[2] = -inv_dx * (flux2_.segment(1, n_) - flux2_.segment(0, n_));
  }

  void snapshot(RunRecord& rec, double t, const State& q) {
    FieldSnapshot snap;
    snap.t = t;
    snap.grid = cfg_.grid;
    snap.names = {"rho", "u", "p"};
    const double gm1 = cfg_.eos.gamma - 1.0;
    ArrayXd u = q[1] / q[0];
    ArrayXd p = gm1 * (q[2] - 0.5 * q[1] * u);
    snap.fields = {q[0], std::move(u), std::move(p)};
    rec.add_snapshot(std::move(snap));
  }

  void record_totals(RunRecord& rec, double t, const State& q) {
    const double dx = cfg_.grid.dx();
    rec.add_scalar("mass", t, dx * kahan_total(q[0]));
    rec.add_scalar("momentum", t, dx * kahan_total(q[1]));
    rec.add_scalar("energy", t, dx * kahan_total(q[2]));
    rec.add_scalar("weno_fallback_count", t, static_cast<double>(fallback_interfaces_));
  }

 private:
  void fill_ghosts() {
    switch (cfg_.bc) {
      case FvBoundary::periodic:
        for (ArrayXd* a : {&rho_, &mom_, &ene_}) {
          a->segment(0, kNg) = a->segment(n_, kNg);
          a->segment(kNg + n_, kNg) = a->segment(kNg, kNg);
        }
        break;
      case FvBoundary::wall_left_outflow_right:
        for (int k = 0; k < kNg; ++k) {
          rho_[kNg - 1 - k] = rho_[kNg + k];
          mom_[kNg - 1 - k] = -mom_[kNg + k];
          ene_[kNg - 1 - k] = ene_[kNg + k];
        }
        for (ArrayXd* a : {&rho_, &mom_, &ene_})
          a->segment(kNg + n_, kNg).setConstant((*a)[kNg + n_ - 1]);
        break;
      case FvBoundary::outflow:
        for (ArrayXd* a : {&rho_, &mom_, &ene_}) {
          a->segment(0, kNg).setConstant((*a)[kNg]);
          a->segment(kNg + n_, kNg).setConstant((*a)[kNg + n_ - 1]);
        }
        break;
    }
  }

  SolverConfig cfg_;
  Index n_, m_;
  std::size_t fallback_interfaces_ = 0;

  ArrayXd rho_, mom_, ene_, u_, p_, H_;  // padded cell arrays
  ArrayXd sq_ratio_, uh_, Hh_, ch_, inv_c_, b1_;
  ArrayXd L00_, L01_, L02_, L10_, L11_, L12_, L20_, L21_, L22_;
  std::array<std::array<ArrayXd, 6>, 3> W_;
  ArrayXd wl0_, wl1_, wl2_, wr0_, wr1_, wr2_;
  ArrayXd rhoL_, momL_, eneL_, rhoR_, momR_, eneR_, uL_, uR_, pL_, pR_;
  ArrayXd SL_, SR_, Sst_, tL_, tR_, facL_, facR_;
  ArrayXd f0L_, f1L_, f2L_, f0R_, f1R_, f2R_;
  ArrayXd g0L_, g1L_, g2L_, g0R_, g1R_, g2R_;
  ArrayXd flux0_, flux1_, flux2_;
  BoolArray bad_;
  WenoScratch ws_;
  ArrayXd scan_p_, scan_s_;
};

// ---------------------------------------------------------------------------
// Lagrangian variable-coefficient p-system
// ---------------------------------------------------------------------------
class PsystemSystem {
 public:
  static constexpr std::size_t NC = 2;
  using State = std::array<ArrayXd, NC>;  // p, u (interior cells)

  PsystemSystem(const SolverConfig& cfg, const ArrayXd& K)
      : cfg_(cfg), n_(cfg.grid.n), m_(cfg.grid.n + 1) {
    const Index N = n_ + 2 * kNg;
    p_.resize(N);
    u_.resize(N);
    Z_.resize(N);
    K_.resize(N);
    K_.segment(kNg, n_) = K;
    switch (cfg_.bc) {
      case FvBoundary::periodic:
        K_.segment(0, kNg) = K_.segment(n_, kNg);
        K_.segment(kNg + n_, kNg) = K_.segment(kNg, kNg);
        break;
      case FvBoundary::wall_left_outflow_right:
        for (int k = 0; k < kNg; ++k) K_[kNg - 1 - k] = K_[kNg + k];
        K_.segment(kNg + n_, kNg).setConstant(K_[kNg + n_ - 1]);
        break;
      case FvBoundary::outflow:
        K_.segment(0, kNg).setConstant(K_[kNg]);
        K_.segment(kNg + n_, kNg).setConstant(K_[kNg + n_ - 1]);
        break;
    }
    for (ArrayXd* a : {&Zbar_, &inv_Zbar_, &pL_, &pR_, &uL_, &uR_, &Zl_, &Zr_, &pst_, &ust_,
                       &am_p_, &am_u_, &ap_p_, &ap_u_})
      a->resize(m_);
    for (auto& row : W_)
      for (ArrayXd& a : row) a.resize(m_);
    bad_.resize(m_);
    ws_.resize(m_);
    scan_s_.resize(n_);
  }

  void echo_config(RunRecord& rec) const {
    rec.config["solver"] = "fv_psystem";
    rec.config["scheme"] = "weno5_char_fwave_ssprk104";
    rec.config["frame"] = "lagrangian_x";
    rec.config["n"] = std::to_string(n_);
    rec.config["lo"] = fmt_g17(cfg_.grid.lo);
    rec.config["hi"] = fmt_g17(cfg_.grid.hi);
    rec.config["cfl"] = fmt_g17(cfg_.cfl);
    rec.config["bc"] = to_string(cfg_.bc);
    rec.config["gamma"] = fmt_g17(cfg_.eos.gamma);
    rec.config["p_star"] = fmt_g17(cfg_.eos.p_star);
    rec.config["v_star"] = fmt_g17(cfg_.eos.v_star);
    rec.config["delta"] = "1";
    rec.config["seed"] = "0";
  }

  StepScan scan(const State& q) {
    StepScan out;
    Index jp;
    const double p_min = q[0].minCoeff(&jp);
    if (!(p_min > 0.0)) {
      out.ok = false;
      out.why = describe_cell(cfg_.grid, jp, "positivity loss: pressure", p_min);
      return out;
    }
    scan_s_ = (cfg_.eos.c_star_sq() * K_.segment(kNg, n_) *
               (q[0] / cfg_.eos.p_star).pow(1.0 + 1.0 / cfg_.eos.gamma))
                  .sqrt();
    out.smax = scan_s_.maxCoeff();
    if (cfg_.abort_on_nonfinite && !std::isfinite(out.smax)) {
      out.ok = false;
      out.why = "non-finite state detected";
    }
    return out;
  }

  void rhs(const State& q, State& dq) {
    const double half_exp = 0.5 * (1.0 + 1.0 / cfg_.eos.gamma);
    const double c_star = std::sqrt(cfg_.eos.c_star_sq());

    p_.segment(kNg, n_) = q[0];
    u_.segment(kNg, n_) = q[1];
    fill_ghosts();
    // Lagrangian sound speed == impedance: c = sqrt(c_*^2 K) (p/p_*)^((1+1/gamma)/2).
    Z_ = c_star * K_.sqrt() * (p_ / cfg_.eos.p_star).pow(half_exp);

    auto seg = [&](const ArrayXd& a, int j) { return a.segment(j, m_); };

    Zbar_ = 0.5 * (seg(Z_, 2) + seg(Z_, 3));
    inv_Zbar_ = Zbar_.inverse();
    for (int j = 0; j < 6; ++j) {
      W_[0][j] = 0.5 * (seg(u_, j) - seg(p_, j) * inv_Zbar_);
      W_[1][j] = 0.5 * (seg(u_, j) + seg(p_, j) * inv_Zbar_);
    }
    weno5_edge(W_[0][0], W_[0][1], W_[0][2], W_[0][3], W_[0][4], ws_, uL_);  // uL_ holds w1L
    weno5_edge(W_[1][0], W_[1][1], W_[1][2], W_[1][3], W_[1][4], ws_, uR_);  // uR_ holds w2L
    pL_ = Zbar_ * (uR_ - uL_);
    uL_ = uL_ + uR_;  // now uL_ is the left-side velocity
    weno5_edge(W_[0][5], W_[0][4], W_[0][3], W_[0][2], W_[0][1], ws_, pst_);  // w1R
    weno5_edge(W_[1][5], W_[1][4], W_[1][3], W_[1][2], W_[1][1], ws_, ust_);  // w2R
    pR_ = Zbar_ * (ust_ - pst_);
    uR_ = pst_ + ust_;

    bad_ = (pL_ <= 0.0) || (pR_ <= 0.0);
    fallback_interfaces_ += static_cast<std::size_t>(bad_.count());
    pL_ = bad_.select(seg(p_, 2), pL_);
    uL_ = bad_.select(seg(u_, 2), uL_);
    pR_ = bad_.select(seg(p_, 3), pR_);
    uR_ = bad_.select(seg(u_, 3), uR_);

    // Linearized interface problem with side impedances (left/right cell K).
    Zl_ = c_star * seg(K_, 2).sqrt() * (pL_ / cfg_.eos.p_star).pow(half_exp);
    Zr_ = c_star * seg(K_, 3).sqrt() * (pR_ / cfg_.eos.p_star).pow(half_exp);
    pst_ = (Zr_ * pL_ + Zl_ * pR_ - Zl_ * Zr_ * (uR_ - uL_)) / (Zl_ + Zr_);
    ust_ = (Zl_ * uL_ + Zr_ * uR_ - (pR_ - pL_)) / (Zl_ + Zr_);

    // Fluctuations: left-going wave at speed -Zl, right-going at +Zr.
    am_p_ = -Zl_ * (pst_ - pL_);
    am_u_ = -Zl_ * (ust_ - uL_);
    ap_p_ = Zr_ * (pR_ - pst_);
    ap_u_ = Zr_ * (uR_ - ust_);

    // Within-cell variation term: A_i (q^{i,R} - q^{i,L}) with cell-centered c^2.
    const double inv_dx = 1.0 / cfg_.grid.dx();
    dq[0] = -inv_dx * (ap_p_.segment(0, n_) + am_p_.segment(1, n_) +
                       Z_.segment(kNg, n_).square() * (uL_.segment(1, n_) - uR_.segment(0, n_)));
    dq[1] = -inv_dx * (ap_u_.segment(0, n_) + am_u_.segment(1, n_) +
                       (pL_.segment(1, n_) - pR_.segment(0, n_)));
  }

  void snapshot(RunRecord& rec, double t, const State& q) {
    FieldSnapshot snap;
    snap.t = t;
    snap.grid = cfg_.grid;
    snap.names = {"p", "u"};
    snap.fields = {q[0], q[1]};
    rec.add_snapshot(std::move(snap));
  }

  void record_totals(RunRecord& rec, double t, const State& q) {
    const double dx = cfg_.grid.dx();
    rec.add_scalar("u_total", t, dx * kahan_total(q[1]));
    rec.add_scalar("weno_fallback_count", t, static_cast<double>(fallback_interfaces_));
  }

 private:
  void fill_ghosts() {
    switch (cfg_.bc) {
      case FvBoundary::periodic:
        for (ArrayXd* a : {&p_, &u_}) {
          a->segment(0, kNg) = a->segment(n_, kNg);
          a->segment(kNg + n_, kNg) = a->segment(kNg, kNg);
        }
        break;
      case FvBoundary::wall_left_outflow_right:
        for (int k = 0; k < kNg; ++k) {
          p_[kNg - 1 - k] = p_[kNg + k];
          u_[kNg - 1 - k] = -u_[kNg + k];
        }
        p_.segment(kNg + n_, kNg).setConstant(p_[kNg + n_ - 1]);
        u_.segment(kNg + n_, kNg).setConstant(u_[kNg + n_ - 1]);
        break;
      case FvBoundary::outflow:
        for (ArrayXd* a : {&p_, &u_}) {
          a->segment(0, kNg).setConstant((*a)[kNg]);
          a->segment(kNg + n_, kNg).setConstant((*a)[kNg + n_ - 1]);
        }
        break;
    }
  }

  SolverConfig cfg_;
  Index n_, m_;
  std::size_t fallback_interfaces_ = 0;

  ArrayXd p_, u_, Z_, K_;  // padded cell arrays
  ArrayXd Zbar_, inv_Zbar_;
  std::array<std::array<ArrayXd, 6>, 2> W_;
  ArrayXd pL_, pR_, uL_, uR_, Zl_, Zr_, pst_, ust_;
  ArrayXd am_p_, am_u_, ap_p_, ap_u_;
  BoolArray bad_;
  WenoScratch ws_;
  ArrayXd scan_s_;
};

}  // namespace

const char* to_string(FvBoundary bc) {
  switch (bc) {
    case FvBoundary::periodic:
      return "periodic";
    case FvBoundary::wall_left_outflow_right:
      return "wall_left_outflow_right";
    case FvBoundary::outflow:
      return "outflow";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  grid.validate(4 * kNg);
  eos.validate();
  PGAS_CHECK_ARG(cfl > 0.0 && cfl < 1.0, "fv: cfl must lie in (0, 1)");
  PGAS_CHECK_ARG(order == 5, "fv: only fifth-order reconstruction is implemented");
}

void EulerConservedState::validate() const {
  PGAS_CHECK_ARG(rho.size() == momentum.size() && momentum.size() == energy.size(),
                 "fv: conserved field sizes must match");
  PGAS_CHECK_ARG(rho.size() >= 2, "fv: too few cells");
  PGAS_CHECK_ARG(std::isfinite(t), "fv: state time must be finite");
  PGAS_CHECK_DOMAIN((rho > 0.0).all(), "fv: density must be positive");
  PGAS_CHECK_DOMAIN(rho.allFinite() && momentum.allFinite() && energy.allFinite(),
                    "fv: conserved fields must be finite");
}

EulerConservedState euler_conserved_from_primitive(const EulerPrimState& prim,
                                                   const GasEOS& eos, double t) {
  prim.validate();
  eos.validate();
  EulerConservedState out;
  out.rho = prim.rho;
  out.momentum = prim.rho * prim.u;
  out.energy = prim.p / (eos.gamma - 1.0) + 0.5 * prim.rho * prim.u.square();
  out.t = t;
  return out;
}

EulerPrimState euler_primitive_from_conserved(const EulerConservedState& cons,
                                              const GasEOS& eos) {
  cons.validate();
  eos.validate();
  EulerPrimState out;
  out.rho = cons.rho;
  out.u = cons.momentum / cons.rho;
  out.p = (eos.gamma - 1.0) * (cons.energy - 0.5 * cons.momentum * out.u);
  return out;
}

RunRecord solve_euler(const EulerConservedState& ic, const SolverConfig& cfg, double t_end,
                      const std::vector<double>& output_times) {
  cfg.validate();
  ic.validate();
  PGAS_CHECK_ARG(cfg.grid.kind == CoordKind::eulerian_chi,
                 "fv: solve_euler expects an Eulerian grid");
  PGAS_CHECK_ARG(ic.rho.size() == cfg.grid.n, "fv: state size must match the grid");
  PGAS_CHECK_ARG(t_end > ic.t, "fv: t_end must exceed the initial time");

  EulerSystem sys(cfg);
  EulerSystem::State q = {ic.rho, ic.momentum, ic.energy};
  return integrate(sys, std::move(q), ic.t, t_end, output_times, cfg);
}

RunRecord solve_psystem(const PUState& ic, const SolverConfig& cfg, double t_end,
                        const std::vector<double>& output_times) {
  cfg.validate();
  ic.validate();
  PGAS_CHECK_ARG(cfg.grid.kind == CoordKind::lagrangian_x,
                 "fv: solve_psystem expects a Lagrangian grid");
  PGAS_CHECK_ARG(ic.p.size() == cfg.grid.n, "fv: state size must match the grid");
  PGAS_CHECK_ARG(ic.K != nullptr, "fv: solve_psystem needs the sampled medium K(x)");
  PGAS_CHECK_ARG(t_end > ic.t, "fv: t_end must exceed the initial time");

  PsystemSystem sys(cfg, *ic.K);
  PsystemSystem::State q = {ic.p, ic.u};
  return integrate(sys, std::move(q), ic.t, t_end, output_times, cfg);
}

// ---------------------------------------------------------------------------
// Front tracking
// ---------------------------------------------------------------------------

std::optional<double> front_position_in_snapshot(const FieldSnapshot& snap,
                                                 double threshold_fraction) {
  PGAS_CHECK_ARG(threshold_fraction > 0.0 && threshold_fraction < 1.0,
                 "front_position: threshold fraction must lie in (0, 1)");
  const ArrayXd& p = snap.field("p");
  const Index n = p.size();
  PGAS_CHECK_ARG(n >= 2, "front_position: too few cells");
  const double p_r = p[n - 1];
  const double max_dev = (p - p_r).maxCoeff();
  if (!(max_dev > 0.0)) return std::nullopt;
  const double thr = threshold_fraction * max_dev;
  for (Index j = n - 1; j >= 0; --j) {
    const double dev = p[j] - p_r;
    if (dev > thr) {
      if (j == n - 1) return snap.grid.center(j);
      const double dev_next = p[j + 1] - p_r;
      const double frac = (dev - thr) / (dev - dev_next);
      return snap.grid.center(j) + frac * snap.grid.dx();
    }
  }
  return std::nullopt;
}

std::size_t FrontTrack::detections() const {
  std::size_t k = 0;
  for (const auto& x : positions)
    if (x.has_value()) ++k;
  return k;
}

std::optional<double> FrontTrack::fitted_speed(double window_lo_fraction) const {
  PGAS_CHECK_ARG(window_lo_fraction >= 0.0 && window_lo_fraction < 1.0,
                 "front_position: window fraction must lie in [0, 1)");
  if (times.empty()) return std::nullopt;
  const double t0 = times.front(), t1 = times.back();
  const double t_cut = t0 + window_lo_fraction * (t1 - t0);
  KahanSum<double> st, sx, stt, stx;
  std::size_t k = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!positions[i].has_value() || times[i] < t_cut) continue;
    st.add(times[i]);
    sx.add(*positions[i]);
    stt.add(times[i] * times[i]);
    stx.add(times[i] * *positions[i]);
    ++k;
  }
  if (k < 2) return std::nullopt;
  const double kd = static_cast<double>(k);
  const double var = stt.value() - st.value() * st.value() / kd;
  if (!(var > 0.0)) return std::nullopt;
  return (stx.value() - st.value() * sx.value() / kd) / var;
}

FrontTrack front_position(const RunRecord& record, double threshold_fraction) {
  PGAS_CHECK_ARG(!record.snapshots.empty(), "front_position: record has no snapshots");
  FrontTrack track;
  track.times.reserve(record.snapshots.size());
  track.positions.reserve(record.snapshots.size());
  for (const FieldSnapshot& snap : record.snapshots) {
    track.times.push_back(snap.t);
    track.positions.push_back(front_position_in_snapshot(snap, threshold_fraction));
  }
  return track;
}

}  // namespace pgas
