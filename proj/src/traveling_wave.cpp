#include "pgas/traveling_wave.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace pgas {

namespace {

using ld = long double;

// Long-double view of the profile problem. The Newton iterations run at
// extended precision because the centered second difference loses about
// |u| eps / h^2 per entry; at the default grids that alone would exceed the
// 1e-10 residual target in double.
struct LdParams {
  ld a0{0}, a1{0}, a2{0}, V{0}, pstar{0}, c4{0};
  BasicGasEOS<ld> eos;
  ld gint0{0};

  ld delta_gint(ld u) const {
    const ld p = pstar + V * u;
    if (!(p > ld(0)))
      throw std::runtime_error(
          "traveling wave: iterate left the positive-pressure region");
    return eos_G_primitive(eos, p) - gint0;
  }
  ld stiffness(ld u) const { return eos_G(eos, pstar + V * u); }
};

LdParams make_ld_params(const TravelingWaveProblem& prob, double c4) {
  LdParams out;
  out.a0 = static_cast<ld>(prob.alpha0());
  out.a1 = static_cast<ld>(prob.alpha1());
  out.a2 = static_cast<ld>(prob.alpha2());
  out.V = static_cast<ld>(prob.V);
  out.pstar = static_cast<ld>(prob.eos.p_star);
  out.c4 = static_cast<ld>(c4);
  out.eos = prob.eos.cast<ld>();
  out.gint0 = eos_G_primitive(out.eos, out.pstar);
  return out;
}

ld ghost(const std::vector<ld>& u, std::ptrdiff_t i) {
  return (i < 0 || i >= static_cast<std::ptrdiff_t>(u.size())) ? ld(0) : u[i];
}

// Interior residual (size n - 2) of the profile equation; `fourth` switches
// the c4 u'''' stencil on, with zero clamped beyond the Dirichlet ends.
std::vector<ld> profile_residual(const LdParams& par, const std::vector<ld>& u,
                                 ld h, bool fourth) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
  std::vector<ld> f(n - 2);
  const ld inv_h2 = ld(1) / (h * h);
  const ld inv_h4 = inv_h2 * inv_h2;
  for (std::ptrdiff_t i = 1; i + 1 < n; ++i) {
    const ld du = (u[i + 1] - u[i - 1]) / (ld(2) * h);
    ld v = -(u[i + 1] - ld(2) * u[i] + u[i - 1]) * inv_h2 + par.a0 * u[i] +
           ld(0.5) * par.a1 * du * du - par.a2 * par.delta_gint(u[i]);
    if (fourth)
      v += par.c4 *
           (ghost(u, i - 2) - ld(4) * u[i - 1] + ld(6) * u[i] -
            ld(4) * u[i + 1] + ghost(u, i + 2)) *
           inv_h4;
    f[i - 1] = v;
  }
  return f;
}

ld max_abs(const std::vector<ld>& v) {
  ld m = 0;
  for (ld x : v) {
    const ld a = x < 0 ? -x : x;
    if (a > m) m = a;
  }
  return m;
}

void symmetrize(std::vector<ld>& u) {
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const ld avg = (u[i] + u[n - 1 - i]) / ld(2);
    u[i] = avg;
    u[n - 1 - i] = avg;
  }
}

std::string history_string(const std::vector<double>& resids) {
  std::ostringstream os;
  for (std::size_t i = 0; i < resids.size(); ++i)
    os << (i ? ", " : "") << fmt_g17(resids[i]);
  return os.str();
}

// Tridiagonal solve (Thomas algorithm, no pivoting; the Jacobian rows are
// dominated by the 2/h^2 diagonal at every grid this module uses).
void solve_tridiag(std::vector<ld>& sub, std::vector<ld>& diag,
                   std::vector<ld>& sup, std::vector<ld>& rhs) {
  const std::size_t m = diag.size();
  for (std::size_t k = 1; k < m; ++k) {
    const ld w = sub[k] / diag[k - 1];
    diag[k] -= w * sup[k - 1];
    rhs[k] -= w * rhs[k - 1];
  }
  rhs[m - 1] /= diag[m - 1];
  for (std::size_t k = m - 1; k-- > 0;)
    rhs[k] = (rhs[k] - sup[k] * rhs[k + 1]) / diag[k];
}

// Banded LU with partial pivoting for bandwidths kl = ku = 2 (pentadiagonal
// plus the kl rows of pivoting fill). Column-major band storage with
// ldab = 2 kl + ku + 1 = 7 rows; A(i, j) lives at row kl + ku + i - j.
class BandedLU5 {
 public:
  explicit BandedLU5(int m) : m_(m), ab_(static_cast<std::size_t>(7) * m, 0), piv_(m, 0) {}

  ld& at(int i, int j) {
    return ab_[static_cast<std::size_t>(j) * 7 + (4 + i - j)];
  }

  void factor() {
    for (int j = 0; j < m_; ++j) {
      const int last_row = std::min(j + 2, m_ - 1);
      int ip = j;
      ld amax = absl(at(j, j));
      for (int i = j + 1; i <= last_row; ++i) {
        const ld a = absl(at(i, j));
        if (a > amax) {
          amax = a;
          ip = i;
        }
      }
      piv_[j] = ip;
      if (amax == ld(0))
        throw std::runtime_error("traveling wave: singular Jacobian");
      const int last_col = std::min(j + 4, m_ - 1);
      if (ip != j)
        for (int jj = j; jj <= last_col; ++jj) std::swap(at(j, jj), at(ip, jj));
      const ld pivval = at(j, j);
      for (int i = j + 1; i <= last_row; ++i) {
        const ld lij = at(i, j) / pivval;
        at(i, j) = lij;
        for (int jj = j + 1; jj <= last_col; ++jj) at(i, jj) -= lij * at(j, jj);
      }
    }
  }

  void solve(std::vector<ld>& rhs) {
    for (int j = 0; j < m_; ++j) {
      if (piv_[j] != j) std::swap(rhs[j], rhs[piv_[j]]);
      const int last_row = std::min(j + 2, m_ - 1);
      for (int i = j + 1; i <= last_row; ++i) rhs[i] -= at(i, j) * rhs[j];
    }
    for (int j = m_ - 1; j >= 0; --j) {
      const int last_col = std::min(j + 4, m_ - 1);
      for (int jj = j + 1; jj <= last_col; ++jj) rhs[j] -= at(j, jj) * rhs[jj];
      rhs[j] /= at(j, j);
    }
  }

 private:
  static ld absl(ld x) { return x < 0 ? -x : x; }
  int m_;
  std::vector<ld> ab_;
  std::vector<int> piv_;
};

struct NewtonOutcome {
  std::vector<ld> u;
  ld resid{0};
  int iterations{0};
  std::vector<double> history;
};

// Shared Newton driver; `fourth` selects the pentadiagonal stencil/solver.
// Iterates are symmetrized about the midpoint each step, which scrubs the
// numerically near-singular translational mode (it is odd about the peak).
NewtonOutcome newton_core(const LdParams& par, std::vector<ld> u, ld h,
                          bool fourth, double tol, int max_iter) {
  const int n = static_cast<int>(u.size());
  const int m = n - 2;
  const ld inv_h2 = ld(1) / (h * h);
  const ld inv_h4 = inv_h2 * inv_h2;
  std::vector<double> history;

  std::vector<ld> f = profile_residual(par, u, h, fourth);
  ld resid = max_abs(f);
  if (static_cast<double>(resid) < tol) return {std::move(u), resid, 0, {}};

  ld prev = resid;
  int growth_streak = 0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    std::vector<ld> rhs(m);
    for (int k = 0; k < m; ++k) rhs[k] = -f[k];

    if (!fourth) {
      std::vector<ld> sub(m, 0), diag(m, 0), sup(m, 0);
      for (int k = 0; k < m; ++k) {
        const int i = k + 1;
        const ld du = (u[i + 1] - u[i - 1]) / (ld(2) * h);
        diag[k] = ld(2) * inv_h2 + par.a0 - par.a2 * par.V * par.stiffness(u[i]);
        sub[k] = -inv_h2 - par.a1 * du / (ld(2) * h);
        sup[k] = -inv_h2 + par.a1 * du / (ld(2) * h);
      }
      solve_tridiag(sub, diag, sup, rhs);
    } else {
      BandedLU5 lu(m);
      for (int k = 0; k < m; ++k) {
        const int i = k + 1;
        const ld du = (u[i + 1] - u[i - 1]) / (ld(2) * h);
        lu.at(k, k) = ld(6) * par.c4 * inv_h4 + ld(2) * inv_h2 + par.a0 -
                      par.a2 * par.V * par.stiffness(u[i]);
        if (k >= 1)
          lu.at(k, k - 1) =
              -ld(4) * par.c4 * inv_h4 - inv_h2 - par.a1 * du / (ld(2) * h);
        if (k + 1 < m)
          lu.at(k, k + 1) =
              -ld(4) * par.c4 * inv_h4 - inv_h2 + par.a1 * du / (ld(2) * h);
        if (k >= 2) lu.at(k, k - 2) = par.c4 * inv_h4;
        if (k + 2 < m) lu.at(k, k + 2) = par.c4 * inv_h4;
      }
      lu.factor();
      lu.solve(rhs);
    }

    for (int k = 0; k < m; ++k) u[k + 1] += rhs[k];
    symmetrize(u);

    f = profile_residual(par, u, h, fourth);
    resid = max_abs(f);
    history.push_back(static_cast<double>(resid));
    if (static_cast<double>(resid) < tol)
      return {std::move(u), resid, iter, std::move(history)};
    // Genuine divergence doubles the residual step after step; jitter at the
    // extended-precision noise floor does not.
    if (resid > ld(2) * prev) {
      if (++growth_streak >= 3)
        throw std::runtime_error(
            "traveling wave: Newton diverged (residual grew three "
            "consecutive iterations; history: " +
            history_string(history) + ")");
    } else {
      growth_streak = 0;
    }
    prev = resid;
  }
  throw std::runtime_error(
      "traveling wave: Newton did not reach tolerance " + fmt_g17(tol) +
      " within " + std::to_string(max_iter) +
      " iterations (residual history: " + history_string(history) + ")");
}

// Cubic Hermite evaluation on one interval.
double hermite(double x0, double x1, double y0, double y1, double d0,
               double d1, double x) {
  const double hh = x1 - x0;
  const double t = (x - x0) / hh;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * hh * d0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * hh * d1;
}

struct Trajectory {
  std::vector<double> xi, u, v, dv;  // dv = v' from the profile ODE

  double eval(const std::vector<double>& y, const std::vector<double>& dy,
              double x) const {
    const auto it = std::upper_bound(xi.begin(), xi.end(), x);
    std::size_t k = static_cast<std::size_t>(it - xi.begin());
    if (k == 0) k = 1;
    if (k >= xi.size()) k = xi.size() - 1;
    return hermite(xi[k - 1], xi[k], y[k - 1], y[k], dy[k - 1], dy[k], x);
  }
  double eval_u(double x) const { return eval(u, v, x); }
  double eval_v(double x) const { return eval(v, dv, x); }
};

double linear_interp(const ArrayXd& xs, const ArrayXd& ys, double x) {
  const Eigen::Index n = xs.size();
  if (x <= xs[0] || x >= xs[n - 1]) return 0.0;
  const double t = (x - xs[0]) / (xs[n - 1] - xs[0]) * double(n - 1);
  Eigen::Index k = static_cast<Eigen::Index>(t);
  if (k >= n - 1) k = n - 2;
  const double w = t - double(k);
  return (1.0 - w) * ys[k] + w * ys[k + 1];
}

TravelingWaveSolution assemble_solution(const TravelingWaveProblem& prob,
                                        ArrayXd xi, std::vector<ld> u_ld,
                                        double resid, int iters,
                                        TwModelOrder order,
                                        std::vector<double> history = {}) {
  TravelingWaveSolution sol;
  sol.xi = std::move(xi);
  const Eigen::Index n = sol.xi.size();
  sol.u = ArrayXd(n);
  for (Eigen::Index i = 0; i < n; ++i)
    sol.u[i] = static_cast<double>(u_ld[static_cast<std::size_t>(i)]);
  sol.p = prob.eos.p_star + prob.V * sol.u;
  sol.V = prob.V;
  sol.residual_norm = resid;
  sol.iterations = iters;
  sol.model_order = order;
  sol.residual_history = std::move(history);
  sol.validate();
  return sol;
}

std::vector<ld> to_ld(const ArrayXd& u) {
  std::vector<ld> out(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i)
    out[static_cast<std::size_t>(i)] = static_cast<ld>(u[i]);
  out.front() = 0;
  out.back() = 0;
  return out;
}

ArrayXd uniform_grid(double half, int n) {
  ArrayXd xi(n);
  const double h = 2.0 * half / double(n - 1);
  for (int j = 0; j < n; ++j) xi[j] = -half + h * double(j);
  return xi;
}

}  // namespace

const char* to_string(TwModelOrder order) {
  return order == TwModelOrder::second ? "second" : "fourth";
}

double TravelingWaveProblem::alpha0() const {
  return 1.0 / (coeffs.delta * coeffs.delta * coeffs.mu);
}

double TravelingWaveProblem::alpha1() const {
  return eos_G_deriv(eos, eos.p_star, 1) / (V * coeffs.mean_Kinv);
}

double TravelingWaveProblem::alpha2() const {
  return 1.0 / (coeffs.delta * coeffs.delta * coeffs.mu * V * V * V *
                coeffs.mean_Kinv);
}

double TravelingWaveProblem::beta_lin() const {
  return alpha0() - alpha2() * V * eos_G(eos, eos.p_star);
}

double TravelingWaveProblem::sonic_speed() const {
  return std::sqrt(eos_G(eos, eos.p_star) / coeffs.mean_Kinv);
}

double TravelingWaveProblem::c4() const {
  return coeffs.delta * coeffs.delta * coeffs.nu / coeffs.mu;
}

void TravelingWaveProblem::validate() const {
  PGAS_CHECK_ARG(std::isfinite(V) && V != 0.0,
                 "traveling wave: speed V must be finite and nonzero");
  coeffs.validate();
  eos.validate();
  PGAS_CHECK_ARG(coeffs.mu > 0.0,
                 "traveling wave: dispersive coefficient mu must be positive");
}

void TravelingWaveSolution::validate() const {
  const Eigen::Index n = xi.size();
  PGAS_CHECK_ARG(n >= 5 && u.size() == n && p.size() == n,
                 "traveling wave solution: xi, u, p must share size >= 5");
  PGAS_CHECK_ARG(xi.isFinite().all() && u.isFinite().all() &&
                     p.isFinite().all(),
                 "traveling wave solution: fields must be finite");
  PGAS_CHECK_ARG(std::isfinite(V) && V != 0.0,
                 "traveling wave solution: speed must be finite and nonzero");
  PGAS_CHECK_ARG(std::abs(u[0]) <= 1e-10 && std::abs(u[n - 1]) <= 1e-10,
                 "traveling wave solution: profile must vanish at the ends");
}

ArrayXd tw_residual(const TravelingWaveProblem& prob,
                    const TravelingWaveSolution& sol) {
  prob.validate();
  sol.validate();
  const Eigen::Index n = sol.xi.size();
  const ld h = static_cast<ld>((sol.xi[n - 1] - sol.xi[0]) / double(n - 1));
  const LdParams par = make_ld_params(prob, prob.c4());
  const std::vector<ld> f = profile_residual(
      par, to_ld(sol.u), h, sol.model_order == TwModelOrder::fourth);
  ArrayXd out = ArrayXd::Zero(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    out[i] = static_cast<double>(f[static_cast<std::size_t>(i - 1)]);
  return out;
}

TravelingWaveSolution separatrix_guess(const TravelingWaveProblem& prob,
                                       double xi_half, int n) {
  prob.validate();
  PGAS_CHECK_ARG(n >= 9, "separatrix guess: need at least 9 grid points");
  const double beta = prob.beta_lin();
  PGAS_CHECK_DOMAIN(
      beta > 0.0,
      "separatrix guess: the background state is not a saddle (|V| = " +
          fmt_g17(std::abs(prob.V)) + " does not exceed the effective sound "
          "speed " + fmt_g17(prob.sonic_speed()) + "), so no solitary wave "
          "profile exists at this speed");

  const double sqrt_beta = std::sqrt(beta);
  const double half = xi_half > 0.0 ? xi_half : 12.0 / sqrt_beta;
  const double sigma = prob.V > 0.0 ? 1.0 : -1.0;
  const double eps = 1e-8;

  const double a0 = prob.alpha0();
  const double a1 = prob.alpha1();
  const double a2 = prob.alpha2();
  const double pstar = prob.eos.p_star;
  const double gint0 = eos_G_primitive(prob.eos, pstar);
  const GasEOS eos = prob.eos;
  const double v_speed = prob.V;
  const auto rhs = [&](const std::array<double, 2>& s,
                       std::array<double, 2>& dsdt, double /*xi*/) {
    const double p = pstar + v_speed * s[0];
    if (!(p > 0.0))
      throw std::runtime_error(
          "separatrix guess: trajectory left the positive-pressure region");
    dsdt[0] = s[1];
    dsdt[1] = a0 * s[0] + 0.5 * a1 * s[1] * s[1] -
              a2 * (eos_G_primitive(eos, p) - gint0);
  };

  Trajectory traj;
  std::array<double, 2> s{sigma * eps, sigma * eps * sqrt_beta};
  double xi = 0.0;
  double dt = 0.01 / sqrt_beta;
  const double xi_cap = 100.0 / sqrt_beta + 2.0 * half;
  const double u_cap = 1e3;

  const auto record = [&]() {
    std::array<double, 2> d{};
    rhs(s, d, xi);
    traj.xi.push_back(xi);
    traj.u.push_back(s[0]);
    traj.v.push_back(s[1]);
    traj.dv.push_back(d[1]);
  };
  record();

  namespace odeint = boost::numeric::odeint;
  auto stepper =
      odeint::make_controlled(1e-12, 1e-12,
                              odeint::runge_kutta_dopri5<std::array<double, 2>>());
  const auto escape = [&](const std::string& why) -> std::runtime_error {
    std::ostringstream os;
    os << "separatrix guess: " << why
       << "; phase-plane trace tail (xi, u, u'):";
    const std::size_t n_tr = traj.xi.size();
    for (std::size_t k = n_tr > 6 ? n_tr - 6 : 0; k < n_tr; ++k)
      os << " (" << fmt_g17(traj.xi[k]) << ", " << fmt_g17(traj.u[k]) << ", "
         << fmt_g17(traj.v[k]) << ")";
    return std::runtime_error(os.str());
  };

  long attempts = 0;
  while (sigma * s[1] > 0.0) {
    if (++attempts > 5'000'000) throw escape("stepper stalled");
    if (!(dt > 1e-14)) throw escape("step size collapsed");
    if (odeint::fail == stepper.try_step(rhs, s, xi, dt)) continue;
    record();
    if (sigma * s[0] > u_cap)
      throw escape("trajectory escaped without a turning point");
    if (xi > xi_cap)
      throw escape("no turning point within the integration span");
  }
  PGAS_CHECK_INTERNAL(traj.xi.size() >= 2,
                      "separatrix guess: trajectory has too few samples");

  // Locate the turning point (u' = 0) inside the final interval by bisection
  // on the cubic Hermite interpolant of u'.
  double lo = traj.xi[traj.xi.size() - 2];
  double hi = traj.xi.back();
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sigma * traj.eval_v(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double xi_peak = 0.5 * (lo + hi);

  ArrayXd grid = uniform_grid(half, n);
  std::vector<ld> u(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    if (j == 0 || j == n - 1) continue;  // exact Dirichlet ends
    const double zeta = xi_peak - std::abs(grid[j]);
    const double val = zeta >= 0.0
                           ? traj.eval_u(zeta)
                           : sigma * eps * std::exp(sqrt_beta * zeta);
    u[static_cast<std::size_t>(j)] = static_cast<ld>(val);
  }
  symmetrize(u);

  const LdParams par = make_ld_params(prob, 0.0);
  const ld h = static_cast<ld>(2.0 * half / double(n - 1));
  const double resid =
      static_cast<double>(max_abs(profile_residual(par, u, h, false)));
  return assemble_solution(prob, std::move(grid), std::move(u), resid, 0,
                           TwModelOrder::second);
}

TravelingWaveSolution newton_refine_2nd(const TravelingWaveProblem& prob,
                                        const TravelingWaveSolution& guess,
                                        double tol, int max_iter) {
  prob.validate();
  guess.validate();
  PGAS_CHECK_ARG(tol > 0.0 && max_iter >= 1,
                 "newton refine: tol must be positive, max_iter >= 1");
  const Eigen::Index n = guess.xi.size();
  const ld h = static_cast<ld>((guess.xi[n - 1] - guess.xi[0]) / double(n - 1));
  const LdParams par = make_ld_params(prob, 0.0);
  NewtonOutcome out =
      newton_core(par, to_ld(guess.u), h, /*fourth=*/false, tol, max_iter);
  return assemble_solution(prob, guess.xi, std::move(out.u),
                           static_cast<double>(out.resid), out.iterations,
                           TwModelOrder::second, std::move(out.history));
}

TravelingWaveSolution newton_solve_4th(const TravelingWaveProblem& prob,
                                       const TravelingWaveSolution& guess2,
                                       double tol, int max_iter, int n) {
  prob.validate();
  guess2.validate();
  PGAS_CHECK_ARG(tol > 0.0 && max_iter >= 1,
                 "newton solve: tol must be positive, max_iter >= 1");
  PGAS_CHECK_ARG(n >= 9, "newton solve: need at least 9 grid points");
  const double beta = prob.beta_lin();
  PGAS_CHECK_DOMAIN(beta > 0.0,
                    "newton solve: the background state is not a saddle; no "
                    "solitary wave profile exists at this speed");
  const double c4 = prob.c4();

  // Decay rate of the fourth-order linearization: decaying root of
  // c4 L^4 - L^2 + beta = 0 (reduces to sqrt(beta) as c4 -> 0).
  double lam_re;
  if (c4 == 0.0) {
    lam_re = std::sqrt(beta);
  } else {
    const double disc = 1.0 - 4.0 * c4 * beta;
    if (disc >= 0.0) {
      lam_re = std::sqrt((1.0 - std::sqrt(disc)) / (2.0 * c4));
    } else {
      const std::complex<double> lam2(1.0 / (2.0 * c4),
                                      std::sqrt(-disc) / (2.0 * c4));
      lam_re = std::sqrt(lam2).real();
    }
  }
  const double half = 12.0 / lam_re;

  ArrayXd grid = uniform_grid(half, n);
  std::vector<ld> u(static_cast<std::size_t>(n), 0);
  for (int j = 1; j + 1 < n; ++j)
    u[static_cast<std::size_t>(j)] =
        static_cast<ld>(linear_interp(guess2.xi, guess2.u, grid[j]));
  symmetrize(u);

  const ld h = static_cast<ld>(2.0 * half / double(n - 1));
  const std::vector<double> fractions =
      c4 > 0.0 ? std::vector<double>{0.25, 0.5, 0.75, 1.0}
               : std::vector<double>{1.0};
  int total_iters = 0;
  ld resid = 0;
  std::vector<double> history;
  for (double frac : fractions) {
    const LdParams par = make_ld_params(prob, frac * c4);
    NewtonOutcome out =
        newton_core(par, std::move(u), h, /*fourth=*/true, tol, max_iter);
    u = std::move(out.u);
    total_iters += out.iterations;
    resid = out.resid;
    history.insert(history.end(), out.history.begin(), out.history.end());
  }
  return assemble_solution(prob, std::move(grid), std::move(u),
                           static_cast<double>(resid), total_iters,
                           TwModelOrder::fourth, std::move(history));
}

WaveSpeedMeasurement measure_wave_speed(const RunRecord& rec, double window) {
  PGAS_CHECK_ARG(window > 0.0, "wave speed: window must be positive");
  PGAS_CHECK_ARG(rec.snapshots.size() >= 2,
                 "wave speed: need at least two snapshots");
  WaveSpeedMeasurement out;
  for (const FieldSnapshot& snap : rec.snapshots) {
    const ArrayXd& p = snap.field("p");
    const Eigen::Index n = p.size();
    PGAS_CHECK_ARG(n >= 3, "wave speed: snapshot too small");
    Eigen::Index jm = 0;
    p.maxCoeff(&jm);
    if (jm == 0 || jm == n - 1)
      throw std::runtime_error(
          "wave speed: ambiguous measurement, leading maximum sits on the "
          "domain edge at t = " + fmt_g17(snap.t));
    const double dx = (snap.grid.hi - snap.grid.lo) / double(snap.grid.n);
    const double denom = p[jm - 1] - 2.0 * p[jm] + p[jm + 1];
    double offset = denom < 0.0 ? 0.5 * dx * (p[jm - 1] - p[jm + 1]) / denom
                                : 0.0;
    offset = std::clamp(offset, -0.5 * dx, 0.5 * dx);
    const double x_peak = snap.grid.center(static_cast<int>(jm)) + offset;

    const double ambient = p[n - 1];
    const double amp = p[jm] - ambient;
    if (!(amp > 0.0))
      throw std::runtime_error(
          "wave speed: ambiguous measurement, no pulse above the ambient "
          "state at t = " + fmt_g17(snap.t));
    for (Eigen::Index j = 1; j + 1 < n; ++j) {
      if (std::abs(j - jm) <= 2) continue;
      if (!(p[j] >= p[j - 1] && p[j] >= p[j + 1])) continue;
      if (p[j] - ambient < 0.25 * amp) continue;
      if (std::abs(snap.grid.center(static_cast<int>(j)) - x_peak) <= window)
        throw std::runtime_error(
            "wave speed: ambiguous measurement, secondary maximum within the "
            "separation window at t = " + fmt_g17(snap.t));
    }
    out.times.push_back(snap.t);
    out.positions.push_back(x_peak);
  }

  const std::size_t m = out.times.size();
  KahanSum<double> st, sx;
  for (std::size_t k = 0; k < m; ++k) {
    st.add(out.times[k]);
    sx.add(out.positions[k]);
  }
  const double t_bar = st.value() / double(m);
  const double x_bar = sx.value() / double(m);
  KahanSum<double> sxy, stt;
  for (std::size_t k = 0; k < m; ++k) {
    sxy.add((out.times[k] - t_bar) * (out.positions[k] - x_bar));
    stt.add((out.times[k] - t_bar) * (out.times[k] - t_bar));
  }
  PGAS_CHECK_ARG(stt.value() > 0.0,
                 "wave speed: snapshot times must not coincide");
  out.speed = sxy.value() / stt.value();
  return out;
}

std::vector<std::pair<double, double>> point_trace(const RunRecord& rec,
                                                   const std::string& field,
                                                   double x) {
  std::vector<std::pair<double, double>> out;
  out.reserve(rec.snapshots.size());
  for (const FieldSnapshot& snap : rec.snapshots) {
    const ArrayXd& f = snap.field(field);
    const int n = snap.grid.n;
    const double dx = (snap.grid.hi - snap.grid.lo) / double(n);
    const double c0 = snap.grid.center(0);
    double t = (x - c0) / dx;
    t = std::clamp(t, 0.0, double(n - 1));
    int j = std::min(static_cast<int>(t), n - 2);
    const double w = t - double(j);
    out.emplace_back(snap.t, (1.0 - w) * f[j] + w * f[j + 1]);
  }
  return out;
}

std::vector<std::string> write_wave_files(const TravelingWaveProblem& prob,
                                          const TravelingWaveSolution& sol,
                                          const std::string& out_dir,
                                          const std::string& stem) {
  prob.validate();
  sol.validate();
  std::filesystem::create_directories(out_dir);

  RunRecord rec;
  rec.config["solver"] = "traveling_wave";
  rec.config["model_order"] = to_string(sol.model_order);
  rec.config["V"] = fmt_g17(sol.V);
  rec.config["n"] = std::to_string(sol.xi.size());
  rec.config["xi_half"] = fmt_g17(std::abs(sol.xi[sol.xi.size() - 1]));
  rec.config["mean_Kinv"] = fmt_g17(prob.coeffs.mean_Kinv);
  rec.config["mu"] = fmt_g17(prob.coeffs.mu);
  rec.config["zeta"] = fmt_g17(prob.coeffs.zeta);
  rec.config["nu"] = fmt_g17(prob.coeffs.nu);
  rec.config["gamma"] = fmt_g17(prob.eos.gamma);
  rec.config["p_star"] = fmt_g17(prob.eos.p_star);
  rec.config["v_star"] = fmt_g17(prob.eos.v_star);
  rec.config["delta"] = fmt_g17(prob.coeffs.delta);
  rec.config["seed"] = "0";

  std::vector<std::string> written;
  const std::string csv_name = stem + "_wave.csv";
  {
    std::ofstream out(std::filesystem::path(out_dir) / csv_name);
    PGAS_CHECK_INTERNAL(out.good(), "wave files: cannot open CSV for writing");
    out << csv_header(rec) << "xi,u,p\n";
    for (Eigen::Index i = 0; i < sol.xi.size(); ++i)
      out << fmt_g17(sol.xi[i]) << ',' << fmt_g17(sol.u[i]) << ','
          << fmt_g17(sol.p[i]) << '\n';
    PGAS_CHECK_INTERNAL(out.good(), "wave files: CSV write failed");
  }
  written.push_back(csv_name);

  const std::string json_name = stem + "_wave.json";
  {
    std::ofstream out(std::filesystem::path(out_dir) / json_name);
    PGAS_CHECK_INTERNAL(out.good(), "wave files: cannot open JSON for writing");
    out << "{\n"
        << "  \"config_hash\": \"" << rec.config_hash() << "\",\n"
        << "  \"model_order\": \"" << to_string(sol.model_order) << "\",\n"
        << "  \"V\": " << fmt_g17(sol.V) << ",\n"
        << "  \"residual_norm\": " << fmt_g17(sol.residual_norm) << ",\n"
        << "  \"iterations\": " << sol.iterations << ",\n"
        << "  \"beta_lin\": " << fmt_g17(prob.beta_lin()) << ",\n"
        << "  \"coefficients\": {\n"
        << "    \"mean_Kinv\": " << fmt_g17(prob.coeffs.mean_Kinv) << ",\n"
        << "    \"mu\": " << fmt_g17(prob.coeffs.mu) << ",\n"
        << "    \"zeta\": " << fmt_g17(prob.coeffs.zeta) << ",\n"
        << "    \"nu\": " << fmt_g17(prob.coeffs.nu) << ",\n"
        << "    \"delta\": " << fmt_g17(prob.coeffs.delta) << "\n"
        << "  },\n"
        << "  \"eos\": {\n"
        << "    \"gamma\": " << fmt_g17(prob.eos.gamma) << ",\n"
        << "    \"p_star\": " << fmt_g17(prob.eos.p_star) << ",\n"
        << "    \"v_star\": " << fmt_g17(prob.eos.v_star) << "\n"
        << "  },\n"
        << "  \"grid\": {\n"
        << "    \"n\": " << sol.xi.size() << ",\n"
        << "    \"xi_min\": " << fmt_g17(sol.xi[0]) << ",\n"
        << "    \"xi_max\": " << fmt_g17(sol.xi[sol.xi.size() - 1]) << "\n"
        << "  }\n"
        << "}\n";
    PGAS_CHECK_INTERNAL(out.good(), "wave files: JSON write failed");
  }
  written.push_back(json_name);
  return written;
}

}  // namespace pgas
