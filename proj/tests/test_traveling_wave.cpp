#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pgas/traveling_wave.hpp"

using namespace pgas;

namespace {

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <=
         tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

HomogCoeffs two_phase_coeffs() {
  HomogCoeffs c;
  c.mean_Kinv = 16.0 / 7.0;
  c.mu = 3.0 / 256.0;
  c.zeta = 48.0 / 343.0;
  c.nu = 759.0 / 65536.0;
  c.delta = 1.0;
  return c;
}

TravelingWaveProblem two_phase_problem(double V) {
  TravelingWaveProblem prob;
  prob.V = V;
  prob.coeffs = two_phase_coeffs();
  return prob;
}

// Peak value of an even profile sampled on an even-count symmetric grid: the
// peak sits halfway between the two middle nodes, and the even quadratic
// through (±h/2, b), (±3h/2, a) has vertex value (9b - a) / 8.
double interpolated_peak(const TravelingWaveSolution& sol) {
  const Eigen::Index m = sol.xi.size() / 2 - 1;
  return (9.0 * sol.u[m] - sol.u[m - 1]) / 8.0;
}

}  // namespace

TEST_CASE("profile coefficients and the saddle threshold") {
  const TravelingWaveProblem prob = two_phase_problem(1.2);
  prob.validate();

  // alpha0 = 1/mu at delta = 1; alpha1 = G'(1)/(V <K^-1>);
  // alpha2 = 1/(mu V^3 <K^-1>).
  CHECK(close_rel(prob.alpha0(), 256.0 / 3.0, 1e-14));
  CHECK(close_rel(prob.alpha1(), 2.4 / (1.2 * 16.0 / 7.0), 1e-14));
  CHECK(close_rel(prob.alpha2(),
                  256.0 / 3.0 / (1.2 * 1.2 * 1.2 * 16.0 / 7.0), 1e-14));
  CHECK(close_rel(prob.c4(), 253.0 / 256.0, 1e-14));

  // Linearized curvature at the origin for the three reference speeds, and
  // its closed form (1 - G(1)/(V^2 <K^-1>)) / mu.
  CHECK(close_rel(two_phase_problem(1.1).beta_lin(), 42.137741046831962, 1e-12));
  CHECK(close_rel(two_phase_problem(1.2).beta_lin(), 49.037037037037031, 1e-12));
  CHECK(close_rel(two_phase_problem(1.222).beta_lin(), 50.332177045134529, 1e-12));
  const double closed_form =
      (1.0 - 1.4 / (1.2 * 1.2 * 16.0 / 7.0)) * 256.0 / 3.0;
  CHECK(close_rel(prob.beta_lin(), closed_form, 1e-13));

  // Effective sound speed of the background medium.
  CHECK(close_rel(prob.sonic_speed(), 0.78262379212492643, 1e-13));

  // Invariant checks.
  TravelingWaveProblem bad = prob;
  bad.V = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = prob;
  bad.coeffs.mu = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("separatrix guess reproduces the homoclinic orbit") {
  // Continuum peak amplitudes of the orbit, from an independent adaptive
  // integration of the same phase-plane system at tolerance 1e-12.
  struct Golden {
    double V, u_peak, p_peak;
  };
  const Golden goldens[] = {
      {1.1, 1.42379083337, 2.56616991671},
      {1.2, 1.73999550823, 3.08799460988},
      {1.222, 1.80284617577, 3.20307802679},
  };

  for (const Golden& g : goldens) {
    CAPTURE(g.V);
    const TravelingWaveProblem prob = two_phase_problem(g.V);
    const TravelingWaveSolution guess = separatrix_guess(prob);

    CHECK(guess.xi.size() == 4096);
    CHECK(guess.u.size() == 4096);
    const double half = 12.0 / std::sqrt(prob.beta_lin());
    CHECK(close_rel(guess.xi[4095], half, 1e-14));
    CHECK(close_rel(guess.xi[0], -half, 1e-14));
    CHECK(guess.u[0] == 0.0);
    CHECK(guess.u[4095] == 0.0);
    CHECK(guess.model_order == TwModelOrder::second);
    CHECK(guess.iterations == 0);

    // The grid values are samples of the orbit, so the interpolated peak
    // matches the continuum amplitude to interpolation accuracy.
    CHECK(close_rel(interpolated_peak(guess), g.u_peak, 1e-7));
    CHECK(close_rel(1.0 + g.V * interpolated_peak(guess), g.p_peak, 1e-7));

    // Even by construction.
    CHECK((guess.u - guess.u.reverse()).abs().maxCoeff() == 0.0);
  }

  // Grid max of the V = 1.2 guess against the independent oracle's value.
  const TravelingWaveSolution g12 = separatrix_guess(two_phase_problem(1.2));
  CHECK(close_rel(g12.u.maxCoeff(), 1.7399886662643065, 1e-8));
}

TEST_CASE("construction fails with a no-saddle error below the sonic speed") {
  for (double V : {0.7, -0.7}) {
    CAPTURE(V);
    const TravelingWaveProblem prob = two_phase_problem(V);
    CHECK_THROWS_AS((void)separatrix_guess(prob), std::domain_error);
    try {
      (void)separatrix_guess(prob);
    } catch (const std::domain_error& e) {
      CHECK(std::string(e.what()).find("saddle") != std::string::npos);
    }
  }
}

TEST_CASE("newton refinement converges below 1e-10 within 15 iterations") {
  const TravelingWaveProblem prob = two_phase_problem(1.2);
  const TravelingWaveSolution guess = separatrix_guess(prob);
  const TravelingWaveSolution sol = newton_refine_2nd(prob, guess);

  CHECK(sol.residual_norm < 1e-10);
  CHECK(sol.iterations <= 15);
  CHECK(sol.iterations >= 1);
  CHECK(static_cast<int>(sol.residual_history.size()) == sol.iterations);
  CHECK(sol.model_order == TwModelOrder::second);

  // p = p* + V u pointwise (bitwise: that is how p is built).
  CHECK((sol.p - (1.0 + 1.2 * sol.u)).abs().maxCoeff() == 0.0);
  // Even about the peak; exact zeros at the ends.
  CHECK((sol.u - sol.u.reverse()).abs().maxCoeff() == 0.0);
  CHECK(sol.u[0] == 0.0);
  CHECK(sol.u[sol.u.size() - 1] == 0.0);

  // Node max of the converged discrete profile against the independent
  // float64 oracle (its own rounding floor dominates the tolerance).
  CHECK(std::abs(sol.u.maxCoeff() - 1.73998956274) < 5e-8);

  // Residual recomputed from the double-stored profile: the storage floor is
  // ~4 |u| eps / h^2 ~ 5e-10, so assert a loose but meaningful bound.
  CHECK(tw_residual(prob, sol).abs().maxCoeff() < 1e-8);

  // Grid values against the independent oracle profile (8 fixture nodes).
  // The oracle did not symmetrize and carries a ~4.5e-6 odd translational
  // contamination, which bounds the meaningful comparison tolerance.
  struct Node {
    int i;
    double u;
  };
  const Node fixture[] = {
      {256, 0.00010487322852634536},  {1024, 0.0099349630035929001},
      {1536, 0.19536281429813479},    {1792, 0.79110574437275294},
      {2047, 1.7399895627358668},     {2048, 1.7399895374677177},
      {2304, 0.78717532645484234},    {3072, 0.0098769147557614834},
  };
  for (const Node& f : fixture) {
    CAPTURE(f.i);
    CHECK(std::abs(sol.u[f.i] - f.u) < 1e-5);
  }
}

TEST_CASE("newton refinement shows a quadratic convergence tail") {
  const TravelingWaveProblem prob = two_phase_problem(1.2);
  TravelingWaveSolution guess = separatrix_guess(prob);

  // Perturb the guess so that Newton needs several iterations; the ends stay
  // exactly zero because the perturbation is multiplicative.
  guess.u *= (1.0 + 0.02 * (3.0 * guess.xi).sin());
  guess.p = 1.0 + prob.V * guess.u;

  const TravelingWaveSolution sol = newton_refine_2nd(prob, guess, 1e-11, 40);
  CHECK(sol.residual_norm < 1e-11);
  CHECK(sol.iterations <= 15);

  // Quadratic tail: while the residual sits between the rounding floor and
  // the basin edge, successive iterations contract it far faster than any
  // linear rate. Count the strong contractions instead of asserting each
  // pair, since individual step sizes depend on where the iterate lands.
  int strong = 0;
  for (std::size_t k = 0; k + 1 < sol.residual_history.size(); ++k) {
    const double r0 = sol.residual_history[k];
    const double r1 = sol.residual_history[k + 1];
    if (r0 < 1e-1 && r0 > 1e-10 && r1 < 0.05 * r0) ++strong;
  }
  CHECK(strong >= 2);
}

TEST_CASE("the zero profile is a Newton fixed point") {
  const TravelingWaveProblem prob = two_phase_problem(1.2);
  TravelingWaveSolution zero = separatrix_guess(prob, 0.0, 64);
  zero.u.setZero();
  zero.p.setOnes();
  const TravelingWaveSolution sol = newton_refine_2nd(prob, zero);
  CHECK(sol.residual_norm == 0.0);
  CHECK(sol.iterations == 0);
  CHECK(sol.u.abs().maxCoeff() == 0.0);
}

TEST_CASE("newton failure paths report diagnostics") {
  const TravelingWaveProblem prob = two_phase_problem(1.2);
  const TravelingWaveSolution guess = separatrix_guess(prob);

  // Tolerance below the extended-precision rounding floor: max_iter is
  // exhausted and the message carries the residual history.
  try {
    (void)newton_refine_2nd(prob, guess, 1e-18, 5);
    CHECK(false);
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("history") != std::string::npos);
  }

  // An iterate outside the positive-pressure region is rejected.
  TravelingWaveSolution bad = guess;
  bad.u = -bad.u * 2.0;  // p = 1 + V u dips below zero at the trough
  bad.p = 1.0 + prob.V * bad.u;
  CHECK((bad.p < 0.0).any());
  CHECK_THROWS_AS((void)newton_refine_2nd(prob, bad), std::runtime_error);
}

TEST_CASE("fourth-order solve: nu = 0 reduces to the second-order profile") {
  TravelingWaveProblem prob = two_phase_problem(1.2);
  prob.coeffs.nu = 0.0;
  const TravelingWaveSolution g = separatrix_guess(prob, 0.0, 1024);
  const TravelingWaveSolution s2 = newton_refine_2nd(prob, g);
  const TravelingWaveSolution s4 = newton_solve_4th(prob, s2, 1e-9, 40, 1024);

  CHECK(s4.model_order == TwModelOrder::fourth);
  // Same decay rate, same half-width, same grid; the profiles coincide.
  CHECK(close_rel(s4.xi[0], s2.xi[0], 1e-14));
  CHECK((s4.u - s2.u).abs().maxCoeff() < 1e-10);
}

TEST_CASE("fourth-order solve differs from second order and refines at 2nd order") {
  const TravelingWaveProblem prob = two_phase_problem(1.222);
  const TravelingWaveSolution guess = separatrix_guess(prob);
  const TravelingWaveSolution s2 = newton_refine_2nd(prob, guess);

  const TravelingWaveSolution s4 = newton_solve_4th(prob, s2);
  CHECK(s4.model_order == TwModelOrder::fourth);
  CHECK(s4.residual_norm < 1e-9);
  CHECK((s4.u - s4.u.reverse()).abs().maxCoeff() == 0.0);
  CHECK(s4.u[0] == 0.0);

  // The fourth-order grid uses the decay rate of its own linearization:
  // lambda solves c4 L^4 - L^2 + beta = 0 with positive real part.
  const double half = s4.xi[s4.xi.size() - 1];
  const double lam = 12.0 / half;
  // |c4 lam^4 - lam^2 + beta| cannot vanish for the complex root's real
  // part alone, but the half-width must sit well inside (2, 12)/sqrt(beta)
  // scaled bounds and differ from the second-order half-width.
  CHECK(half > 3.0);
  CHECK(half < 12.0);
  CHECK(lam < std::sqrt(prob.beta_lin()));

  // Visibly different profile (shorter and wider at these coefficients).
  CHECK(std::abs(s4.u.maxCoeff() - s2.u.maxCoeff()) > 0.1);

  // Refinement study: peak amplitude converges at second order in h, so
  // successive dyadic differences shrink by about 4x.
  const double um256 = newton_solve_4th(prob, s2, 1e-9, 40, 256).u.maxCoeff();
  const double um512 = newton_solve_4th(prob, s2, 1e-9, 40, 512).u.maxCoeff();
  const double um1024 = s4.u.maxCoeff();
  const double d1 = std::abs(um512 - um256);
  const double d2 = std::abs(um1024 - um512);
  CHECK(d2 > 0.0);
  const double ratio = d1 / d2;
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.5);
}

TEST_CASE("wave speed measurement recovers an exactly advected pulse") {
  Grid1D grid;
  grid.lo = 0.0;
  grid.hi = 64.0;
  grid.n = 512;
  grid.kind = CoordKind::eulerian_chi;

  // Speed 1.25 with snapshots every 1.0: the pulse moves exactly 10 cells
  // per snapshot, so the sub-cell interpolation error is identical at every
  // time and the least-squares slope is exact.
  const double V = 1.25;
  RunRecord rec;
  for (int k = 0; k <= 8; ++k) {
    const double t = static_cast<double>(k);
    FieldSnapshot snap;
    snap.t = t;
    snap.grid = grid;
    ArrayXd p(grid.n), u(grid.n);
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.center(j) - 12.0 - V * t;
      p[j] = 1.0 + std::exp(-x * x / 4.0);
      u[j] = 0.0;
    }
    snap.names = {"p", "u"};
    snap.fields = {p, u};
    rec.add_snapshot(std::move(snap));
  }

  const WaveSpeedMeasurement m = measure_wave_speed(rec, 10.0);
  CHECK(std::abs(m.speed - V) < 1e-10);
  CHECK(m.times.size() == 9);

  // A fixed-point trace of a linear field interpolates exactly.
  {
    RunRecord lin;
    FieldSnapshot snap;
    snap.t = 0.0;
    snap.grid = grid;
    ArrayXd p(grid.n);
    for (int j = 0; j < grid.n; ++j) p[j] = grid.center(j);
    snap.names = {"p"};
    snap.fields = {p};
    lin.add_snapshot(std::move(snap));
    const auto trace = point_trace(lin, "p", 10.3);
    REQUIRE(trace.size() == 1);
    CHECK(close_rel(trace[0].second, 10.3, 1e-12));
  }
}

TEST_CASE("wave speed measurement rejects unseparated pulses") {
  Grid1D grid;
  grid.lo = 0.0;
  grid.hi = 64.0;
  grid.n = 512;
  grid.kind = CoordKind::eulerian_chi;

  const auto make_rec = [&](double second_center) {
    RunRecord rec;
    for (int k = 0; k < 2; ++k) {
      const double t = static_cast<double>(k);
      FieldSnapshot snap;
      snap.t = t;
      snap.grid = grid;
      ArrayXd p(grid.n), u = ArrayXd::Zero(grid.n);
      for (int j = 0; j < grid.n; ++j) {
        const double x1 = grid.center(j) - 40.0 - t;
        const double x2 = grid.center(j) - second_center - t;
        p[j] = 1.0 + std::exp(-x1 * x1 / 2.0) + 0.6 * std::exp(-x2 * x2 / 2.0);
      }
      snap.names = {"p", "u"};
      snap.fields = {p, u};
      rec.add_snapshot(std::move(snap));
    }
    return rec;
  };

  // Secondary maximum inside the window: ambiguous.
  try {
    (void)measure_wave_speed(make_rec(34.0), 8.0);
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("ambiguous") != std::string::npos);
  }

  // The same secondary pulse beyond the window is fine and the leading
  // (taller) pulse is the one tracked.
  const WaveSpeedMeasurement m = measure_wave_speed(make_rec(20.0), 8.0);
  CHECK(std::abs(m.speed - 1.0) < 1e-6);
  CHECK(std::abs(m.positions[0] - 40.0) < 0.01);
}

TEST_CASE("wave files round-trip the profile and stamp the header") {
  namespace fs = std::filesystem;
  const TravelingWaveProblem prob = two_phase_problem(1.2);
  const TravelingWaveSolution guess = separatrix_guess(prob, 0.0, 128);
  const TravelingWaveSolution sol = newton_refine_2nd(prob, guess, 1e-9);

  const fs::path dir = fs::temp_directory_path() / "pgas_tw_files_test";
  fs::remove_all(dir);
  const auto written = write_wave_files(prob, sol, dir.string(), "tw_v1p2");
  REQUIRE(written.size() == 2);
  CHECK(written[0] == "tw_v1p2_wave.csv");
  CHECK(written[1] == "tw_v1p2_wave.json");

  std::ifstream csv(dir / written[0]);
  REQUIRE(csv.good());
  std::string line;
  std::getline(csv, line);
  CHECK(line.rfind("# config_hash=", 0) == 0);
  std::getline(csv, line);
  CHECK(line == "# gamma=1.3999999999999999");
  // Skip to the column header and count data rows.
  int header_lines = 0;
  while (std::getline(csv, line) && line.rfind("#", 0) == 0) ++header_lines;
  CHECK(header_lines == 4);  // p_star, v_star, delta, seed
  CHECK(line == "xi,u,p");
  int rows = 0;
  while (std::getline(csv, line) && !line.empty()) ++rows;
  CHECK(rows == 128);

  std::ifstream json(dir / written[1]);
  REQUIRE(json.good());
  std::stringstream buffer;
  buffer << json.rdbuf();
  const std::string body = buffer.str();
  CHECK(body.find("\"model_order\": \"second\"") != std::string::npos);
  CHECK(body.find("\"V\": 1.2") != std::string::npos);
  CHECK(body.find("\"iterations\":") != std::string::npos);
  CHECK(body.find("\"mu\": 0.01171875") != std::string::npos);
  fs::remove_all(dir);
}
