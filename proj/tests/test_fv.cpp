#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pgas/fv.hpp"
#include "pgas/medium.hpp"

using namespace pgas;

namespace {

Grid1D make_grid(double lo, double hi, int n,
                 CoordKind kind = CoordKind::eulerian_chi) {
  Grid1D g;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  g.kind = kind;
  return g;
}

double scalar_rel_drift(const RunRecord& rec, const std::string& name) {
  const auto& series = rec.scalars.at(name);
  REQUIRE(series.size() >= 2);
  double lo = series.front().second, hi = lo;
  for (const auto& [t, v] : series) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double scale = std::max(1.0, std::abs(series.front().second));
  return (hi - lo) / scale;
}

}  // namespace

TEST_CASE("euler conserved/primitive round trip is exact") {
  GasEOS eos;
  const int n = 17;
  EulerPrimState prim;
  prim.rho = 1.0 + 0.4 * ArrayXd::LinSpaced(n, -1.0, 1.0).sin();
  prim.u = 0.3 * ArrayXd::LinSpaced(n, 0.0, 2.0).cos();
  prim.p = 1.0 + 0.2 * ArrayXd::LinSpaced(n, -2.0, 2.0).tanh();

  const EulerConservedState cons = euler_conserved_from_primitive(prim, eos, 1.5);
  CHECK(cons.t == 1.5);
  CHECK((cons.momentum - prim.rho * prim.u).abs().maxCoeff() < 1e-15);
  const ArrayXd E_expect =
      prim.p / (eos.gamma - 1.0) + 0.5 * prim.rho * prim.u.square();
  CHECK((cons.energy - E_expect).abs().maxCoeff() < 1e-15);

  const EulerPrimState back = euler_primitive_from_conserved(cons, eos);
  CHECK((back.rho - prim.rho).abs().maxCoeff() < 1e-14);
  CHECK((back.u - prim.u).abs().maxCoeff() < 1e-14);
  CHECK((back.p - prim.p).abs().maxCoeff() < 1e-14);
}

TEST_CASE("euler solver holds a uniformly moving constant state") {
  SolverConfig cfg;
  cfg.grid = make_grid(0.0, 2.0, 64);

  EulerPrimState prim;
  prim.rho = ArrayXd::Constant(64, 1.3);
  prim.u = ArrayXd::Constant(64, 0.7);
  prim.p = ArrayXd::Constant(64, 0.9);

  const RunRecord rec =
      solve_euler(euler_conserved_from_primitive(prim, cfg.eos), cfg, 1.0, {0.5});
  CHECK(!rec.aborted);
  REQUIRE(rec.snapshots.size() == 3);
  for (const auto& s : rec.snapshots) {
    CAPTURE(s.t);
    CHECK((s.field("rho") - 1.3).abs().maxCoeff() < 1e-13);
    CHECK((s.field("u") - 0.7).abs().maxCoeff() < 1e-13);
    CHECK((s.field("p") - 0.9).abs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("euler solver conserves mass, momentum, energy on a periodic run") {
  SolverConfig cfg;
  cfg.grid = make_grid(0.0, 1.0, 128);

  const ArrayXd x = cfg.grid.centers();
  EulerPrimState prim;
  prim.rho = 1.0 + 0.2 * (2.0 * M_PI * x).sin();
  prim.u = 0.1 + 0.05 * (2.0 * M_PI * x).cos();
  prim.p = 1.0 + 0.1 * (4.0 * M_PI * x).sin();

  const RunRecord rec = solve_euler(euler_conserved_from_primitive(prim, cfg.eos),
                                    cfg, 0.4, {0.1, 0.2, 0.3});
  CHECK(!rec.aborted);
  CHECK(scalar_rel_drift(rec, "mass") < 1e-12);
  CHECK(scalar_rel_drift(rec, "momentum") < 1e-12);
  CHECK(scalar_rel_drift(rec, "energy") < 1e-12);
}

TEST_CASE("euler solver advects an entropy wave at high order") {
  // With u and p constant the density rides along unchanged: after one
  // period over the unit interval the exact solution equals the initial
  // data, so the surviving error is pure scheme error.
  auto error_at = [](int n) {
    SolverConfig cfg;
    cfg.grid = make_grid(0.0, 1.0, n);
    cfg.cfl = 0.45;
    const ArrayXd x = cfg.grid.centers();
    EulerPrimState prim;
    prim.rho = 1.0 + 0.2 * (2.0 * M_PI * x).sin();
    prim.u = ArrayXd::Constant(n, 1.0);
    prim.p = ArrayXd::Constant(n, 1.0);
    const RunRecord rec =
        solve_euler(euler_conserved_from_primitive(prim, cfg.eos), cfg, 1.0, {});
    REQUIRE(!rec.aborted);
    return (rec.snapshots.back().field("rho") - prim.rho).abs().maxCoeff();
  };

  const double e32 = error_at(32);
  const double e64 = error_at(64);
  const double e128 = error_at(128);
  CAPTURE(e32);
  CAPTURE(e64);
  CAPTURE(e128);
  const double order_lo = std::log2(e32 / e64);
  const double order_hi = std::log2(e64 / e128);
  CHECK(order_lo > 3.0);
  CHECK(order_hi > 3.0);
  CHECK(e128 < 1e-6);
}

TEST_CASE("wall boundary equals the mirrored periodic problem") {
  // A reflecting wall at the left edge is the even/odd extension of the
  // fields, so the wall run must match the restriction of a symmetric run
  // on the doubled domain while no wave touches the outer edges.
  const int n = 200;
  const double W = 20.0;
  const double t_end = 4.0;

  SolverConfig wall_cfg;
  wall_cfg.grid = make_grid(0.0, W, n);
  wall_cfg.bc = FvBoundary::wall_left_outflow_right;
  const ArrayXd xw = wall_cfg.grid.centers();
  EulerPrimState wall_ic;
  wall_ic.rho = ArrayXd::Constant(n, 1.0);
  wall_ic.u = ArrayXd::Zero(n);
  wall_ic.p = 1.0 + 0.3 * (-(xw - 5.0).square()).exp();

  SolverConfig big_cfg;
  big_cfg.grid = make_grid(-W, W, 2 * n);
  big_cfg.bc = FvBoundary::periodic;
  const ArrayXd xb = big_cfg.grid.centers();
  EulerPrimState big_ic;
  big_ic.rho = ArrayXd::Constant(2 * n, 1.0);
  big_ic.u = ArrayXd::Zero(2 * n);
  big_ic.p = 1.0 + 0.3 * (-(xb.abs() - 5.0).square()).exp();

  const RunRecord rw =
      solve_euler(euler_conserved_from_primitive(wall_ic, wall_cfg.eos), wall_cfg,
                  t_end, {});
  const RunRecord rb =
      solve_euler(euler_conserved_from_primitive(big_ic, big_cfg.eos), big_cfg,
                  t_end, {});
  REQUIRE(!rw.aborted);
  REQUIRE(!rb.aborted);

  const ArrayXd pw = rw.snapshots.back().field("p");
  const ArrayXd pb = rb.snapshots.back().field("p").segment(n, n);
  const ArrayXd uw = rw.snapshots.back().field("u");
  const ArrayXd ub = rb.snapshots.back().field("u").segment(n, n);
  CHECK((pw - pb).abs().maxCoeff() < 1e-10);
  CHECK((uw - ub).abs().maxCoeff() < 1e-10);
}

TEST_CASE("front tracking follows a manufactured moving profile") {
  RunRecord rec;
  const Grid1D g = make_grid(0.0, 40.0, 400);
  const ArrayXd x = g.centers();
  for (int k = 0; k <= 5; ++k) {
    const double t = static_cast<double>(k);
    FieldSnapshot snap;
    snap.t = t;
    snap.grid = g;
    snap.names = {"p"};
    snap.fields = {1.0 + 0.5 * (1.0 - ((x - 6.0 - 2.0 * t) / 0.4).tanh())};
    rec.add_snapshot(std::move(snap));
  }

  const FrontTrack track = front_position(rec, 0.05);
  REQUIRE(track.times.size() == 6);
  CHECK(track.detections() == 6);
  for (std::size_t k = 1; k < track.positions.size(); ++k) {
    REQUIRE(track.positions[k].has_value());
    const double step = *track.positions[k] - *track.positions[k - 1];
    CHECK(step == doctest::Approx(2.0).epsilon(0.01));
  }
  const auto speed = track.fitted_speed();
  REQUIRE(speed.has_value());
  CHECK(*speed == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("front tracking reports nothing on a constant field") {
  RunRecord rec;
  const Grid1D g = make_grid(0.0, 10.0, 50);
  for (int k = 0; k < 3; ++k) {
    FieldSnapshot snap;
    snap.t = static_cast<double>(k);
    snap.grid = g;
    snap.names = {"p"};
    snap.fields = {ArrayXd::Constant(50, 1.0)};
    rec.add_snapshot(std::move(snap));
  }
  const FrontTrack track = front_position(rec, 0.05);
  CHECK(track.detections() == 0);
  CHECK(!track.fitted_speed().has_value());
}

TEST_CASE("p-system keeps a constant state steady in a varying medium") {
  SolverConfig cfg;
  cfg.grid = make_grid(0.0, 4.0, 128, CoordKind::lagrangian_x);

  const ArrayXd x = cfg.grid.centers();
  const ArrayXd K = 1.0 + 0.5 * (2.0 * M_PI * x).sin();
  PUState ic;
  ic.p = ArrayXd::Constant(128, 1.0);
  ic.u = ArrayXd::Constant(128, 0.25);
  ic.K = &K;

  const RunRecord rec = solve_psystem(ic, cfg, 1.0, {0.5});
  CHECK(!rec.aborted);
  REQUIRE(rec.snapshots.size() == 3);
  for (const auto& s : rec.snapshots) {
    CAPTURE(s.t);
    CHECK((s.field("p") - 1.0).abs().maxCoeff() < 1e-13);
    CHECK((s.field("u") - 0.25).abs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("p-system conserves the velocity integral through a varying medium") {
  SolverConfig cfg;
  cfg.grid = make_grid(-8.0, 8.0, 512, CoordKind::lagrangian_x);

  const MediumProfile med = MediumProfile::piecewise(0.25, 1.75);
  const ArrayXd x = cfg.grid.centers();
  const ArrayXd K = sample_K(med, cfg.eos, cfg.grid);

  PUState ic;
  ic.p = 1.0 + 0.4 * (-x.square()).exp();
  ic.u = ArrayXd::Constant(512, 0.1);
  ic.K = &K;

  const RunRecord rec = solve_psystem(ic, cfg, 2.0, {1.0});
  CHECK(!rec.aborted);
  CHECK(scalar_rel_drift(rec, "u_total") < 1e-12);

  // The pulse must actually have moved: the run is not a steady state.
  const ArrayXd p0 = rec.snapshots.front().field("p");
  const ArrayXd p1 = rec.snapshots.back().field("p");
  CHECK((p1 - p0).abs().maxCoeff() > 1e-2);
}

TEST_CASE("p-system rejects a state without medium samples") {
  SolverConfig cfg;
  cfg.grid = make_grid(0.0, 1.0, 32, CoordKind::lagrangian_x);
  PUState ic;
  ic.p = ArrayXd::Constant(32, 1.0);
  ic.u = ArrayXd::Zero(32);
  CHECK_THROWS_AS(solve_psystem(ic, cfg, 0.1, {}), std::invalid_argument);
}

TEST_CASE("solver config validation rejects bad parameters") {
  SolverConfig cfg;
  cfg.grid = make_grid(0.0, 1.0, 32);
  CHECK_NOTHROW(cfg.validate());

  SolverConfig bad_cfl = cfg;
  bad_cfl.cfl = 0.0;
  CHECK_THROWS_AS(bad_cfl.validate(), std::invalid_argument);
  bad_cfl.cfl = 1.0;
  CHECK_THROWS_AS(bad_cfl.validate(), std::invalid_argument);

  SolverConfig bad_order = cfg;
  bad_order.order = 3;
  CHECK_THROWS_AS(bad_order.validate(), std::invalid_argument);

  SolverConfig bad_grid = cfg;
  bad_grid.grid.n = 4;
  CHECK_THROWS_AS(bad_grid.validate(), std::invalid_argument);
}
