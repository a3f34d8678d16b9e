#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "smcf/barriers.hpp"
#include "smcf/errors.hpp"
#include "smcf/solver.hpp"

using namespace smcf;

namespace {

Field line(double lo, double hi, double h) {
  return make_field(FieldKind::line, lo, hi, h, BoundaryCondition::dirichlet_zero,
                    BoundaryCondition::dirichlet_zero);
}

SolverConfig config(double h, double t_end, double safety = 0.9) {
  SolverConfig c;
  c.h = h;
  c.t_end = t_end;
  c.cfl_safety = safety;
  return c;
}

// beta(r) = int_r^R (1 + c s^{2n-2})^{-1/2} ds, so beta(R) = 0.
double beta(int n, double c, double R, double r) {
  boost::math::quadrature::tanh_sinh<double> ts;
  if (r >= R) return 0.0;
  return ts.integrate([&](double s) { return 1.0 / std::sqrt(1.0 + c * std::pow(s, 2 * n - 2)); }, r, R);
}

// max |u - beta| after evolving beta with its end values held fixed.
double beta_drift(double h, double t_end) {
  const int n = 3;
  Field f = make_field(FieldKind::radial, 1.0, 4.0, h, BoundaryCondition::reflecting,
                       BoundaryCondition::dirichlet_zero);
  // dirichlet tags freeze both ends in flow_rhs; the left value is beta(1)
  f.left = BoundaryCondition::dirichlet_zero;
  std::vector<double> exact(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) exact[i] = f.values[i] = beta(n, 1.0, 4.0, f.nodes[i]);
  const auto metric = RadialMetric::euclidean(n);
  const SolverConfig cfg = config(h, t_end);
  double t = 0.0;
  while (t < t_end) {
    const double dt = std::min(stable_dt(f, metric, cfg), t_end - t);
    const auto rhs = flow_rhs(f, metric);
    for (std::size_t i = 0; i < f.size(); ++i) f.values[i] += dt * rhs[i];
    t += dt;
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f.values[i] - exact[i]));
  return worst;
}

double mass(const Field& f) {
  double m = 0.0;
  for (double v : f.values) m += v;
  return m * f.h;
}

}  // namespace

TEST_CASE("stable time step") {
  Field z = line(-1.0, 1.0, 0.01);
  CHECK(stable_dt(z, RadialMetric::euclidean(1), config(0.01, 1.0, 0.5)) == doctest::Approx(2.5e-5).epsilon(1e-12));
  Field r = make_field(FieldKind::radial, 0.0, 1.0, 0.01, BoundaryCondition::axis_symmetry,
                       BoundaryCondition::dirichlet_zero);
  CHECK(stable_dt(r, RadialMetric::euclidean(5), config(0.01, 1.0)) == doctest::Approx(9e-6).epsilon(1e-12));
  Field s = line(-1.0, 1.0, 0.01);
  for (std::size_t i = 0; i < s.size(); ++i) s.values[i] = std::sqrt(0.8) * s.nodes[i];
  CHECK(stable_dt(s, RadialMetric::euclidean(1), config(0.01, 1.0)) == doctest::Approx(9e-6).epsilon(1e-9));
  SolverConfig bad = config(0.01, 1.0);
  bad.cfl_safety = 1.5;
  CHECK_THROWS_AS(stable_dt(z, RadialMetric::euclidean(1), bad), DomainError);
}

TEST_CASE("zero data is stationary") {
  Field z = line(-5.0, 5.0, 0.1);
  const auto r1 = step_1d(z, config(0.1, 1.0));
  for (double v : r1.field.values) CHECK(v == 0.0);
  CHECK(r1.retries == 0);
  const auto m = RadialMetric::conformal_power(3, 0.5, 1.0);
  Field zr = make_field(FieldKind::radial, 1.0, 11.0, 0.1, BoundaryCondition::reflecting,
                        BoundaryCondition::dirichlet_zero);
  const FlowTrajectory tr = run_flow(m, zr, config(0.1, 2.0));
  CHECK(tr.termination == Termination::reached_t_end);
  for (double v : tr.snapshots.back().field.values) CHECK(v == 0.0);
  CHECK(tr.records.back().sup_u == 0.0);
}

TEST_CASE("linear data has zero interior update") {
  Field f = line(-2.0, 2.0, 0.05);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = 0.5 * f.nodes[i];
  const auto rhs = flow_rhs(f, RadialMetric::euclidean(1));
  for (std::size_t i = 1; i + 1 < f.size(); ++i) CHECK(std::abs(rhs[i]) < 1e-12);
  CHECK_THROWS_AS(step_1d(make_field(FieldKind::radial, 0.0, 1.0, 0.1, BoundaryCondition::axis_symmetry,
                                     BoundaryCondition::dirichlet_zero),
                          config(0.1, 1.0)),
                  DomainError);
}

TEST_CASE("maximal surface is stationary to second order") {
  const double coarse = beta_drift(0.05, 0.5);
  const double fine = beta_drift(0.025, 0.5);
  CHECK(coarse < 1e-3);
  const double ratio = coarse / fine;
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("one-dimensional bump: maximum principle, mass, spacelike") {
  Field f = line(-40.0, 40.0, 0.05);
  sample_profile(bump_profile(1.0, 4.0), f);
  const double m0 = mass(f);
  SolverConfig cfg = config(0.05, 20.0);
  cfg.snapshot_every = 5.0;
  const FlowTrajectory tr = run_flow(RadialMetric::euclidean(1), f, cfg);
  CHECK(tr.termination == Termination::reached_t_end);
  CHECK(max_principle_check(tr.records).pass);
  CHECK(spacelike_drift_check(tr.records).pass);
  CHECK(l2_monotonicity_check(tr.records).pass);
  CHECK(h1_decay_check(tr.records).pass);
  // u_t = (artanh u')' conserves the integral; the scheme is not in flux
  // form, so only up to O(h^2)
  CHECK(mass(tr.snapshots.back().field) == doctest::Approx(m0).epsilon(1e-4));
  REQUIRE(tr.snapshots.size() == 5);
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) CHECK(tr.snapshots[k].t == 5.0 * k);
  CHECK(tr.records.back().t == 20.0);
  CHECK(tr.records.back().sup_u < 0.9);
}

TEST_CASE("record cadence") {
  Field f = line(-10.0, 10.0, 0.1);
  sample_profile(bump_profile(0.5, 3.0), f);
  SolverConfig cfg = config(0.1, 1.0);
  cfg.record_every = 0.1;
  const FlowTrajectory tr = run_flow(RadialMetric::euclidean(1), f, cfg);
  REQUIRE(tr.records.size() == 11);
  for (std::size_t k = 0; k < tr.records.size(); ++k) CHECK(tr.records[k].t == doctest::Approx(0.1 * k).epsilon(1e-12));
  cfg.max_steps = 3;
  const FlowTrajectory capped = run_flow(RadialMetric::euclidean(1), f, cfg);
  CHECK(capped.termination == Termination::step_cap);
  CHECK(capped.steps == 3);
}

TEST_CASE("non-spacelike data stops the run") {
  Field f = line(-4.0, 4.0, 0.1);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = std::max(0.0, 1.0 - std::abs(f.nodes[i]));
  const FlowTrajectory tr = run_flow(RadialMetric::euclidean(1), f, config(0.1, 1.0));
  CHECK(tr.termination == Termination::spacelike_violation);
  CHECK_FALSE(tr.message.empty());
  Field edge = line(-1.0, 1.0, 0.1);
  sample_profile(gaussian_profile(1.0, 1.0), edge);
  CHECK_THROWS_AS(run_flow(RadialMetric::euclidean(1), edge, config(0.1, 1.0)), DomainError);
  CHECK_THROWS_AS(run_flow(RadialMetric::euclidean(3), f, config(0.1, 1.0)), DomainError);
}

TEST_CASE("second-order convergence in h") {
  auto run = [](double h) {
    Field f = line(-10.0, 10.0, h);
    sample_profile(bump_profile(0.5, 3.0), f);
    const FlowTrajectory tr = run_flow(RadialMetric::euclidean(1), f, config(h, 0.5));
    return tr.records.back().sup_u;
  };
  const double a = run(0.1), b = run(0.05), c = run(0.025);
  const double ratio = (a - b) / (b - c);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("Dirichlet problem on a ball") {
  const auto flat = RadialMetric::euclidean(3);
  SolverConfig cfg = config(0.1, 30.0);
  cfg.snapshot_every = 1.0;
  const DirichletRun zero = solve_dirichlet(4.0, flat, InitialProfile{}, cfg);
  for (const auto& s : zero.trajectory.snapshots)
    for (double v : s.field.values) CHECK(v == 0.0);

  const InitialProfile bump = bump_profile(1.0, 2.0);
  const DirichletRun run = solve_dirichlet(4.0, flat, bump, cfg);
  CHECK(run.trajectory.termination == Termination::reached_t_end);
  CHECK(run.trajectory.snapshots.front().field.nodes.back() == 16.0);
  for (const auto& s : run.trajectory.snapshots) {
    CHECK(s.field.values.back() == 0.0);
    for (double v : s.field.values) {
      CHECK(v >= -1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
  CHECK(max_slope(boundary_slope_series(run.trajectory, run.interpolation.sigma_tilde)) <= std::pow(4.0, -1.5));
  CHECK_THROWS_AS(solve_dirichlet(0.5, flat, bump, cfg), DomainError);
  CHECK_THROWS_AS(solve_dirichlet(4.0, flat, bump, cfg, 3.5), DomainError);
}

TEST_CASE("nested balls converge") {
  const auto flat = RadialMetric::euclidean(3);
  SolverConfig cfg = config(0.2, 20.0);
  cfg.snapshot_every = 5.0;
  const NestedStudy st = nested_ball_study({4.0, 8.0, 16.0}, flat, bump_profile(1.0, 2.0), cfg, 0.0, 3);
  REQUIRE(st.differences.size() == 2);
  CHECK(st.window == 2.0);
  CHECK(st.differences[1].max_difference < st.differences[0].max_difference);
  CHECK_THROWS_AS(nested_ball_study({4.0}, flat, bump_profile(1.0, 2.0), cfg), DomainError);
}

TEST_CASE("curved radial flow with monitors") {
  const auto m = RadialMetric::conformal_power(3, 0.5, 1.0);
  Field f = make_field(FieldKind::radial, 1.0, 41.0, 0.1, BoundaryCondition::reflecting,
                       BoundaryCondition::dirichlet_zero);
  sample_profile(bump_profile(0.5, 4.0, 3.0), f);
  const double C = ricci_bound_constant(m, 1.0, 41.0);
  FlowMonitors mon;
  mon.phi = PhiMonitor{C, 1.0 / C, 0.0};
  mon.barrier = build_outer_barrier(3, 10.0, 0.5, 0.05, m);
  SolverConfig cfg = config(0.1, 20.0);
  cfg.record_every = 0.5;
  const FlowTrajectory tr = run_flow(m, f, cfg, mon);
  CHECK(tr.termination == Termination::reached_t_end);
  CHECK(max_principle_check(tr.records).pass);
  CHECK(phi_monotonicity_check(tr.records).pass);
  for (const auto& r : tr.records) {
    REQUIRE(r.barrier_margin.has_value());
    CHECK(*r.barrier_margin > 0.0);
  }
}
