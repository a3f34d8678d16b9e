#include <doctest.h>

#include <cmath>

#include "smcf/cutoff.hpp"
#include "smcf/solver.hpp"

using namespace smcf;

namespace {

DecayFit fitted_rate(const InitialProfile& p, double L, double h, double t_end, double t_lo) {
  Field f = make_field(FieldKind::line, -L, L, h, BoundaryCondition::dirichlet_zero,
                       BoundaryCondition::dirichlet_zero);
  sample_profile(p, f);
  SolverConfig cfg;
  cfg.h = h;
  cfg.t_end = t_end;
  cfg.record_every = t_end / 400.0;
  const FlowTrajectory tr = run_flow(RadialMetric::euclidean(1), f, cfg);
  REQUIRE(tr.termination == Termination::reached_t_end);
  return decay_exponent_fit(tr.records, t_lo, t_end);
}

}  // namespace

TEST_CASE("compact data decays like the heat kernel") {
  const DecayFit fit = fitted_rate(bump_profile(1.0, 4.0), 200.0, 0.1, 1000.0, 100.0);
  CHECK(std::abs(fit.exponent + 0.5) < 0.02);
}

TEST_CASE("slowly decaying data attains the quarter rate") {
  // (1 + x^2)^{-1/4}, tapered far beyond the diffusion length
  const double L = 4000.0;
  InitialProfile p;
  p.family = ProfileFamily::tabulated;
  for (double x = -L; x <= L; x += 1.0) {
    p.table_x.push_back(x);
    p.table_u.push_back(0.5 * std::pow(1.0 + x * x, -0.25) * smooth_cutoff(0.5 * L, 0.9 * L, std::abs(x)));
  }
  const DecayFit fit = fitted_rate(p, L, 1.0, 4000.0, 1000.0);
  CHECK(std::abs(fit.exponent + 0.25) < 0.03);
}
