#pragma once

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "smcf/barriers.hpp"
#include "smcf/diagnostics.hpp"
#include "smcf/field.hpp"
#include "smcf/geometry.hpp"
#include "smcf/initial_data.hpp"

namespace smcf {

enum class ClampPolicy { reject, halt_and_report };

std::string_view to_string(ClampPolicy p);
ClampPolicy parse_clamp_policy(std::string_view s);

struct SolverConfig {
  double h = 0.05;
  double cfl_safety = 0.9;
  double t_end = 1.0;
  double snapshot_every = 0.0;  // 0: first and last state only
  double record_every = 0.0;    // 0: every accepted step
  ClampPolicy clamp_policy = ClampPolicy::reject;
  long max_steps = 100000000;
};

void validate_solver_config(const SolverConfig& cfg);

struct PhiMonitor {
  double lambda;
  double mu;
  double shift = 0.0;
};

struct FlowMonitors {
  std::optional<PhiMonitor> phi;
  std::optional<BarrierProfile> barrier;
};

/// cfl_safety h^2 / (2 max_i A_i) with A_i the principal coefficient
/// w^{-2}/(1 - |u'|^2_sigma), and n w(0)^{-2} on the axis node.
double stable_dt(const Field& f, const RadialMetric& metric, const SolverConfig& cfg);

struct StepOutcome {
  Field field;
  double dt;
  int retries;
};

/// One forward Euler step of at most dt_max (default: the stable step).
/// A step whose cell slopes reach the light cone is halved up to 10 times
/// (reject) or abandoned at once (halt_and_report); both end in
/// SpacelikeViolation when no step is accepted.
StepOutcome step_1d(const Field& f, const SolverConfig& cfg,
                    double dt_max = std::numeric_limits<double>::infinity());
StepOutcome step_radial(const Field& f, const RadialMetric& metric, const SolverConfig& cfg,
                        double dt_max = std::numeric_limits<double>::infinity());

/// Discrete right-hand side of the flow at every node.
std::vector<double> flow_rhs(const Field& f, const RadialMetric& metric);

DiagnosticsRecord make_record(double t, const Field& f, const RadialMetric& metric,
                              const FlowMonitors& monitors);

/// Evolves u0 to cfg.t_end. Line fields need a one-dimensional flat metric.
FlowTrajectory run_flow(const RadialMetric& metric, const Field& u0, const SolverConfig& cfg,
                        const FlowMonitors& monitors = {});

struct DirichletRun {
  double R;
  InterpolationResult interpolation;
  FlowTrajectory trajectory;
};

/// Modified data on the annulus [R - 1, R], then the flow on [r_in, R^2]
/// with u = 0 at R^2. r_in = 0 uses the axis rule, r_in > 0 a reflecting end.
DirichletRun solve_dirichlet(double R, const RadialMetric& metric, const InitialProfile& u0,
                             const SolverConfig& cfg, double r_in = 0.0,
                             const FlowMonitors& monitors = {});

struct NestedDifference {
  double R_small;
  double R_large;
  double max_difference;
};

struct NestedStudy {
  std::vector<DirichletRun> runs;
  std::vector<NestedDifference> differences;
  double window;  // R_min / 2
};

/// Runs solve_dirichlet for every R (on up to `workers` threads) and compares
/// consecutive radii over r <= R_min/2 at common snapshot times.
NestedStudy nested_ball_study(const std::vector<double>& R_list, const RadialMetric& metric,
                              const InitialProfile& u0, const SolverConfig& cfg, double r_in = 0.0,
                              int workers = 1);

}  // namespace smcf
