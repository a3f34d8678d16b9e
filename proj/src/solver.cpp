#include "smcf/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "smcf/errors.hpp"

namespace smcf {

std::string_view to_string(ClampPolicy p) {
  return p == ClampPolicy::reject ? "reject" : "halt_and_report";
}

ClampPolicy parse_clamp_policy(std::string_view s) {
  if (s == "reject") return ClampPolicy::reject;
  if (s == "halt_and_report") return ClampPolicy::halt_and_report;
  throw DomainError(fmt::format("unknown clamp policy '{}'", s));
}

void validate_solver_config(const SolverConfig& cfg) {
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) throw DomainError("solver h must be > 0");
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0)) throw DomainError("cfl_safety must lie in (0, 1]");
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) throw DomainError("t_end must be > 0");
  if (!(cfg.snapshot_every >= 0.0)) throw DomainError("snapshot_every must be >= 0");
  if (!(cfg.record_every >= 0.0)) throw DomainError("record_every must be >= 0");
  if (cfg.max_steps < 1) throw DomainError("max_steps must be >= 1");
}

namespace {

constexpr int kMaxRetries = 10;

// Per-node metric data frozen for one grid.
class Evolver {
 public:
  Evolver(const Field& f, const RadialMetric& metric) : f_(f), n_(metric.dim()) {
    validate_field(f);
    const std::size_t m = f.size();
    if (f.kind == FieldKind::line) {
      if (metric.dim() != 1 || !metric.is_flat()) {
        throw DomainError("line fields evolve under the flat one-dimensional metric only");
      }
    }
    inv_w2_.assign(m, 1.0);
    log_dw_.assign(m, 0.0);
    cell_inv_w2_.assign(m - 1, 1.0);
    if (f.kind == FieldKind::radial && !metric.is_flat()) {
      for (std::size_t i = 0; i < m; ++i) {
        const ConformalJet jet = metric.factor(f.nodes[i]);
        inv_w2_[i] = 1.0 / (jet.w * jet.w);
        log_dw_[i] = jet.dw / jet.w;
      }
      for (std::size_t i = 0; i + 1 < m; ++i) {
        const double w = metric.factor(0.5 * (f.nodes[i] + f.nodes[i + 1])).w;
        cell_inv_w2_[i] = 1.0 / (w * w);
      }
    }
  }

  double stable_dt(const std::vector<double>& u, double safety) const {
    const std::size_t m = u.size();
    const double h = f_.h;
    double amax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double du = 0.0;
      if (i > 0 && i + 1 < m) {
        du = (u[i + 1] - u[i - 1]) / (2.0 * h);
      } else if (i == 0 && f_.left == BoundaryCondition::axis_symmetry) {
        amax = std::max(amax, n_ * inv_w2_[0]);
        continue;
      }
      const double q = du * du * inv_w2_[i];
      const double gap = 1.0 - q;
      if (!(gap > kTolSpacelike)) {
        throw SpacelikeViolation(fmt::format("stable_dt: node {} has |u'|^2 = {}", i, q), q);
      }
      amax = std::max(amax, inv_w2_[i] / gap);
    }
    return safety * h * h / (2.0 * amax);
  }

  void rhs(const std::vector<double>& u, std::vector<double>& out) const {
    const std::size_t m = u.size();
    out.assign(m, 0.0);
    const double h = f_.h;
    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 0.5 / h;
    if (f_.kind == FieldKind::line) {
      for (std::size_t i = 1; i + 1 < m; ++i) {
        const double du = (u[i + 1] - u[i - 1]) * inv_2h;
        const double gap = 1.0 - du * du;
        if (!(gap > kTolSpacelike)) violation(i, 1.0 - gap);
        out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_h2 / gap;
      }
    } else {
      for (std::size_t i = 1; i + 1 < m; ++i) out[i] = radial_value(u[i - 1], u[i], u[i + 1], i);
    }
    out[0] = end_value(u, 0);
    out[m - 1] = end_value(u, m - 1);
  }

  double max_cell_slope_sq(const std::vector<double>& u) const {
    double worst = 0.0;
    const double inv_h2 = 1.0 / (f_.h * f_.h);
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
      const double d = u[i + 1] - u[i];
      worst = std::max(worst, d * d * inv_h2 * cell_inv_w2_[i]);
    }
    return worst;
  }

  void impose(std::vector<double>& u) const {
    if (f_.left == BoundaryCondition::dirichlet_zero) u.front() = 0.0;
    if (f_.right == BoundaryCondition::dirichlet_zero) u.back() = 0.0;
  }

  // Attempts a step of dt, halving on light-cone contact. Returns the dt taken.
  double advance(std::vector<double>& u, double dt, ClampPolicy policy, std::vector<double>& work,
                 std::vector<double>& trial, int& retries) const {
    rhs(u, work);
    retries = 0;
    double worst = 0.0;
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
      trial.resize(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = u[i] + dt * work[i];
      impose(trial);
      worst = max_cell_slope_sq(trial);
      if (worst < 1.0 - kTolSpacelike) {
        u.swap(trial);
        return dt;
      }
      if (policy == ClampPolicy::halt_and_report) break;
      dt *= 0.5;
      ++retries;
    }
    throw SpacelikeViolation(
        fmt::format("cell slope squared {} reached the light cone after {} retries", worst, retries),
        worst);
  }

 private:
  [[noreturn]] static void violation(std::size_t i, double q) {
    throw SpacelikeViolation(fmt::format("node {} has |u'|^2 = {}", i, q), q);
  }

  double radial_value(double um, double u0, double up, std::size_t i) const {
    const double h = f_.h;
    const double du = (up - um) / (2.0 * h);
    const double d2 = (up - 2.0 * u0 + um) / (h * h);
    return radial_operator(du, d2, i);
  }

  double radial_operator(double du, double d2, std::size_t i) const {
    const double inv_w2 = inv_w2_[i];
    const double s = log_dw_[i];
    const double q = du * du * inv_w2;
    const double gap = 1.0 - q;
    if (!(gap > kTolSpacelike)) violation(i, q);
    return inv_w2 * ((d2 - s * du) / gap + (n_ - 1) * (du / f_.nodes[i] + s * du));
  }

  double end_value(const std::vector<double>& u, std::size_t i) const {
    const bool left = i == 0;
    const BoundaryCondition bc = left ? f_.left : f_.right;
    const std::size_t inner = left ? 1 : i - 1;
    const double h = f_.h;
    switch (bc) {
      case BoundaryCondition::dirichlet_zero:
        return 0.0;
      case BoundaryCondition::axis_symmetry:
        return n_ * 2.0 * (u[1] - u[0]) / (h * h) * inv_w2_[0];
      case BoundaryCondition::reflecting:
      case BoundaryCondition::asymptotic_decay: {
        double du = 0.0;
        if (bc == BoundaryCondition::asymptotic_decay && f_.kind == FieldKind::radial && n_ >= 3) {
          du = -(n_ - 2) * u[i] / f_.nodes[i];
        }
        // Ghost node from the one-sided slope: u_ghost = u_inner +- 2h du.
        const double ghost = left ? u[inner] - 2.0 * h * du : u[inner] + 2.0 * h * du;
        const double d2 = (ghost - 2.0 * u[i] + u[inner]) / (h * h);
        if (f_.kind == FieldKind::line) {
          const double gap = 1.0 - du * du;
          return d2 / gap;
        }
        return radial_operator(du, d2, i);
      }
    }
    return 0.0;
  }

  const Field& f_;
  int n_;
  std::vector<double> inv_w2_;
  std::vector<double> log_dw_;
  std::vector<double> cell_inv_w2_;
};

StepOutcome single_step(const Field& f, const RadialMetric& metric, const SolverConfig& cfg,
                        double dt_max) {
  validate_solver_config(cfg);
  const Evolver ev(f, metric);
  double dt = std::min(ev.stable_dt(f.values, cfg.cfl_safety), dt_max);
  StepOutcome out{f, 0.0, 0};
  std::vector<double> work, trial;
  out.dt = ev.advance(out.field.values, dt, cfg.clamp_policy, work, trial, out.retries);
  return out;
}

}  // namespace

double stable_dt(const Field& f, const RadialMetric& metric, const SolverConfig& cfg) {
  validate_solver_config(cfg);
  return Evolver(f, metric).stable_dt(f.values, cfg.cfl_safety);
}

StepOutcome step_1d(const Field& f, const SolverConfig& cfg, double dt_max) {
  if (f.kind != FieldKind::line) throw DomainError("step_1d needs a line field");
  return single_step(f, RadialMetric::euclidean(1), cfg, dt_max);
}

StepOutcome step_radial(const Field& f, const RadialMetric& metric, const SolverConfig& cfg,
                        double dt_max) {
  if (f.kind != FieldKind::radial) throw DomainError("step_radial needs a radial field");
  return single_step(f, metric, cfg, dt_max);
}

std::vector<double> flow_rhs(const Field& f, const RadialMetric& metric) {
  const Evolver ev(f, metric);
  std::vector<double> out;
  ev.rhs(f.values, out);
  return out;
}

DiagnosticsRecord make_record(double t, const Field& f, const RadialMetric& metric,
                              const FlowMonitors& monitors) {
  const FieldNorms norms = field_norms(f, metric);
  DiagnosticsRecord r;
  r.t = t;
  r.sup_u = norms.sup_u;
  r.grad_max = norms.grad_max;
  r.l2 = norms.l2;
  r.h1_grad = norms.h1_grad;
  if (monitors.phi) {
    r.sup_phi = phi_supremum(f, metric, monitors.phi->lambda, monitors.phi->mu, monitors.phi->shift);
  }
  if (monitors.barrier) r.barrier_margin = barrier_margin(f, *monitors.barrier);
  return r;
}

FlowTrajectory run_flow(const RadialMetric& metric, const Field& u0, const SolverConfig& cfg,
                        const FlowMonitors& monitors) {
  validate_solver_config(cfg);
  validate_field(u0);
  {
    double sup = 0.0;
    for (double v : u0.values) sup = std::max(sup, std::abs(v));
    const double edge = u0.kind == FieldKind::line
                            ? std::max(std::abs(u0.values.front()), std::abs(u0.values.back()))
                            : std::abs(u0.values.back());
    if (edge > 1e-3 * sup) {
      throw DomainError(fmt::format("initial data is {} at the grid edge, above 1e-3 sup|u0|", edge));
    }
  }
  const Evolver ev(u0, metric);

  FlowTrajectory traj;
  Field state = u0;
  ev.impose(state.values);
  double t = 0.0;
  traj.records.push_back(make_record(t, state, metric, monitors));
  traj.snapshots.push_back({t, state});

  long record_index = 1;
  long snapshot_index = 1;
  const double inf = std::numeric_limits<double>::infinity();
  auto next_record = [&] { return cfg.record_every > 0.0 ? record_index * cfg.record_every : inf; };
  auto next_snapshot = [&] { return cfg.snapshot_every > 0.0 ? snapshot_index * cfg.snapshot_every : inf; };

  std::vector<double> work, trial;
  bool recorded_last = true;
  bool snapshot_last = true;
  while (t < cfg.t_end) {
    if (traj.steps >= cfg.max_steps) {
      traj.termination = Termination::step_cap;
      traj.message = fmt::format("step cap {} reached at t = {}", cfg.max_steps, t);
      break;
    }
    const double stop = std::min({cfg.t_end, next_record(), next_snapshot()});
    double dt = 0.0;
    int retries = 0;
    try {
      const double stable = ev.stable_dt(state.values, cfg.cfl_safety);
      const double want = stop - t;
      dt = ev.advance(state.values, std::min(stable, want), cfg.clamp_policy, work, trial, retries);
      t = (dt == want) ? stop : t + dt;
    } catch (const SpacelikeViolation& e) {
      traj.termination = Termination::spacelike_violation;
      traj.message = fmt::format("t = {}: {}", t, e.what());
      break;
    }
    ++traj.steps;
    traj.rejected_steps += retries;
    recorded_last = false;
    snapshot_last = false;
    if (cfg.record_every == 0.0 || t >= next_record()) {
      traj.records.push_back(make_record(t, state, metric, monitors));
      recorded_last = true;
      while (cfg.record_every > 0.0 && next_record() <= t) ++record_index;
    }
    if (cfg.snapshot_every > 0.0 && t >= next_snapshot()) {
      traj.snapshots.push_back({t, state});
      snapshot_last = true;
      while (next_snapshot() <= t) ++snapshot_index;
    }
  }
  if (!recorded_last) traj.records.push_back(make_record(t, state, metric, monitors));
  if (!snapshot_last) traj.snapshots.push_back({t, state});
  return traj;
}

DirichletRun solve_dirichlet(double R, const RadialMetric& metric, const InitialProfile& u0,
                             const SolverConfig& cfg, double r_in, const FlowMonitors& monitors) {
  validate_solver_config(cfg);
  if (!(R > 1.0)) throw DomainError("Dirichlet radius R must exceed 1");
  if (!(r_in >= 0.0) || r_in >= R - 1.0) throw DomainError("r_in must lie in [0, R - 1)");
  const BoundaryCondition left =
      r_in == 0.0 ? BoundaryCondition::axis_symmetry : BoundaryCondition::reflecting;
  Field f = make_field(FieldKind::radial, r_in, R * R, cfg.h, left, BoundaryCondition::dirichlet_zero);
  sample_profile(u0, f);

  const double lip = lipschitz_constant(metric, f);
  if (!(lip < 1.0)) throw DomainError(fmt::format("initial data is not spacelike (Lipschitz {})", lip));
  const double eps = std::clamp(1.0 - lip, 1e-6, 0.99);

  DirichletRun run{R, interpolate_initial_data(metric, f, R - 1.0, R, eps), {}};
  run.trajectory = run_flow(run.interpolation.sigma_tilde, run.interpolation.u_tilde, cfg, monitors);
  return run;
}

NestedStudy nested_ball_study(const std::vector<double>& R_list, const RadialMetric& metric,
                              const InitialProfile& u0, const SolverConfig& cfg, double r_in,
                              int workers) {
  if (R_list.size() < 2) throw DomainError("nested ball study needs at least two radii");
  if (!std::is_sorted(R_list.begin(), R_list.end())) throw DomainError("radii must be ascending");

  NestedStudy study;
  study.window = R_list.front() / 2.0;
  std::vector<std::optional<DirichletRun>> runs(R_list.size());
  std::vector<std::exception_ptr> errors(R_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < R_list.size(); k = next++) {
      try {
        runs[k] = solve_dirichlet(R_list[k], metric, u0, cfg, r_in);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int count = std::clamp(workers, 1, static_cast<int>(R_list.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < count; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& r : runs) study.runs.push_back(std::move(*r));

  for (std::size_t k = 0; k + 1 < study.runs.size(); ++k) {
    const auto& a = study.runs[k].trajectory.snapshots;
    const auto& b = study.runs[k + 1].trajectory.snapshots;
    double worst = 0.0;
    for (const auto& sa : a) {
      auto it = std::find_if(b.begin(), b.end(), [&](const Snapshot& sb) { return sb.t == sa.t; });
      if (it == b.end()) continue;
      const std::size_t m = std::min(sa.field.size(), it->field.size());
      for (std::size_t i = 0; i < m && sa.field.nodes[i] <= study.window; ++i) {
        worst = std::max(worst, std::abs(sa.field.values[i] - it->field.values[i]));
      }
    }
    study.differences.push_back({R_list[k], R_list[k + 1], worst});
  }
  return study;
}

}  // namespace smcf
