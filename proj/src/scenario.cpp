#include "smcf/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "smcf/barriers.hpp"
#include "smcf/diagnostics.hpp"
#include "smcf/errors.hpp"
#include "smcf/io.hpp"

namespace smcf {

using nlohmann::json;

std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::flow_1d: return "flow_1d";
    case ScenarioKind::flow_radial: return "flow_radial";
    case ScenarioKind::dirichlet: return "dirichlet";
    case ScenarioKind::nested_balls: return "nested_balls";
    case ScenarioKind::no_lift_off: return "no_lift_off";
    case ScenarioKind::barrier_verify: return "barrier_verify";
    case ScenarioKind::translating_verify: return "translating_verify";
    case ScenarioKind::decay_study: return "decay_study";
  }
  return "?";
}

RadialMetric MetricConfig::build() const {
  if (family == "euclidean") return RadialMetric::euclidean(n);
  if (family == "conformal_power") return RadialMetric::conformal_power(n, a, tau);
  if (family == "schwarzschild") return RadialMetric::schwarzschild(n, mass);
  throw ConfigError("metric.family", fmt::format("unknown family '{}'", family));
}

namespace {

// ---- config access -------------------------------------------------------

const json* lookup(const json& root, std::string_view dotted) {
  const json* node = &root;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    const std::size_t dot = dotted.find('.', start);
    const std::string key(dotted.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (!node->is_object()) return nullptr;
    auto it = node->find(key);
    if (it == node->end()) return nullptr;
    node = &*it;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return node;
}

double number_at(const json& root, const std::string& path) {
  const json* v = lookup(root, path);
  if (!v) throw ConfigError(path, "missing required field");
  if (!v->is_number()) throw ConfigError(path, "expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  return x;
}

double number_or(const json& root, const std::string& path, double fallback) {
  return lookup(root, path) ? number_at(root, path) : fallback;
}

std::optional<double> maybe_number(const json& root, const std::string& path) {
  if (!lookup(root, path)) return std::nullopt;
  return number_at(root, path);
}

std::string string_at(const json& root, const std::string& path) {
  const json* v = lookup(root, path);
  if (!v) throw ConfigError(path, "missing required field");
  if (!v->is_string()) throw ConfigError(path, "expected a string");
  return v->get<std::string>();
}

std::string string_or(const json& root, const std::string& path, const std::string& fallback) {
  return lookup(root, path) ? string_at(root, path) : fallback;
}

bool bool_or(const json& root, const std::string& path, bool fallback) {
  const json* v = lookup(root, path);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(path, "expected true or false");
  return v->get<bool>();
}

int int_or(const json& root, const std::string& path, int fallback) {
  const json* v = lookup(root, path);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError(path, "expected an integer");
  return v->get<int>();
}

std::vector<double> numbers_at(const json& root, const std::string& path) {
  const json* v = lookup(root, path);
  if (!v) throw ConfigError(path, "missing required field");
  if (!v->is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : *v) {
    if (!e.is_number()) throw ConfigError(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void check_keys(const json& root, const std::string& section, const std::set<std::string>& allowed) {
  const json* node = section.empty() ? &root : lookup(root, section);
  if (!node) return;
  if (!node->is_object()) throw ConfigError(section.empty() ? "<root>" : section, "expected an object");
  for (const auto& [key, _] : node->items()) {
    if (!allowed.count(key)) {
      throw ConfigError(section.empty() ? key : section + "." + key, "unknown field");
    }
  }
}

template <class Parse>
auto parse_tag(const json& root, const std::string& path, const std::string& fallback, Parse parse) {
  const std::string s = string_or(root, path, fallback);
  try {
    return parse(s);
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

ScenarioKind parse_kind(const json& root) {
  const std::string s = string_at(root, "scenario");
  for (auto k : {ScenarioKind::flow_1d, ScenarioKind::flow_radial, ScenarioKind::dirichlet,
                 ScenarioKind::nested_balls, ScenarioKind::no_lift_off, ScenarioKind::barrier_verify,
                 ScenarioKind::translating_verify, ScenarioKind::decay_study}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("scenario", fmt::format("unknown scenario '{}'", s));
}

bool is_line(ScenarioKind k) { return k == ScenarioKind::flow_1d || k == ScenarioKind::decay_study; }

bool needs_flow(ScenarioKind k) {
  return k != ScenarioKind::barrier_verify && k != ScenarioKind::translating_verify;
}

}  // namespace

ScenarioConfig parse_scenario(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "", {"scenario", "output_dir", "metric", "initial_data", "domain", "solver",
                     "diagnostics", "dirichlet", "nested", "barrier", "translating", "sweep",
                     "description"});
  check_keys(j, "metric", {"family", "n", "a", "tau", "mass"});
  check_keys(j, "initial_data", {"family", "height", "width", "center", "exponent", "path"});
  check_keys(j, "domain", {"lo", "hi", "left", "right"});
  check_keys(j, "solver", {"h", "cfl_safety", "t_end", "snapshot_every", "record_every",
                           "clamp_policy", "max_steps"});
  check_keys(j, "diagnostics", {"sup_phi", "barrier_margin", "barrier_eps", "barrier_r1_min",
                                "fit_window", "rate_bracket", "spacelike_allowance",
                                "max_principle_slack", "l2_slack", "phi_slack"});
  check_keys(j, "dirichlet", {"R", "r_in"});
  check_keys(j, "nested", {"R", "r_in"});
  check_keys(j, "barrier", {"r1_min", "h", "eps"});
  check_keys(j, "translating", {"t0", "mu", "alpha", "samples"});
  check_keys(j, "sweep", {"parameter", "values"});

  ScenarioConfig c;
  c.raw = j;
  c.scenario = parse_kind(j);
  c.output_dir = string_or(j, "output_dir", "");

  c.metric.family = string_or(j, "metric.family", "euclidean");
  c.metric.n = int_or(j, "metric.n", is_line(c.scenario) ? 1 : 3);
  c.metric.a = number_or(j, "metric.a", c.metric.family == "conformal_power" ? 0.5 : 0.0);
  c.metric.tau = number_or(j, "metric.tau", 1.0);
  c.metric.mass = number_or(j, "metric.mass", 1.0);
  if (c.metric.n < 1) throw ConfigError("metric.n", "must be >= 1");
  try {
    (void)c.metric.build();
  } catch (const DomainError& e) {
    throw ConfigError("metric", e.what());
  }
  if (is_line(c.scenario) && (c.metric.n != 1 || c.metric.build().is_flat() == false)) {
    throw ConfigError("metric", "line scenarios run on the flat one-dimensional metric");
  }
  if (!is_line(c.scenario) && c.metric.n < 3 &&
      (c.scenario == ScenarioKind::barrier_verify || c.scenario == ScenarioKind::no_lift_off)) {
    throw ConfigError("metric.n", "static barriers need n >= 3");
  }

  if (needs_flow(c.scenario)) {
    InitialProfile& p = c.initial_data;
    p.family = parse_tag(j, "initial_data.family", string_at(j, "initial_data.family"),
                         parse_profile_family);
    p.height = number_or(j, "initial_data.height", 0.5);
    p.width = number_or(j, "initial_data.width", 1.6);
    p.center = number_or(j, "initial_data.center", 0.0);
    p.exponent = number_or(j, "initial_data.exponent", 0.5);
    if (!(p.width > 0.0)) throw ConfigError("initial_data.width", "must be > 0");
    if (p.family == ProfileFamily::tabulated) {
      std::filesystem::path path = string_at(j, "initial_data.path");
      if (path.is_relative()) path = base_dir / path;
      try {
        const SnapshotTable t = read_profile_table(path);
        p.table_x = t.nodes;
        p.table_u = t.values;
      } catch (const std::exception& e) {
        throw ConfigError("initial_data.path", e.what());
      }
    }

    SolverConfig& s = c.solver;
    s.h = number_at(j, "solver.h");
    s.t_end = number_at(j, "solver.t_end");
    s.cfl_safety = number_or(j, "solver.cfl_safety", 0.9);
    s.snapshot_every = number_or(j, "solver.snapshot_every", 0.0);
    s.record_every = number_or(j, "solver.record_every", 0.0);
    s.clamp_policy = parse_tag(j, "solver.clamp_policy", "reject", parse_clamp_policy);
    s.max_steps = static_cast<long>(number_or(j, "solver.max_steps", 1e8));
    if (!(s.h > 0.0)) throw ConfigError("solver.h", "must be > 0");
    if (!(s.t_end > 0.0)) throw ConfigError("solver.t_end", "must be > 0");
    if (!(s.cfl_safety > 0.0 && s.cfl_safety <= 1.0)) throw ConfigError("solver.cfl_safety", "must lie in (0, 1]");
    if (s.snapshot_every < 0.0) throw ConfigError("solver.snapshot_every", "must be >= 0");
    if (s.record_every < 0.0) throw ConfigError("solver.record_every", "must be >= 0");
    if (s.max_steps < 1) throw ConfigError("solver.max_steps", "must be >= 1");
  }

  if (c.scenario == ScenarioKind::flow_1d || c.scenario == ScenarioKind::decay_study ||
      c.scenario == ScenarioKind::flow_radial || c.scenario == ScenarioKind::no_lift_off ||
      lookup(j, "domain")) {
    DomainConfig d;
    const bool radial = !is_line(c.scenario);
    d.lo = c.scenario == ScenarioKind::no_lift_off ? number_or(j, "domain.lo", 1.0) : number_at(j, "domain.lo");
    d.hi = c.scenario == ScenarioKind::no_lift_off ? number_or(j, "domain.hi", 0.0) : number_at(j, "domain.hi");
    const std::string left_default = radial ? (d.lo == 0.0 ? "axis_symmetry" : "reflecting") : "dirichlet_zero";
    d.left = parse_tag(j, "domain.left", left_default, parse_boundary);
    d.right = parse_tag(j, "domain.right", "dirichlet_zero", parse_boundary);
    if (c.scenario != ScenarioKind::no_lift_off && !(d.hi > d.lo)) throw ConfigError("domain.hi", "must exceed domain.lo");
    if (radial && d.lo < 0.0) throw ConfigError("domain.lo", "radial domains start at r >= 0");
    c.domain = d;
  }

  DiagnosticsConfig& dg = c.diagnostics;
  dg.sup_phi = bool_or(j, "diagnostics.sup_phi", false);
  dg.barrier_margin = bool_or(j, "diagnostics.barrier_margin", c.scenario == ScenarioKind::no_lift_off);
  dg.barrier_eps = number_or(j, "diagnostics.barrier_eps", 0.05);
  dg.barrier_r1_min = maybe_number(j, "diagnostics.barrier_r1_min");
  if (lookup(j, "diagnostics.fit_window")) {
    const auto w = numbers_at(j, "diagnostics.fit_window");
    if (w.size() != 2 || !(w[0] > 0.0 && w[0] < w[1])) {
      throw ConfigError("diagnostics.fit_window", "expected [t_lo, t_hi] with 0 < t_lo < t_hi");
    }
    dg.fit_lo = w[0];
    dg.fit_hi = w[1];
  }
  if (lookup(j, "diagnostics.rate_bracket")) {
    const auto w = numbers_at(j, "diagnostics.rate_bracket");
    if (w.size() != 2 || !(w[0] < w[1])) throw ConfigError("diagnostics.rate_bracket", "expected [lo, hi]");
    dg.rate_lo = w[0];
    dg.rate_hi = w[1];
  }
  dg.spacelike_allowance = number_or(j, "diagnostics.spacelike_allowance", 0.02);
  dg.max_principle_slack = number_or(j, "diagnostics.max_principle_slack", 1e-9);
  dg.l2_slack = number_or(j, "diagnostics.l2_slack", 1e-3);
  dg.phi_slack = number_or(j, "diagnostics.phi_slack", 1e-6);
  if (dg.barrier_margin && !(dg.barrier_eps >= 0.0)) throw ConfigError("diagnostics.barrier_eps", "must be >= 0");
  if (dg.barrier_margin && c.metric.n < 3) throw ConfigError("diagnostics.barrier_margin", "static barriers need n >= 3");

  if (c.scenario == ScenarioKind::dirichlet) {
    c.R = number_at(j, "dirichlet.R");
    c.r_in = number_or(j, "dirichlet.r_in", c.metric.family == "euclidean" ? 0.0 : 1.0);
    if (!(c.R > 1.0)) throw ConfigError("dirichlet.R", "must exceed 1");
    if (!(c.r_in >= 0.0 && c.r_in < c.R - 1.0)) throw ConfigError("dirichlet.r_in", "must lie in [0, R - 1)");
  }
  if (c.scenario == ScenarioKind::nested_balls) {
    if (!lookup(j, "sweep")) {
      c.nested_R = numbers_at(j, "nested.R");
      if (c.nested_R.size() < 2) throw ConfigError("nested.R", "needs at least two radii");
      if (!std::is_sorted(c.nested_R.begin(), c.nested_R.end())) throw ConfigError("nested.R", "must be ascending");
      if (c.nested_R.front() <= 1.0) throw ConfigError("nested.R", "radii must exceed 1");
    }
    c.r_in = number_or(j, "nested.r_in", c.metric.family == "euclidean" ? 0.0 : 1.0);
  }
  if (c.scenario == ScenarioKind::barrier_verify) {
    c.barrier.r1_min = number_at(j, "barrier.r1_min");
    c.barrier.h = number_at(j, "barrier.h");
    c.barrier.eps = number_or(j, "barrier.eps", 0.0);
    if (!(c.barrier.r1_min > 0.0)) throw ConfigError("barrier.r1_min", "must be > 0");
    if (!(c.barrier.h > 0.0)) throw ConfigError("barrier.h", "must be > 0");
    if (!(c.barrier.eps >= 0.0)) throw ConfigError("barrier.eps", "must be >= 0");
  }
  if (c.scenario == ScenarioKind::translating_verify) {
    c.translating.t0 = number_at(j, "translating.t0");
    c.translating.mu = number_at(j, "translating.mu");
    c.translating.alpha = number_or(j, "translating.alpha", 0.5);
    c.translating.samples = int_or(j, "translating.samples", 10000);
    if (!(c.translating.t0 < -1.0)) throw ConfigError("translating.t0", "must be < -1");
    if (!(c.translating.mu > 0.0 && c.translating.mu < 1.0)) throw ConfigError("translating.mu", "must lie in (0, 1)");
    if (!(c.translating.alpha >= 0.0)) throw ConfigError("translating.alpha", "must be >= 0");
    if (c.translating.samples < 1) throw ConfigError("translating.samples", "must be >= 1");
  }
  if (lookup(j, "sweep")) {
    c.sweep_parameter = string_at(j, "sweep.parameter");
    c.sweep_values = numbers_at(j, "sweep.values");
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  json j;
  try {
    j = read_json(path);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", fmt::format("{} is not valid JSON: {}", path.string(), e.what()));
  } catch (const std::runtime_error& e) {
    throw ConfigError("<file>", e.what());
  }
  return parse_scenario(j, path.parent_path());
}

namespace {

// ---- scenario runners ----------------------------------------------------

struct Checks {
  json table = json::object();
  std::vector<std::string> failures;
  std::vector<std::string> warnings;

  void add(const std::string& name, bool pass, json detail) {
    detail["pass"] = pass;
    table[name] = std::move(detail);
    if (!pass) failures.push_back(name);
  }
  void warn(const std::string& what) { warnings.push_back(what); }
};

std::filesystem::path resolve_output(const ScenarioConfig& cfg, const RunOptions& opts) {
  if (opts.output_dir) return *opts.output_dir;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  throw ConfigError("output_dir", "missing required field (or pass --output-dir)");
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double round_up_to_grid(double lo, double hi, double h) {
  return lo + std::ceil((hi - lo) / h - 1e-9) * h;
}

json trajectory_summary(const FlowTrajectory& traj) {
  json j;
  j["termination"] = to_string(traj.termination);
  j["steps"] = traj.steps;
  j["rejected_steps"] = traj.rejected_steps;
  if (!traj.message.empty()) j["message"] = traj.message;
  j["final"] = traj.records.back();
  j["records"] = traj.records.size();
  j["snapshots"] = traj.snapshots.size();
  return j;
}

void common_flow_checks(const FlowTrajectory& traj, const DiagnosticsConfig& dg, Checks& checks) {
  if (traj.records.size() >= 2) {
    checks.add("max_principle", max_principle_check(traj.records, dg.max_principle_slack).pass,
               max_principle_check(traj.records, dg.max_principle_slack));
  }
  const SpacelikeDrift drift = spacelike_drift_check(traj.records, dg.spacelike_allowance);
  checks.add("spacelike_drift", drift.pass, drift);
  for (const auto& r : traj.records) {
    if (r.sup_phi) {
      const MonotoneCheck phi = phi_monotonicity_check(traj.records, dg.phi_slack);
      checks.add("phi_monotone", phi.pass, phi);
      break;
    }
  }
  bool margin_seen = false;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : traj.records) {
    if (r.barrier_margin) {
      margin_seen = true;
      worst_margin = std::min(worst_margin, *r.barrier_margin);
    }
  }
  if (margin_seen) {
    checks.add("barrier_margin_positive", worst_margin > 0.0,
               json{{"min_margin", std::isfinite(worst_margin) ? json(worst_margin) : json(nullptr)}});
  }
}

FlowMonitors build_monitors(const ScenarioConfig& cfg, const RadialMetric& metric, const Field& u0,
                            double r_lo, double r_hi, Checks& checks, json& summary) {
  FlowMonitors m;
  const DiagnosticsConfig& dg = cfg.diagnostics;
  if (dg.sup_phi) {
    const double C = ricci_bound_constant(metric, std::max(r_lo, std::max(cfg.solver.h, metric.r_min())), r_hi);
    summary["ricci_constant"] = C;
    if (C > 0.0) {
      double min_u = 0.0;
      for (double v : u0.values) min_u = std::min(min_u, v);
      m.phi = PhiMonitor{C, 1.0 / C, -min_u};
    } else {
      checks.warn("sup_phi disabled: the metric is flat, so lambda = C = 0 leaves mu undefined");
    }
  }
  if (dg.barrier_margin) {
    const double h = std::max(sup_abs(u0.values), 1e-6);
    const double r1 = dg.barrier_r1_min.value_or(
        std::max({1.0, metric.r_min(), std::isfinite(cfg.initial_data.support_radius())
                                           ? cfg.initial_data.support_radius()
                                           : 1.0}));
    m.barrier = build_outer_barrier(metric.dim(), r1, h, dg.barrier_eps, metric);
    summary["barrier"] = json{{"r0", m.barrier->r0}, {"eps", m.barrier->eps}, {"cap", m.barrier->cap},
                              {"b_at_r0", m.barrier->b_values.front()}};
  }
  return m;
}

ScenarioOutcome finish(const std::filesystem::path& out, json summary, Checks& checks,
                       bool numeric_failure, const RunOptions& opts) {
  ScenarioOutcome o;
  summary["checks"] = checks.table;
  summary["warnings"] = checks.warnings;
  o.failures = checks.failures;
  o.warnings = checks.warnings;
  if (numeric_failure) {
    o.exit_code = kExitNumeric;
  } else if (!o.failures.empty() || (opts.strict && !o.warnings.empty())) {
    o.exit_code = kExitCheckFailed;
  }
  summary["exit_code"] = o.exit_code;
  write_json(out / "summary.json", summary);
  o.summary = std::move(summary);
  return o;
}

ScenarioOutcome run_flow_scenario(const ScenarioConfig& cfg, const RunOptions& opts,
                                  const std::filesystem::path& out) {
  const RadialMetric metric = cfg.metric.build();
  Checks checks;
  json summary{{"scenario", to_string(cfg.scenario)}};

  DomainConfig d = cfg.domain.value_or(DomainConfig{});
  const FieldKind kind = is_line(cfg.scenario) ? FieldKind::line : FieldKind::radial;
  FlowMonitors monitors;
  Field f;
  if (cfg.scenario == ScenarioKind::no_lift_off) {
    // The barrier height depends on the data; the grid then has to reach past r0.
    const double support =
        std::isfinite(cfg.initial_data.support_radius()) ? cfg.initial_data.support_radius() : 10.0;
    Field seed = make_field(kind, d.lo, round_up_to_grid(d.lo, std::max(d.lo + 1.0, 10.0 * support), cfg.solver.h),
                            cfg.solver.h, d.left, d.right);
    sample_profile(cfg.initial_data, seed);
    ScenarioConfig with_barrier = cfg;
    with_barrier.diagnostics.barrier_margin = true;
    with_barrier.diagnostics.sup_phi = false;
    monitors = build_monitors(with_barrier, metric, seed, d.lo, seed.nodes.back(), checks, summary);
    const double hi = std::max({d.hi, 10.0 * support, 4.0 * monitors.barrier->r0});
    f = make_field(kind, d.lo, round_up_to_grid(d.lo, hi, cfg.solver.h), cfg.solver.h, d.left, d.right);
    sample_profile(cfg.initial_data, f);
    summary["domain"] = {f.nodes.front(), f.nodes.back()};
    if (cfg.diagnostics.sup_phi) {
      ScenarioConfig phi_only = cfg;
      phi_only.diagnostics.barrier_margin = false;
      monitors.phi = build_monitors(phi_only, metric, f, f.nodes.front(), f.nodes.back(), checks, summary).phi;
    }
  } else {
    f = make_field(kind, d.lo, d.hi, cfg.solver.h, d.left, d.right);
    sample_profile(cfg.initial_data, f);
    monitors = build_monitors(cfg, metric, f, f.nodes.front(), f.nodes.back(), checks, summary);
  }

  const FlowTrajectory traj = run_flow(metric, f, cfg.solver, monitors);
  write_trajectory(out, traj);
  summary["trajectory"] = trajectory_summary(traj);
  common_flow_checks(traj, cfg.diagnostics, checks);

  if (cfg.scenario == ScenarioKind::decay_study) {
    const double lo = cfg.diagnostics.fit_lo.value_or(std::max(10.0, cfg.solver.t_end / 10.0));
    const double hi = cfg.diagnostics.fit_hi.value_or(cfg.solver.t_end);
    try {
      const DecayFit fit = decay_exponent_fit(traj.records, lo, hi);
      summary["fit"] = fit;
      checks.add("decay_rate", fit.exponent >= cfg.diagnostics.rate_lo && fit.exponent <= cfg.diagnostics.rate_hi,
                 json{{"exponent", fit.exponent}, {"bracket", {cfg.diagnostics.rate_lo, cfg.diagnostics.rate_hi}}});
    } catch (const InsufficientData& e) {
      checks.add("decay_rate", false, json{{"error", e.what()}});
    }
    const MonotoneCheck l2 = l2_monotonicity_check(traj.records, cfg.diagnostics.l2_slack);
    checks.add("l2_monotone", l2.pass, l2);
    const H1Check h1 = h1_decay_check(traj.records, cfg.diagnostics.l2_slack);
    checks.add("h1_bound", h1.pass, h1);
  }
  return finish(out, summary, checks, traj.termination == Termination::spacelike_violation, opts);
}

ScenarioOutcome run_dirichlet_scenario(const ScenarioConfig& cfg, const RunOptions& opts,
                                       const std::filesystem::path& out) {
  const RadialMetric metric = cfg.metric.build();
  Checks checks;
  json summary{{"scenario", "dirichlet"}, {"R", cfg.R}};
  const DirichletRun run = solve_dirichlet(cfg.R, metric, cfg.initial_data, cfg.solver, cfg.r_in);
  const FlowTrajectory& traj = run.trajectory;
  write_trajectory(out, traj);

  const std::vector<SlopeSample> series = boundary_slope_series(traj, run.interpolation.sigma_tilde);
  {
    std::ofstream csv(out / "boundary_slope.csv", std::ios::binary);
    csv << "t,slope\n";
    for (const auto& s : series) csv << format_double(s.t) << ',' << format_double(s.slope) << '\n';
  }
  const int n = metric.dim();
  summary["max_boundary_slope"] = max_slope(series);
  summary["barrier_slope_reference"] = std::pow(cfg.R, -n + 1.5);
  summary["interpolation"] = json{{"lambda", run.interpolation.lambda},
                                  {"eps", run.interpolation.eps},
                                  {"S", {run.interpolation.s1, run.interpolation.s2, run.interpolation.s3,
                                         run.interpolation.s4}},
                                  {"lipschitz", run.interpolation.lipschitz}};
  summary["trajectory"] = trajectory_summary(traj);

  double lo = 0.0, hi = 0.0;
  for (double v : run.interpolation.u_tilde.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double worst = 0.0;
  for (const auto& s : traj.snapshots) {
    for (double v : s.field.values) worst = std::max({worst, v - hi, lo - v});
  }
  checks.add("range_preserved", worst <= cfg.diagnostics.max_principle_slack,
             json{{"min_initial", lo}, {"max_initial", hi}, {"worst_excursion", worst}});
  common_flow_checks(traj, cfg.diagnostics, checks);
  return finish(out, summary, checks, traj.termination == Termination::spacelike_violation, opts);
}

void write_differences(const std::filesystem::path& path, const std::vector<NestedDifference>& rows) {
  std::ofstream csv(path, std::ios::binary);
  csv << "R_small,R_large,max_difference\n";
  for (const auto& d : rows) {
    csv << format_double(d.R_small) << ',' << format_double(d.R_large) << ',' << format_double(d.max_difference)
        << '\n';
  }
}

ScenarioOutcome run_nested_scenario(const ScenarioConfig& cfg, const std::vector<double>& radii,
                                    const RunOptions& opts, const std::filesystem::path& out) {
  const RadialMetric metric = cfg.metric.build();
  Checks checks;
  json summary{{"scenario", "nested_balls"}, {"R", radii}};
  const NestedStudy study = nested_ball_study(radii, metric, cfg.initial_data, cfg.solver, cfg.r_in, opts.workers);
  std::filesystem::create_directories(out);
  write_differences(out / "differences.csv", study.differences);
  bool numeric = false;
  for (const auto& run : study.runs) {
    write_trajectory(out / fmt::format("R{}", format_double(run.R)), run.trajectory);
    numeric = numeric || run.trajectory.termination == Termination::spacelike_violation;
  }
  json rows = json::array();
  for (std::size_t k = 0; k < study.differences.size(); ++k) {
    const auto& d = study.differences[k];
    rows.push_back({{"R_small", d.R_small}, {"R_large", d.R_large}, {"max_difference", d.max_difference}});
    if (k > 0 && d.max_difference > study.differences[k - 1].max_difference) {
      checks.warn(fmt::format("difference grew between R = {} and R = {}", d.R_small, d.R_large));
    }
  }
  summary["window"] = study.window;
  summary["differences"] = rows;
  return finish(out, summary, checks, numeric, opts);
}

ScenarioOutcome run_barrier_scenario(const ScenarioConfig& cfg, const RunOptions& opts,
                                     const std::filesystem::path& out) {
  const RadialMetric metric = cfg.metric.build();
  Checks checks;
  json summary{{"scenario", "barrier_verify"}};
  const BarrierProfile p = build_outer_barrier(metric.dim(), cfg.barrier.r1_min, cfg.barrier.h, cfg.barrier.eps, metric);
  const SupersolutionReport report = verify_static_supersolution(metric, p, p.r_grid);
  std::filesystem::create_directories(out);
  write_json(out / "barrier_report.json", report);
  {
    std::ofstream csv(out / "barrier_profile.csv", std::ios::binary);
    csv << "r,b\n";
    for (std::size_t i = 0; i < p.r_grid.size(); ++i) {
      csv << format_double(p.r_grid[i]) << ',' << format_double(p.b_values[i]) << '\n';
    }
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < p.r_grid.size(); ++i) {
    if (p.r_grid[i] < 4.0 * p.r0) continue;
    const double ratio = (p.b_values[i] - p.eps) / (p.tail_coeff * std::pow(p.r_grid[i], -(p.n - 2.5)));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  summary["r0"] = p.r0;
  summary["b_at_r0"] = p.b_values.front();
  summary["tail_ratio_bracket"] = {lo, hi};
  summary["max_identity_deviation"] = report.max_identity_deviation;
  summary["max_curved_value"] = report.max_curved_value;
  checks.add("flat_identity", report.max_identity_deviation <= 1e-10,
             json{{"worst", report.max_identity_deviation}});
  checks.add("curved_sign", report.all_pass, json{{"max_curved_value", report.max_curved_value}});
  checks.add("cap_height", p.b_values.front() >= cfg.barrier.h + cfg.barrier.eps,
             json{{"b_at_r0", p.b_values.front()}});
  return finish(out, summary, checks, false, opts);
}

ScenarioOutcome run_translating_scenario(const ScenarioConfig& cfg, const RunOptions& opts,
                                         const std::filesystem::path& out) {
  const int n = cfg.metric.n;
  Checks checks;
  json summary{{"scenario", "translating_verify"}};
  const TranslatingConfig& tc = cfg.translating;
  const TranslatingBarrier tb = TranslatingBarrier::make(Eigen::VectorXd::Zero(n), tc.t0, tc.alpha, tc.mu);
  const TranslatingCertificate cert = translating_barrier_certificate(tb);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < tc.samples; ++k) {
    Eigen::VectorXd d(n);
    for (int i = 0; i < n; ++i) d(i) = unit(rng) - 0.5;
    d *= tb.rho * std::pow(unit(rng), 1.0 / n) / d.norm();
    worst = std::max(worst, std::abs(translating_flat_residual(tb, d, -tc.t0 * unit(rng)) - tc.alpha));
  }
  summary["certificate"] = cert;
  summary["identity_worst"] = worst;
  checks.add("translating_identity", worst <= 1e-12, json{{"worst", worst}});
  checks.add("certificate", cert.pass, cert);
  const RadialMetric metric = cfg.metric.build();
  if (!metric.is_flat() && tc.alpha > 0.0) {
    const FarOutResult far = translating_far_out_threshold(metric, tc.t0, tc.alpha, tc.mu, 1.0);
    summary["far_out"] = json{{"threshold", far.threshold}, {"min_residual", far.min_residual}};
  }
  std::filesystem::create_directories(out);
  return finish(out, summary, checks, false, opts);
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  const std::filesystem::path out = resolve_output(cfg, opts);
  std::filesystem::create_directories(out);
  switch (cfg.scenario) {
    case ScenarioKind::flow_1d:
    case ScenarioKind::flow_radial:
    case ScenarioKind::decay_study:
    case ScenarioKind::no_lift_off:
      return run_flow_scenario(cfg, opts, out);
    case ScenarioKind::dirichlet:
      return run_dirichlet_scenario(cfg, opts, out);
    case ScenarioKind::nested_balls:
      return run_nested_scenario(cfg, cfg.nested_R, opts, out);
    case ScenarioKind::barrier_verify:
      return run_barrier_scenario(cfg, opts, out);
    case ScenarioKind::translating_verify:
      return run_translating_scenario(cfg, opts, out);
  }
  throw ConfigError("scenario", "unhandled scenario");
}

namespace {

json set_parameter(json j, const std::string& dotted, double value) {
  std::string pointer = "/" + dotted;
  std::replace(pointer.begin(), pointer.end(), '.', '/');
  j[json::json_pointer(pointer)] = value;
  j.erase("sweep");
  return j;
}

}  // namespace

ScenarioOutcome run_sweep(const ScenarioConfig& cfg, const RunOptions& opts) {
  if (cfg.sweep_parameter.empty()) throw ConfigError("sweep.parameter", "missing required field");
  if (cfg.sweep_values.size() < 2) throw ConfigError("sweep.values", "a sweep needs at least two points");
  const std::filesystem::path out = resolve_output(cfg, opts);
  std::filesystem::create_directories(out);

  if (cfg.scenario == ScenarioKind::nested_balls) {
    std::vector<double> radii = cfg.sweep_values;
    if (!std::is_sorted(radii.begin(), radii.end()) || radii.front() <= 1.0) {
      throw ConfigError("sweep.values", "nested radii must be ascending and exceed 1");
    }
    ScenarioOutcome o = run_nested_scenario(cfg, radii, opts, out);
    std::filesystem::copy_file(out / "differences.csv", out / "sweep.csv",
                               std::filesystem::copy_options::overwrite_existing);
    return o;
  }

  struct Row {
    double value;
    int exit_code = kExitNumeric;
    std::string error;
    json summary;
  };
  std::vector<Row> rows(cfg.sweep_values.size());
  std::vector<ScenarioConfig> points;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].value = cfg.sweep_values[k];
    json j = set_parameter(cfg.raw, cfg.sweep_parameter, cfg.sweep_values[k]);
    j["output_dir"] = (out / fmt::format("point_{}", k)).string();
    points.push_back(parse_scenario(j, {}));
    points.back().initial_data = cfg.initial_data;  // tables already resolved
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < rows.size(); k = next++) {
      RunOptions po = opts;
      po.output_dir.reset();
      po.workers = 1;
      try {
        ScenarioOutcome o = run_scenario(points[k], po);
        rows[k].exit_code = o.exit_code;
        rows[k].summary = std::move(o.summary);
      } catch (const ConfigError& e) {
        rows[k].exit_code = kExitConfig;
        rows[k].error = e.what();
      } catch (const std::exception& e) {
        rows[k].exit_code = kExitNumeric;
        rows[k].error = e.what();
      }
    }
  };
  const int count = std::clamp(opts.workers, 1, static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < count; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Checks checks;
  json summary{{"scenario", to_string(cfg.scenario)}, {"parameter", cfg.sweep_parameter}};
  std::vector<double> xs, slopes;
  {
    std::ofstream csv(out / "sweep.csv", std::ios::binary);
    csv << "value,status,exit_code,final_sup_u,max_grad,max_boundary_slope\n";
    for (const auto& r : rows) {
      const bool ok = r.exit_code == kExitOk;
      std::string sup, grad, slope;
      if (r.summary.contains("trajectory")) {
        sup = format_double(r.summary["trajectory"]["final"]["sup_u"].get<double>());
        if (r.summary["checks"].contains("spacelike_drift")) {
          grad = format_double(r.summary["checks"]["spacelike_drift"]["maximum"].get<double>());
        }
      }
      if (r.summary.contains("max_boundary_slope")) {
        const double s = r.summary["max_boundary_slope"].get<double>();
        slope = format_double(s);
        xs.push_back(r.value);
        slopes.push_back(s);
      }
      csv << format_double(r.value) << ',' << (ok ? "ok" : "failed") << ',' << r.exit_code << ',' << sup << ','
          << grad << ',' << slope << '\n';
      if (!ok) checks.add(fmt::format("point_{}", format_double(r.value)), false,
                          json{{"exit_code", r.exit_code}, {"error", r.error}});
    }
  }
  if (cfg.scenario == ScenarioKind::dirichlet && cfg.sweep_parameter == "dirichlet.R" && xs.size() >= 2) {
    const DecayFit fit = loglog_fit(xs, slopes, 2);
    const double target = -cfg.metric.n + 1.5;
    summary["slope_exponent"] = fit.exponent;
    summary["slope_exponent_target"] = target;
    summary["fit"] = fit;
    checks.add("slope_exponent", std::abs(fit.exponent - target) <= 0.2,
               json{{"exponent", fit.exponent}, {"bracket", {target - 0.2, target + 0.2}}});
  }
  return finish(out, summary, checks, false, opts);
}

}  // namespace smcf
