#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "smcf/field.hpp"
#include "smcf/geometry.hpp"
#include "smcf/initial_data.hpp"
#include "smcf/solver.hpp"

namespace smcf {

enum class ScenarioKind {
  flow_1d,
  flow_radial,
  dirichlet,
  nested_balls,
  no_lift_off,
  barrier_verify,
  translating_verify,
  decay_study,
};

std::string_view to_string(ScenarioKind k);

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct MetricConfig {
  std::string family = "euclidean";
  int n = 1;
  double a = 0.0;
  double tau = 1.0;
  double mass = 1.0;

  RadialMetric build() const;
};

struct DomainConfig {
  double lo = 0.0;
  double hi = 0.0;
  BoundaryCondition left = BoundaryCondition::dirichlet_zero;
  BoundaryCondition right = BoundaryCondition::dirichlet_zero;
};

struct DiagnosticsConfig {
  bool sup_phi = false;
  bool barrier_margin = false;
  double barrier_eps = 0.05;
  std::optional<double> barrier_r1_min;
  std::optional<double> fit_lo;
  std::optional<double> fit_hi;
  double rate_lo = -0.30;
  double rate_hi = -0.20;
  double spacelike_allowance = 0.02;
  double max_principle_slack = 1e-9;
  double l2_slack = 1e-3;
  double phi_slack = 1e-6;
};

struct BarrierConfig {
  double r1_min = 10.0;
  double h = 2.0;
  double eps = 0.0;
};

struct TranslatingConfig {
  double t0 = -4.0;
  double mu = 0.5;
  double alpha = 0.5;
  int samples = 10000;
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::flow_1d;
  MetricConfig metric;
  InitialProfile initial_data;
  std::optional<DomainConfig> domain;
  SolverConfig solver;
  DiagnosticsConfig diagnostics;
  double R = 8.0;
  double r_in = 0.0;
  std::vector<double> nested_R;
  BarrierConfig barrier;
  TranslatingConfig translating;
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::string output_dir;
  nlohmann::json raw;
};

/// Validates before any computation; ConfigError names the offending field
/// ("solver.h", "initial_data.family", ...).
ScenarioConfig parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct RunOptions {
  std::optional<std::string> output_dir;
  int workers = 1;
  std::uint64_t seed = 20240601;
  bool strict = false;
};

struct ScenarioOutcome {
  int exit_code = kExitOk;
  nlohmann::json summary;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
};

/// Runs one scenario, writing diagnostics.csv, snapshots/ and summary.json
/// (plus scenario-specific reports) into the output directory.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg, const RunOptions& opts);

/// Runs cfg once per sweep value (parameter given as a dotted path) and
/// writes sweep.csv and sweep_summary.json. Needs at least two values.
ScenarioOutcome run_sweep(const ScenarioConfig& cfg, const RunOptions& opts);

}  // namespace smcf
