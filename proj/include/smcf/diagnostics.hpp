#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smcf/barriers.hpp"
#include "smcf/field.hpp"
#include "smcf/geometry.hpp"

namespace smcf {

struct DiagnosticsRecord {
  double t = 0.0;
  double sup_u = 0.0;
  double grad_max = 0.0;  // max discrete |grad u|_sigma
  double l2 = 0.0;
  double h1_grad = 0.0;   // L2 norm of |grad u|_sigma
  std::optional<double> sup_phi;
  std::optional<double> barrier_margin;
};

struct FieldNorms {
  double sup_u;
  double grad_max;
  double l2;
  double h1_grad;
};

/// Trapezoidal norms with volume element dx (line) or r^{n-1} w^n dr (radial).
FieldNorms field_norms(const Field& f, const RadialMetric& metric);

/// sup over nodes of v exp(mu e^{lambda (u + shift)}).
double phi_supremum(const Field& f, const RadialMetric& metric, double lambda_phi, double mu_phi,
                    double shift = 0.0);

/// min over nodes with r >= r0 of b_eps(r) - |u|; +inf when no node qualifies.
double barrier_margin(const Field& f, const BarrierProfile& profile);

struct ComparisonCheck {
  bool pass;
  double grad_sup;
  double barrier_slope;
};

/// sup |grad u|_sigma over nodes in [r_lo, r_hi] against a barrier's boundary slope.
ComparisonCheck comparison_hypothesis_check(const Field& f, const RadialMetric& metric,
                                            double barrier_slope, double r_lo, double r_hi);

struct DecayFit {
  double exponent;
  double intercept;
  double r_squared;
  double t_lo;
  double t_hi;
  int samples;
};

/// Least squares line through (log t, log sup_u) over records in [t_lo, t_hi].
/// Throws InsufficientData with fewer than 10 usable records.
DecayFit decay_exponent_fit(const std::vector<DiagnosticsRecord>& records, double t_lo, double t_hi);

/// Same fit on arbitrary positive (x, y) pairs; at least min_points required.
DecayFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y, int min_points = 2);

enum class Termination { reached_t_end, spacelike_violation, step_cap };

struct Snapshot {
  double t;
  Field field;
};

struct FlowTrajectory {
  std::vector<Snapshot> snapshots;
  std::vector<DiagnosticsRecord> records;
  Termination termination = Termination::reached_t_end;
  long steps = 0;
  long rejected_steps = 0;
  std::string message;  // set when the run stopped early
};

const char* to_string(Termination t);

struct SlopeSample {
  double t;
  double slope;
};

/// |u'|/w at the outer node of every snapshot, one-sided second order.
std::vector<SlopeSample> boundary_slope_series(const FlowTrajectory& traj, const RadialMetric& metric);
double max_slope(const std::vector<SlopeSample>& series);

struct MonotoneCheck {
  bool pass = true;
  double worst_violation = 0.0;
  std::size_t worst_index = 0;
};

/// sup_u nonincreasing up to `slack` per step.
MonotoneCheck max_principle_check(const std::vector<DiagnosticsRecord>& records, double slack = 1e-9);
/// l2 nonincreasing up to a relative slack per step.
MonotoneCheck l2_monotonicity_check(const std::vector<DiagnosticsRecord>& records,
                                    double rel_slack = 1e-3);
/// sup_phi nonincreasing up to a relative slack per step.
MonotoneCheck phi_monotonicity_check(const std::vector<DiagnosticsRecord>& records,
                                     double rel_slack = 1e-6);

struct H1Check {
  bool pass = true;
  double bound = 0.0;     // l2(0)^2 (1 + slack)
  double worst_lhs = 0.0; // max of l2^2 + t h1_grad^2
  std::size_t worst_index = 0;
};

H1Check h1_decay_check(const std::vector<DiagnosticsRecord>& records, double rel_slack = 1e-3);

struct SpacelikeDrift {
  bool pass;
  double initial;
  double maximum;
};

/// grad_max never exceeds its first value + allowance.
SpacelikeDrift spacelike_drift_check(const std::vector<DiagnosticsRecord>& records,
                                     double allowance = 0.02);

void to_json(nlohmann::json& j, const DiagnosticsRecord& r);
void to_json(nlohmann::json& j, const DecayFit& f);
void to_json(nlohmann::json& j, const MonotoneCheck& c);
void to_json(nlohmann::json& j, const H1Check& c);
void to_json(nlohmann::json& j, const SpacelikeDrift& c);

}  // namespace smcf
