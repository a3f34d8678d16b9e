#include "smcf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "smcf/errors.hpp"

namespace smcf {

FieldNorms field_norms(const Field& f, const RadialMetric& metric) {
  const std::vector<double> du = discrete_gradient(f);
  const std::vector<double> w = node_factors(f, metric);
  const int n = metric.dim();
  FieldNorms out{0.0, 0.0, 0.0, 0.0};
  double l2sq = 0.0;
  double h1sq = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double u = f.values[i];
    const double g = std::abs(du[i]) / w[i];
    out.sup_u = std::max(out.sup_u, std::abs(u));
    out.grad_max = std::max(out.grad_max, g);
    double vol = f.h;
    if (f.kind == FieldKind::radial) vol *= std::pow(f.nodes[i], n - 1) * std::pow(w[i], n);
    if (i == 0 || i + 1 == f.size()) vol *= 0.5;
    l2sq += vol * u * u;
    h1sq += vol * g * g;
  }
  out.l2 = std::sqrt(l2sq);
  out.h1_grad = std::sqrt(h1sq);
  return out;
}

double phi_supremum(const Field& f, const RadialMetric& metric, double lambda_phi, double mu_phi,
                    double shift) {
  const std::vector<double> du = discrete_gradient(f);
  const std::vector<double> w = node_factors(f, metric);
  double sup = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double slope = du[i] / w[i];
    const double q = slope * slope;
    if (!(q < 1.0 - kTolSpacelike)) {
      throw SpacelikeViolation(fmt::format("phi monitor hit |grad u|^2 = {} at node {}", q, i), q);
    }
    const double v = 1.0 / std::sqrt(1.0 - q);
    sup = std::max(sup, v * std::exp(mu_phi * std::exp(lambda_phi * (f.values[i] + shift))));
  }
  return sup;
}

double barrier_margin(const Field& f, const BarrierProfile& profile) {
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = std::abs(f.nodes[i]);
    if (r < profile.r0) continue;
    margin = std::min(margin, profile.value(r) - std::abs(f.values[i]));
  }
  return margin;
}

ComparisonCheck comparison_hypothesis_check(const Field& f, const RadialMetric& metric,
                                            double barrier_slope, double r_lo, double r_hi) {
  const std::vector<double> du = discrete_gradient(f);
  const std::vector<double> w = node_factors(f, metric);
  double sup = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.nodes[i] < r_lo || f.nodes[i] > r_hi) continue;
    sup = std::max(sup, std::abs(du[i]) / w[i]);
  }
  return {sup < barrier_slope, sup, barrier_slope};
}

DecayFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y, int min_points) {
  if (x.size() != y.size()) throw DomainError("fit inputs differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const auto m = static_cast<int>(lx.size());
  if (m < min_points || m < 2) {
    throw InsufficientData(fmt::format("log-log fit has {} usable points, needs {}", m, min_points));
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < m; ++i) {
    mx += lx[static_cast<std::size_t>(i)];
    my += ly[static_cast<std::size_t>(i)];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < m; ++i) {
    const double dx = lx[static_cast<std::size_t>(i)] - mx;
    const double dy = ly[static_cast<std::size_t>(i)] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InsufficientData("log-log fit needs at least two distinct abscissae");
  DecayFit fit{};
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ssr = 0.0;
  for (int i = 0; i < m; ++i) {
    const double e = ly[static_cast<std::size_t>(i)] - (fit.intercept + fit.exponent * lx[static_cast<std::size_t>(i)]);
    ssr += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  fit.t_lo = std::exp(lx.front());
  fit.t_hi = std::exp(lx.back());
  fit.samples = m;
  return fit;
}

DecayFit decay_exponent_fit(const std::vector<DiagnosticsRecord>& records, double t_lo, double t_hi) {
  if (!(t_lo > 0.0 && t_lo < t_hi)) throw DomainError("fit window needs 0 < t_lo < t_hi");
  std::vector<double> t, s;
  for (const auto& r : records) {
    if (r.t >= t_lo && r.t <= t_hi && r.sup_u > 0.0) {
      t.push_back(r.t);
      s.push_back(r.sup_u);
    }
  }
  DecayFit fit = loglog_fit(t, s, 10);
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  return fit;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::reached_t_end: return "reached_t_end";
    case Termination::spacelike_violation: return "spacelike_violation";
    case Termination::step_cap: return "step_cap";
  }
  return "?";
}

std::vector<SlopeSample> boundary_slope_series(const FlowTrajectory& traj, const RadialMetric& metric) {
  std::vector<SlopeSample> out;
  out.reserve(traj.snapshots.size());
  for (const auto& snap : traj.snapshots) {
    const Field& f = snap.field;
    const std::size_t n = f.size();
    const double du = (3.0 * f.values[n - 1] - 4.0 * f.values[n - 2] + f.values[n - 3]) / (2.0 * f.h);
    const double w = metric.is_flat() ? 1.0 : metric.factor(std::abs(f.nodes[n - 1])).w;
    out.push_back({snap.t, std::abs(du) / w});
  }
  return out;
}

double max_slope(const std::vector<SlopeSample>& series) {
  double m = 0.0;
  for (const auto& s : series) m = std::max(m, s.slope);
  return m;
}

namespace {

void require_two(const std::vector<DiagnosticsRecord>& records) {
  if (records.size() < 2) throw InsufficientData("monotonicity check needs >= 2 records");
}

}  // namespace

MonotoneCheck max_principle_check(const std::vector<DiagnosticsRecord>& records, double slack) {
  require_two(records);
  MonotoneCheck c;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double up = records[i].sup_u - records[i - 1].sup_u;
    if (up > c.worst_violation) {
      c.worst_violation = up;
      c.worst_index = i;
    }
  }
  c.pass = c.worst_violation <= slack;
  return c;
}

MonotoneCheck l2_monotonicity_check(const std::vector<DiagnosticsRecord>& records, double rel_slack) {
  require_two(records);
  MonotoneCheck c;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double up = records[i].l2 - records[i - 1].l2 * (1.0 + rel_slack);
    if (up > c.worst_violation) {
      c.worst_violation = up;
      c.worst_index = i;
    }
  }
  c.pass = c.worst_violation <= 0.0;
  return c;
}

MonotoneCheck phi_monotonicity_check(const std::vector<DiagnosticsRecord>& records, double rel_slack) {
  require_two(records);
  MonotoneCheck c;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (!records[i].sup_phi || !records[i - 1].sup_phi) {
      throw InsufficientData("phi monotonicity needs sup_phi on every record");
    }
    const double up = *records[i].sup_phi - *records[i - 1].sup_phi * (1.0 + rel_slack);
    if (up > c.worst_violation) {
      c.worst_violation = up;
      c.worst_index = i;
    }
  }
  c.pass = c.worst_violation <= 0.0;
  return c;
}

H1Check h1_decay_check(const std::vector<DiagnosticsRecord>& records, double rel_slack) {
  if (records.empty()) throw InsufficientData("h1 check needs records");
  H1Check c;
  c.bound = records.front().l2 * records.front().l2 * (1.0 + rel_slack);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const double lhs = r.l2 * r.l2 + r.t * r.h1_grad * r.h1_grad;
    if (lhs > c.worst_lhs) {
      c.worst_lhs = lhs;
      c.worst_index = i;
    }
  }
  c.pass = c.worst_lhs <= c.bound;
  return c;
}

SpacelikeDrift spacelike_drift_check(const std::vector<DiagnosticsRecord>& records, double allowance) {
  if (records.empty()) throw InsufficientData("spacelike drift check needs records");
  SpacelikeDrift c{true, records.front().grad_max, records.front().grad_max};
  for (const auto& r : records) c.maximum = std::max(c.maximum, r.grad_max);
  c.pass = c.maximum <= c.initial + allowance;
  return c;
}

void to_json(nlohmann::json& j, const DiagnosticsRecord& r) {
  j = nlohmann::json{{"t", r.t}, {"sup_u", r.sup_u}, {"grad_max", r.grad_max}, {"l2", r.l2},
                     {"h1_grad", r.h1_grad}};
  j["sup_phi"] = r.sup_phi ? nlohmann::json(*r.sup_phi) : nlohmann::json(nullptr);
  j["barrier_margin"] = r.barrier_margin ? nlohmann::json(*r.barrier_margin) : nlohmann::json(nullptr);
}

void to_json(nlohmann::json& j, const DecayFit& f) {
  j = nlohmann::json{{"exponent", f.exponent}, {"intercept", f.intercept},
                     {"r_squared", f.r_squared}, {"window", {f.t_lo, f.t_hi}},
                     {"samples", f.samples}};
}

void to_json(nlohmann::json& j, const MonotoneCheck& c) {
  j = nlohmann::json{{"pass", c.pass}, {"worst_violation", c.worst_violation},
                     {"worst_index", c.worst_index}};
}

void to_json(nlohmann::json& j, const H1Check& c) {
  j = nlohmann::json{{"pass", c.pass}, {"bound", c.bound}, {"worst_lhs", c.worst_lhs},
                     {"worst_index", c.worst_index}};
}

void to_json(nlohmann::json& j, const SpacelikeDrift& c) {
  j = nlohmann::json{{"pass", c.pass}, {"initial", c.initial}, {"maximum", c.maximum}};
}

}  // namespace smcf
