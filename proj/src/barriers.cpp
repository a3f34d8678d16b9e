#include "smcf/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "smcf/errors.hpp"

namespace smcf {

double maximal_slope(int n, double c, double r) { return maximal_jet(n, c, r).slope; }

RadialJet maximal_jet(int n, double c, double r) {
  if (n < 1) throw DomainError("maximal surface needs n >= 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("maximal surface needs c > 0");
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("maximal surface needs r >= 0");
  if (n == 1) {
    return {-1.0 / std::sqrt(1.0 + c), 0.0, c / (1.0 + c)};
  }
  if (r == 0.0) return {-1.0, 0.0, 0.0};
  const double x = c * std::pow(r, 2 * n - 2);
  const double root = std::sqrt(1.0 + x);
  const double curvature = (n - 1) * c * std::pow(r, 2 * n - 3) / (root * root * root);
  return {-1.0 / root, curvature, x / (1.0 + x)};
}

double maximal_residual(int n, double c, double r) {
  if (!(r > 0.0)) throw DomainError("maximal residual needs r > 0");
  const RadialJet j = maximal_jet(n, c, r);
  return flat_radial_operator(n, r, j.slope, j.curvature, j.gap);
}

namespace {

void check_static(int n, double r0, double r) {
  if (n < 3) throw DomainError("static supersolution needs n >= 3");
  if (!(r0 > 0.0) || !std::isfinite(r0)) throw DomainError("static supersolution needs r0 > 0");
  if (!(r >= r0) || !std::isfinite(r)) {
    throw DomainError(fmt::format("static supersolution evaluated at r = {} < r0 = {}", r, r0));
  }
}

}  // namespace

RadialJet supersolution_profile_derivs(int n, double r0, double r) {
  check_static(n, r0, r);
  const double rho = r / r0;
  const double y = std::pow(rho, 2 * n - 3);
  const double root = std::sqrt(1.0 + y);
  const double curvature = (n - 1.5) / r0 * std::pow(rho, 2 * n - 4) / (root * root * root);
  return {-1.0 / root, curvature, y / (1.0 + y)};
}

double supersolution_height(int n, double r0, double r) {
  check_static(n, r0, r);
  const double rho = r / r0;
  const int m = 2 * n - 3;
  const double rho_m = std::pow(rho, m);
  // y = rho / x^2 maps [rho, inf) onto (0, 1]; the integrand is smooth for m >= 3.
  auto f = [&](double x) {
    return 2.0 * rho * std::pow(x, m - 3) / std::sqrt(std::pow(x, 2 * m) + rho_m);
  };
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-13, &err);
  const double b = r0 * value;
  if (!std::isfinite(b) || r0 * err > std::max(1e-10, 1e-13 * b)) {
    throw NumericError(fmt::format("height quadrature did not converge at r = {} (error {})", r,
                                   r0 * err));
  }
  return b;
}

double supersolution_tail(int n, double r0, double r) {
  check_static(n, r0, r);
  return std::pow(r0, n - 1.5) * std::pow(r, -(n - 2.5)) / (n - 2.5);
}

double BarrierProfile::value(double r) const {
  if (r < r0) return cap;
  const std::size_t m = r_grid.size();
  if (r >= r_grid.back()) {
    return (b_values[m - 1] - eps) * std::pow(r / r_grid[m - 1], -(n - 2.5)) + eps;
  }
  auto it = std::upper_bound(r_grid.begin(), r_grid.end(), r);
  const auto k = static_cast<std::size_t>(it - r_grid.begin()) - 1;
  if (r == r_grid[k]) return b_values[k];
  const double t = std::log(r / r_grid[k]) / std::log(r_grid[k + 1] / r_grid[k]);
  const double lo = std::log(b_values[k] - eps);
  const double hi = std::log(b_values[k + 1] - eps);
  return std::exp(lo + t * (hi - lo)) + eps;
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

double worst_curved_value(int n, double r0, const RadialMetric& metric,
                          const std::vector<double>& radii) {
  double worst = -std::numeric_limits<double>::infinity();
  for (double r : radii) {
    const RadialJet j = supersolution_profile_derivs(n, r0, r);
    worst = std::max(worst, mcf_operator_radial(metric, r, j.slope, j.curvature));
  }
  return worst;
}

}  // namespace

BarrierProfile build_outer_barrier(int n, double r1_min, double h, double eps,
                                   const RadialMetric& metric) {
  if (n < 3) throw DomainError("outer barrier needs n >= 3");
  if (metric.dim() != n) throw DomainError("outer barrier dimension differs from the metric's");
  if (!(h > 0.0)) throw DomainError("outer barrier needs a cap h > 0");
  if (!(eps >= 0.0)) throw DomainError("outer barrier needs eps >= 0");
  if (!(r1_min > 0.0) || r1_min < metric.r_min()) throw DomainError("outer barrier needs r1_min >= r_min");

  double last_residual = std::numeric_limits<double>::quiet_NaN();
  double r0 = r1_min;
  for (int k = 0; k <= kBarrierMaxDoublings; ++k, r0 *= 2.0) {
    if (supersolution_height(n, r0, r0) < h + eps) continue;
    last_residual = worst_curved_value(n, r0, metric, log_spaced(r0, 1e4 * r0, kBarrierCertificateSize));
    if (last_residual > 0.0) continue;

    BarrierProfile p;
    p.n = n;
    p.r0 = r0;
    p.eps = eps;
    p.cap = h;
    p.r_grid = log_spaced(r0, 1e4 * r0, kBarrierGridSize);
    last_residual = worst_curved_value(n, r0, metric, p.r_grid);
    if (last_residual > 0.0) continue;
    p.b_values.resize(p.r_grid.size());
    for (std::size_t i = 0; i < p.r_grid.size(); ++i) {
      p.b_values[i] = supersolution_height(n, r0, p.r_grid[i]) + eps;
    }
    p.tail_coeff = std::pow(r0, n - 1.5) / (n - 2.5);
    return p;
  }
  throw NumericError(fmt::format(
      "no verified outer barrier up to r0 = {} (last worst curved operator value {})", r0 / 2.0,
      last_residual));
}

SupersolutionReport verify_static_supersolution(const RadialMetric& metric,
                                                const BarrierProfile& profile,
                                                const std::vector<double>& sample_radii) {
  SupersolutionReport report;
  report.samples.reserve(sample_radii.size());
  for (double r : sample_radii) {
    const RadialJet j = supersolution_profile_derivs(profile.n, profile.r0, r);
    SupersolutionSample s{};
    s.radius = r;
    s.flat_value = flat_radial_operator(profile.n, r, j.slope, j.curvature, j.gap);
    s.identity_deviation = std::abs(s.flat_value - 0.5 * j.slope / r);
    s.curved_value = mcf_operator_radial(metric, r, j.slope, j.curvature);
    s.pass = s.curved_value <= 0.0;
    report.max_identity_deviation = std::max(report.max_identity_deviation, s.identity_deviation);
    report.max_curved_value = std::max(report.max_curved_value, s.curved_value);
    report.all_pass = report.all_pass && s.pass;
    report.samples.push_back(s);
  }
  return report;
}

void to_json(nlohmann::json& j, const SupersolutionSample& s) {
  j = nlohmann::json{{"radius", s.radius},
                     {"flat_value", s.flat_value},
                     {"identity_deviation", s.identity_deviation},
                     {"curved_value", s.curved_value},
                     {"pass", s.pass}};
}

void to_json(nlohmann::json& j, const SupersolutionReport& r) {
  j = nlohmann::json{{"samples", r.samples},
                     {"max_identity_deviation", r.max_identity_deviation},
                     {"max_curved_value", r.max_curved_value},
                     {"all_pass", r.all_pass}};
}

double translating_radius(int n, double t0, double mu) {
  return std::sqrt(((2.0 - mu) / mu) * 4.0 * n * (-t0));
}

TranslatingBarrier TranslatingBarrier::make(Eigen::VectorXd x0, double t0, double alpha, double mu) {
  const auto n = static_cast<int>(x0.size());
  if (n < 1) throw DomainError("translating barrier needs a center");
  if (!x0.allFinite()) throw DomainError("translating barrier center is not finite");
  if (!(t0 < -1.0)) throw DomainError("translating barrier needs t0 < -1");
  if (!(alpha >= 0.0)) throw DomainError("translating barrier needs alpha >= 0");
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("translating barrier needs mu in (0, 1)");
  return TranslatingBarrier{n, std::move(x0), t0, alpha, mu, translating_radius(n, t0, mu)};
}

TranslatingJet translating_barrier_eval(const TranslatingBarrier& tb, const Eigen::VectorXd& x,
                                        double t) {
  if (x.size() != tb.n) throw DomainError("point dimension differs from the barrier's");
  if (!x.allFinite() || !std::isfinite(t)) throw DomainError("non-finite point or time");
  const Eigen::VectorXd d = x - tb.x0;
  const double dist2 = d.squaredNorm();
  if (dist2 > tb.rho * tb.rho * (1.0 + 1e-12)) {
    throw DomainError(fmt::format("|x - x0| = {} outside the ball of radius {}", std::sqrt(dist2), tb.rho));
  }
  if (t < 0.0 || t > -tb.t0 * (1.0 + 1e-12)) {
    throw DomainError(fmt::format("t = {} outside [0, {}]", t, -tb.t0));
  }
  const double s = 2.0 * tb.n * (t - tb.t0) + dist2;
  const double q = std::sqrt(s);
  TranslatingJet jet;
  jet.value = q + tb.alpha * t;
  jet.dt = tb.n / q + tb.alpha;
  jet.grad = d / q;
  jet.hess = (Eigen::MatrixXd::Identity(tb.n, tb.n) - d * d.transpose() / s) / q;
  return jet;
}

double translating_flat_residual(const TranslatingBarrier& tb, const Eigen::VectorXd& x, double t) {
  const TranslatingJet jet = translating_barrier_eval(tb, x, t);
  const Eigen::VectorXd d = x - tb.x0;
  return jet.dt - mcf_operator_cartesian(RadialMetric::euclidean(tb.n),
                                         std::span<const double>(d.data(), d.size()), jet.grad,
                                         jet.hess);
}

double translating_curved_residual(const TranslatingBarrier& tb, const RadialMetric& metric,
                                   const Eigen::VectorXd& x, double t) {
  const TranslatingJet jet = translating_barrier_eval(tb, x, t);
  return jet.dt -
         mcf_operator_cartesian(metric, std::span<const double>(x.data(), x.size()), jet.grad, jet.hess);
}

TranslatingCertificate translating_barrier_certificate(const TranslatingBarrier& tb, int samples) {
  if (samples < 2) throw DomainError("certificate needs >= 2 samples");
  TranslatingCertificate c{};
  c.rho = tb.rho;
  c.rho_formula = translating_radius(tb.n, tb.t0, tb.mu);
  c.gap_bound = tb.mu / 4.0;
  c.slope_bound = std::sqrt(1.0 - tb.mu / 2.0);
  c.min_gap = std::numeric_limits<double>::infinity();
  c.boundary_slope = std::numeric_limits<double>::infinity();

  // b is radial about x0, so one ray through the ball covers every distance.
  Eigen::VectorXd e = Eigen::VectorXd::Zero(tb.n);
  e(0) = 1.0;
  const double horizon = -tb.t0;
  for (int it = 0; it < samples; ++it) {
    const double t = horizon * it / (samples - 1);
    for (int ir = 0; ir < samples; ++ir) {
      const double dist = tb.rho * ir / (samples - 1);
      const TranslatingJet jet = translating_barrier_eval(tb, tb.x0 + dist * e, t);
      c.min_gap = std::min(c.min_gap, 1.0 - jet.grad.squaredNorm());
    }
    const TranslatingJet edge = translating_barrier_eval(tb, tb.x0 + tb.rho * e, t);
    c.boundary_slope = std::min(c.boundary_slope, edge.grad.dot(e));
  }
  c.gap_pass = c.min_gap >= c.gap_bound;
  // At t = -t0 the slope equals the bound exactly; allow rounding.
  c.slope_pass = c.boundary_slope >= c.slope_bound * (1.0 - 1e-12);
  c.pass = c.gap_pass && c.slope_pass;
  return c;
}

void to_json(nlohmann::json& j, const TranslatingCertificate& c) {
  j = nlohmann::json{{"rho", c.rho},
                     {"rho_formula", c.rho_formula},
                     {"min_gap", c.min_gap},
                     {"gap_bound", c.gap_bound},
                     {"boundary_slope", c.boundary_slope},
                     {"slope_bound", c.slope_bound},
                     {"gap_pass", c.gap_pass},
                     {"slope_pass", c.slope_pass},
                     {"pass", c.pass}};
}

FarOutResult translating_far_out_threshold(const RadialMetric& metric, double t0, double alpha,
                                           double mu, double start, int max_doublings) {
  const int n = metric.dim();
  const double rho = translating_radius(n, t0, mu);
  double x = std::max(start, 2.0 * rho + metric.r_min());
  const double fractions[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  const double times[] = {0.0, -0.5 * t0, -t0};
  double worst = 0.0;
  for (int k = 0; k <= max_doublings; ++k, x *= 2.0) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
    x0(0) = x;
    const TranslatingBarrier tb = TranslatingBarrier::make(x0, t0, alpha, mu);
    worst = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < n; ++axis) {
      for (double sign : {-1.0, 1.0}) {
        for (double f : fractions) {
          Eigen::VectorXd p = x0;
          p(axis) += sign * f * rho;
          for (double t : times) worst = std::min(worst, translating_curved_residual(tb, metric, p, t));
        }
      }
    }
    if (worst > 0.0) return {x, worst, k + 1};
  }
  throw NumericError(fmt::format("curved translating residual stayed non-positive up to |x0| = {} ({})",
                                 x / 2.0, worst));
}

}  // namespace smcf
