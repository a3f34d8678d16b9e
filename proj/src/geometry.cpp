#include "smcf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "smcf/cutoff.hpp"
#include "smcf/errors.hpp"

namespace smcf {

RadialMetric::RadialMetric(int n, MetricFamily family, double a, double tau)
    : n_(n), family_(family), a_(a), tau_(tau) {}

RadialMetric RadialMetric::euclidean(int n) {
  if (n < 1) throw DomainError("metric dimension must be >= 1");
  return RadialMetric(n, MetricFamily::euclidean, 0.0, 1.0);
}

RadialMetric RadialMetric::conformal_power(int n, double a, double tau) {
  if (n < 1) throw DomainError("metric dimension must be >= 1");
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("conformal amplitude must be finite and >= 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("decay exponent must be > 0");
  if (a == 0.0) return RadialMetric(n, MetricFamily::euclidean, 0.0, tau);
  return RadialMetric(n, MetricFamily::conformal_power, a, tau);
}

RadialMetric RadialMetric::schwarzschild(int n, double mass) {
  if (n < 1) throw DomainError("metric dimension must be >= 1");
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("slice mass must be > 0");
  return RadialMetric(n, MetricFamily::schwarzschild, mass, 1.0);
}

RadialMetric RadialMetric::blended(const MetricBlend& blend) const {
  if (!(blend.lambda >= 1.0)) throw DomainError("blend lambda must be >= 1");
  if (!(blend.s1 < blend.s2 && blend.s2 < blend.s3 && blend.s3 < blend.s4)) {
    throw DomainError("blend radii must satisfy s1 < s2 < s3 < s4");
  }
  RadialMetric out = *this;
  out.blends_.push_back(blend);
  return out;
}

bool RadialMetric::is_flat() const noexcept {
  return family_ == MetricFamily::euclidean &&
         std::all_of(blends_.begin(), blends_.end(), [](const MetricBlend& b) { return b.lambda == 1.0; });
}

double RadialMetric::r_min() const noexcept {
  return family_ == MetricFamily::euclidean ? 0.0 : kRadiusMin;
}

double RadialMetric::omega(double r) const {
  switch (family_) {
    case MetricFamily::euclidean:
      return 0.0;
    case MetricFamily::conformal_power:
      return a_ * std::pow(r, -tau_);
    case MetricFamily::schwarzschild: {
      const double psi = 1.0 + a_ / (2.0 * r);
      return psi * psi - 1.0;
    }
  }
  return 0.0;
}

ConformalJet RadialMetric::base_factor(double r) const {
  switch (family_) {
    case MetricFamily::euclidean:
      return {1.0, 0.0, 0.0};
    case MetricFamily::conformal_power: {
      const double p = a_ * std::pow(r, -tau_);
      return {1.0 + p, -tau_ * p / r, tau_ * (tau_ + 1.0) * p / (r * r)};
    }
    case MetricFamily::schwarzschild: {
      const double psi = 1.0 + a_ / (2.0 * r);
      const double dpsi = -a_ / (2.0 * r * r);
      const double d2psi = a_ / (r * r * r);
      return {psi * psi, 2.0 * psi * dpsi, 2.0 * (dpsi * dpsi + psi * d2psi)};
    }
  }
  return {1.0, 0.0, 0.0};
}

namespace {

ConformalJet apply_blend(const MetricBlend& b, const ConformalJet& base, double r) {
  if (r <= b.s1) return base;
  if (r >= b.s4) return {1.0, 0.0, 0.0};
  const CutoffJet p1 = smooth_cutoff_jet(b.s1, b.s2, r);
  const CutoffJet p3 = smooth_cutoff_jet(b.s3, b.s4, r);

  const double P = p1.value + (1.0 - p1.value) * b.lambda;
  const double dP = p1.d1 * (1.0 - b.lambda);
  const double d2P = p1.d2 * (1.0 - b.lambda);
  const double Q = base.w * base.w;
  const double dQ = 2.0 * base.w * base.dw;
  const double d2Q = 2.0 * (base.dw * base.dw + base.w * base.d2w);

  const double A = p3.value * P * Q + 1.0 - p3.value;
  const double dA = p3.d1 * P * Q + p3.value * (dP * Q + P * dQ) - p3.d1;
  const double d2A = p3.d2 * P * Q + 2.0 * p3.d1 * (dP * Q + P * dQ) +
                     p3.value * (d2P * Q + 2.0 * dP * dQ + P * d2Q) - p3.d2;

  const double W = std::sqrt(A);
  const double dW = dA / (2.0 * W);
  const double d2W = (0.5 * d2A - dW * dW) / W;
  return {W, dW, d2W};
}

}  // namespace

ConformalJet RadialMetric::factor(double r) const {
  if (!std::isfinite(r)) throw DomainError("radius is not finite");
  if (r < r_min()) {
    throw DomainError(fmt::format("radius {} below r_min {} for a singular conformal factor", r, r_min()));
  }
  ConformalJet jet = base_factor(r);
  for (const MetricBlend& b : blends_) jet = apply_blend(b, jet, r);
  return jet;
}

namespace {

double norm_of(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) {
    if (!std::isfinite(xi)) throw DomainError("point has non-finite coordinates");
    s += xi * xi;
  }
  return std::sqrt(s);
}

void check_dim(const RadialMetric& metric, std::size_t size, const char* what) {
  if (static_cast<int>(size) != metric.dim()) {
    throw DomainError(fmt::format("{} has dimension {}, metric has {}", what, size, metric.dim()));
  }
}

Christoffel christoffel_at(const RadialMetric& metric, std::span<const double> x) {
  const int n = metric.dim();
  const double r = norm_of(x);
  const ConformalJet jet = metric.factor(r);
  Christoffel gamma(n);
  if (jet.dw == 0.0 || r == 0.0) return gamma;

  // sigma = e^{2f} delta with f = ln w; Gamma^k_ij = d_ki f_j + d_kj f_i - d_ij f_k.
  const double s = jet.dw / jet.w / r;
  std::vector<double> df(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) df[static_cast<std::size_t>(i)] = s * x[static_cast<std::size_t>(i)];
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double value = 0.0;
        if (k == i) value += df[static_cast<std::size_t>(j)];
        if (k == j) value += df[static_cast<std::size_t>(i)];
        if (i == j) value -= df[static_cast<std::size_t>(k)];
        gamma(k, i, j) = value;
      }
    }
  }
  return gamma;
}

}  // namespace

MetricEval metric_eval(const RadialMetric& metric, std::span<const double> x) {
  check_dim(metric, x.size(), "point");
  const double r = norm_of(x);
  const ConformalJet jet = metric.factor(r);
  const int n = metric.dim();
  const double w2 = jet.w * jet.w;
  return MetricEval{Eigen::MatrixXd::Identity(n, n) * w2, Eigen::MatrixXd::Identity(n, n) / w2,
                    christoffel_at(metric, x)};
}

Eigen::MatrixXd ricci_eval(const RadialMetric& metric, std::span<const double> x, double spacing) {
  check_dim(metric, x.size(), "point");
  const int n = metric.dim();
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  if (metric.is_flat()) {
    norm_of(x);
    return ric;
  }

  const Christoffel gamma = christoffel_at(metric, x);
  // dgamma[m](k,i,j) = d_m Gamma^k_ij
  std::vector<Christoffel> dgamma;
  dgamma.reserve(static_cast<std::size_t>(n));
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> xm(x.begin(), x.end());
  for (int m = 0; m < n; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    xp[mi] = x[mi] + spacing;
    xm[mi] = x[mi] - spacing;
    const Christoffel gp = christoffel_at(metric, xp);
    const Christoffel gm = christoffel_at(metric, xm);
    xp[mi] = x[mi];
    xm[mi] = x[mi];
    Christoffel d(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(k, i, j) = (gp(k, i, j) - gm(k, i, j)) / (2.0 * spacing);
    dgamma.push_back(std::move(d));
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double value = 0.0;
      for (int k = 0; k < n; ++k) {
        value += dgamma[static_cast<std::size_t>(k)](k, i, j);
        value -= dgamma[static_cast<std::size_t>(j)](k, k, i);
        for (int l = 0; l < n; ++l) {
          value += gamma(k, k, l) * gamma(l, i, j);
          value -= gamma(k, j, l) * gamma(l, i, k);
        }
      }
      ric(i, j) = value;
    }
  }
  return 0.5 * (ric + ric.transpose());
}

double scalar_curvature(const RadialMetric& metric, std::span<const double> x, double spacing) {
  const Eigen::MatrixXd ric = ricci_eval(metric, x, spacing);
  const ConformalJet jet = metric.factor(norm_of(x));
  return ric.trace() / (jet.w * jet.w);
}

double ricci_bound_constant(const RadialMetric& metric, double r_lo, double r_hi, int samples) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo) || samples < 2) {
    throw DomainError("ricci_bound_constant needs 0 < r_lo < r_hi and >= 2 samples");
  }
  const int n = metric.dim();
  double worst = 0.0;
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int s = 0; s < samples; ++s) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(s) / (samples - 1));
    x[0] = r;
    const Eigen::MatrixXd ric = ricci_eval(metric, x);
    const ConformalJet jet = metric.factor(r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ric, Eigen::EigenvaluesOnly);
    const double c = eig.eigenvalues().cwiseAbs().maxCoeff() / (jet.w * jet.w);
    worst = std::max(worst, c);
  }
  return worst;
}

GraphQuantities graph_quantities(const RadialMetric& metric, std::span<const double> x,
                                 const Eigen::VectorXd& grad_u) {
  check_dim(metric, x.size(), "point");
  check_dim(metric, static_cast<std::size_t>(grad_u.size()), "gradient");
  if (!grad_u.allFinite()) throw DomainError("gradient has non-finite entries");

  const int n = metric.dim();
  const ConformalJet jet = metric.factor(norm_of(x));
  const double w2 = jet.w * jet.w;
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(n, n) * w2;
  const Eigen::MatrixXd sigma_inv = Eigen::MatrixXd::Identity(n, n) / w2;

  const Eigen::VectorXd raised = sigma_inv * grad_u;
  const double q = grad_u.dot(raised);
  if (!(q < 1.0 - kTolSpacelike)) {
    throw SpacelikeViolation(fmt::format("|grad u|^2_sigma = {} is not strictly spacelike", q), q);
  }
  const double gap = 1.0 - q;
  const double v = 1.0 / std::sqrt(gap);

  GraphQuantities out{v,
                      sigma - grad_u * grad_u.transpose(),
                      sigma_inv + raised * raised.transpose() / gap,
                      v * raised,
                      v,
                      q};
  return out;
}

double mcf_operator_cartesian(const RadialMetric& metric, std::span<const double> x,
                              const Eigen::VectorXd& grad_u, const Eigen::MatrixXd& hess_u) {
  const int n = metric.dim();
  if (hess_u.rows() != n || hess_u.cols() != n) throw DomainError("hessian has wrong shape");
  const double scale = std::max(1.0, hess_u.cwiseAbs().maxCoeff());
  if ((hess_u - hess_u.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("hessian is not symmetric");
  }
  const GraphQuantities gq = graph_quantities(metric, x, grad_u);
  const Christoffel gamma = christoffel_at(metric, x);

  double value = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double cov = hess_u(i, j);
      for (int k = 0; k < n; ++k) cov -= gamma(k, i, j) * grad_u(k);
      value += gq.g_inv(i, j) * cov;
    }
  }
  return value;
}

double radial_operator_from_factor(int n, double r, double w, double log_dw, double du,
                                   double d2u) {
  const double slope = du / w;
  const double q = slope * slope;
  if (!(q < 1.0 - kTolSpacelike)) {
    throw SpacelikeViolation(fmt::format("radial slope {} at r = {} is not strictly spacelike", slope, r), q);
  }
  const double inv_w2 = 1.0 / (w * w);
  const double principal = inv_w2 / (1.0 - q);
  return principal * (d2u - log_dw * du) + (n - 1) * inv_w2 * (du / r + log_dw * du);
}

double mcf_operator_radial(const RadialMetric& metric, double r, double du, double d2u,
                           AxisRule axis) {
  if (!std::isfinite(r) || !std::isfinite(du) || !std::isfinite(d2u)) {
    throw DomainError("radial operator inputs must be finite");
  }
  if (r < 0.0) throw DomainError("negative radius");
  const int n = metric.dim();
  if (r == 0.0) {
    if (axis == AxisRule::reject) throw DomainError("radial operator requested on the axis r = 0");
    const ConformalJet jet = metric.factor(0.0);
    return n * d2u / (jet.w * jet.w);
  }
  const ConformalJet jet = metric.factor(r);
  return radial_operator_from_factor(n, r, jet.w, jet.dw / jet.w, du, d2u);
}

double flat_radial_operator(int n, double r, double du, double d2u, double gap) {
  if (!(gap > 0.0)) throw SpacelikeViolation("flat radial operator needs a positive spacelike gap", 1.0 - gap);
  if (n == 1) return d2u / gap;
  if (!(r > 0.0)) throw DomainError("flat radial operator needs r > 0");
  return d2u / gap + (n - 1) * du / r;
}

}  // namespace smcf
