#pragma once

// Conformally flat, rotationally symmetric Riemannian metrics
// sigma_ij = w(r)^2 delta_ij on R^n and the graph quantities of a function u
// in the Lorentzian product (R^n x R, sigma - dt^2).

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace smcf {

inline constexpr double kTolSpacelike = 1e-10;
inline constexpr double kRadiusMin = 1e-6;

enum class MetricFamily {
  euclidean,        // w = 1
  conformal_power,  // w = 1 + a r^{-tau}
  schwarzschild,    // w = (1 + a/(2r))^2, the time-symmetric slice of mass a
};

/// w(r) together with w'(r) and w''(r).
struct ConformalJet {
  double w;
  double dw;
  double d2w;
};

/// Conformal factor of the interpolated metric
///   W^2 = psi3 (psi1 + (1 - psi1) lambda) w^2 + (1 - psi3),
/// where psi_i cuts off between s_i and s_{i+1}.
struct MetricBlend {
  double lambda;
  double s1, s2, s3, s4;
};

class RadialMetric {
 public:
  static RadialMetric euclidean(int n);
  static RadialMetric conformal_power(int n, double a, double tau);
  static RadialMetric schwarzschild(int n, double mass);

  /// This metric with the interpolating blend applied on top; blends stack,
  /// the last one outermost.
  RadialMetric blended(const MetricBlend& blend) const;

  int dim() const noexcept { return n_; }
  MetricFamily family() const noexcept { return family_; }
  double amplitude() const noexcept { return a_; }
  double decay() const noexcept { return tau_; }
  const std::vector<MetricBlend>& blends() const noexcept { return blends_; }

  /// True when every Christoffel symbol vanishes identically.
  bool is_flat() const noexcept;
  /// Smallest admissible |x|: 0 when the factor is regular at the origin.
  double r_min() const noexcept;

  ConformalJet factor(double r) const;
  /// omega(r) = a r^{-tau}, bounding |sigma - delta| up to a constant.
  double omega(double r) const;

 private:
  RadialMetric(int n, MetricFamily family, double a, double tau);
  ConformalJet base_factor(double r) const;

  int n_;
  MetricFamily family_;
  double a_;
  double tau_;
  std::vector<MetricBlend> blends_;
};

/// Gamma^k_ij stored as gamma(k, i, j).
class Christoffel {
 public:
  explicit Christoffel(int n) : n_(n), data_(static_cast<std::size_t>(n * n * n), 0.0) {}

  int dim() const noexcept { return n_; }
  double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }
  double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }

 private:
  std::size_t index(int k, int i, int j) const {
    return static_cast<std::size_t>((k * n_ + i) * n_ + j);
  }
  int n_;
  std::vector<double> data_;
};

struct MetricEval {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd sigma_inv;
  Christoffel gamma;
};

struct GraphQuantities {
  double v;
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
  Eigen::VectorXd nu_spatial;
  double nu_time;
  double grad_sq_sigma;  // |grad u|^2_sigma
};

MetricEval metric_eval(const RadialMetric& metric, std::span<const double> x);

/// Ricci tensor of sigma from second-order central differences of the
/// Christoffel symbols with spacing `spacing`.
Eigen::MatrixXd ricci_eval(const RadialMetric& metric, std::span<const double> x,
                           double spacing = 1e-4);

/// sigma^{ij} Ric_ij.
double scalar_curvature(const RadialMetric& metric, std::span<const double> x,
                        double spacing = 1e-4);

/// Smallest C with |Ric(w,w)| <= C |w|^2_sigma on `samples` log-spaced radii
/// in [r_lo, r_hi].
double ricci_bound_constant(const RadialMetric& metric, double r_lo, double r_hi,
                            int samples = 256);

GraphQuantities graph_quantities(const RadialMetric& metric, std::span<const double> x,
                                 const Eigen::VectorXd& grad_u);

/// g^{ij}(sigma, grad u) (u_ij - Gamma^k_ij u_k).
double mcf_operator_cartesian(const RadialMetric& metric, std::span<const double> x,
                              const Eigen::VectorXd& grad_u, const Eigen::MatrixXd& hess_u);

enum class AxisRule { reject, even_extension };

/// The operator above for u(x) = U(|x|), in terms of U'(r), U''(r). At r = 0
/// the even-extension limit n U''(0)/w(0)^2 is returned if requested.
double mcf_operator_radial(const RadialMetric& metric, double r, double du, double d2u,
                           AxisRule axis = AxisRule::reject);

/// Reduced operator given a precomputed conformal factor: w and s = w'/w.
/// Throws SpacelikeViolation when (du/w)^2 >= 1 - kTolSpacelike.
double radial_operator_from_factor(int n, double r, double w, double log_dw, double du,
                                   double d2u);

/// Flat radial operator U''/gap + (n-1) U'/r with the spacelike gap
/// gap = 1 - U'^2 supplied in closed form by the caller.
double flat_radial_operator(int n, double r, double du, double d2u, double gap);

}  // namespace smcf
