#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "smcf/geometry.hpp"

namespace smcf {

/// First and second radial derivatives of a profile, with the spacelike gap
/// 1 - U'^2 in closed form (it cancels badly near |U'| = 1).
struct RadialJet {
  double slope;
  double curvature;
  double gap;
};

// Rotationally symmetric maximal surface in Minkowski space,
// beta' = -(1 + c r^{2n-2})^{-1/2}.
double maximal_slope(int n, double c, double r);
RadialJet maximal_jet(int n, double c, double r);
/// Flat radial operator applied to beta. Zero up to rounding.
double maximal_residual(int n, double c, double r);

// Static supersolution b' = -(1 + (r/r0)^{2n-3})^{-1/2}, r >= r0, n >= 3.
RadialJet supersolution_profile_derivs(int n, double r0, double r);
/// b(r) = int_r^inf |b'(s)| ds by adaptive Gauss-Kronrod quadrature.
double supersolution_height(int n, double r0, double r);
/// Leading tail r0^{n-3/2} r^{-(n-5/2)} / (n - 5/2).
double supersolution_tail(int n, double r0, double r);

struct BarrierProfile {
  int n = 3;
  double r0 = 0.0;
  double eps = 0.0;
  double cap = 0.0;
  std::vector<double> r_grid;    // log-spaced, r0 .. 1e4 r0
  std::vector<double> b_values;  // b(r) + eps
  double tail_coeff = 0.0;       // b(r) ~ tail_coeff r^{-(n-5/2)}

  /// cap inside r0; log-log interpolation of b on the grid; power tail
  /// matched at the last node beyond it.
  double value(double r) const;
};

inline constexpr int kBarrierGridSize = 1024;
inline constexpr int kBarrierCertificateSize = 256;
inline constexpr int kBarrierMaxDoublings = 40;

/// Doubles r0 from r1_min until b(r0) >= h + eps and the curved operator on b
/// is <= 0 on kBarrierCertificateSize log-spaced radii in [r0, 1e4 r0].
/// Throws NumericError with the last failing residual otherwise.
BarrierProfile build_outer_barrier(int n, double r1_min, double h, double eps,
                                   const RadialMetric& metric);

struct SupersolutionSample {
  double radius;
  double flat_value;
  double identity_deviation;  // |flat_value - b'/(2r)|
  double curved_value;
  bool pass;                  // curved_value <= 0
};

struct SupersolutionReport {
  std::vector<SupersolutionSample> samples;
  double max_identity_deviation = 0.0;
  double max_curved_value = -1e300;
  bool all_pass = true;
};

SupersolutionReport verify_static_supersolution(const RadialMetric& metric,
                                                const BarrierProfile& profile,
                                                const std::vector<double>& sample_radii);

void to_json(nlohmann::json& j, const SupersolutionSample& s);
void to_json(nlohmann::json& j, const SupersolutionReport& r);

/// sqrt(2n(t - t0) + |x - x0|^2) + alpha t on the ball of radius rho about x0,
/// t in [0, -t0].
struct TranslatingBarrier {
  int n;
  Eigen::VectorXd x0;
  double t0;
  double alpha;
  double mu;
  double rho;

  static TranslatingBarrier make(Eigen::VectorXd x0, double t0, double alpha, double mu);
};

double translating_radius(int n, double t0, double mu);

struct TranslatingJet {
  double value;
  double dt;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

TranslatingJet translating_barrier_eval(const TranslatingBarrier& tb, const Eigen::VectorXd& x,
                                        double t);

/// dt b - g^{ij}(delta, grad b) b_ij; equals alpha.
double translating_flat_residual(const TranslatingBarrier& tb, const Eigen::VectorXd& x, double t);
/// dt b - g^{ij}(sigma, grad b) (b_ij - Gamma^k_ij b_k) at the absolute point x.
double translating_curved_residual(const TranslatingBarrier& tb, const RadialMetric& metric,
                                   const Eigen::VectorXd& x, double t);

struct TranslatingCertificate {
  double rho;
  double rho_formula;
  double min_gap;        // min of 1 - |grad b|^2 over ball x window
  double gap_bound;      // mu/4
  double boundary_slope; // min over time of the radial slope at |x - x0| = rho
  double slope_bound;    // sqrt(1 - mu/2)
  bool gap_pass;
  bool slope_pass;
  bool pass;
};

TranslatingCertificate translating_barrier_certificate(const TranslatingBarrier& tb,
                                                       int samples = 257);

void to_json(nlohmann::json& j, const TranslatingCertificate& c);

struct FarOutResult {
  double threshold;      // smallest tried |x0| with a positive curved residual
  double min_residual;   // at the threshold
  int tries;
};

/// Doubles |x0| from start until the curved residual is > 0 at every sample
/// point of the barrier's ball and time window. Throws NumericError if none
/// of max_doublings tries succeeds.
FarOutResult translating_far_out_threshold(const RadialMetric& metric, double t0, double alpha,
                                           double mu, double start, int max_doublings = 30);

}  // namespace smcf
