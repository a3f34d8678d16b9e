#include "smcf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "smcf/barriers.hpp"
#include "smcf/errors.hpp"
#include "smcf/geometry.hpp"

namespace smcf {

std::vector<std::string> identity_names() {
  return {"maximal_surface_residual", "supersolution_identity", "translating_identity",
          "translating_gap",          "translating_slope",      "graph_norm_identity",
          "graph_inverse_identity"};
}

void validate_sweep(const VerifySweep& s) {
  if (s.dims.empty()) throw DomainError("sweep has no dimensions");
  if (s.c_values.empty()) throw DomainError("sweep has no maximal-surface constants");
  if (s.r0_values.empty()) throw DomainError("sweep has no inner radii");
  if (s.mu_values.empty()) throw DomainError("sweep has no mu values");
  if (s.t0_values.empty()) throw DomainError("sweep has no t0 values");
  if (s.radii < 2 || s.random_points < 1) throw DomainError("sweep sample counts must be positive");
  if (!(s.r_lo > 0.0 && s.r_hi > s.r_lo)) throw DomainError("sweep radii need 0 < r_lo < r_hi");
}

namespace {

std::vector<double> radii(const VerifySweep& s) {
  std::vector<double> out(static_cast<std::size_t>(s.radii));
  for (int i = 0; i < s.radii; ++i) {
    out[static_cast<std::size_t>(i)] = s.r_lo * std::pow(s.r_hi / s.r_lo, double(i) / (s.radii - 1));
  }
  return out;
}

IdentityResult bounded(std::string name, double worst, double tol, std::string detail) {
  return {std::move(name), worst, tol, worst <= tol, std::move(detail)};
}

}  // namespace

std::vector<IdentityResult> run_identity_suite(const VerifySweep& sweep, std::uint64_t seed,
                                               const std::string& fault) {
  validate_sweep(sweep);
  const auto names = identity_names();
  if (!fault.empty() && std::find(names.begin(), names.end(), fault) == names.end()) {
    throw DomainError(fmt::format("unknown identity '{}' for fault injection", fault));
  }
  auto flip = [&](const char* name) { return fault == name ? -1.0 : 1.0; };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<IdentityResult> out;
  const std::vector<double> rs = radii(sweep);

  {
    double worst = 0.0;
    std::string where;
    for (int n : sweep.dims) {
      for (double c : sweep.c_values) {
        for (double r : rs) {
          const RadialJet j = maximal_jet(n, c, r);
          const double value = flat_radial_operator(n, r, flip("maximal_surface_residual") * j.slope,
                                                    j.curvature, j.gap);
          if (std::abs(value) > worst) {
            worst = std::abs(value);
            where = fmt::format("n={} c={} r={}", n, c, r);
          }
        }
      }
    }
    out.push_back(bounded("maximal_surface_residual", worst, 1e-10, where));
  }

  {
    double worst = 0.0;
    std::string where;
    for (int n : sweep.dims) {
      if (n < 3) continue;
      for (double r0 : sweep.r0_values) {
        for (double r : rs) {
          if (r < r0) continue;
          const RadialJet j = supersolution_profile_derivs(n, r0, r);
          const double value = flip("supersolution_identity") *
                               flat_radial_operator(n, r, j.slope, j.curvature, j.gap);
          const double dev = std::abs(value - 0.5 * j.slope / r);
          if (dev > worst) {
            worst = dev;
            where = fmt::format("n={} r0={} r={}", n, r0, r);
          }
        }
      }
    }
    out.push_back(bounded("supersolution_identity", worst, 1e-10, where));
  }

  {
    double worst_identity = 0.0;
    double worst_gap = std::numeric_limits<double>::infinity();
    double worst_slope = std::numeric_limits<double>::infinity();
    std::string where_identity, where_gap, where_slope;
    const int per_case =
        std::max(1, sweep.random_points /
                        static_cast<int>(sweep.dims.size() * sweep.mu_values.size() * sweep.t0_values.size()));
    for (int n : sweep.dims) {
      for (double mu : sweep.mu_values) {
        for (double t0 : sweep.t0_values) {
          Eigen::VectorXd x0(n);
          for (int i = 0; i < n; ++i) x0(i) = 10.0 * (unit(rng) - 0.5);
          const TranslatingBarrier tb = TranslatingBarrier::make(x0, t0, sweep.alpha, mu);
          for (int k = 0; k < per_case; ++k) {
            Eigen::VectorXd d(n);
            for (int i = 0; i < n; ++i) d(i) = unit(rng) - 0.5;
            d *= tb.rho * std::pow(unit(rng), 1.0 / n) / d.norm();
            const double t = -t0 * unit(rng);
            const double res = flip("translating_identity") * translating_flat_residual(tb, x0 + d, t);
            const double dev = std::abs(res - sweep.alpha);
            if (dev > worst_identity) {
              worst_identity = dev;
              where_identity = fmt::format("n={} mu={} t0={}", n, mu, t0);
            }
          }
          const TranslatingCertificate cert = translating_barrier_certificate(tb);
          const double gap_margin = flip("translating_gap") * cert.min_gap - cert.gap_bound;
          // Equality holds at t = -t0, so the slope bound carries a rounding allowance.
          const double slope_margin =
              flip("translating_slope") * cert.boundary_slope - cert.slope_bound * (1.0 - 1e-12);
          if (gap_margin < worst_gap) {
            worst_gap = gap_margin;
            where_gap = fmt::format("n={} mu={} t0={} min_gap={}", n, mu, t0, cert.min_gap);
          }
          if (slope_margin < worst_slope) {
            worst_slope = slope_margin;
            where_slope = fmt::format("n={} mu={} t0={} slope={}", n, mu, t0, cert.boundary_slope);
          }
        }
      }
    }
    out.push_back(bounded("translating_identity", worst_identity, 1e-12, where_identity));
    out.push_back({"translating_gap", worst_gap, 0.0, worst_gap >= 0.0, where_gap});
    out.push_back({"translating_slope", worst_slope, 0.0, worst_slope >= 0.0, where_slope});
  }

  {
    double worst_norm = 0.0;
    double worst_inverse = 0.0;
    for (int k = 0; k < sweep.random_points; ++k) {
      const int n = 1 + static_cast<int>(unit(rng) * 5.0) % 5;
      const RadialMetric metric = unit(rng) < 0.2 ? RadialMetric::euclidean(n)
                                                  : RadialMetric::conformal_power(n, unit(rng), 0.5 + 1.5 * unit(rng));
      std::vector<double> x(static_cast<std::size_t>(n));
      for (auto& xi : x) xi = unit(rng) - 0.5;
      double norm = 0.0;
      for (double xi : x) norm += xi * xi;
      const double r = 1.0 + 9.0 * unit(rng);
      for (auto& xi : x) xi *= r / std::sqrt(norm);
      const double w = metric.factor(r).w;
      Eigen::VectorXd grad(n);
      for (int i = 0; i < n; ++i) grad(i) = unit(rng) - 0.5;
      grad *= 0.99 * unit(rng) * w / grad.norm();
      const GraphQuantities gq = graph_quantities(metric, x, grad);
      const double gnorm = flip("graph_norm_identity") * grad.dot(gq.g_inv * grad);
      worst_norm = std::max(worst_norm, std::abs(gnorm - (gq.v * gq.v - 1.0)));
      Eigen::MatrixXd prod = gq.g * gq.g_inv;
      if (fault == "graph_inverse_identity") prod = -prod;
      worst_inverse = std::max(worst_inverse,
                               (prod - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
    }
    out.push_back(bounded("graph_norm_identity", worst_norm, 1e-12, ""));
    out.push_back(bounded("graph_inverse_identity", worst_inverse, 1e-12, ""));
  }
  return out;
}

void to_json(nlohmann::json& j, const IdentityResult& r) {
  j = nlohmann::json{{"name", r.name}, {"worst", r.worst}, {"tolerance", r.tolerance},
                     {"pass", r.pass}, {"detail", r.detail}};
}

}  // namespace smcf
