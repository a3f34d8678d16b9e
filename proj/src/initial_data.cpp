#include "smcf/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "smcf/errors.hpp"

namespace smcf {

std::string_view to_string(ProfileFamily family) {
  switch (family) {
    case ProfileFamily::zero: return "zero";
    case ProfileFamily::bump: return "bump";
    case ProfileFamily::gaussian: return "gaussian";
    case ProfileFamily::power_tail: return "power_tail";
    case ProfileFamily::tabulated: return "tabulated";
  }
  return "?";
}

ProfileFamily parse_profile_family(std::string_view s) {
  for (auto f : {ProfileFamily::zero, ProfileFamily::bump, ProfileFamily::gaussian,
                 ProfileFamily::power_tail, ProfileFamily::tabulated}) {
    if (s == to_string(f)) return f;
  }
  throw DomainError(fmt::format("unknown initial-data family '{}'", s));
}

InitialProfile bump_profile(double height, double width, double center) {
  InitialProfile p;
  p.family = ProfileFamily::bump;
  p.height = height;
  p.width = width;
  p.center = center;
  return p;
}

InitialProfile gaussian_profile(double height, double width, double center) {
  InitialProfile p;
  p.family = ProfileFamily::gaussian;
  p.height = height;
  p.width = width;
  p.center = center;
  return p;
}

namespace {

std::size_t table_segment(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto k = static_cast<std::size_t>(it - xs.begin());
  return std::clamp<std::size_t>(k, 1, xs.size() - 1) - 1;
}

}  // namespace

double InitialProfile::value(double x) const {
  const double s = (x - center) / width;
  switch (family) {
    case ProfileFamily::zero:
      return 0.0;
    case ProfileFamily::bump: {
      if (std::abs(s) >= 1.0) return 0.0;
      const double q = 1.0 - s * s;
      return height * q * q * q * q;
    }
    case ProfileFamily::gaussian:
      return height * std::exp(-s * s);
    case ProfileFamily::power_tail:
      return height * std::pow(1.0 + s * s, -0.5 * exponent);
    case ProfileFamily::tabulated: {
      if (table_x.size() < 2 || x < table_x.front() || x > table_x.back()) return 0.0;
      const std::size_t k = table_segment(table_x, x);
      const double t = (x - table_x[k]) / (table_x[k + 1] - table_x[k]);
      return table_u[k] + t * (table_u[k + 1] - table_u[k]);
    }
  }
  return 0.0;
}

double InitialProfile::slope(double x) const {
  const double s = (x - center) / width;
  switch (family) {
    case ProfileFamily::zero:
      return 0.0;
    case ProfileFamily::bump: {
      if (std::abs(s) >= 1.0) return 0.0;
      const double q = 1.0 - s * s;
      return -8.0 * height * s * q * q * q / width;
    }
    case ProfileFamily::gaussian:
      return -2.0 * height * s * std::exp(-s * s) / width;
    case ProfileFamily::power_tail:
      return -exponent * height * s * std::pow(1.0 + s * s, -0.5 * exponent - 1.0) / width;
    case ProfileFamily::tabulated: {
      if (table_x.size() < 2 || x < table_x.front() || x > table_x.back()) return 0.0;
      const std::size_t k = table_segment(table_x, x);
      return (table_u[k + 1] - table_u[k]) / (table_x[k + 1] - table_x[k]);
    }
  }
  return 0.0;
}

double InitialProfile::support_radius() const {
  switch (family) {
    case ProfileFamily::zero: return 0.0;
    case ProfileFamily::bump: return std::abs(center) + width;
    case ProfileFamily::tabulated:
      return table_x.empty() ? 0.0 : std::max(std::abs(table_x.front()), std::abs(table_x.back()));
    default: return std::numeric_limits<double>::infinity();
  }
}

void sample_profile(const InitialProfile& profile, Field& f) {
  if (profile.family == ProfileFamily::tabulated &&
      (profile.table_x.size() != profile.table_u.size() || profile.table_x.size() < 2 ||
       !std::is_sorted(profile.table_x.begin(), profile.table_x.end()))) {
    throw DomainError("tabulated profile needs >= 2 sorted samples of equal length");
  }
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = profile.value(f.nodes[i]);
}

double lipschitz_constant(const RadialMetric& metric, const Field& f) {
  const std::vector<double> du = discrete_gradient(f);
  const std::vector<double> w = node_factors(f, metric);
  double worst = 0.0;
  for (std::size_t i = 0; i < du.size(); ++i) worst = std::max(worst, std::abs(du[i]) / w[i]);
  return worst;
}

double decay_radius(const Field& u0, double eps) {
  if (!(eps > 0.0)) throw DomainError("decay_radius needs eps > 0");
  const std::size_t n = u0.size();
  if (n == 0) throw DomainError("empty field");
  if (std::abs(u0.values[n - 1]) > eps) {
    throw DomainError(fmt::format("|u0| = {} exceeds eps = {} at the outermost node",
                                  std::abs(u0.values[n - 1]), eps));
  }
  for (std::size_t i = n; i-- > 0;) {
    if (std::abs(u0.values[i]) > eps) return u0.nodes[i + 1];
  }
  return u0.nodes.front();
}

InterpolationResult interpolate_initial_data(const RadialMetric& metric, const Field& u0, double R1,
                                             double R2, double eps) {
  if (u0.kind != FieldKind::radial) throw DomainError("interpolation needs a radial field");
  if (!(R2 > R1) || !(R1 > 0.0)) throw DomainError("interpolation needs 0 < R1 < R2");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("interpolation margin must lie in (0, 1)");
  validate_field(u0);

  const double lip0 = lipschitz_constant(metric, u0);
  if (lip0 > (1.0 - eps) * (1.0 + 1e-12)) {
    throw DomainError(fmt::format("u0 has Lipschitz constant {} > 1 - eps = {}", lip0, 1.0 - eps));
  }

  const double s1 = R1;
  const double s4 = R2;
  const double s2 = s1 + (s4 - s1) / 3.0;
  const double s3 = s1 + 2.0 * (s4 - s1) / 3.0;

  const std::vector<double> du0 = discrete_gradient(u0);
  const std::vector<double> w = node_factors(u0, metric);

  InterpolationResult out{metric, u0, 1.0, s1, s2, s3, s4, eps, 0.0};
  double budget = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const double r = u0.nodes[i];
    const CutoffJet psi2 = smooth_cutoff_jet(s2, s3, r);
    out.u_tilde.values[i] = psi2.value * u0.values[i];
    if (r >= s2 && r <= s3) {
      const double u = u0.values[i];
      const double term = (u * u * psi2.d1 * psi2.d1 + psi2.value * psi2.value * du0[i] * du0[i]) /
                          (w[i] * w[i]);
      budget = std::max(budget, term);
    }
  }
  const double margin = (1.0 - eps) * (1.0 - eps);
  out.lambda = std::max(1.0, 2.0 * budget / margin) * 1.05;
  out.sigma_tilde = metric.blended({out.lambda, s1, s2, s3, s4});

  const std::vector<double> du = discrete_gradient(out.u_tilde);
  const std::vector<double> wt = node_factors(out.u_tilde, out.sigma_tilde);
  std::size_t worst_node = 0;
  for (std::size_t i = 0; i < du.size(); ++i) {
    const double g = std::abs(du[i]) / wt[i];
    if (g > out.lipschitz) {
      out.lipschitz = g;
      worst_node = i;
    }
  }
  if (out.lipschitz > (1.0 - eps) * (1.0 + 1e-12)) {
    throw NumericError(fmt::format("interpolated data has |grad u| = {} > 1 - eps = {} at r = {}",
                                   out.lipschitz, 1.0 - eps, u0.nodes[worst_node]));
  }
  return out;
}

}  // namespace smcf
