#pragma once

#include <string_view>
#include <vector>

#include "smcf/cutoff.hpp"
#include "smcf/field.hpp"
#include "smcf/geometry.hpp"

namespace smcf {

enum class ProfileFamily {
  zero,
  bump,        // height (1 - s^2)^4 for |s| < 1, s = (x - center)/width
  gaussian,    // height exp(-s^2)
  power_tail,  // height (1 + s^2)^{-exponent/2}
  tabulated,   // piecewise linear through (table_x, table_u), zero outside
};

std::string_view to_string(ProfileFamily family);
ProfileFamily parse_profile_family(std::string_view s);

struct InitialProfile {
  ProfileFamily family = ProfileFamily::zero;
  double height = 0.0;
  double width = 1.0;
  double center = 0.0;
  double exponent = 0.5;
  std::vector<double> table_x;
  std::vector<double> table_u;

  double value(double x) const;
  /// Closed-form derivative (one-sided slope of the segment for tables).
  double slope(double x) const;
  /// Radius outside which the profile vanishes; +inf for non-compact families.
  double support_radius() const;
};

InitialProfile bump_profile(double height, double width, double center = 0.0);
InitialProfile gaussian_profile(double height, double width, double center = 0.0);

/// Writes profile.value at every node of f.
void sample_profile(const InitialProfile& profile, Field& f);

/// sup over nodes of |u'|/w, with u' from discrete_gradient.
double lipschitz_constant(const RadialMetric& metric, const Field& f);

/// Smallest node radius beyond which |u| <= eps at every node; the inner
/// edge when nothing exceeds eps. Throws DomainError if the outermost node
/// exceeds eps.
double decay_radius(const Field& u0, double eps);

struct InterpolationResult {
  RadialMetric sigma_tilde;
  Field u_tilde;
  double lambda;
  double s1, s2, s3, s4;
  double eps;
  double lipschitz;  // discrete sup |grad u_tilde| in sigma_tilde
};

/// Blends (sigma, u0) near r <= R1 into (delta, 0) for r >= R2 while keeping
/// |grad u_tilde| <= 1 - eps. Throws NumericError naming the worst node if the
/// discrete check fails.
InterpolationResult interpolate_initial_data(const RadialMetric& metric, const Field& u0, double R1,
                                             double R2, double eps);

}  // namespace smcf
