#include <doctest.h>

#include <cmath>
#include <random>

#include "smcf/cutoff.hpp"
#include "smcf/errors.hpp"
#include "smcf/field.hpp"
#include "smcf/initial_data.hpp"

using namespace smcf;

namespace {

// W^2 of the blended metric, written out independently of RadialMetric.
double blended_w2(double a, double tau, double lambda, double s1, double s2, double s3, double s4,
                  double r) {
  auto step = [](double lo, double hi, double x) {
    if (x <= lo) return 1.0;
    if (x >= hi) return 0.0;
    const double s = (x - lo) / (hi - lo);
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
  };
  const double w = 1.0 + a * std::pow(r, -tau);
  const double p1 = step(s1, s2, r);
  const double p3 = step(s3, s4, r);
  return p3 * (p1 + (1.0 - p1) * lambda) * w * w + 1.0 - p3;
}

Field radial_field(double lo, double hi, double h) {
  return make_field(FieldKind::radial, lo, hi, h,
                    lo == 0.0 ? BoundaryCondition::axis_symmetry : BoundaryCondition::reflecting,
                    BoundaryCondition::dirichlet_zero);
}

}  // namespace

TEST_CASE("smooth cutoff values and derivative bound") {
  CHECK(smooth_cutoff(1.0, 2.0, 0.5) == 1.0);
  CHECK(smooth_cutoff(1.0, 2.0, 1.0) == 1.0);
  CHECK(smooth_cutoff(1.0, 2.0, 1.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(smooth_cutoff(1.0, 2.0, 2.0) == 0.0);
  CHECK(smooth_cutoff(1.0, 2.0, 3.0) == 0.0);
  CHECK_THROWS_AS(smooth_cutoff(2.0, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(smooth_cutoff(3.0, 2.0, 1.0), DomainError);

  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = 1.0 + 3.0 * i / 1000.0;
    const CutoffJet j = smooth_cutoff_jet(1.0, 4.0, x);
    worst = std::max(worst, std::abs(j.d1));
    CHECK(j.value >= 0.0);
    CHECK(j.value <= 1.0);
  }
  CHECK(worst <= 2.0 / 3.0);
  CHECK(worst == doctest::Approx(1.875 / 3.0).epsilon(1e-6));
}

TEST_CASE("smooth cutoff derivatives match finite differences and are C2") {
  const double step = 1e-5;
  for (double x : {1.1, 1.5, 2.3, 3.9}) {
    const CutoffJet j = smooth_cutoff_jet(1.0, 4.0, x);
    const double fd1 = (smooth_cutoff(1.0, 4.0, x + step) - smooth_cutoff(1.0, 4.0, x - step)) / (2 * step);
    const double fd2 = (smooth_cutoff_jet(1.0, 4.0, x + step).d1 - smooth_cutoff_jet(1.0, 4.0, x - step).d1) /
                       (2 * step);
    CHECK(std::abs(j.d1 - fd1) < 1e-8);
    CHECK(std::abs(j.d2 - fd2) < 1e-8);
  }
  for (double edge : {1.0, 4.0}) {
    const CutoffJet a = smooth_cutoff_jet(1.0, 4.0, edge - 1e-9);
    const CutoffJet b = smooth_cutoff_jet(1.0, 4.0, edge + 1e-9);
    CHECK(std::abs(a.d1 - b.d1) < 1e-12);
    CHECK(std::abs(a.d2 - b.d2) < 1e-7);
  }
}

TEST_CASE("field construction and validation") {
  Field f = make_field(FieldKind::line, -1.0, 1.0, 0.5, BoundaryCondition::dirichlet_zero,
                       BoundaryCondition::dirichlet_zero);
  CHECK(f.size() == 5);
  CHECK(f.nodes.back() == 1.0);
  CHECK_THROWS_AS(make_field(FieldKind::line, 0.0, 1.0, 0.3, BoundaryCondition::dirichlet_zero,
                             BoundaryCondition::dirichlet_zero),
                  DomainError);
  CHECK_THROWS_AS(make_field(FieldKind::line, 0.0, 1.0, 0.25, BoundaryCondition::axis_symmetry,
                             BoundaryCondition::dirichlet_zero),
                  DomainError);
  CHECK_THROWS_AS(make_field(FieldKind::radial, 0.0, 1.0, 0.25, BoundaryCondition::dirichlet_zero,
                             BoundaryCondition::dirichlet_zero),
                  DomainError);
  Field g = f;
  g.nodes[2] += 1e-3;
  CHECK_THROWS_AS(validate_field(g), DomainError);
  g = f;
  g.values.pop_back();
  CHECK_THROWS_AS(validate_field(g), DomainError);
  for (auto bc : {BoundaryCondition::dirichlet_zero, BoundaryCondition::asymptotic_decay,
                  BoundaryCondition::axis_symmetry, BoundaryCondition::reflecting}) {
    CHECK(parse_boundary(to_string(bc)) == bc);
  }
}

TEST_CASE("discrete gradient is second order") {
  Field f = radial_field(0.0, 2.0, 0.01);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = std::cos(f.nodes[i]);
  const auto du = discrete_gradient(f);
  CHECK(du.front() == 0.0);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(du[i] + std::sin(f.nodes[i])));
  CHECK(err < 1e-4);
}

TEST_CASE("Lipschitz constant in sigma") {
  Field f = make_field(FieldKind::line, -5.0, 5.0, 0.1, BoundaryCondition::dirichlet_zero,
                       BoundaryCondition::dirichlet_zero);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = 0.5 * f.nodes[i];
  CHECK(lipschitz_constant(RadialMetric::euclidean(1), f) == doctest::Approx(0.5).epsilon(1e-12));

  const auto m = RadialMetric::conformal_power(3, 1.0, 1.0);
  Field g = radial_field(1.0, 10.0, 0.1);
  for (std::size_t i = 0; i < g.size(); ++i) g.values[i] = 0.5 * g.nodes[i];
  CHECK(lipschitz_constant(m, g) == doctest::Approx(0.5 / 1.1).epsilon(1e-12));
}

TEST_CASE("decay radius") {
  Field f = radial_field(0.0, 10.0, 0.5);
  sample_profile(bump_profile(1.0, 3.0), f);
  const double R = decay_radius(f, 1e-3);
  CHECK(R == 3.0);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f.nodes[i] >= R) CHECK(std::abs(f.values[i]) <= 1e-3);

  Field z = radial_field(0.0, 10.0, 0.5);
  CHECK(decay_radius(z, 1e-3) == 0.0);

  Field g = radial_field(0.0, 10.0, 0.5);
  sample_profile(gaussian_profile(1.0, 10.0), g);
  CHECK_THROWS_AS(decay_radius(g, 1e-3), DomainError);
  CHECK_THROWS_AS(decay_radius(f, 0.0), DomainError);
}

TEST_CASE("interpolation: compactly supported bump inside R1") {
  const auto m = RadialMetric::conformal_power(3, 0.5, 1.0);
  Field u0 = radial_field(1.0, 30.0, 0.05);
  sample_profile(bump_profile(1.0, 4.0), u0);
  REQUIRE(lipschitz_constant(m, u0) <= 0.5);
  const auto res = interpolate_initial_data(m, u0, 10.0, 20.0, 0.5);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    const double r = u0.nodes[i];
    if (r <= 10.0) {
      CHECK(res.u_tilde.values[i] == u0.values[i]);
      CHECK(res.sigma_tilde.factor(r).w == m.factor(r).w);
    }
    if (r >= 20.0) {
      CHECK(res.u_tilde.values[i] == 0.0);
      const ConformalJet j = res.sigma_tilde.factor(r);
      CHECK(j.w == 1.0);
      CHECK(j.dw == 0.0);
    }
  }
  CHECK(res.lipschitz <= 0.5);
  CHECK(res.lambda == doctest::Approx(1.05));
}

TEST_CASE("interpolation: blended factor and margin against independent oracle") {
  const auto m = RadialMetric::conformal_power(3, 0.5, 1.0);
  Field u0 = radial_field(1.0, 41.0, 0.02);
  sample_profile(gaussian_profile(4.0, 12.0), u0);
  const double eps = 0.5;
  const auto res = interpolate_initial_data(m, u0, 10.0, 20.0, eps);
  CHECK(res.lambda > 1.05);
  const auto du = discrete_gradient(res.u_tilde);
  double worst = 0.0;
  for (std::size_t i = 1; i < u0.size(); ++i) {
    const double r = u0.nodes[i];
    const double w2 = blended_w2(0.5, 1.0, res.lambda, 10.0, 10.0 + 10.0 / 3.0, 10.0 + 20.0 / 3.0, 20.0, r);
    CHECK(res.sigma_tilde.factor(r).w == doctest::Approx(std::sqrt(w2)).epsilon(1e-13));
    worst = std::max(worst, std::abs(du[i]) / std::sqrt(w2));
  }
  CHECK(worst <= 1.0 - eps);
  CHECK(worst == doctest::Approx(res.lipschitz).epsilon(1e-12));
}

TEST_CASE("interpolation properties on randomized bumps") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double R1 = 10.0, R2 = 20.0;
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double eps = std::array{0.1, 0.3, 0.5}[static_cast<std::size_t>(trial % 3)];
    const auto m = RadialMetric::conformal_power(3, 0.2 + 0.8 * u(rng), 0.5 + u(rng));
    const double width = 2.0 + 10.0 * u(rng);
    const double center = 18.0 * u(rng);
    // the bump's steepest slope is 8 H 0.2384/width; keep it below (1 - eps)
    const double height = (0.1 + 0.85 * u(rng)) * (1.0 - eps) * width / (8.0 * 0.2384);
    Field u0 = radial_field(1.0, 41.0, 0.02);
    sample_profile(bump_profile(height, width, center), u0);
    if (lipschitz_constant(m, u0) > 1.0 - eps) continue;
    ++checked;
    const auto res = interpolate_initial_data(m, u0, R1, R2, eps);
    CHECK(res.lipschitz <= (1.0 - eps) * (1.0 + 1e-12));
    CHECK(lipschitz_constant(res.sigma_tilde, res.u_tilde) == doctest::Approx(res.lipschitz).epsilon(1e-14));
    for (std::size_t i = 0; i < u0.size(); ++i) {
      // damping without sign change
      CHECK(std::abs(res.u_tilde.values[i]) <= std::abs(u0.values[i]));
      CHECK(res.u_tilde.values[i] * u0.values[i] >= 0.0);
    }
    // idempotent on data that already vanishes beyond R1
    const auto again = interpolate_initial_data(res.sigma_tilde, res.u_tilde, R2 + 1.0, R2 + 5.0, eps);
    for (std::size_t i = 0; i < u0.size(); ++i) CHECK(again.u_tilde.values[i] == res.u_tilde.values[i]);
  }
  CHECK(checked >= 40);
}

TEST_CASE("interpolation rejects bad input") {
  const auto m = RadialMetric::conformal_power(3, 0.5, 1.0);
  Field u0 = radial_field(1.0, 30.0, 0.05);
  sample_profile(bump_profile(1.0, 4.0), u0);
  CHECK_THROWS_AS(interpolate_initial_data(m, u0, 20.0, 10.0, 0.5), DomainError);
  CHECK_THROWS_AS(interpolate_initial_data(m, u0, 10.0, 20.0, 1.0), DomainError);
  CHECK_THROWS_AS(interpolate_initial_data(m, u0, 10.0, 20.0, 0.9), DomainError);
  Field line = make_field(FieldKind::line, -1.0, 1.0, 0.5, BoundaryCondition::dirichlet_zero,
                          BoundaryCondition::dirichlet_zero);
  CHECK_THROWS_AS(interpolate_initial_data(m, line, 10.0, 20.0, 0.5), DomainError);
}

TEST_CASE("profile families") {
  const auto b = bump_profile(2.0, 4.0, 1.0);
  CHECK(b.value(1.0) == 2.0);
  CHECK(b.value(5.0) == 0.0);
  CHECK(b.support_radius() == 5.0);
  const double step = 1e-6;
  for (const auto& p : {b, gaussian_profile(1.0, 3.0)}) {
    for (double x : {-2.0, 0.3, 2.7}) {
      CHECK(std::abs(p.slope(x) - (p.value(x + step) - p.value(x - step)) / (2 * step)) < 1e-8);
    }
  }
  InitialProfile pt;
  pt.family = ProfileFamily::power_tail;
  pt.height = 1.0;
  pt.width = 1.0;
  pt.exponent = 0.5;
  CHECK(pt.value(std::sqrt(15.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(parse_profile_family("gaussian") == ProfileFamily::gaussian);
  CHECK_THROWS_AS(parse_profile_family("sinc"), DomainError);
}
