#include "smcf/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "smcf/errors.hpp"

namespace smcf {

std::string_view to_string(FieldKind kind) {
  return kind == FieldKind::line ? "line" : "radial";
}

std::string_view to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::dirichlet_zero: return "dirichlet_zero";
    case BoundaryCondition::asymptotic_decay: return "asymptotic_decay";
    case BoundaryCondition::axis_symmetry: return "axis_symmetry";
    case BoundaryCondition::reflecting: return "reflecting";
  }
  return "?";
}

FieldKind parse_field_kind(std::string_view s) {
  if (s == "line") return FieldKind::line;
  if (s == "radial") return FieldKind::radial;
  throw DomainError(fmt::format("unknown field kind '{}'", s));
}

BoundaryCondition parse_boundary(std::string_view s) {
  for (auto bc : {BoundaryCondition::dirichlet_zero, BoundaryCondition::asymptotic_decay,
                  BoundaryCondition::axis_symmetry, BoundaryCondition::reflecting}) {
    if (s == to_string(bc)) return bc;
  }
  throw DomainError(fmt::format("unknown boundary condition '{}'", s));
}

Field make_field(FieldKind kind, double lo, double hi, double h, BoundaryCondition left,
                 BoundaryCondition right) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(h > 0.0) || !(hi > lo)) {
    throw DomainError("field grid needs finite lo < hi and h > 0");
  }
  const double cells = (hi - lo) / h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
    throw DomainError(fmt::format("interval length {} is not a multiple of h = {}", hi - lo, h));
  }
  const auto count = static_cast<std::size_t>(rounded) + 1;
  Field f;
  f.kind = kind;
  f.h = h;
  f.left = left;
  f.right = right;
  f.nodes.resize(count);
  for (std::size_t i = 0; i < count; ++i) f.nodes[i] = lo + static_cast<double>(i) * h;
  f.nodes.back() = hi;
  f.values.assign(count, 0.0);
  validate_field(f);
  return f;
}

void validate_field(const Field& f) {
  if (f.nodes.size() < 3) throw DomainError("field needs at least 3 nodes");
  if (f.values.size() != f.nodes.size()) throw DomainError("field nodes and values differ in length");
  if (!(f.h > 0.0)) throw DomainError("field spacing must be positive");
  for (std::size_t i = 0; i < f.nodes.size(); ++i) {
    const double expect = f.nodes[0] + static_cast<double>(i) * f.h;
    if (std::abs(f.nodes[i] - expect) > 1e-12 * std::max(f.h, std::abs(expect))) {
      throw DomainError(fmt::format("non-uniform spacing at node {}", i));
    }
    if (!std::isfinite(f.values[i])) throw DomainError(fmt::format("non-finite value at node {}", i));
  }
  if (f.kind == FieldKind::radial && f.nodes[0] < 0.0) throw DomainError("radial nodes must be >= 0");
  if (f.left == BoundaryCondition::axis_symmetry &&
      (f.kind != FieldKind::radial || f.nodes[0] != 0.0)) {
    throw DomainError("axis_symmetry needs a radial field starting at r = 0");
  }
  if (f.right == BoundaryCondition::axis_symmetry) throw DomainError("axis_symmetry is a left-end condition");
  if (f.kind == FieldKind::radial && f.nodes[0] == 0.0 && f.left != BoundaryCondition::axis_symmetry) {
    throw DomainError("a radial field starting at r = 0 needs axis_symmetry");
  }
}

namespace {

bool is_symmetric_end(BoundaryCondition bc) {
  return bc == BoundaryCondition::axis_symmetry || bc == BoundaryCondition::reflecting;
}

}  // namespace

std::vector<double> discrete_gradient(const Field& f) {
  const std::size_t n = f.size();
  const auto& u = f.values;
  std::vector<double> du(n);
  for (std::size_t i = 1; i + 1 < n; ++i) du[i] = (u[i + 1] - u[i - 1]) / (2.0 * f.h);
  du[0] = is_symmetric_end(f.left) ? 0.0 : (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * f.h);
  du[n - 1] = is_symmetric_end(f.right)
                  ? 0.0
                  : (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * f.h);
  return du;
}

std::vector<double> node_factors(const Field& f, const RadialMetric& metric) {
  std::vector<double> w(f.size(), 1.0);
  if (metric.is_flat()) return w;
  for (std::size_t i = 0; i < f.size(); ++i) w[i] = metric.factor(std::abs(f.nodes[i])).w;
  return w;
}

double max_cell_slope(const Field& f, const RadialMetric& metric) {
  double worst = 0.0;
  const bool flat = metric.is_flat();
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double w = flat ? 1.0 : metric.factor(std::abs(0.5 * (f.nodes[i] + f.nodes[i + 1]))).w;
    worst = std::max(worst, std::abs(f.values[i + 1] - f.values[i]) / (f.h * w));
  }
  return worst;
}

}  // namespace smcf
