#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "smcf/geometry.hpp"

namespace smcf {

enum class FieldKind { line, radial };

enum class BoundaryCondition {
  dirichlet_zero,
  asymptotic_decay,  // u' = -(n-2) u / r (radial, n >= 3); Neumann otherwise
  axis_symmetry,     // even reflection at r = 0
  reflecting,        // Neumann at an interior radius r_in > 0
};

std::string_view to_string(FieldKind kind);
std::string_view to_string(BoundaryCondition bc);
FieldKind parse_field_kind(std::string_view s);
BoundaryCondition parse_boundary(std::string_view s);

/// Samples of u on a uniform grid.
struct Field {
  FieldKind kind = FieldKind::line;
  std::vector<double> nodes;
  std::vector<double> values;
  double h = 0.0;
  BoundaryCondition left = BoundaryCondition::dirichlet_zero;
  BoundaryCondition right = BoundaryCondition::dirichlet_zero;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Zero field on [lo, hi]; (hi - lo)/h must be an integer to 1e-9.
Field make_field(FieldKind kind, double lo, double hi, double h, BoundaryCondition left,
                 BoundaryCondition right);

/// Throws DomainError on ragged sizes, non-uniform spacing or misplaced
/// boundary tags.
void validate_field(const Field& f);

/// Discrete u' at every node: central in the interior, zero at symmetric
/// ends, one-sided second order at other ends.
std::vector<double> discrete_gradient(const Field& f);

/// Conformal factor w at every node (1 for flat metrics).
std::vector<double> node_factors(const Field& f, const RadialMetric& metric);

/// max |u_{i+1} - u_i| / (h w) over cells, with w at the cell midpoint.
double max_cell_slope(const Field& f, const RadialMetric& metric);

}  // namespace smcf
