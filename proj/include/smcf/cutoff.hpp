#pragma once

namespace smcf {

/// Value and first two derivatives of a cutoff in its argument.
struct CutoffJet {
  double value;
  double d1;
  double d2;
};

/// Quintic smoothstep cutoff: 1 for x <= lo, 0 for x >= hi, C^2 in between.
/// |d psi/dx| <= 1.875/(hi - lo). Throws DomainError if lo >= hi.
double smooth_cutoff(double lo, double hi, double x);
CutoffJet smooth_cutoff_jet(double lo, double hi, double x);

}  // namespace smcf
