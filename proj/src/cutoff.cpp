#include "smcf/cutoff.hpp"

#include <cmath>

#include "smcf/errors.hpp"

namespace smcf {

CutoffJet smooth_cutoff_jet(double lo, double hi, double x) {
  if (!(lo < hi)) throw DomainError("cutoff needs lo < hi");
  if (!std::isfinite(x)) throw DomainError("cutoff argument is not finite");
  if (x <= lo) return {1.0, 0.0, 0.0};
  if (x >= hi) return {0.0, 0.0, 0.0};
  const double len = hi - lo;
  const double s = (x - lo) / len;
  const double s2 = s * s;
  // 1 - (6s^5 - 15s^4 + 10s^3)
  const double value = 1.0 - s2 * s * (10.0 + s * (-15.0 + 6.0 * s));
  const double d1 = -30.0 * s2 * (1.0 - s) * (1.0 - s) / len;
  const double d2 = -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (len * len);
  return {value, d1, d2};
}

double smooth_cutoff(double lo, double hi, double x) { return smooth_cutoff_jet(lo, hi, x).value; }

}  // namespace smcf
