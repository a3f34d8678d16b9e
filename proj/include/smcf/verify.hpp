#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace smcf {

struct VerifySweep {
  std::vector<int> dims{3, 4, 5};
  std::vector<double> c_values{0.5, 1.0, 2.0};
  std::vector<double> r0_values{0.5, 2.0};
  double r_lo = 0.1;
  double r_hi = 100.0;
  int radii = 400;
  std::vector<double> mu_values{0.1, 0.5, 0.9};
  std::vector<double> t0_values{-2.0, -10.0, -100.0};
  double alpha = 0.5;
  int random_points = 10000;
};

struct IdentityResult {
  std::string name;
  double worst;      // worst deviation, or worst margin for inequalities
  double tolerance;
  bool pass;
  std::string detail;
};

/// Throws DomainError when a list is empty or a count is < 1.
void validate_sweep(const VerifySweep& sweep);

/// Closed-form identity and certificate suite. `fault` names one identity
/// whose evaluated operator is sign-flipped (for exercising the failure path).
std::vector<IdentityResult> run_identity_suite(const VerifySweep& sweep, std::uint64_t seed,
                                               const std::string& fault = "");

std::vector<std::string> identity_names();

void to_json(nlohmann::json& j, const IdentityResult& r);

}  // namespace smcf
