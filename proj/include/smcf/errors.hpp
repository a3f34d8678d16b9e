#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace smcf {

/// Input outside the domain where an evaluator is defined (radius below
/// r_min, non-finite coordinates, invalid parameters).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A gradient reached the light cone: |grad u|_sigma^2 >= 1 - tol_spacelike.
class SpacelikeViolation : public std::runtime_error {
 public:
  SpacelikeViolation(const std::string& what, double squared_norm)
      : std::runtime_error(what), squared_norm_(squared_norm) {}

  double squared_norm() const noexcept { return squared_norm_; }

 private:
  double squared_norm_;
};

/// Quadrature, root search or construction loop did not converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few samples for a fit or a check.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario configuration is malformed; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace smcf
