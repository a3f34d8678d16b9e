#include <doctest.h>

#include "smcf/errors.hpp"
#include "smcf/verify.hpp"

using namespace smcf;

namespace {

VerifySweep small_sweep() {
  VerifySweep s;
  s.radii = 50;
  s.random_points = 500;
  return s;
}

}  // namespace

TEST_CASE("identity suite passes on the default sweep") {
  const auto results = run_identity_suite(VerifySweep{}, 1);
  CHECK(results.size() == identity_names().size());
  for (const auto& r : results) {
    CAPTURE(r.name);
    CHECK(r.pass);
  }
}

TEST_CASE("each injected fault is caught by its own identity only") {
  for (const auto& name : identity_names()) {
    const auto results = run_identity_suite(small_sweep(), 1, name);
    for (const auto& r : results) {
      CAPTURE(name);
      CAPTURE(r.name);
      CHECK(r.pass == (r.name != name));
    }
  }
}

TEST_CASE("suite is reproducible for a fixed seed") {
  const auto a = run_identity_suite(small_sweep(), 42);
  const auto b = run_identity_suite(small_sweep(), 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].worst == b[i].worst);
}

TEST_CASE("empty sweeps are rejected") {
  VerifySweep s;
  s.dims.clear();
  CHECK_THROWS_AS(validate_sweep(s), DomainError);
  s = VerifySweep{};
  s.random_points = 0;
  CHECK_THROWS_AS(validate_sweep(s), DomainError);
  CHECK_THROWS_AS(run_identity_suite(VerifySweep{}, 1, "no_such_identity"), DomainError);
}
