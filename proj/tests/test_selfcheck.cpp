#include <doctest.h>

#include "oscilla/selfcheck.hpp"

using namespace oscilla;

TEST_CASE("q0 identity check fails under the perturbation hook") {
  CheckOptions opts;
  opts.filter = "q0-range";
  opts.perturb_q0_identity = true;
  const std::vector<CheckResult> perturbed = run_all_checks(opts);
  REQUIRE(perturbed.size() == 1);
  CHECK(perturbed[0].name == "q0-range-and-identity");
  CHECK(!perturbed[0].pass);

  opts.perturb_q0_identity = false;
  const std::vector<CheckResult> clean = run_all_checks(opts);
  REQUIRE(clean.size() == 1);
  CHECK(clean[0].pass);
}

TEST_CASE("check filter selects by name") {
  CheckOptions opts;
  opts.filter = "homogenized";
  const std::vector<CheckResult> r = run_all_checks(opts);
  REQUIRE(r.size() == 1);
  CHECK(r[0].name == "homogenized-exactness");
  CHECK(r[0].pass);
}
