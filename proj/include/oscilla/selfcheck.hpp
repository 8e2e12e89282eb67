#pragma once

#include <string>
#include <vector>

namespace oscilla {

// Self-verification suite: every check is a measurable statement about the
// pipeline (degenerate limits, exact identities, compatibility integrals,
// convergence rates) evaluated at desk scale with pinned tolerances.
struct CheckOptions {
  int jobs = 0;             // 0 = hardware concurrency (sweep rows)
  bool quick = false;       // reduced sweep resolution for a fast smoke run
  bool perturb_q0_identity = false;  // test hook: must make the q0 check fail
  std::string filter;       // run only checks whose name contains this
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<CheckResult> run_all_checks(const CheckOptions& opts = {});

// convenience: run, print one line per check to stdout, return pass count
bool run_and_print_checks(const CheckOptions& opts = {});

}  // namespace oscilla
