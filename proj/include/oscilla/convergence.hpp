#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "oscilla/correctors.hpp"
#include "oscilla/strip_solver.hpp"

namespace oscilla {

// Sweep over the epsilon ladder. The corrector source fields (X, Theta) and
// the q0 feeding w0 come from a cell mesh matched to the strip's per-cell
// lattice by default (cell_ny = ny_per_cell, cell_nz = nz, requires even
// ny_per_cell): the strip restricted to one oscillation cell then reproduces
// the cell mesh exactly, the shared P1 interpolation error cancels in
// w_eps - W_k, and the measured errors track the two-scale signal instead of
// an eps-independent representation floor. Set cell_ny/cell_nz explicitly to
// decouple the meshes.
struct SweepConfig {
  BoundaryProfile profile;
  TrigPoly forcing;
  std::vector<int> ladder = {4, 8, 16, 32};  // m values, eps = 1/m, decreasing eps
  int cell_ny = 0;  // 0: matched to strip.ny_per_cell
  int cell_nz = 0;  // 0: matched to strip.nz
  StripMeshParams strip{64, 32};  // per-cell resolution, eps-independent
  double tol = 1e-10;
  bool refinement_check = true;  // rerun rows at halved h and compare
  int jobs = 0;                  // 0 = hardware concurrency
};

struct SweepRow {
  int m = 0;
  double eps = 0.0;
  std::size_t dofs = 0;
  double e0 = 0.0;  // ||| w_eps - w0 |||_L2
  double e1 = 0.0;  // ||| w_eps - W1 |||_H1
  double e2 = 0.0;  // ||| w_eps - W2 |||_H1
  double residual = 0.0;
  double seconds = 0.0;
  bool has_fine = false;
  double e0_fine = 0.0, e1_fine = 0.0, e2_fine = 0.0;
  bool mesh_limited = false;  // halving h moved some e_k by more than 20%
  bool failed = false;        // base-resolution task
  std::string error;
  bool fine_failed = false;   // halved-h task (kept separate: the two tasks
  std::string fine_error;     // run concurrently and touch disjoint fields)
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;   // log of the constant
  double residual = 0.0;    // rms misfit in log space
};

// least squares of log(error) against log(eps); error ~ C * eps^slope
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct ConvergenceReport {
  std::vector<SweepRow> rows;
  RateFit p0, p1, p2;
  bool rates_valid = false;
  bool mesh_limited = false;
  bool any_failed = false;
  double q0 = 1.0;
  double q0_energy = 1.0;
  int cell_ny = 0, cell_nz = 0;
  int strip_ny_per_cell = 0, strip_nz = 0;
  std::string config_hash;
};

ConvergenceReport run_sweep(const SweepConfig& config);

// Monotone-decay check backing the weak-convergence statement: e0 and e1
// decrease along the ladder (5% slack) and e1 at the smallest eps is at
// most half its value at the largest. Throws NonDecreasingError.
struct WeakLimitReport {
  bool e0_monotone = false;
  bool e1_monotone = false;
  bool e1_halved = false;
  double e1_first = 0.0;
  double e1_last = 0.0;
};
WeakLimitReport weak_limit_check(const ConvergenceReport& report);
WeakLimitReport weak_limit_check(const SweepConfig& config);

void write_csv(const ConvergenceReport& report, std::ostream& os);
void write_gnuplot_data(const ConvergenceReport& report, std::ostream& os);
void write_gnuplot_script(const ConvergenceReport& report,
                          const std::string& dat_name, std::ostream& os);

// FNV-1a fingerprint of the solver-relevant configuration
std::string sweep_config_hash(const SweepConfig& config);

}  // namespace oscilla
