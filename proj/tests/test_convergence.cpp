#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oscilla/convergence.hpp"

using namespace oscilla;

namespace {
SweepConfig small_config() {
  SweepConfig cfg;
  cfg.profile = BoundaryProfile::validated(1.0, {{1, 0.5, 0.0}}, 1);
  cfg.forcing = TrigPoly(0.0, {{1, 1.0, 0.0}});
  cfg.ladder = {4, 8, 16, 32};
  cfg.strip.ny_per_cell = 16;
  cfg.strip.nz = 8;
  cfg.refinement_check = false;
  cfg.jobs = 2;
  return cfg;
}
}  // namespace

TEST_CASE("rate fit recovers exact power laws") {
  const RateFit half = fit_rate({{0.25, 0.5}, {0.0625, 0.25}, {1.0 / 64, 0.125}});
  CHECK(half.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.residual <= 1e-12);

  const RateFit flat = fit_rate({{0.25, 0.7}, {0.125, 0.7}, {0.0625, 0.7}});
  CHECK(flat.slope == doctest::Approx(0.0).epsilon(1e-12));

  const RateFit synth =
      fit_rate({{0.5, 3 * std::pow(0.5, 0.5)},
                {0.25, 3 * std::pow(0.25, 0.5)},
                {0.125, 3 * std::pow(0.125, 0.5)},
                {0.0625, 3 * std::pow(0.0625, 0.5)}});
  CHECK(synth.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::exp(synth.intercept) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("rate fit rejects degenerate inputs") {
  try {
    fit_rate({{0.25, 0.5}, {0.125, 0.0}, {0.0625, 0.1}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateFit);
  }
  try {
    fit_rate({{0.25, 0.5}, {0.125, 0.4}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateFit);
  }
  try {
    fit_rate({{0.25, 0.5}, {0.25, 0.4}, {0.25, 0.3}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateFit);
  }
}

TEST_CASE("ladder validation") {
  SweepConfig cfg = small_config();
  cfg.ladder = {4, 8};
  CHECK_THROWS_AS(run_sweep(cfg), Error);
  cfg.ladder = {8, 4, 16};
  CHECK_THROWS_AS(run_sweep(cfg), Error);
  cfg.ladder = {4, 8, 16};
  cfg.strip.ny_per_cell = 7;  // matched meshes need an even per-cell count
  CHECK_THROWS_AS(run_sweep(cfg), Error);
}

TEST_CASE("sweep rows decay and carry valid metadata") {
  const ConvergenceReport report = run_sweep(small_config());
  REQUIRE(report.rows.size() == 4);
  CHECK(!report.any_failed);
  CHECK(report.rates_valid);
  CHECK(report.q0 > 0.0);
  CHECK(report.q0 < 1.0);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const SweepRow& row = report.rows[i];
    CHECK(row.e0 > 0.0);
    CHECK(row.e1 > 0.0);
    CHECK(row.e2 > 0.0);
    CHECK(row.residual <= 1e-10);
    CHECK(row.e2 <= 1.1 * row.e1);
    if (i > 0) {
      CHECK(row.e0 < report.rows[i - 1].e0);
      CHECK(row.e1 < report.rows[i - 1].e1);
    }
  }
  CHECK(report.p1.slope >= 0.45);
  CHECK(!report.config_hash.empty());
}

TEST_CASE("weak limit check passes on a healthy sweep and rejects garbage") {
  const ConvergenceReport report = run_sweep(small_config());
  const WeakLimitReport w = weak_limit_check(report);
  CHECK(w.e0_monotone);
  CHECK(w.e1_monotone);
  CHECK(w.e1_halved);

  ConvergenceReport bad = report;
  bad.rows[2].e1 = 2.0 * bad.rows[1].e1;
  try {
    weak_limit_check(bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonDecreasingError);
  }

  ConvergenceReport tiny;
  tiny.rows.resize(1);
  CHECK_THROWS_AS(weak_limit_check(tiny), Error);
}

TEST_CASE("flat-profile sweep: e1 reduces to the plain H1 distance and decays") {
  SweepConfig cfg = small_config();
  cfg.profile = BoundaryProfile::validated(1.0, {}, 1);
  const ConvergenceReport report = run_sweep(cfg);
  CHECK(!report.any_failed);
  CHECK(report.q0 == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    CHECK(report.rows[i].e1 < report.rows[i - 1].e1);
  }
  CHECK(report.p1.slope >= 0.45);
  // X = Theta = 0, so both truncations coincide with w0
  for (const SweepRow& row : report.rows) {
    CHECK(row.e2 == doctest::Approx(row.e1).epsilon(1e-12));
  }
  CHECK_NOTHROW(weak_limit_check(report));
}

TEST_CASE("identical configs give bitwise-identical reports across jobs") {
  SweepConfig cfg = small_config();
  cfg.ladder = {4, 8, 16};
  cfg.jobs = 1;
  const ConvergenceReport a = run_sweep(cfg);
  cfg.jobs = 3;
  const ConvergenceReport b = run_sweep(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].e0 == b.rows[i].e0);
    CHECK(a.rows[i].e1 == b.rows[i].e1);
    CHECK(a.rows[i].e2 == b.rows[i].e2);
    CHECK(a.rows[i].dofs == b.rows[i].dofs);
    CHECK(a.rows[i].residual == b.rows[i].residual);
  }
  CHECK(a.config_hash == b.config_hash);
}

TEST_CASE("csv output has the documented columns and 9 significant digits") {
  SweepConfig cfg = small_config();
  cfg.ladder = {4, 8, 16};
  const ConvergenceReport report = run_sweep(cfg);
  std::ostringstream os;
  write_csv(report, os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "eps,dofs,e0,e1,e2,residual,seconds");
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 3);
  CHECK(os.str().find("0.25") != std::string::npos);
}

TEST_CASE("gnuplot artifacts reference the data file and slopes") {
  SweepConfig cfg = small_config();
  cfg.ladder = {4, 8, 16};
  const ConvergenceReport report = run_sweep(cfg);
  std::ostringstream dat, plt;
  write_gnuplot_data(report, dat);
  write_gnuplot_script(report, "run.dat", plt);
  CHECK(dat.str().find("# eps e0 e1 e2") != std::string::npos);
  CHECK(plt.str().find("set logscale xy") != std::string::npos);
  CHECK(plt.str().find("run.dat") != std::string::npos);
}

TEST_CASE("config hash is stable under irrelevant changes only") {
  SweepConfig a = small_config();
  SweepConfig b = a;
  b.jobs = 7;  // execution detail, not part of the fingerprint
  CHECK(sweep_config_hash(a) == sweep_config_hash(b));
  b.strip.ny_per_cell *= 2;
  CHECK(sweep_config_hash(a) != sweep_config_hash(b));
}

TEST_CASE("refinement check runs and records fine values") {
  SweepConfig cfg = small_config();
  cfg.ladder = {4, 8, 16};
  cfg.refinement_check = true;
  const ConvergenceReport report = run_sweep(cfg);
  for (const SweepRow& row : report.rows) {
    CHECK(row.has_fine);
    CHECK(row.e1_fine > 0.0);
  }
  // e1 is stable under halving at matched resolutions
  for (const SweepRow& row : report.rows) {
    CHECK(std::abs(row.e1_fine - row.e1) <= 0.05 * row.e1);
  }
}
