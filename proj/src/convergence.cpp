#include "oscilla/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include "oscilla/trig_poly.hpp"

namespace oscilla {

namespace {

struct RowResult {
  std::size_t dofs = 0;
  double e0 = 0.0, e1 = 0.0, e2 = 0.0;
  double residual = 0.0;
  double seconds = 0.0;
};

RowResult run_row(const SweepConfig& cfg, const CellSolution& cell,
                  const TrigPoly& w0, int m, const StripMeshParams& strip) {
  const auto t_start = std::chrono::steady_clock::now();
  const EpsilonValue eps(m);
  auto mesh = std::make_shared<TriMesh>(build_strip_mesh(
      cfg.profile, eps, strip.ny_per_cell, strip.nz, strip.tri_cap));
  SolveOptions opts;
  opts.tol = cfg.tol;
  const StripSolution sol = solve_thin_on_mesh(mesh, cfg.forcing, opts);

  const Truncation w1(1, w0, cell, eps, cfg.profile);
  const Truncation w2(2, w0, cell, eps, cfg.profile);

  RowResult r;
  r.dofs = sol.dofs;
  r.residual = sol.solver_residual;
  r.e0 = norm_rescaled(*mesh, NormKind::L2,
                       sample_difference_1d(sol.field, w0));
  r.e1 = norm_rescaled(*mesh, NormKind::H1, sample_difference(sol.field, w1));
  r.e2 = norm_rescaled(*mesh, NormKind::H1, sample_difference(sol.field, w2));
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return r;
}

void validate_ladder(const std::vector<int>& ladder) {
  if (ladder.size() < 3) {
    throw Error(ErrorCode::Config,
                "epsilon ladder needs at least 3 points for a rate fit");
  }
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) {
      throw Error(ErrorCode::Config, "ladder entries must be positive m");
    }
    if (i > 0 && ladder[i] <= ladder[i - 1]) {
      throw Error(ErrorCode::Config,
                  "epsilon ladder must be strictly decreasing in eps");
    }
  }
}

}  // namespace

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::DegenerateFit, "rate fit needs at least 3 points");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(points.size());
  std::vector<double> lx(points.size()), ly(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [eps, err] = points[i];
    if (!(eps > 0.0) || !(err > 0.0)) {
      throw Error(ErrorCode::DegenerateFit,
                  "rate fit needs positive eps and errors");
    }
    lx[i] = std::log(eps);
    ly[i] = std::log(err);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const auto [lmin, lmax] = std::minmax_element(lx.begin(), lx.end());
  if (*lmax - *lmin <= 1e-12 * (1.0 + std::abs(*lmax))) {
    throw Error(ErrorCode::DegenerateFit, "all eps values coincide");
  }
  const double det = n * sxx - sx * sx;
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  double ss = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += d * d;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

ConvergenceReport run_sweep(const SweepConfig& cfg) {
  validate_ladder(cfg.ladder);
  if (!cfg.profile.is_validated()) {
    throw Error(ErrorCode::Config, "sweep needs a validated profile");
  }

  SolveOptions cell_opts;
  cell_opts.tol = cfg.tol;

  const bool matched = cfg.cell_ny <= 0 || cfg.cell_nz <= 0;
  const int cell_ny = cfg.cell_ny > 0 ? cfg.cell_ny : cfg.strip.ny_per_cell;
  const int cell_nz = cfg.cell_nz > 0 ? cfg.cell_nz : cfg.strip.nz;
  if (matched && cfg.strip.ny_per_cell % 2 != 0) {
    throw Error(ErrorCode::Config,
                "matched cell/strip meshes need an even ny_per_cell (the "
                "triangle diagonal pattern must repeat per cell)");
  }

  const CellSolution cell =
      solve_cell(cfg.profile, cell_ny, cell_nz, cell_opts, true);
  const TrigPoly w0 = solve_homogenized(cell.q0, cfg.forcing);

  CellSolution cell_fine;
  TrigPoly w0_fine;
  if (cfg.refinement_check) {
    cell_fine =
        solve_cell(cfg.profile, 2 * cell_ny, 2 * cell_nz, cell_opts, true);
    w0_fine = solve_homogenized(cell_fine.q0, cfg.forcing);
  }

  ConvergenceReport report;
  report.q0 = cell.q0;
  report.q0_energy = cell.q0_energy;
  report.cell_ny = cell_ny;
  report.cell_nz = cell_nz;
  report.strip_ny_per_cell = cfg.strip.ny_per_cell;
  report.strip_nz = cfg.strip.nz;
  report.config_hash = sweep_config_hash(cfg);
  report.rows.resize(cfg.ladder.size());

  struct Task {
    std::size_t row;
    bool fine;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
    report.rows[i].m = cfg.ladder[i];
    report.rows[i].eps = 1.0 / cfg.ladder[i];
    tasks.push_back({i, false});
    if (cfg.refinement_check) tasks.push_back({i, true});
  }

  StripMeshParams fine_strip = cfg.strip;
  fine_strip.ny_per_cell *= 2;
  fine_strip.nz *= 2;

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      const Task task = tasks[idx];
      SweepRow& row = report.rows[task.row];
      const int m = cfg.ladder[task.row];
      try {
        if (!task.fine) {
          const RowResult r = run_row(cfg, cell, w0, m, cfg.strip);
          row.dofs = r.dofs;
          row.e0 = r.e0;
          row.e1 = r.e1;
          row.e2 = r.e2;
          row.residual = r.residual;
          row.seconds = r.seconds;
        } else {
          const RowResult r = run_row(cfg, cell_fine, w0_fine, m, fine_strip);
          row.has_fine = true;
          row.e0_fine = r.e0;
          row.e1_fine = r.e1;
          row.e2_fine = r.e2;
        }
      } catch (const std::exception& e) {
        if (!task.fine) {
          row.failed = true;
          row.error = e.what();
        } else {
          row.fine_failed = true;
          row.fine_error = e.what();
        }
      }
    }
  };

  unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs)
                               : std::thread::hardware_concurrency();
  if (jobs < 1) jobs = 1;
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (SweepRow& row : report.rows) {
    report.any_failed = report.any_failed || row.failed || row.fine_failed;
    if (!row.failed && !row.fine_failed && row.has_fine) {
      auto moved = [](double base, double fine) {
        return base > 0.0 && std::abs(fine - base) > 0.2 * base;
      };
      row.mesh_limited = moved(row.e0, row.e0_fine) ||
                         moved(row.e1, row.e1_fine) ||
                         moved(row.e2, row.e2_fine);
      report.mesh_limited = report.mesh_limited || row.mesh_limited;
    }
  }

  if (!report.any_failed) {
    std::vector<std::pair<double, double>> p0, p1, p2;
    for (const SweepRow& row : report.rows) {
      p0.emplace_back(row.eps, row.e0);
      p1.emplace_back(row.eps, row.e1);
      p2.emplace_back(row.eps, row.e2);
    }
    try {
      report.p0 = fit_rate(p0);
      report.p1 = fit_rate(p1);
      report.p2 = fit_rate(p2);
      report.rates_valid = true;
    } catch (const Error&) {
      report.rates_valid = false;  // e.g. an exactly-zero error column
    }
  }
  return report;
}

WeakLimitReport weak_limit_check(const ConvergenceReport& report) {
  if (report.rows.size() < 3) {
    throw Error(ErrorCode::Config, "weak-limit check needs >= 3 ladder points");
  }
  WeakLimitReport out;
  out.e0_monotone = true;
  out.e1_monotone = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].e0 > 1.05 * report.rows[i - 1].e0)
      out.e0_monotone = false;
    if (report.rows[i].e1 > 1.05 * report.rows[i - 1].e1)
      out.e1_monotone = false;
  }
  out.e1_first = report.rows.front().e1;
  out.e1_last = report.rows.back().e1;
  out.e1_halved = out.e1_last <= 0.5 * out.e1_first;
  if (!out.e0_monotone || !out.e1_monotone) {
    throw Error(ErrorCode::NonDecreasingError,
                "error curve not decreasing along the epsilon ladder");
  }
  return out;
}

WeakLimitReport weak_limit_check(const SweepConfig& config) {
  return weak_limit_check(run_sweep(config));
}

void write_csv(const ConvergenceReport& report, std::ostream& os) {
  os << "eps,dofs,e0,e1,e2,residual,seconds\n";
  char buf[256];
  for (const SweepRow& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.9g,%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  row.eps, row.dofs, row.e0, row.e1, row.e2, row.residual,
                  row.seconds);
    os << buf;
  }
}

void write_gnuplot_data(const ConvergenceReport& report, std::ostream& os) {
  os << "# eps e0 e1 e2\n";
  char buf[256];
  for (const SweepRow& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g\n", row.eps,
                  row.e0, row.e1, row.e2);
    os << buf;
  }
}

void write_gnuplot_script(const ConvergenceReport& report,
                          const std::string& dat_name, std::ostream& os) {
  os << "set logscale xy\n"
     << "set xlabel 'eps'\n"
     << "set ylabel 'error'\n"
     << "set key left top\n"
     << "set grid\n";
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "plot '%s' using 1:2 with linespoints title 'e0 (slope %.3f)', \\\n"
                "     '%s' using 1:3 with linespoints title 'e1 (slope %.3f)', \\\n"
                "     '%s' using 1:4 with linespoints title 'e2 (slope %.3f)', \\\n"
                "     x**0.5 with lines dashtype 2 title 'sqrt(eps)'\n",
                dat_name.c_str(), report.p0.slope, dat_name.c_str(),
                report.p1.slope, dat_name.c_str(), report.p2.slope);
  os << buf;
}

std::string sweep_config_hash(const SweepConfig& cfg) {
  std::ostringstream ss;
  ss.precision(17);
  ss << "a0=" << cfg.profile.a0() << ";a=" << cfg.profile.period_divisor();
  for (const auto& m : cfg.profile.modes()) {
    ss << ";k" << m.k << "," << m.c << "," << m.s;
  }
  ss << "|f=" << cfg.forcing.c0();
  for (const auto& m : cfg.forcing.modes()) {
    ss << ";k" << m.k << "," << m.a << "," << m.b;
  }
  ss << "|ladder=";
  for (int m : cfg.ladder) ss << m << ",";
  ss << "|cell=" << cfg.cell_ny << "x" << cfg.cell_nz
     << "|strip=" << cfg.strip.ny_per_cell << "x" << cfg.strip.nz
     << "|tol=" << cfg.tol << "|refine=" << cfg.refinement_check;
  const std::string s = ss.str();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace oscilla
