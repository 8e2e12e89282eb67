#include "oscilla/selfcheck.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "oscilla/convergence.hpp"

namespace oscilla {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

BoundaryProfile flat_profile(double a0 = 1.0) {
  return BoundaryProfile::validated(a0, {}, 1);
}

BoundaryProfile reference_profile() {
  return BoundaryProfile::validated(1.0, {{1, 0.5, 0.0}}, 1);
}

TrigPoly cos_forcing() { return TrigPoly(0.0, {{1, 1.0, 0.0}}); }

struct Checker {
  std::vector<CheckResult> results;
  std::string filter;

  template <typename Fn>
  void run(const std::string& name, Fn&& fn) {
    if (!filter.empty() && name.find(filter) == std::string::npos) return;
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      std::ostringstream detail;
      r.pass = fn(detail);
      r.detail = detail.str();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    results.push_back(std::move(r));
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::vector<CheckResult> run_all_checks(const CheckOptions& opts) {
  Checker ck;
  ck.filter = opts.filter;

  // ---- flat-profile degeneracy: g == 1 forces X0 = 0 and q0 = 1
  ck.run("flat-profile-degeneracy", [&](std::ostringstream& out) {
    const BoundaryProfile flat = flat_profile();
    const CellSolution cs = solve_cell(flat, 128, 32, {}, false);
    const double x0_h1 = std::sqrt(h1_norm_sq(cs.X0));
    const double q0_err = std::abs(cs.q0 - 1.0);
    out << "|X0|_H1=" << fmt(x0_h1) << " |q0-1|=" << fmt(q0_err);
    return x0_h1 <= 1e-8 && q0_err <= 1e-8;
  });

  // ---- q0 range, direct-vs-energy identity, Richardson stability
  ck.run("q0-range-and-identity", [&](std::ostringstream& out) {
    const BoundaryProfile ref = reference_profile();
    SolveOptions so;
    so.tol = 1e-11;
    const CellSolution c128 = solve_cell(ref, 128, 32, so, false);
    const CellSolution c256 = solve_cell(ref, 256, 64, so, false);
    const CellSolution c512 = solve_cell(ref, 512, 128, so, false);

    double worst_gap = 0.0;
    bool range_ok = true;
    for (const CellSolution* cs : {&c128, &c256, &c512}) {
      double q0e = cs->q0_energy;
      if (opts.perturb_q0_identity) q0e += 1e-6;  // test hook
      worst_gap = std::max(worst_gap, std::abs(cs->q0 - q0e));
      range_ok = range_ok && cs->q0 > 0.0 && cs->q0 < 1.0;
    }
    // second-order Richardson extrapolations from consecutive mesh pairs
    const double ex1 = c256.q0 + (c256.q0 - c128.q0) / 3.0;
    const double ex2 = c512.q0 + (c512.q0 - c256.q0) / 3.0;
    const double stability = std::abs(ex2 - ex1);
    out << "q0=" << fmt(c512.q0) << " identity_gap=" << fmt(worst_gap)
        << " richardson_drift=" << fmt(stability);
    return range_ok && worst_gap <= 1e-7 && stability <= 1e-5;
  });

  // ---- compatibility integrals vanish
  ck.run("compatibility-zeros", [&](std::ostringstream& out) {
    const BoundaryProfile ref = reference_profile();
    const CellSolution cs = solve_cell(ref, 256, 64, {}, true);
    out << "x0_load_mean=" << fmt(cs.x0_compat)
        << " theta_volume_compat=" << fmt(cs.theta_compat);
    return cs.x0_compat <= 1e-12 && cs.theta_compat <= 1e-10;
  });

  // ---- X^eps -> X0 continuity in eps
  ck.run("xeps-continuity", [&](std::ostringstream& out) {
    const BoundaryProfile ref = reference_profile();
    const TriMesh mesh = build_cell_mesh(ref, 256, 64);
    const ScalarField x0 = solve_x0(ref, mesh);
    std::vector<double> dist;
    for (int m : {4, 8, 16}) {
      const ScalarField xe = solve_xeps(ref, EpsilonValue(m), mesh);
      dist.push_back(std::sqrt(h1_norm_sq(field_difference(xe, x0))));
    }
    out << "|Xeps-X0|_H1 = " << fmt(dist[0]) << ", " << fmt(dist[1]) << ", "
        << fmt(dist[2]);
    const bool monotone = dist[0] > dist[1] && dist[1] > dist[2];
    return monotone && dist[2] <= 0.5 * dist[0];
  });

  // ---- homogenized solver exactness
  ck.run("homogenized-exactness", [&](std::ostringstream& out) {
    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_real_distribution<double> q0d(0.05, 1.0);
    std::uniform_int_distribution<int> nmodes(1, 8);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<TrigPoly::Mode> modes;
      const int n = nmodes(rng);
      for (int k = 1; k <= n; ++k) {
        modes.push_back({k, coeff(rng), coeff(rng)});
      }
      const TrigPoly f(coeff(rng), std::move(modes));
      const double q0 = q0d(rng);
      const TrigPoly w0 = solve_homogenized(q0, f);
      worst = std::max(worst, residual_check(q0, f, w0) /
                                  (1.0 + f.max_abs()));
    }
    const TrigPoly w0_cos = solve_homogenized(1.0, cos_forcing());
    const double coeff_err = std::abs(w0_cos.modes().at(0).a - 0.5);
    out << "worst_residual=" << fmt(worst)
        << " cos_coeff_err=" << fmt(coeff_err);
    return worst <= 1e-12 && coeff_err <= 1e-15;
  });

  // ---- P1 self-convergence on a manufactured flat Neumann problem
  ck.run("fem-self-convergence", [&](std::ostringstream& out) {
    // u = cos(2 pi x) e^y on the unit square, periodic in x;
    // -Lap u + u = 4 pi^2 u, du/dn = +-u_y on top/bottom
    const double w = kTwoPi;  // angular frequency of the solution in x
    auto exact = [w](double x, double y) { return std::cos(w * x) * std::exp(y); };
    auto exact_dx = [w](double x, double y) {
      return -w * std::sin(w * x) * std::exp(y);
    };
    std::vector<std::pair<double, double>> l2pts, h1pts;
    for (int n : {16, 32, 64, 128}) {
      const TriMesh mesh = build_rect_mesh(1.0, 1.0, n, n);
      WeightedForm form;
      form.mu = [](double, double) { return 1.0; };
      form.volume_load = [&](int, double x, double y) {
        return w * w * exact(x, y);
      };
      EdgeLoad top;
      top.tag = BoundaryTag::TopB1;
      top.density = [&](const Vec2&, const Vec2&, const Vec2& p) {
        return exact(p.x, p.y);  // du/dy = u on y = 1
      };
      EdgeLoad bottom;
      bottom.tag = BoundaryTag::BottomB2;
      bottom.density = [&](const Vec2&, const Vec2&, const Vec2& p) {
        return -exact(p.x, p.y);
      };
      form.edge_loads = {top, bottom};
      const SparseSystem sys = assemble(mesh, form);
      SolveOptions so;
      so.tol = 1e-12;
      const ScalarField uh = solve_spd(sys, so);

      const double l2e = std::sqrt(integrate(
          mesh, [&](int tri, double x, double y) {
            const double d = uh.value_at(tri, {x, y}) - exact(x, y);
            return d * d;
          }));
      const double h1semi = integrate(mesh, [&](int tri, double x, double y) {
        const Vec2 g = uh.gradient(tri);
        const double dx = g.x - exact_dx(x, y);
        const double dy = g.y - exact(x, y);  // u_y = u
        return dx * dx + dy * dy;
      });
      l2pts.emplace_back(1.0 / n, l2e);
      h1pts.emplace_back(1.0 / n, std::sqrt(h1semi + l2e * l2e));
    }
    const RateFit l2fit = fit_rate(l2pts);
    const RateFit h1fit = fit_rate(h1pts);
    out << "L2_slope=" << fmt(l2fit.slope) << " H1_slope=" << fmt(h1fit.slope);
    return std::abs(l2fit.slope - 2.0) <= 0.15 &&
           std::abs(h1fit.slope - 1.0) <= 0.15;
  });

  // ---- per-cell scaling bounds for the cell functions on the strip.
  // The strip quadrature lattice matches the cell mesh, so each oscillation
  // cell integrates the piecewise-linear fields with the same rule and the
  // comparison carries no sampling noise.
  ck.run("cell-scaling-bounds", [&](std::ostringstream& out) {
    const BoundaryProfile ref = reference_profile();
    const int cny = 128, cnz = 32;
    const CellSolution cs = solve_cell(ref, cny, cnz, {}, true);
    bool all_ok = true;
    double worst_ratio = 0.0;
    for (int m : {4, 8, 16}) {
      const TriMesh strip = build_strip_mesh(ref, EpsilonValue(m), cny, cnz);
      const ScalingReport rep =
          cell_scaling_check(cs, EpsilonValue(m), strip, 1e-2, false);
      all_ok = all_ok && rep.all_ok;
      for (const auto& row : rep.rows) {
        worst_ratio = std::max(worst_ratio, row.ratio);
      }
    }
    out << "worst lhs/(factor*cell) ratio=" << fmt(worst_ratio);
    return all_ok;
  });

  // ---- first-order corrector gives decaying H1 error over the full ladder
  ck.run("corrector-convergence", [&](std::ostringstream& out) {
    SweepConfig sweep;
    sweep.profile = reference_profile();
    sweep.forcing = cos_forcing();
    sweep.ladder = {4, 8, 16, 32};
    sweep.jobs = opts.jobs;
    sweep.strip.ny_per_cell = opts.quick ? 32 : 64;
    sweep.strip.nz = opts.quick ? 16 : 32;
    sweep.refinement_check = !opts.quick;
    const ConvergenceReport report = run_sweep(sweep);
    if (report.any_failed) {
      out << "sweep failed";
      return false;
    }
    bool monotone = true;
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      monotone = monotone && report.rows[i].e1 < report.rows[i - 1].e1;
      monotone = monotone && report.rows[i].e0 < report.rows[i - 1].e0;
    }
    const double first = report.rows.front().e1;
    const double last = report.rows.back().e1;
    out << "e1: ";
    for (const auto& row : report.rows) out << fmt(row.e1) << " ";
    out << "ratio=" << fmt(last / first);
    return monotone && last <= 0.5 * first;
  });

  // ---- sqrt(eps) error rate for both truncations, in the mesh-clean range
  ck.run("error-rate-sqrt-eps", [&](std::ostringstream& out) {
    SweepConfig sweep;
    sweep.profile = reference_profile();
    sweep.forcing = cos_forcing();
    sweep.ladder = {4, 8, 16};
    sweep.jobs = opts.jobs;
    sweep.strip.ny_per_cell = opts.quick ? 64 : 96;
    sweep.strip.nz = opts.quick ? 32 : 48;
    sweep.refinement_check = true;
    const ConvergenceReport report = run_sweep(sweep);
    if (report.any_failed) {
      out << "sweep failed";
      return false;
    }
    bool ordering = true;
    for (const auto& row : report.rows) {
      ordering = ordering && row.e2 <= 1.1 * row.e1;
    }
    out << "p1=" << fmt(report.p1.slope) << " p2=" << fmt(report.p2.slope)
        << " mesh_limited=" << (report.mesh_limited ? "yes" : "no")
        << " e2<=1.1*e1=" << (ordering ? "yes" : "no");
    return report.rates_valid && report.p1.slope >= 0.45 &&
           report.p2.slope >= 0.45 && !report.mesh_limited && ordering;
  });

  // ---- rescaled-norm identities
  ck.run("rescaled-norm-identities", [&](std::ostringstream& out) {
    double worst_const = 0.0;
    for (const auto& [a0, m] : std::vector<std::pair<double, int>>{
             {1.0, 4}, {0.8, 8}}) {
      const BoundaryProfile flat = flat_profile(a0);
      const EpsilonValue eps(m);
      const TriMesh strip = build_strip_mesh(flat, eps, 4, 512);
      const ScalarField one{&strip,
                            std::vector<double>(strip.vertices.size(), 1.0)};
      const double got = norm_rescaled(strip, NormKind::L2, sample_field(one));
      const double expect =
          std::sqrt(eps.m() * kTwoPi * std::sin(eps.value() * a0));
      worst_const = std::max(
          worst_const, std::abs(got * got - expect * expect) /
                           (expect * expect));
    }

    // scaling identity |||u|||_L2 = eps^{-1/2} ||u||_{L2(cos)} on random data
    const BoundaryProfile ref = reference_profile();
    const EpsilonValue eps(8);
    const TriMesh strip = build_strip_mesh(ref, eps, 8, 6);
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst_scale = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      ScalarField u = ScalarField::zeros(strip);
      for (double& v : u.values) v = dist(rng);
      for (const auto& [slave, master] : strip.periodic_pairs) {
        u.values[static_cast<std::size_t>(slave)] =
            u.values[static_cast<std::size_t>(master)];
      }
      const double rescaled =
          norm_rescaled(strip, NormKind::L2, sample_field(u));
      const double plain = std::sqrt(integrate(
          strip, [&u](int tri, double x, double y) {
            const double v = u.value_at(tri, {x, y});
            return v * v * std::cos(y);
          }));
      const double related = std::sqrt(static_cast<double>(eps.m())) * plain;
      worst_scale = std::max(worst_scale,
                             std::abs(rescaled - related) / related);
    }
    out << "const_identity_relerr=" << fmt(worst_const)
        << " scaling_relerr=" << fmt(worst_scale);
    return worst_const <= 1e-10 && worst_scale <= 1e-12;
  });

  // ---- determinism across thread counts
  ck.run("determinism-across-jobs", [&](std::ostringstream& out) {
    SweepConfig small;
    small.profile = reference_profile();
    small.forcing = cos_forcing();
    small.ladder = {4, 8, 16};
    small.cell_ny = 64;
    small.cell_nz = 16;
    small.strip.ny_per_cell = 8;
    small.strip.nz = 4;
    small.refinement_check = false;
    small.jobs = 1;
    const ConvergenceReport r1 = run_sweep(small);
    small.jobs = 4;
    const ConvergenceReport r4 = run_sweep(small);
    bool same = r1.rows.size() == r4.rows.size();
    for (std::size_t i = 0; same && i < r1.rows.size(); ++i) {
      same = r1.rows[i].dofs == r4.rows[i].dofs &&
             r1.rows[i].e0 == r4.rows[i].e0 && r1.rows[i].e1 == r4.rows[i].e1 &&
             r1.rows[i].e2 == r4.rows[i].e2 &&
             r1.rows[i].residual == r4.rows[i].residual;
    }
    out << (same ? "rows bitwise identical" : "rows differ");
    return same;
  });

  return ck.results;
}

bool run_and_print_checks(const CheckOptions& opts) {
  const std::vector<CheckResult> results = run_all_checks(opts);
  bool all = true;
  for (const CheckResult& r : results) {
    std::printf("[%s] %-28s %s (%.1fs)\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.detail.c_str(), r.seconds);
    all = all && r.pass;
  }
  std::printf("%s: %zu checks\n", all ? "ALL PASS" : "FAILURES PRESENT",
              results.size());
  return all;
}

}  // namespace oscilla
