// Command-line front end for the thin-strip homogenization pipeline:
// profile validation, cell problems and q0, the homogenized 1D solve, full
// strip solves, eps-sweep convergence studies, and the self-check suite.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "oscilla/json_io.hpp"
#include "oscilla/selfcheck.hpp"

namespace {

using namespace oscilla;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitPartial = 4;

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write " + path);
  }
  out << content;
}

void emit_json(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

int cmd_validate_profile(const std::string& config_path) {
  const json j = load_json_file(config_path);
  if (j.contains("profile")) {
    json allowed = j;
    allowed.erase("profile");
    for (const auto& [key, _] : allowed.items()) {
      throw Error(ErrorCode::Config, "unknown key 'config." + key + "'");
    }
  }
  const BoundaryProfile p = profile_from_json(
      j.contains("profile") ? j.at("profile") : j, "config.profile");
  json out;
  out["valid"] = true;
  out["g1"] = p.g1();
  out["g_min"] = p.g_min();
  out["mean"] = p.mean();
  out["period"] = p.period();
  emit_json(out, "");
  return kExitOk;
}

int cmd_cell_solve(const std::string& config_path, bool dry_run) {
  const CellSolveConfig cfg =
      cell_solve_config_from_json(load_json_file(config_path));
  if (dry_run) {
    json out;
    out["resolved_config"] = cell_solve_config_to_json(cfg);
    out["estimate"] = {
        {"vertices", (cfg.ny + 1) * (cfg.nz + 1)},
        {"triangles", 2 * cfg.ny * cfg.nz},
        {"dofs", cfg.ny * (cfg.nz + 1)}};
    emit_json(out, "");
    return kExitOk;
  }
  SolveOptions so;
  so.tol = cfg.tol;
  const CellSolution cs =
      solve_cell(cfg.profile, cfg.ny, cfg.nz, so, cfg.with_theta, cfg.xeps_ms);

  if (!cfg.matrix_out.empty()) {
    WeightedForm form;  // the X0 stiffness, for external validation
    const SparseSystem sys = assemble(*cs.mesh, form, Gauge::MeanZero);
    std::ofstream mm(cfg.matrix_out);
    if (!mm) throw Error(ErrorCode::Io, "cannot write " + cfg.matrix_out);
    write_matrix_market(sys.matrix, mm);
  }

  json out;
  out["q0"] = cs.q0;
  out["q0_energy"] = cs.q0_energy;
  out["grad_energy"] = cs.grad_energy;
  out["cell_area"] = cs.cell_area;
  out["mesh"] = {{"ny", cfg.ny}, {"nz", cfg.nz}, {"h", cs.mesh->max_edge()}};
  out["residuals"] = {{"x0", cs.x0_residual},
                      {"x0_load_mean", cs.x0_compat},
                      {"x0_iterations", cs.x0_iterations}};
  if (cs.theta.has_value()) {
    out["residuals"]["theta"] = cs.theta_residual;
    out["residuals"]["theta_compat"] = cs.theta_compat;
  }
  if (!cs.x_eps.empty()) {
    json xe = json::array();
    for (const auto& [m, field] : cs.x_eps) {
      const double d =
          std::sqrt(h1_norm_sq(field_difference(field, cs.X0)));
      xe.push_back({{"m", m}, {"eps", 1.0 / m}, {"h1_dist_to_x0", d}});
    }
    out["x_eps"] = xe;
  }
  emit_json(out, cfg.out);
  return kExitOk;
}

int cmd_homogenize(const std::string& config_path, bool dry_run) {
  const HomogenizeConfig cfg =
      homogenize_config_from_json(load_json_file(config_path));
  if (dry_run) {
    json out;
    out["resolved_config"] = homogenize_config_to_json(cfg);
    emit_json(out, "");
    return kExitOk;
  }
  double q0;
  json out;
  if (cfg.q0.has_value()) {
    q0 = *cfg.q0;
  } else {
    SolveOptions so;
    so.tol = cfg.tol;
    const CellSolution cs =
        solve_cell(*cfg.profile, cfg.cell_ny, cfg.cell_nz, so, false);
    q0 = cs.q0;
    out["q0_energy"] = cs.q0_energy;
  }
  const TrigPoly w0 = solve_homogenized(q0, cfg.forcing);
  out["q0"] = q0;
  out["w0"] = trig_to_json(w0);
  out["residual"] = residual_check(q0, cfg.forcing, w0);
  emit_json(out, cfg.out);
  return kExitOk;
}

int cmd_solve(const std::string& config_path, bool dry_run) {
  const SolveConfig cfg = solve_config_from_json(load_json_file(config_path));
  const int columns =
      cfg.profile.period_divisor() * cfg.m * cfg.strip.ny_per_cell;
  if (dry_run) {
    json out;
    out["resolved_config"] = solve_config_to_json(cfg);
    out["estimate"] = {{"columns", columns},
                       {"vertices", (columns + 1) * (cfg.strip.nz + 1)},
                       {"dofs", columns * (cfg.strip.nz + 1)}};
    emit_json(out, "");
    return kExitOk;
  }
  SolveOptions so;
  so.tol = cfg.tol;
  const StripSolution sol =
      solve_thin(cfg.profile, EpsilonValue(cfg.m), cfg.forcing, cfg.strip, so);

  if (!cfg.out_field.empty()) {
    std::ofstream fout(cfg.out_field);
    if (!fout) throw Error(ErrorCode::Io, "cannot write " + cfg.out_field);
    write_mesh_text(*sol.mesh, fout);
    fout.precision(17);
    for (std::size_t i = 0; i < sol.field.values.size(); ++i) {
      fout << "u " << i << ' ' << sol.field.values[i] << '\n';
    }
  }

  json out;
  out["eps"] = sol.eps.value();
  out["m"] = sol.eps.m();
  out["dofs"] = sol.dofs;
  out["residual"] = sol.solver_residual;
  out["iterations"] = sol.iterations;
  out["energy_check"] = energy_check(sol);
  emit_json(out, cfg.out_summary);
  return kExitOk;
}

void write_converge_outputs(const ConvergenceReport& report,
                            const std::string& prefix) {
  {
    std::ofstream csv(prefix + ".csv");
    if (!csv) throw Error(ErrorCode::Io, "cannot write " + prefix + ".csv");
    write_csv(report, csv);
  }
  emit_json(report_to_json(report), prefix + ".json");
  const std::string dat_name =
      std::filesystem::path(prefix + ".dat").filename().string();
  {
    std::ofstream dat(prefix + ".dat");
    if (!dat) throw Error(ErrorCode::Io, "cannot write " + prefix + ".dat");
    write_gnuplot_data(report, dat);
  }
  {
    std::ofstream plt(prefix + ".plt");
    if (!plt) throw Error(ErrorCode::Io, "cannot write " + prefix + ".plt");
    write_gnuplot_script(report, dat_name, plt);
  }
}

int cmd_converge(const std::string& config_path, bool dry_run, int jobs,
                 const std::string& out_override) {
  ConvergeConfig cfg = converge_config_from_json(load_json_file(config_path));
  if (jobs > 0) cfg.sweep.jobs = jobs;
  if (!out_override.empty()) cfg.out_prefix = out_override;

  if (dry_run) {
    json out;
    out["resolved_config"] = converge_config_to_json(cfg);
    json est = json::array();
    for (int m : cfg.sweep.ladder) {
      const int columns =
          cfg.sweep.profile.period_divisor() * m * cfg.sweep.strip.ny_per_cell;
      est.push_back({{"m", m},
                     {"eps", 1.0 / m},
                     {"columns", columns},
                     {"dofs", columns * (cfg.sweep.strip.nz + 1)}});
    }
    out["estimate"] = est;
    out["config_hash"] = sweep_config_hash(cfg.sweep);
    emit_json(out, "");
    return kExitOk;
  }

  // optional report cache keyed by the config fingerprint
  const char* cache_dir = std::getenv("OSCILLA_CACHE_DIR");
  std::string cache_file;
  if (cache_dir && *cache_dir) {
    std::filesystem::create_directories(cache_dir);
    cache_file = std::string(cache_dir) + "/" +
                 sweep_config_hash(cfg.sweep) + ".json";
    std::ifstream in(cache_file);
    if (in) {
      std::ostringstream ss;
      ss << in.rdbuf();
      const ConvergenceReport cached =
          report_from_json(parse_json_text(ss.str(), cache_file));
      write_converge_outputs(cached, cfg.out_prefix);
      std::fprintf(stderr, "cache hit: %s\n", cache_file.c_str());
      return cached.any_failed ? kExitPartial : kExitOk;
    }
  }

  const ConvergenceReport report = run_sweep(cfg.sweep);
  write_converge_outputs(report, cfg.out_prefix);
  if (!cache_file.empty()) {
    emit_json(report_to_json(report), cache_file);
  }
  return report.any_failed ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oscilla: homogenization toolkit for thin oscillating "
               "spherical strips"};
  app.require_subcommand(1);

  std::string config_path;
  bool dry_run = false;
  int jobs = 0;
  std::string out_override;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    if (needs_config) {
      sub->add_option("--config,-c", config_path, "JSON config file")
          ->required();
    }
    sub->add_flag("--dry-run", dry_run,
                  "print the resolved config and size estimates, do not solve");
    return sub;
  };

  CLI::App* validate =
      add_common(app.add_subcommand("validate-profile",
                                    "check a boundary profile config"));
  CLI::App* cell = add_common(
      app.add_subcommand("cell-solve", "solve the cell problems, report q0"));
  CLI::App* homog = add_common(app.add_subcommand(
      "homogenize", "solve the homogenized 1D equation exactly"));
  CLI::App* solve = add_common(
      app.add_subcommand("solve", "solve the full thin-strip problem"));
  CLI::App* converge = add_common(app.add_subcommand(
      "converge", "run an eps sweep and fit convergence rates"));
  converge->add_option("--jobs,-j", jobs, "parallel rows (default: cores)");
  converge->add_option("--out,-o", out_override, "output prefix override");

  CLI::App* verify = app.add_subcommand(
      "verify", "run the built-in verification suite");
  bool quick = false;
  verify->add_flag("--quick", quick, "reduced-resolution smoke run");
  verify->add_option("--jobs,-j", jobs, "parallel sweep rows");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return cmd_validate_profile(config_path);
    if (app.got_subcommand(cell)) return cmd_cell_solve(config_path, dry_run);
    if (app.got_subcommand(homog)) return cmd_homogenize(config_path, dry_run);
    if (app.got_subcommand(solve)) return cmd_solve(config_path, dry_run);
    if (app.got_subcommand(converge))
      return cmd_converge(config_path, dry_run, jobs, out_override);
    if (app.got_subcommand(verify)) {
      CheckOptions opts;
      opts.quick = quick;
      opts.jobs = jobs;
      return run_and_print_checks(opts) ? kExitOk : 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", error_code_name(e.code()),
                 e.what());
    return e.is_validation() ? kExitConfig : kExitSolver;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitOk;
}
