#include "oscilla/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace oscilla {

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& path) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::Config, path + " must be a JSON object");
  }
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw Error(ErrorCode::Config,
                  "unknown key '" + path + "." + key + "' in config");
    }
  }
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    throw Error(ErrorCode::Config, path + " must be a number");
  }
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw Error(ErrorCode::Config, path + " must be an integer");
  }
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) {
    throw Error(ErrorCode::Config, path + " must be a boolean");
  }
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) {
    throw Error(ErrorCode::Config, path + " must be a string");
  }
  return j.get<std::string>();
}

void parse_strip_mesh(const json& j, StripMeshParams& p) {
  require_keys(j, {"ny_per_cell", "nz", "tri_cap"}, "config.strip_mesh");
  if (j.contains("ny_per_cell"))
    p.ny_per_cell = get_int(j.at("ny_per_cell"),
                            "config.strip_mesh.ny_per_cell");
  if (j.contains("nz")) p.nz = get_int(j.at("nz"), "config.strip_mesh.nz");
  if (j.contains("tri_cap")) {
    const int cap = get_int(j.at("tri_cap"), "config.strip_mesh.tri_cap");
    if (cap < 1) {
      throw Error(ErrorCode::Config, "config.strip_mesh.tri_cap must be >= 1");
    }
    p.tri_cap = static_cast<std::size_t>(cap);
  }
}

json strip_mesh_to_json(const StripMeshParams& p) {
  return {{"ny_per_cell", p.ny_per_cell},
          {"nz", p.nz},
          {"tri_cap", static_cast<std::int64_t>(p.tri_cap)}};
}

}  // namespace

BoundaryProfile profile_from_json(const json& j, const std::string& path) {
  require_keys(j, {"a0", "modes", "a"}, path);
  if (!j.contains("a0") || !j.contains("a")) {
    throw Error(ErrorCode::Config, path + " needs 'a0' and 'a'");
  }
  const double a0 = get_number(j.at("a0"), path + ".a0");
  const int a = get_int(j.at("a"), path + ".a");
  std::vector<BoundaryProfile::Mode> modes;
  if (j.contains("modes")) {
    if (!j.at("modes").is_array()) {
      throw Error(ErrorCode::Config, path + ".modes must be an array");
    }
    int idx = 0;
    for (const auto& mj : j.at("modes")) {
      const std::string mp = path + ".modes[" + std::to_string(idx++) + "]";
      require_keys(mj, {"k", "c", "s"}, mp);
      BoundaryProfile::Mode m;
      m.k = mj.contains("k") ? get_int(mj.at("k"), mp + ".k") : 1;
      m.c = mj.contains("c") ? get_number(mj.at("c"), mp + ".c") : 0.0;
      m.s = mj.contains("s") ? get_number(mj.at("s"), mp + ".s") : 0.0;
      modes.push_back(m);
    }
  }
  return BoundaryProfile::validated(a0, std::move(modes), a);
}

json profile_to_json(const BoundaryProfile& p) {
  json j;
  j["a0"] = p.a0();
  j["a"] = p.period_divisor();
  j["modes"] = json::array();
  for (const auto& m : p.modes()) {
    j["modes"].push_back({{"k", m.k}, {"c", m.c}, {"s", m.s}});
  }
  return j;
}

TrigPoly trig_from_json(const json& j, const std::string& path) {
  require_keys(j, {"c0", "modes"}, path);
  const double c0 =
      j.contains("c0") ? get_number(j.at("c0"), path + ".c0") : 0.0;
  std::vector<TrigPoly::Mode> modes;
  if (j.contains("modes")) {
    if (!j.at("modes").is_array()) {
      throw Error(ErrorCode::Config, path + ".modes must be an array");
    }
    int idx = 0;
    for (const auto& mj : j.at("modes")) {
      const std::string mp = path + ".modes[" + std::to_string(idx++) + "]";
      require_keys(mj, {"k", "a", "b"}, mp);
      TrigPoly::Mode m;
      m.k = mj.contains("k") ? get_int(mj.at("k"), mp + ".k") : 1;
      m.a = mj.contains("a") ? get_number(mj.at("a"), mp + ".a") : 0.0;
      m.b = mj.contains("b") ? get_number(mj.at("b"), mp + ".b") : 0.0;
      modes.push_back(m);
    }
  }
  return TrigPoly(c0, std::move(modes));
}

json trig_to_json(const TrigPoly& p) {
  json j;
  j["c0"] = p.c0();
  j["modes"] = json::array();
  for (const auto& m : p.modes()) {
    j["modes"].push_back({{"k", m.k}, {"a", m.a}, {"b", m.b}});
  }
  return j;
}

CellSolveConfig cell_solve_config_from_json(const json& j) {
  require_keys(j, {"profile", "mesh", "tol", "with_theta", "xeps_ms", "out",
                   "matrix_out"},
               "config");
  if (!j.contains("profile")) {
    throw Error(ErrorCode::Config, "config needs 'profile'");
  }
  CellSolveConfig c;
  c.profile = profile_from_json(j.at("profile"), "config.profile");
  if (j.contains("mesh")) {
    require_keys(j.at("mesh"), {"ny", "nz"}, "config.mesh");
    if (j.at("mesh").contains("ny"))
      c.ny = get_int(j.at("mesh").at("ny"), "config.mesh.ny");
    if (j.at("mesh").contains("nz"))
      c.nz = get_int(j.at("mesh").at("nz"), "config.mesh.nz");
  }
  if (j.contains("tol")) c.tol = get_number(j.at("tol"), "config.tol");
  if (j.contains("with_theta"))
    c.with_theta = get_bool(j.at("with_theta"), "config.with_theta");
  if (j.contains("xeps_ms")) {
    for (const auto& v : j.at("xeps_ms")) {
      c.xeps_ms.push_back(get_int(v, "config.xeps_ms[]"));
    }
  }
  if (j.contains("out")) c.out = get_string(j.at("out"), "config.out");
  if (j.contains("matrix_out"))
    c.matrix_out = get_string(j.at("matrix_out"), "config.matrix_out");
  return c;
}

json cell_solve_config_to_json(const CellSolveConfig& c) {
  json j;
  j["profile"] = profile_to_json(c.profile);
  j["mesh"] = {{"ny", c.ny}, {"nz", c.nz}};
  j["tol"] = c.tol;
  j["with_theta"] = c.with_theta;
  j["xeps_ms"] = c.xeps_ms;
  j["out"] = c.out;
  j["matrix_out"] = c.matrix_out;
  return j;
}

SolveConfig solve_config_from_json(const json& j) {
  require_keys(j, {"profile", "m", "forcing", "strip_mesh", "tol",
                   "out_summary", "out_field"},
               "config");
  if (!j.contains("profile") || !j.contains("forcing")) {
    throw Error(ErrorCode::Config, "config needs 'profile' and 'forcing'");
  }
  SolveConfig c;
  c.profile = profile_from_json(j.at("profile"), "config.profile");
  c.forcing = trig_from_json(j.at("forcing"), "config.forcing");
  if (j.contains("m")) c.m = get_int(j.at("m"), "config.m");
  if (j.contains("strip_mesh")) {
    parse_strip_mesh(j.at("strip_mesh"), c.strip);
  }
  if (j.contains("tol")) c.tol = get_number(j.at("tol"), "config.tol");
  if (j.contains("out_summary"))
    c.out_summary = get_string(j.at("out_summary"), "config.out_summary");
  if (j.contains("out_field"))
    c.out_field = get_string(j.at("out_field"), "config.out_field");
  return c;
}

json solve_config_to_json(const SolveConfig& c) {
  json j;
  j["profile"] = profile_to_json(c.profile);
  j["m"] = c.m;
  j["forcing"] = trig_to_json(c.forcing);
  j["strip_mesh"] = strip_mesh_to_json(c.strip);
  j["tol"] = c.tol;
  j["out_summary"] = c.out_summary;
  j["out_field"] = c.out_field;
  return j;
}

HomogenizeConfig homogenize_config_from_json(const json& j) {
  require_keys(j, {"q0", "profile", "cell_mesh", "forcing", "tol", "out"},
               "config");
  if (!j.contains("forcing")) {
    throw Error(ErrorCode::Config, "config needs 'forcing'");
  }
  HomogenizeConfig c;
  c.forcing = trig_from_json(j.at("forcing"), "config.forcing");
  if (j.contains("q0")) c.q0 = get_number(j.at("q0"), "config.q0");
  if (j.contains("profile")) {
    c.profile = profile_from_json(j.at("profile"), "config.profile");
  }
  if (!c.q0.has_value() && !c.profile.has_value()) {
    throw Error(ErrorCode::Config, "config needs either 'q0' or 'profile'");
  }
  if (j.contains("cell_mesh")) {
    require_keys(j.at("cell_mesh"), {"ny", "nz"}, "config.cell_mesh");
    if (j.at("cell_mesh").contains("ny"))
      c.cell_ny = get_int(j.at("cell_mesh").at("ny"), "config.cell_mesh.ny");
    if (j.at("cell_mesh").contains("nz"))
      c.cell_nz = get_int(j.at("cell_mesh").at("nz"), "config.cell_mesh.nz");
  }
  if (j.contains("tol")) c.tol = get_number(j.at("tol"), "config.tol");
  if (j.contains("out")) c.out = get_string(j.at("out"), "config.out");
  return c;
}

json homogenize_config_to_json(const HomogenizeConfig& c) {
  json j;
  if (c.q0.has_value()) j["q0"] = *c.q0;
  if (c.profile.has_value()) j["profile"] = profile_to_json(*c.profile);
  j["cell_mesh"] = {{"ny", c.cell_ny}, {"nz", c.cell_nz}};
  j["forcing"] = trig_to_json(c.forcing);
  j["tol"] = c.tol;
  j["out"] = c.out;
  return j;
}

ConvergeConfig converge_config_from_json(const json& j) {
  require_keys(j, {"profile", "forcing", "ladder", "cell_mesh", "strip_mesh",
                   "tol", "refinement_check", "jobs", "out_prefix"},
               "config");
  if (!j.contains("profile") || !j.contains("forcing")) {
    throw Error(ErrorCode::Config, "config needs 'profile' and 'forcing'");
  }
  ConvergeConfig c;
  c.sweep.profile = profile_from_json(j.at("profile"), "config.profile");
  c.sweep.forcing = trig_from_json(j.at("forcing"), "config.forcing");
  if (j.contains("ladder")) {
    c.sweep.ladder.clear();
    for (const auto& v : j.at("ladder")) {
      c.sweep.ladder.push_back(get_int(v, "config.ladder[]"));
    }
  }
  if (j.contains("cell_mesh")) {
    require_keys(j.at("cell_mesh"), {"ny", "nz"}, "config.cell_mesh");
    if (j.at("cell_mesh").contains("ny"))
      c.sweep.cell_ny = get_int(j.at("cell_mesh").at("ny"),
                                "config.cell_mesh.ny");
    if (j.at("cell_mesh").contains("nz"))
      c.sweep.cell_nz = get_int(j.at("cell_mesh").at("nz"),
                                "config.cell_mesh.nz");
  }
  if (j.contains("strip_mesh")) {
    parse_strip_mesh(j.at("strip_mesh"), c.sweep.strip);
  }
  if (j.contains("tol")) c.sweep.tol = get_number(j.at("tol"), "config.tol");
  if (j.contains("refinement_check"))
    c.sweep.refinement_check =
        get_bool(j.at("refinement_check"), "config.refinement_check");
  if (j.contains("jobs")) c.sweep.jobs = get_int(j.at("jobs"), "config.jobs");
  if (j.contains("out_prefix"))
    c.out_prefix = get_string(j.at("out_prefix"), "config.out_prefix");
  return c;
}

json converge_config_to_json(const ConvergeConfig& c) {
  json j;
  j["profile"] = profile_to_json(c.sweep.profile);
  j["forcing"] = trig_to_json(c.sweep.forcing);
  j["ladder"] = c.sweep.ladder;
  j["cell_mesh"] = {{"ny", c.sweep.cell_ny}, {"nz", c.sweep.cell_nz}};
  j["strip_mesh"] = strip_mesh_to_json(c.sweep.strip);
  j["tol"] = c.sweep.tol;
  j["refinement_check"] = c.sweep.refinement_check;
  j["jobs"] = c.sweep.jobs;
  j["out_prefix"] = c.out_prefix;
  return j;
}

json report_to_json(const ConvergenceReport& r) {
  json j;
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    json rj;
    rj["m"] = row.m;
    rj["eps"] = row.eps;
    rj["dofs"] = row.dofs;
    rj["e0"] = row.e0;
    rj["e1"] = row.e1;
    rj["e2"] = row.e2;
    rj["residual"] = row.residual;
    rj["seconds"] = row.seconds;
    rj["mesh_limited"] = row.mesh_limited;
    rj["failed"] = row.failed || row.fine_failed;
    if (row.failed) rj["error"] = row.error;
    if (row.fine_failed) rj["fine_error"] = row.fine_error;
    if (row.has_fine) {
      rj["e0_fine"] = row.e0_fine;
      rj["e1_fine"] = row.e1_fine;
      rj["e2_fine"] = row.e2_fine;
    }
    j["rows"].push_back(rj);
  }
  auto fit = [](const RateFit& f) {
    return json{{"slope", f.slope},
                {"intercept", f.intercept},
                {"residual", f.residual}};
  };
  j["rates"] = {{"p0", fit(r.p0)}, {"p1", fit(r.p1)}, {"p2", fit(r.p2)}};
  j["rates_valid"] = r.rates_valid;
  j["mesh_limited"] = r.mesh_limited;
  j["any_failed"] = r.any_failed;
  j["q0"] = r.q0;
  j["q0_energy"] = r.q0_energy;
  j["cell_mesh"] = {{"ny", r.cell_ny}, {"nz", r.cell_nz}};
  j["strip_mesh"] = {{"ny_per_cell", r.strip_ny_per_cell},
                     {"nz", r.strip_nz}};
  j["config_hash"] = r.config_hash;
  return j;
}

ConvergenceReport report_from_json(const json& j) {
  ConvergenceReport r;
  for (const auto& rj : j.at("rows")) {
    SweepRow row;
    row.m = rj.at("m").get<int>();
    row.eps = rj.at("eps").get<double>();
    row.dofs = rj.at("dofs").get<std::size_t>();
    row.e0 = rj.at("e0").get<double>();
    row.e1 = rj.at("e1").get<double>();
    row.e2 = rj.at("e2").get<double>();
    row.residual = rj.at("residual").get<double>();
    row.seconds = rj.at("seconds").get<double>();
    row.mesh_limited = rj.at("mesh_limited").get<bool>();
    row.failed = rj.at("failed").get<bool>();
    if (rj.contains("error")) row.error = rj.at("error").get<std::string>();
    if (rj.contains("fine_error")) {
      row.fine_failed = true;
      row.fine_error = rj.at("fine_error").get<std::string>();
    }
    if (rj.contains("e0_fine")) {
      row.has_fine = true;
      row.e0_fine = rj.at("e0_fine").get<double>();
      row.e1_fine = rj.at("e1_fine").get<double>();
      row.e2_fine = rj.at("e2_fine").get<double>();
    }
    r.rows.push_back(row);
  }
  auto fit = [](const json& fj) {
    RateFit f;
    f.slope = fj.at("slope").get<double>();
    f.intercept = fj.at("intercept").get<double>();
    f.residual = fj.at("residual").get<double>();
    return f;
  };
  r.p0 = fit(j.at("rates").at("p0"));
  r.p1 = fit(j.at("rates").at("p1"));
  r.p2 = fit(j.at("rates").at("p2"));
  r.rates_valid = j.at("rates_valid").get<bool>();
  r.mesh_limited = j.at("mesh_limited").get<bool>();
  r.any_failed = j.at("any_failed").get<bool>();
  r.q0 = j.at("q0").get<double>();
  r.q0_energy = j.at("q0_energy").get<double>();
  r.cell_ny = j.at("cell_mesh").at("ny").get<int>();
  r.cell_nz = j.at("cell_mesh").at("nz").get<int>();
  r.strip_ny_per_cell = j.at("strip_mesh").at("ny_per_cell").get<int>();
  r.strip_nz = j.at("strip_mesh").at("nz").get<int>();
  r.config_hash = j.at("config_hash").get<std::string>();
  return r;
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // translate the byte offset into line:column
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i + 1 <= stop && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::Config,
                origin + ":" + std::to_string(line) + ":" +
                    std::to_string(column) + ": JSON parse error: " + e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Config, "cannot open config file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

}  // namespace oscilla
