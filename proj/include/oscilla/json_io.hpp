#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "oscilla/convergence.hpp"

namespace oscilla {

using json = nlohmann::json;

// All config parsers are strict: unknown keys are rejected with the key
// path in the message, so a typo cannot silently fall back to a default.

BoundaryProfile profile_from_json(const json& j, const std::string& path);
json profile_to_json(const BoundaryProfile& p);

TrigPoly trig_from_json(const json& j, const std::string& path);
json trig_to_json(const TrigPoly& p);

struct CellSolveConfig {
  BoundaryProfile profile;
  int ny = 256;
  int nz = 64;
  double tol = 1e-10;
  bool with_theta = true;
  std::vector<int> xeps_ms;
  std::string out;         // empty: stdout
  std::string matrix_out;  // empty: no dump
};
CellSolveConfig cell_solve_config_from_json(const json& j);
json cell_solve_config_to_json(const CellSolveConfig& c);

struct SolveConfig {
  BoundaryProfile profile;
  int m = 8;
  TrigPoly forcing;
  StripMeshParams strip;
  double tol = 1e-10;
  std::string out_summary;
  std::string out_field;
};
SolveConfig solve_config_from_json(const json& j);
json solve_config_to_json(const SolveConfig& c);

struct HomogenizeConfig {
  std::optional<double> q0;  // either given directly ...
  std::optional<BoundaryProfile> profile;  // ... or computed from a cell solve
  int cell_ny = 256;
  int cell_nz = 64;
  TrigPoly forcing;
  double tol = 1e-10;
  std::string out;
};
HomogenizeConfig homogenize_config_from_json(const json& j);
json homogenize_config_to_json(const HomogenizeConfig& c);

struct ConvergeConfig {
  SweepConfig sweep;
  std::string out_prefix = "sweep";
};
ConvergeConfig converge_config_from_json(const json& j);
json converge_config_to_json(const ConvergeConfig& c);

json report_to_json(const ConvergenceReport& r);
ConvergenceReport report_from_json(const json& j);

// Parses a JSON document, translating syntax errors into Config errors
// carrying a line:column diagnostic.
json parse_json_text(const std::string& text, const std::string& origin);
json load_json_file(const std::string& path);

}  // namespace oscilla
