#pragma once

#include <string>
#include <vector>

#include "harmlab/ends.hpp"
#include "harmlab/generate.hpp"
#include "harmlab/report.hpp"
#include "harmlab/solver.hpp"

namespace harmlab {

constexpr int kConfigSchemaVersion = 1;

// Pipelines: capacity, classify, separate, periods, betti, kahler,
// counterexample, converge. Quantities for converge: capacity, green, period,
// lambda, length.
struct ScenarioConfig {
  int schema_version = kConfigSchemaVersion;
  std::string pipeline;
  ScenarioSpec scenario;
  std::vector<int> resolution;  // pipelines use the last entry; converge the first
  ExhaustionOptions exhaustion;
  int refinements = 3;
  SolverOptions solver;
  ClassifyOptions thresholds;
  // pipeline options
  std::string core = "L0";
  std::string distinguished;  // empty: scenario default
  double omega_delta = 0.1;
  double alpha = 1.0;
  double path_s = 0.01;
  double path_S = 0.25;
  double lambda_radius = 2.0;
  double green_radius = 1.0;
  std::vector<double> eta_factors{1.1, 1.25, 1.5, 2.0};
  std::vector<double> combination;  // betti: h_c coefficients, default e_0
  std::string quantity;
  double converge_tolerance = 0.02;
  double min_order = 0.9;
  // outputs
  std::string report_path;
  std::string table_path;
};

// Throws ConfigError naming the JSON path of the first violation. Unknown
// keys are rejected at every level.
ScenarioConfig parse_config(const Json& j);
ScenarioConfig load_config(const std::string& path);
Json config_to_json(const ScenarioConfig& c);

Json scenario_to_json(const ScenarioSpec& s);
ScenarioSpec scenario_from_json(const Json& j, const std::string& path = "/scenario");
ScenarioSpec with_resolution(const ScenarioSpec& s, int res);

Report run_scenario(const ScenarioConfig& c);
Report convergence_study(const ScenarioConfig& c);

// Writes the report (and the table, when a table path is set).
void write_outputs(const Report& r, const ScenarioConfig& c);

// Closed forms used as oracles by the pipelines.
namespace oracle {
double annulus_capacity(double r_in, double r_out);
double hyperbolic_capacity(double r_core, double R);  // R = inf allowed
double flat_disk_green(double radius, double r);
double hyperbolic_disk_green(double R, double r);     // R = inf allowed
double potential_lambda(double r, double alpha);      // f = log r
double radial_length(double s, double S, double alpha);
}  // namespace oracle

}  // namespace harmlab
