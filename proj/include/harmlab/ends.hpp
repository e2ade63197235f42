#pragma once

#include <string>
#include <vector>

#include "harmlab/generate.hpp"
#include "harmlab/solver.hpp"

namespace harmlab {

// One end of an exhaustion: the truncation loop label it produces, its radius
// schedule, and the radial coordinate of every master vertex lying in it
// (NaN elsewhere). For the Euclidean glued sheet the coordinate is log r.
struct EndSchedule {
  std::string label;
  std::vector<double> radius;
  std::vector<double> coord;
  std::string coordinate;  // "r", "geodesic r", "t", "log r"
};

// Levels are submeshes of one master mesh; parent maps level ids to master ids.
struct Exhaustion {
  std::string scenario;
  SurfaceMesh master;
  std::vector<EndSchedule> ends;
  std::vector<Submesh> levels;
  double core_radius = 1.0;  // radius of the compact core, for the log model
};

struct ExhaustionOptions {
  int levels = 4;
  double ratio = 2.0;
};

// Radii r_k = base * ratio^k with base r_out (annulus), r_max (hyperbolic
// disk, core at r_core or 1), t_max (cylinder); glued_plane uses its listed
// truncations. Other scenarios have no end: domain error.
Exhaustion build_exhaustion(const ScenarioSpec& s, const ExhaustionOptions& opt = {});

// Every level contains the previous one and all true-boundary loops intact.
bool check_nesting(const Exhaustion& ex);

enum class ModelKind { constant, inverse_log, power };
const char* to_string(ModelKind k);

struct ModelFit {
  ModelKind kind = ModelKind::constant;
  double limit = 0.0;
  double coefficient = 0.0;
  double exponent = 0.0;  // power model only
  double relative_rms = 0.0;
};

enum class EndClass { parabolic, non_parabolic, inconclusive };
const char* to_string(EndClass c);

struct ClassifyOptions {
  double parabolic_fraction = 0.05;
  double nonparabolic_fraction = 0.20;
  double rms_max = 0.10;
};

struct CapacityEstimate {
  std::vector<double> radii;     // schedule of the first end
  std::vector<double> energies;
  std::vector<SolveReport> solves;
  std::vector<ModelFit> fits;    // constant, inverse_log, power
  ModelFit model;                // smallest relative RMS
  double raw_limit = 0.0;
  double limit = 0.0;            // max(raw_limit, 0)
  double core_radius = 1.0;
  bool monotone = true;          // non-increasing within 1e-8 (relative)
  double monotonicity_slack = 1e-8;
};

// Energy of the capacitor potential: Dirichlet 1 on `core`, 0 on every other
// truncation loop, Neumann elsewhere. Needs a truncation loop: domain error.
double capacity_level(const SurfaceMesh& m, const std::string& core, const SolverOptions& opt = {},
                      SolveReport* rep = nullptr, VertexFunction* phi = nullptr);

CapacityEstimate capacity(const Exhaustion& ex, const std::string& core, const SolverOptions& opt = {});

std::vector<ModelFit> fit_models(const std::vector<double>& radii, const std::vector<double>& energies,
                                 double core_radius);

struct Classification {
  EndClass verdict = EndClass::inconclusive;
  double limit = 0.0;
  double first_energy = 0.0;
  double limit_fraction = 0.0;
  double decreasing_rms = 0.0;  // best of inverse_log and power
  ClassifyOptions thresholds;
  std::string evidence;
};

Classification classify_end(const CapacityEstimate& est, const ClassifyOptions& opt = {});

struct ExhaustionHarmonic {
  std::vector<VertexFunction> levels;  // per level, on level vertex ids
  std::vector<SolveReport> solves;
  VertexFunction limit;                // finest level
  std::vector<double> sup_increase;    // sup over common vertices of phi_{i+1} - phi_i
  std::vector<double> sup_difference;  // sup |phi_{i+1} - phi_i|
  bool sup_criterion = true;           // every sup_increase >= -slack
  bool pointwise_monotone = true;      // each vertex sequence monotone in one direction
  bool in_unit_interval = true;
  double slack = 1e-8;
};

// Dirichlet 1 on the distinguished loop, 0 on every other truncation loop,
// Neumann on true-boundary loops, per level.
ExhaustionHarmonic exhaustion_harmonic(const Exhaustion& ex, const std::string& distinguished,
                                       const SolverOptions& opt = {});

struct OmegaCheck {
  double delta = 0.1;
  bool inside_end = true;          // {phi > 1 - delta} lies in the distinguished end
  std::vector<double> extent;      // per level: max end coordinate with phi <= 1 - delta
  double extent_growth = 0.0;
  double truncation_growth = 0.0;
  bool compact_complement = true;  // extent_growth <= 0.1 * truncation_growth
};

OmegaCheck omega_check(const Exhaustion& ex, const ExhaustionHarmonic& h, const std::string& end, double delta);

struct Profile {
  std::vector<double> m;  // max over the k-th truncation annulus
  bool distinguishable_consistent = false;      // m_last < 0.1 m_1
  bool not_distinguishable_consistent = false;  // every m_k >= 0.5 m_1
};

// phi lives on the finest level of ex.
Profile distinguishability_profile(const VertexFunction& phi, const Exhaustion& ex, const std::string& end);

struct BarrierFamily {
  double eta = 1.0;
  std::vector<Vec2> centers;
  std::vector<double> weights;
  double eta0 = 0.0;       // partial sum of the weights
  double eta0_tail = 0.0;  // bound on the omitted tail
  double C = 1.0;          // 1 + sum c_a log(1 + |x_a|)
};

BarrierFamily make_barrier(double eta, std::vector<Vec2> centers, std::vector<double> weights,
                           double eta0_tail = 0.0);

// Integral tail bound of sum_{a > A} a^-2.
double inverse_square_tail(int A);

// F_eta(x) = 1 - eta log|x| + sum c_a log|x - x_a|.
std::vector<double> barrier_evaluate(const BarrierFamily& F, const std::vector<Vec2>& points);

struct DominationReport {
  double eta = 0.0;
  double C = 0.0;
  int checked = 0;               // vertices of D_eta
  double max_extent = 0.0;       // largest |x| in D_eta
  std::vector<int> violations;   // level vertex ids with C phi < F_eta
  double worst_margin = 0.0;     // min of C phi - F_eta over D_eta
};

// Glued-plane levels only: Euclidean-sheet and Euclidean-patch vertices with
// |x| > 1 and F_eta > 0 form D_eta.
DominationReport barrier_domination_check(const VertexFunction& phi, const SurfaceMesh& level,
                                          const BarrierFamily& F);

}  // namespace harmlab
