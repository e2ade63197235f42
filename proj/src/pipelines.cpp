#include "harmlab/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "harmlab/cohomology.hpp"
#include "harmlab/errors.hpp"
#include "harmlab/kahler.hpp"
#include "harmlab/mesh_io.hpp"
#include "harmlab/refine.hpp"

namespace harmlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kClosedForm = "closed-form";
const char* const kPublished = "published";
const char* const kStructural = "structural";

// Object reader that records consumed keys and rejects the rest.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }
  ~Reader() = default;

  bool has(const std::string& k) { used_.insert(k); return j_.contains(k); }
  std::string child(const std::string& k) const { return path_ + "/" + k; }
  const Json& at(const std::string& k) { used_.insert(k); return j_.at(k); }

  double number(const std::string& k, double def) {
    if (!has(k)) return def;
    const Json& v = j_.at(k);
    if (!v.is_number()) throw ConfigError(child(k), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(child(k), "must be finite");
    return x;
  }
  int integer(const std::string& k, int def) {
    if (!has(k)) return def;
    const Json& v = j_.at(k);
    if (!v.is_number_integer()) throw ConfigError(child(k), "expected an integer");
    return v.get<int>();
  }
  bool boolean(const std::string& k, bool def) {
    if (!has(k)) return def;
    const Json& v = j_.at(k);
    if (!v.is_boolean()) throw ConfigError(child(k), "expected a boolean");
    return v.get<bool>();
  }
  std::string string(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    const Json& v = j_.at(k);
    if (!v.is_string()) throw ConfigError(child(k), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& k, std::vector<double> def) {
    if (!has(k)) return def;
    const Json& v = j_.at(k);
    if (!v.is_array()) throw ConfigError(child(k), "expected an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(child(k) + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<Vec2> points(const std::string& k, std::vector<Vec2> def) {
    if (!has(k)) return def;
    const Json& v = j_.at(k);
    if (!v.is_array()) throw ConfigError(child(k), "expected an array of [x, y] pairs");
    std::vector<Vec2> out;
    for (size_t i = 0; i < v.size(); ++i) {
      const Json& p = v[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw ConfigError(child(k) + "/" + std::to_string(i), "expected [x, y]");
      out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(child(it.key()), "unknown key");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

const std::vector<std::string> kPipelines{"capacity", "classify", "separate", "periods",
                                          "betti", "kahler", "counterexample", "converge"};
const std::vector<std::string> kQuantities{"capacity", "green", "period", "lambda", "length"};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Json solve_json(const SolveReport& r) {
  Json j;
  j["iterations"] = r.iterations;
  j["relative_residual"] = r.relative_residual;
  j["unknowns"] = r.unknowns;
  j["ic_shift"] = r.ic_shift;
  return j;
}

Json fit_json(const ModelFit& f) {
  Json j;
  j["model"] = to_string(f.kind);
  j["limit"] = f.limit;
  j["coefficient"] = f.coefficient;
  j["exponent"] = f.exponent;
  j["relative_rms"] = f.relative_rms;
  return j;
}

Json thresholds_json(const ClassifyOptions& t) {
  Json j;
  j["parabolic_fraction"] = t.parabolic_fraction;
  j["nonparabolic_fraction"] = t.nonparabolic_fraction;
  j["rms_max"] = t.rms_max;
  return j;
}

void add_solve_timing(Report& r, const std::string& key, const SolveReport& s) {
  if (!r.timings.contains(key)) r.timings[key] = Json::array();
  r.timings[key].push_back(s.wall_time);
}

void solver_residual_check(Report& r, const std::string& what, const std::vector<SolveReport>& solves,
                           double tol) {
  double worst = 0.0;
  for (const SolveReport& s : solves) worst = std::max(worst, s.relative_residual);
  r.checks.push_back(check_at_most(what + " solver relative residual", worst, tol, kStructural));
}

const AnnulusSpec& need_annulus(const ScenarioConfig& c, const std::string& pipeline) {
  auto* a = std::get_if<AnnulusSpec>(&c.scenario);
  if (!a) throw ConfigError("/scenario/kind", pipeline + " needs the annulus scenario");
  return *a;
}

std::string default_distinguished(const ScenarioSpec& s) {
  if (std::holds_alternative<HyperbolicCylinderSpec>(s)) return "L1";
  if (std::holds_alternative<GluedPlaneSpec>(s)) return "L0";
  return "L1";
}

Exhaustion make_exhaustion(const ScenarioConfig& c) {
  return build_exhaustion(with_resolution(c.scenario, c.resolution.back()), c.exhaustion);
}

Json exhaustion_json(const Exhaustion& ex) {
  Json j;
  j["scenario"] = ex.scenario;
  j["master_hash"] = mesh_hash(ex.master);
  j["nested"] = check_nesting(ex);
  Json ends = Json::array();
  for (const EndSchedule& e : ex.ends) {
    Json je;
    je["label"] = e.label;
    je["coordinate"] = e.coordinate;
    je["radius"] = e.radius;
    ends.push_back(je);
  }
  j["ends"] = ends;
  Json lv = Json::array();
  for (const Submesh& s : ex.levels) {
    Json jl;
    jl["vertices"] = s.mesh.num_vertices;
    jl["triangles"] = s.mesh.num_triangles();
    jl["hash"] = mesh_hash(s.mesh);
    lv.push_back(jl);
  }
  j["levels"] = lv;
  return j;
}

CapacityEstimate capacity_section(Report& r, const ScenarioConfig& c, const Exhaustion& ex) {
  CapacityEstimate est = capacity(ex, c.core, c.solver);
  Table t{"energies", {"level", "radius", "energy", "iterations", "relative_residual"}, {}};
  Json energies = Json::array();
  for (size_t k = 0; k < est.energies.size(); ++k) {
    t.rows.push_back({double(k), est.radii[k], est.energies[k], double(est.solves[k].iterations),
                      est.solves[k].relative_residual});
    Json e;
    e["level"] = k;
    e["radius"] = est.radii[k];
    e["energy"] = est.energies[k];
    e["solve"] = solve_json(est.solves[k]);
    energies.push_back(e);
    add_solve_timing(r, "capacity_solves", est.solves[k]);
  }
  Json cap;
  cap["core"] = c.core;
  cap["core_radius"] = est.core_radius;
  cap["energies"] = energies;
  Json fits = Json::array();
  for (const ModelFit& f : est.fits) fits.push_back(fit_json(f));
  cap["fits"] = fits;
  cap["model"] = fit_json(est.model);
  cap["raw_limit"] = est.raw_limit;
  cap["limit"] = est.limit;
  cap["monotone"] = est.monotone;
  cap["monotonicity_slack"] = est.monotonicity_slack;
  r.results["capacity"] = cap;
  r.tables.push_back(t);
  r.checks.push_back(check_flag("exhaustion levels nested", check_nesting(ex), kStructural));
  r.checks.push_back(check_flag("energies non-increasing (slack 1e-8)", est.monotone, kStructural));
  solver_residual_check(r, "capacity", est.solves, c.solver.tolerance);

  if (auto* a = std::get_if<AnnulusSpec>(&c.scenario)) {
    for (size_t k = 0; k < est.energies.size(); ++k)
      r.checks.push_back(check_relative("level " + std::to_string(k) + " energy vs 2pi/log(R/r_in)",
                                        est.energies[k], oracle::annulus_capacity(a->r_in, est.radii[k]), 0.05,
                                        kClosedForm));
  } else if (auto* h = std::get_if<HyperbolicDiskSpec>(&c.scenario)) {
    const double rc = h->r_core > 0 ? h->r_core : 1.0;
    for (size_t k = 0; k < est.energies.size(); ++k)
      r.checks.push_back(check_relative("level " + std::to_string(k) + " energy vs hyperbolic annulus capacity",
                                        est.energies[k], oracle::hyperbolic_capacity(rc, est.radii[k]), 0.05,
                                        kClosedForm));
  }
  return est;
}

void pipeline_capacity(Report& r, const ScenarioConfig& c) {
  Exhaustion ex = make_exhaustion(c);
  r.results["exhaustion"] = exhaustion_json(ex);
  capacity_section(r, c, ex);
}

void classify_section(Report& r, const ScenarioConfig& c, const CapacityEstimate& est) {
  Classification cl = classify_end(est, c.thresholds);
  Json j;
  j["verdict"] = to_string(cl.verdict);
  j["limit"] = cl.limit;
  j["first_energy"] = cl.first_energy;
  j["limit_fraction"] = cl.limit_fraction;
  j["decreasing_rms"] = cl.decreasing_rms;
  j["thresholds"] = thresholds_json(cl.thresholds);
  j["evidence"] = cl.evidence;
  r.results["classification"] = j;

  if (std::holds_alternative<AnnulusSpec>(c.scenario)) {
    r.checks.push_back(check_flag("flat end classified parabolic", cl.verdict == EndClass::parabolic, kPublished));
  } else if (auto* h = std::get_if<HyperbolicDiskSpec>(&c.scenario)) {
    r.checks.push_back(
        check_flag("hyperbolic end classified non-parabolic", cl.verdict == EndClass::non_parabolic, kPublished));
    const double rc = h->r_core > 0 ? h->r_core : 1.0;
    r.checks.push_back(check_relative("extrapolated capacity vs 2pi/|log tanh(r_core/2)|", cl.limit,
                                      oracle::hyperbolic_capacity(rc, INFINITY), 0.03, kClosedForm));
  } else if (std::holds_alternative<GluedPlaneSpec>(c.scenario)) {
    r.checks.push_back(
        check_flag("glued plane classified non-parabolic", cl.verdict == EndClass::non_parabolic, kPublished));
  }
}

void pipeline_classify(Report& r, const ScenarioConfig& c) {
  Exhaustion ex = make_exhaustion(c);
  r.results["exhaustion"] = exhaustion_json(ex);
  CapacityEstimate est = capacity_section(r, c, ex);
  classify_section(r, c, est);
}

Json harmonic_json(Report& r, const ExhaustionHarmonic& h) {
  Json j;
  j["sup_increase"] = h.sup_increase;
  j["sup_difference"] = h.sup_difference;
  j["sup_criterion"] = h.sup_criterion;
  j["pointwise_monotone"] = h.pointwise_monotone;
  j["in_unit_interval"] = h.in_unit_interval;
  j["slack"] = h.slack;
  Json solves = Json::array();
  for (const SolveReport& s : h.solves) {
    solves.push_back(solve_json(s));
    add_solve_timing(r, "exhaustion_harmonic_solves", s);
  }
  j["solves"] = solves;
  return j;
}

void pipeline_separate(Report& r, const ScenarioConfig& c) {
  Exhaustion ex = make_exhaustion(c);
  r.results["exhaustion"] = exhaustion_json(ex);
  const std::string dist = c.distinguished.empty() ? default_distinguished(c.scenario) : c.distinguished;
  ExhaustionHarmonic h = exhaustion_harmonic(ex, dist, c.solver);
  Json jh = harmonic_json(r, h);
  jh["distinguished"] = dist;
  r.checks.push_back(check_flag("exhaustion levels nested", check_nesting(ex), kStructural));
  r.checks.push_back(check_flag("sup criterion: phi_{i+1} >= phi_i - 1e-8", h.sup_criterion, kStructural));
  r.checks.push_back(check_flag("pointwise monotone iterates (slack 1e-8)", h.pointwise_monotone, kStructural));
  r.checks.push_back(check_flag("0 <= phi <= 1 (slack 1e-8)", h.in_unit_interval, kStructural));
  solver_residual_check(r, "exhaustion harmonic", h.solves, c.solver.tolerance);

  if (ex.ends.size() > 0 && ex.levels.size() > 0) {
    const bool has_end = std::any_of(ex.ends.begin(), ex.ends.end(), [&](const EndSchedule& e) { return e.label == dist; });
    if (has_end) {
      OmegaCheck om = omega_check(ex, h, dist, c.omega_delta);
      Json jo;
      jo["delta"] = om.delta;
      jo["inside_end"] = om.inside_end;
      jo["extent"] = om.extent;
      jo["extent_growth"] = om.extent_growth;
      jo["truncation_growth"] = om.truncation_growth;
      jo["compact_complement"] = om.compact_complement;
      jh["omega"] = jo;
      r.checks.push_back(check_flag("{phi > 1 - delta} inside the distinguished end", om.inside_end, kStructural));
      r.checks.push_back(check_at_most("{phi <= 1 - delta} extent growth", om.extent_growth,
                                       0.1 * om.truncation_growth, kStructural));
    }
  }

  if (std::holds_alternative<HyperbolicCylinderSpec>(c.scenario)) {
    const Submesh& fin = ex.levels.back();
    double sum = 0.0, lo = INFINITY, hi = -INFINITY;
    int n = 0;
    for (int v = 0; v < fin.mesh.num_vertices; ++v) {
      if (ex.master.attr[fin.parent[v]].r != 0.0) continue;
      sum += h.limit[v];
      lo = std::min(lo, h.limit[v]);
      hi = std::max(hi, h.limit[v]);
      ++n;
    }
    const double mean = n ? sum / n : kNaN;
    jh["neck_mean"] = mean;
    jh["neck_min"] = lo;
    jh["neck_max"] = hi;
    r.checks.push_back(check_absolute("neck value of the limit (symmetry)", mean, 0.5, 0.01, kClosedForm));
    r.checks.push_back(check_absolute("neck minimum", lo, 0.5, 0.01, kClosedForm));
    r.checks.push_back(check_absolute("neck maximum", hi, 0.5, 0.01, kClosedForm));
  }
  r.results["exhaustion_harmonic"] = jh;
}

// Dual coboundary of a triangle function: closed and exact.
DualOneForm exact_dual_form(const SurfaceMesh& m) {
  DualOneForm w;
  w.values.assign(m.num_edges(), 0.0);
  auto g = [](int t) { return std::cos(0.37 * t) + 0.25 * std::sin(1.3 * t); };
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto& lr = m.edge_tri[e];
    if (lr[0] >= 0 && lr[1] >= 0) w.values[e] = g(lr[0]) - g(lr[1]);
  }
  return w;
}

void pluriharmonic_checks(Report& r, const LaplaceOperator& L, const VertexFunction& h, const std::string& name,
                          Json& out) {
  PluriharmonicResidual pr = pluriharmonic_residual(L, h);
  Json j;
  j["flux"] = pr.flux;
  j["circulation"] = pr.circulation;
  out["pluriharmonic_residual"] = j;
  r.checks.push_back(check_at_most(name + " flux residual |dJdh|", pr.flux, 1e-8, kStructural));
  r.checks.push_back(check_at_most(name + " circulation residual |d dh|", pr.circulation, 1e-8, kStructural));
}

void pipeline_periods(Report& r, const ScenarioConfig& c) {
  SurfaceMesh m = generate(with_resolution(c.scenario, c.resolution.back()));
  r.results["mesh_hash"] = mesh_hash(m);
  LaplaceOperator L = laplace_operator(m, c.solver.parallel);
  BoundaryCondition bc;
  for (size_t i = 0; i < m.loops.size(); ++i)
    bc[m.loops[i].label] = LoopCondition::dirichlet(i == 0 ? 1.0 : 0.0);
  SolveResult s = solve_laplace(L, bc, c.solver);
  add_solve_timing(r, "periods_solve", s.report);
  HomologyBasis b = homology_basis(m);
  DualOneForm w = conjugate_differential(L, s.f);
  std::vector<double> p = periods(m, w, b);
  const double diam = mesh_diameter(m);
  const double tol = default_period_tolerance(s.report.relative_residual, diam);
  ClassVerdict v = class_nontrivial(p, tol);
  std::vector<double> pe = periods(m, exact_dual_form(m), b);
  double exact_max = 0.0;
  for (double x : pe) exact_max = std::max(exact_max, std::abs(x));

  Json j;
  j["form"] = "Jdh, h = 1 on " + m.loops.front().label + ", 0 on the other loops";
  j["solve"] = solve_json(s.report);
  j["basis_size"] = b.cycles.size();
  j["basis_rank"] = cycle_rank(m, b.cycles);
  j["warnings"] = b.warnings;
  j["periods"] = p;
  j["diameter"] = diam;
  j["tolerance"] = tol;
  j["verdict"] = {{"nontrivial", v.nontrivial}, {"witness", v.witness}, {"max_period", v.max_period},
                  {"tolerance_dominated", v.tolerance_dominated}};
  j["exact_form_max_period"] = exact_max;
  pluriharmonic_checks(r, L, s.f, "Jdh", j);
  r.results["periods"] = j;

  Table t{"periods", {"cycle", "period"}, {}};
  for (size_t i = 0; i < p.size(); ++i) t.rows.push_back({double(i), p[i]});
  r.tables.push_back(t);

  r.checks.push_back(check_at_most("exact dual form max |period|", exact_max, 1e-8, kStructural));
  r.checks.push_back(
      check_absolute("basis size 2g + l - 1", double(b.cycles.size()), double(first_betti(m)), 0.0, kStructural));
  if (m.loops.size() >= 2) {
    r.checks.push_back(check_flag("class_nontrivial verdict: non-trivial", v.nontrivial, kPublished));
  }
  if (auto* a = std::get_if<AnnulusSpec>(&c.scenario)) {
    r.checks.push_back(check_relative("|period| around the core vs 2pi/log(r_out/r_in)", std::abs(v.max_period),
                                      oracle::annulus_capacity(a->r_in, a->r_out), 0.02, kClosedForm));
  }
}

bool cmax_differs(const std::vector<double>& c) {
  return *std::max_element(c.begin(), c.end()) > *std::min_element(c.begin(), c.end());
}

void pipeline_betti(Report& r, const ScenarioConfig& c) {
  SurfaceMesh m = generate(with_resolution(c.scenario, c.resolution.back()));
  r.results["mesh_hash"] = mesh_hash(m);
  std::vector<std::string> labels;
  for (const BoundaryLoop& l : m.loops) labels.push_back(l.label);
  BettiReport br = betti_lower_bound(m, labels, c.solver);
  LaplaceOperator L = laplace_operator(m, c.solver.parallel);
  Json j;
  j["labels"] = br.labels;
  j["matrix"] = br.matrix;
  j["singular_values"] = br.singular_values;
  j["rank_tolerance"] = br.rank_tolerance;
  j["rank"] = br.rank;
  j["compact"] = br.compact;
  j["rank_within_bound"] = br.rank_within_bound;
  j["sum_h_deviation"] = br.sum_h_deviation;
  j["sum_period_norm"] = br.sum_period_norm;
  j["collar_period"] = br.collar_period;
  j["collar_tolerance"] = br.collar_tolerance;
  Json solves = Json::array();
  for (const SolveReport& s : br.solves) {
    solves.push_back(solve_json(s));
    add_solve_timing(r, "betti_solves", s);
  }
  j["solves"] = solves;
  Json res = Json::array();
  for (size_t i = 0; i < br.h.size(); ++i) {
    Json ji;
    pluriharmonic_checks(r, L, br.h[i], "Jdh_" + std::to_string(i), ji);
    res.push_back(ji["pluriharmonic_residual"]);
  }
  j["pluriharmonic_residuals"] = res;
  std::vector<double> coeff = c.combination;
  if (coeff.empty()) {
    coeff.assign(labels.size(), 0.0);
    coeff[0] = 1.0;
  }
  if (coeff.size() != labels.size())
    throw ConfigError("/options/combination", "needs one coefficient per boundary loop");
  CombinationCertificate cc = combination_certificate(m, br, coeff);
  j["combination"] = {{"c", cc.c},
                      {"max_value", cc.max_value},
                      {"boundary_max", cc.boundary_max},
                      {"max_on_boundary", cc.max_on_boundary},
                      {"periods", cc.periods},
                      {"certified", cc.certified},
                      {"reason", cc.reason}};
  r.results["betti"] = j;
  const int l = static_cast<int>(labels.size());
  r.checks.push_back(check_flag("h_c takes its maximum on the boundary", cc.max_on_boundary, kStructural));
  if (br.compact && l >= 2 && cmax_differs(coeff))
    r.checks.push_back(check_flag("Jdh_c certified non-trivial", cc.certified, kPublished));

  Table t{"period_matrix", {}, br.matrix};
  t.columns.push_back("cycle");
  for (const std::string& l : labels) t.columns.push_back(l);
  for (size_t i = 0; i < t.rows.size(); ++i) t.rows[i].insert(t.rows[i].begin(), double(i));
  r.tables.push_back(t);

  if (br.compact && connected_components(m) == 1 && genus(m) == 0)
    r.checks.push_back(check_absolute("period matrix rank = l - 1", br.rank, l - 1, 0.0, kPublished));
  r.checks.push_back(check_flag("rank within the l - 1 bound", br.rank_within_bound, kPublished));
  r.checks.push_back(check_at_most("max |sum_i h_i - 1|", br.sum_h_deviation, 1e-8, kStructural));
  r.checks.push_back(check_at_most("max |sum_i period column i|", br.sum_period_norm, 1e-6, kStructural));
  for (size_t i = 0; i < br.collar_period.size(); ++i)
    r.checks.push_back(check_at_least("|collar period| of " + labels[i] + " above tolerance",
                                      std::abs(br.collar_period[i]), br.collar_tolerance, kPublished));
  solver_residual_check(r, "betti", br.solves, c.solver.tolerance);
}

VertexFunction log_radius(const SurfaceMesh& m) {
  VertexFunction f(m.num_vertices);
  for (int v = 0; v < m.num_vertices; ++v) f[v] = std::log(std::hypot(m.xy[v][0], m.xy[v][1]));
  return f;
}

// Vertices on the positive x-axis with s <= f <= S, by decreasing f.
std::vector<int> radial_path(const SurfaceMesh& m, const VertexFunction& f, double s, double S) {
  std::vector<std::pair<double, int>> c;
  for (int v = 0; v < m.num_vertices; ++v)
    if (m.xy[v][1] == 0.0 && m.xy[v][0] > 0 && f[v] >= s * (1 - 1e-9) && f[v] <= S * (1 + 1e-9))
      c.push_back({-f[v], v});
  std::sort(c.begin(), c.end());
  std::vector<int> p;
  for (const auto& x : c) p.push_back(x.second);
  return p;
}

double mean_lambda_at(const SurfaceMesh& m, const ConformalMetric& g, double radius) {
  double sum = 0.0;
  int n = 0;
  for (int v = 0; v < m.num_vertices; ++v)
    if (std::abs(std::hypot(m.xy[v][0], m.xy[v][1]) - radius) <= 1e-12 * radius) {
      sum += g.vertex_lambda[v];
      ++n;
    }
  if (n == 0) throw domain_error("no vertex ring at radius " + format_double(radius));
  return sum / n;
}

// min over triangles of |grad f| from the planar chart; recorded, not enforced.
double gradient_floor(const SurfaceMesh& m, const VertexFunction& f) {
  double lo = INFINITY;
  for (const Tri& t : m.triangles) {
    const Vec2 &a = m.xy[t[0]], &b = m.xy[t[1]], &c = m.xy[t[2]];
    const double ux = b[0] - a[0], uy = b[1] - a[1], vx = c[0] - a[0], vy = c[1] - a[1];
    const double det = ux * vy - uy * vx;
    const double du = f[t[1]] - f[t[0]], dv = f[t[2]] - f[t[0]];
    const double gx = (du * vy - dv * uy) / det, gy = (dv * ux - du * vx) / det;
    lo = std::min(lo, std::hypot(gx, gy));
  }
  return lo;
}

void pipeline_kahler(Report& r, const ScenarioConfig& c) {
  need_annulus(c, "kahler");
  SurfaceMesh m = generate(with_resolution(c.scenario, c.resolution.back()));
  r.results["mesh_hash"] = mesh_hash(m);
  const VertexFunction f = log_radius(m);
  PotentialChoice pc;
  pc.kind = PotentialChoice::Kind::power;
  pc.alpha = c.alpha;
  ConformalMetric g = potential_metric(m, f, pc);
  const double lam = mean_lambda_at(m, g, c.lambda_radius);
  const std::vector<int> path = radial_path(m, f, c.path_s, c.path_S);
  CompletenessReport cr = completeness_check(g, path, c.path_s, c.path_S, c.alpha);
  const double quad = oracle::radial_length(c.path_s, c.path_S, c.alpha);

  Json j;
  j["defining_function"] = "log r";
  j["epsilon"] = gradient_floor(m, f);
  j["potential"] = "-f^-alpha / alpha";
  j["alpha"] = c.alpha;
  j["lambda_min"] = g.lambda_min;
  j["lambda_at_radius"] = {{"radius", c.lambda_radius}, {"value", lam},
                           {"oracle", oracle::potential_lambda(c.lambda_radius, c.alpha)}};
  j["path"] = {{"s", c.path_s}, {"S", c.path_S}, {"vertices", path.size()}, {"length", cr.length},
               {"quadrature", quad}, {"bound", cr.bound}};
  r.results["kahler"] = j;

  r.checks.push_back(check_flag("lambda > 0 everywhere", g.lambda_min > 0.0, kStructural));
  r.checks.push_back(check_relative("lambda at radius vs closed form", lam,
                                    oracle::potential_lambda(c.lambda_radius, c.alpha), 0.03, kClosedForm));
  r.checks.push_back(check_relative("radial path length vs quadrature", cr.length, quad, 0.05, kClosedForm));
  r.checks.push_back(check_at_least("radial path length vs 0.95 x completeness bound", cr.length, 0.95 * cr.bound,
                                    kPublished));
}

void pipeline_counterexample(Report& r, const ScenarioConfig& c) {
  auto* gs = std::get_if<GluedPlaneSpec>(&c.scenario);
  if (!gs) throw ConfigError("/scenario/kind", "counterexample needs the glued_plane scenario");
  const GluedParams gp = resolve_glued(*gs);
  Json jp;
  jp["weights"] = gp.weights;
  jp["centers"] = gp.centers;
  jp["tube_radii"] = gp.tube_radii;
  jp["tube_bound"] = gp.tube_bound;
  jp["C"] = gp.C;
  r.results["parameters"] = jp;
  for (size_t a = 0; a < gp.tube_radii.size(); ++a)
    r.checks.push_back(check_at_most("delta_" + std::to_string(a + 1) + " <= exp(-C/c_a)", gp.tube_radii[a],
                                     gp.tube_bound[a], kPublished));

  Exhaustion ex = make_exhaustion(c);
  r.results["exhaustion"] = exhaustion_json(ex);
  CapacityEstimate est = capacity_section(r, c, ex);
  classify_section(r, c, est);

  ExhaustionHarmonic h = exhaustion_harmonic(ex, c.core, c.solver);
  Json jh = harmonic_json(r, h);
  jh["distinguished"] = c.core;
  r.results["exhaustion_harmonic"] = jh;
  r.checks.push_back(check_flag("harmonic limit iterates monotone", h.sup_criterion && h.pointwise_monotone,
                                kStructural));

  Json prof = Json::object();
  for (const EndSchedule& e : ex.ends) {
    Profile p = distinguishability_profile(h.limit, ex, e.label);
    Json jpf;
    jpf["m"] = p.m;
    jpf["distinguishable_consistent"] = p.distinguishable_consistent;
    jpf["not_distinguishable_consistent"] = p.not_distinguishable_consistent;
    prof[e.label] = jpf;
    if (e.coordinate == "log r" && !p.m.empty()) {
      const double lo = *std::min_element(p.m.begin(), p.m.end());
      r.checks.push_back(check_at_least("Euclidean end profile min vs 0.5 x first value", lo, 0.5 * p.m.front(),
                                        kPublished));
    }
  }
  r.results["profiles"] = prof;

  std::vector<Vec2> centers;
  for (double x : gp.centers) centers.push_back({x, 0.0});
  const double tail = gs->weights.empty() ? inverse_square_tail(gs->handles) : 0.0;
  const BarrierFamily base = make_barrier(1.0, centers, gp.weights, tail);
  const EndSchedule* eu = nullptr;
  for (const EndSchedule& e : ex.ends)
    if (e.coordinate == "log r") eu = &e;
  Table t{"domination", {"eta", "level", "log_truncation", "checked", "log_max_extent", "qualifies", "violations",
                         "worst_margin"}, {}};
  Json dom = Json::array();
  for (double factor : c.eta_factors) {
    const BarrierFamily F = make_barrier(factor * base.eta0, centers, gp.weights, tail);
    int violations = 0;
    bool finest_qualifies = false;
    for (size_t k = 0; k < ex.levels.size(); ++k) {
      DominationReport d = barrier_domination_check(h.levels[k], ex.levels[k].mesh, F);
      const double logR = eu ? eu->radius[k] : INFINITY;
      const double ext = d.max_extent > 0 ? std::log(d.max_extent) : -INFINITY;
      // D_eta must close up strictly inside the truncation circle.
      const bool q = ext < logR - 0.5;
      if (q) {
        violations += static_cast<int>(d.violations.size());
        if (k + 1 == ex.levels.size()) finest_qualifies = true;
      }
      t.rows.push_back({F.eta, double(k), logR, double(d.checked), ext, q ? 1.0 : 0.0, double(d.violations.size()),
                        d.worst_margin});
      Json jd;
      jd["eta"] = F.eta;
      jd["level"] = k;
      jd["checked"] = d.checked;
      jd["max_extent"] = d.max_extent;
      jd["qualifies"] = q;
      jd["violations"] = d.violations.size();
      jd["worst_margin"] = d.worst_margin;
      dom.push_back(jd);
    }
    const std::string tag = "eta = " + format_double(factor) + " eta0";
    r.checks.push_back(check_flag(tag + ": D_eta closes inside the finest truncation", finest_qualifies, kStructural));
    r.checks.push_back(check_absolute(tag + ": domination violations C phi < F_eta", violations, 0.0, 0.0,
                                      kPublished));
  }
  r.results["barrier"] = {{"eta0", base.eta0}, {"eta0_tail", base.eta0_tail}, {"C", base.C},
                          {"eta_factors", c.eta_factors}, {"levels", dom}};
  r.tables.push_back(t);
  r.checks.push_back(check_at_most("eta0 partial sum <= pi^2/6", base.eta0, kPi * kPi / 6, kStructural));
  r.checks.push_back(check_at_least("eta0 partial sum + tail >= pi^2/6", base.eta0 + base.eta0_tail, kPi * kPi / 6,
                                    kStructural));
}

struct ConvergePoint {
  double resolution = 0.0;
  int triangles = 0;
  double value = 0.0;
};

double converge_value(const ScenarioConfig& c, const SurfaceMesh& m, double& oracle_value, Report& r) {
  const std::string& q = c.quantity;
  if (q == "capacity") {
    const AnnulusSpec& a = need_annulus(c, "converge capacity");
    SurfaceMesh mm = m;
    for (BoundaryLoop& l : mm.loops)
      if (l.label == "L1") l.role = LoopRole::truncation;
    SolveReport rep;
    const double e = capacity_level(mm, "L0", c.solver, &rep);
    add_solve_timing(r, "converge_solves", rep);
    oracle_value = oracle::annulus_capacity(a.r_in, a.r_out);
    return e;
  }
  if (q == "period") {
    const AnnulusSpec& a = need_annulus(c, "converge period");
    LaplaceOperator L = laplace_operator(m, c.solver.parallel);
    SolveResult s = solve_laplace(L, {{"L0", LoopCondition::dirichlet(1)}, {"L1", LoopCondition::dirichlet(0)}},
                                  c.solver);
    add_solve_timing(r, "converge_solves", s.report);
    std::vector<double> p = periods(m, conjugate_differential(L, s.f), homology_basis(m));
    if (p.size() != 1) throw domain_error("annulus basis must have one cycle");
    oracle_value = oracle::annulus_capacity(a.r_in, a.r_out);
    return std::abs(p[0]);
  }
  if (q == "green") {
    const double rr = c.green_radius;
    SolveResult s = green_function(m, 0, "L0", c.solver);
    add_solve_timing(r, "converge_solves", s.report);
    double sum = 0.0;
    int n = 0;
    for (int v = 0; v < m.num_vertices; ++v) {
      const double rv = std::hypot(m.xy[v][0], m.xy[v][1]);
      if (std::abs(rv - rr) <= 1e-12 * rr) {
        sum += s.f[v];
        ++n;
      }
    }
    if (n == 0) throw domain_error("no vertex ring at radius " + format_double(rr));
    if (auto* d = std::get_if<DiskSpec>(&c.scenario)) oracle_value = oracle::flat_disk_green(d->radius, rr);
    else if (auto* h = std::get_if<HyperbolicDiskSpec>(&c.scenario))
      oracle_value = oracle::hyperbolic_disk_green(h->r_max, rr);
    else throw ConfigError("/scenario/kind", "converge green needs disk or hyperbolic_disk");
    return sum / n;
  }
  if (q == "lambda" || q == "length") {
    need_annulus(c, "converge " + q);
    const VertexFunction f = log_radius(m);
    PotentialChoice pc;
    pc.alpha = c.alpha;
    ConformalMetric g = potential_metric(m, f, pc);
    if (q == "lambda") {
      oracle_value = oracle::potential_lambda(c.lambda_radius, c.alpha);
      return mean_lambda_at(m, g, c.lambda_radius);
    }
    oracle_value = oracle::radial_length(c.path_s, c.path_S, c.alpha);
    return completeness_check(g, radial_path(m, f, c.path_s, c.path_S), c.path_s, c.path_S, c.alpha).length;
  }
  throw ConfigError("/options/quantity", "unknown quantity " + q);
}

}  // namespace

namespace oracle {

double annulus_capacity(double r_in, double r_out) { return 2 * kPi / std::log(r_out / r_in); }

double hyperbolic_capacity(double r_core, double R) {
  const double outer = std::isinf(R) ? 0.0 : log_tanh_half(R);
  return 2 * kPi / (outer - log_tanh_half(r_core));
}

double flat_disk_green(double radius, double r) { return std::log(radius / r) / (2 * kPi); }

double hyperbolic_disk_green(double R, double r) {
  const double outer = std::isinf(R) ? 0.0 : log_tanh_half(R);
  return (outer - log_tanh_half(r)) / (2 * kPi);
}

double potential_lambda(double r, double alpha) {
  const double f = std::log(r);
  return 1.0 + (1.0 + alpha) / (r * r * std::pow(f, alpha + 2.0));
}

// Composite Simpson in u = log f of sqrt(lambda) dr/du, r = e^f.
double radial_length(double s, double S, double alpha) {
  const int n = 20000;
  const double a = std::log(s), b = std::log(S), h = (b - a) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double f = std::exp(a + i * h), r = std::exp(f);
    const double g = std::sqrt(potential_lambda(r, alpha)) * r * f;
    sum += g * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return sum * h / 3.0;
}

}  // namespace oracle

ScenarioSpec with_resolution(const ScenarioSpec& s, int res) {
  ScenarioSpec out = s;
  std::visit([res](auto& spec) { spec.res = res; }, out);
  return out;
}

Json scenario_to_json(const ScenarioSpec& s) {
  Json j;
  j["kind"] = scenario_name(s);
  std::visit(
      [&j](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, AnnulusSpec>) {
          j["r_in"] = spec.r_in;
          j["r_out"] = spec.r_out;
          j["rings_at"] = spec.rings_at;
          j["grade_first"] = spec.grade_first;
          j["grade_ratio"] = spec.grade_ratio;
        } else if constexpr (std::is_same_v<T, DiskSpec>) {
          j["radius"] = spec.radius;
          j["rings_at"] = spec.rings_at;
        } else if constexpr (std::is_same_v<T, PantsSpec>) {
          j["outer_radius"] = spec.outer_radius;
          Json c = Json::array();
          for (const Vec2& p : spec.hole_centers) c.push_back({p[0], p[1]});
          j["hole_centers"] = c;
          j["hole_radii"] = spec.hole_radii;
        } else if constexpr (std::is_same_v<T, HyperbolicDiskSpec>) {
          j["r_max"] = spec.r_max;
          j["r_core"] = spec.r_core;
          j["rings_at"] = spec.rings_at;
          j["max_doublings"] = spec.max_doublings;
        } else if constexpr (std::is_same_v<T, HyperbolicCylinderSpec>) {
          j["neck_length"] = spec.neck_length;
          j["t_max"] = spec.t_max;
          j["rings_at"] = spec.rings_at;
          j["max_doublings"] = spec.max_doublings;
        } else if constexpr (std::is_same_v<T, GluedPlaneSpec>) {
          j["handles"] = spec.handles;
          j["weights"] = spec.weights;
          j["tube_radii"] = spec.tube_radii;
          j["centers"] = spec.centers;
          j["euclid_log_truncation"] = spec.euclid_log_truncation;
          j["hyper_truncation"] = spec.hyper_truncation;
          j["far_res"] = spec.far_res;
          j["hyper_res"] = spec.hyper_res;
          j["block"] = spec.block;
          j["hyper_hole_radius"] = spec.hyper_hole_radius;
          j["max_doublings"] = spec.max_doublings;
        } else {
          j["width"] = spec.width;
          j["height"] = spec.height;
        }
      },
      s);
  return j;
}

ScenarioSpec scenario_from_json(const Json& j, const std::string& path) {
  Reader rd(j, path);
  if (!rd.has("kind")) throw ConfigError(path + "/kind", "missing");
  const std::string kind = rd.string("kind", "");
  ScenarioSpec out;
  if (kind == "annulus") {
    AnnulusSpec s;
    s.r_in = rd.number("r_in", s.r_in);
    s.r_out = rd.number("r_out", s.r_out);
    s.rings_at = rd.numbers("rings_at", s.rings_at);
    s.grade_first = rd.number("grade_first", s.grade_first);
    s.grade_ratio = rd.number("grade_ratio", s.grade_ratio);
    out = s;
  } else if (kind == "disk") {
    DiskSpec s;
    s.radius = rd.number("radius", s.radius);
    s.rings_at = rd.numbers("rings_at", s.rings_at);
    out = s;
  } else if (kind == "pair_of_pants") {
    PantsSpec s;
    s.outer_radius = rd.number("outer_radius", s.outer_radius);
    s.hole_centers = rd.points("hole_centers", s.hole_centers);
    s.hole_radii = rd.numbers("hole_radii", s.hole_radii);
    out = s;
  } else if (kind == "hyperbolic_disk") {
    HyperbolicDiskSpec s;
    s.r_max = rd.number("r_max", s.r_max);
    s.r_core = rd.number("r_core", s.r_core);
    s.rings_at = rd.numbers("rings_at", s.rings_at);
    s.max_doublings = rd.integer("max_doublings", s.max_doublings);
    out = s;
  } else if (kind == "hyperbolic_cylinder") {
    HyperbolicCylinderSpec s;
    s.neck_length = rd.number("neck_length", s.neck_length);
    s.t_max = rd.number("t_max", s.t_max);
    s.rings_at = rd.numbers("rings_at", s.rings_at);
    s.max_doublings = rd.integer("max_doublings", s.max_doublings);
    out = s;
  } else if (kind == "glued_plane") {
    GluedPlaneSpec s;
    s.handles = rd.integer("handles", s.handles);
    s.weights = rd.numbers("weights", s.weights);
    s.tube_radii = rd.numbers("tube_radii", s.tube_radii);
    s.centers = rd.numbers("centers", s.centers);
    s.euclid_log_truncation = rd.numbers("euclid_log_truncation", s.euclid_log_truncation);
    s.hyper_truncation = rd.numbers("hyper_truncation", s.hyper_truncation);
    s.far_res = rd.integer("far_res", s.far_res);
    s.hyper_res = rd.integer("hyper_res", s.hyper_res);
    s.block = rd.integer("block", s.block);
    s.hyper_hole_radius = rd.number("hyper_hole_radius", s.hyper_hole_radius);
    s.max_doublings = rd.integer("max_doublings", s.max_doublings);
    out = s;
  } else if (kind == "rectangle") {
    RectangleSpec s;
    s.width = rd.number("width", s.width);
    s.height = rd.number("height", s.height);
    out = s;
  } else {
    throw ConfigError(path + "/kind", "unknown scenario '" + kind + "'");
  }
  rd.finish();
  return out;
}

ScenarioConfig parse_config(const Json& j) {
  Reader rd(j, "");
  ScenarioConfig c;
  if (!rd.has("schema_version")) throw ConfigError("/schema_version", "missing");
  c.schema_version = rd.integer("schema_version", 0);
  if (c.schema_version != kConfigSchemaVersion)
    throw ConfigError("/schema_version", "unsupported version " + std::to_string(c.schema_version));
  c.pipeline = rd.string("pipeline", "");
  if (!c.pipeline.empty() && std::find(kPipelines.begin(), kPipelines.end(), c.pipeline) == kPipelines.end())
    throw ConfigError("/pipeline", "unknown pipeline '" + c.pipeline + "'");
  if (!rd.has("scenario")) throw ConfigError("/scenario", "missing");
  c.scenario = scenario_from_json(rd.at("scenario"), "/scenario");
  if (!rd.has("resolution")) throw ConfigError("/resolution", "missing");
  {
    const Json& r = rd.at("resolution");
    if (!r.is_array() || r.empty()) throw ConfigError("/resolution", "expected a non-empty array of integers");
    for (size_t i = 0; i < r.size(); ++i) {
      if (!r[i].is_number_integer() || r[i].get<int>() < 1)
        throw ConfigError("/resolution/" + std::to_string(i), "expected a positive integer");
      c.resolution.push_back(r[i].get<int>());
    }
  }
  if (rd.has("exhaustion")) {
    Reader e(rd.at("exhaustion"), "/exhaustion");
    c.exhaustion.levels = e.integer("levels", c.exhaustion.levels);
    c.exhaustion.ratio = e.number("ratio", c.exhaustion.ratio);
    e.finish();
  }
  c.refinements = rd.integer("refinements", c.refinements);
  if (c.refinements < 0) throw ConfigError("/refinements", "must be non-negative");
  if (rd.has("solver")) {
    Reader s(rd.at("solver"), "/solver");
    c.solver.tolerance = s.number("tolerance", c.solver.tolerance);
    c.solver.max_iter_factor = s.number("max_iter_factor", c.solver.max_iter_factor);
    c.solver.parallel = s.boolean("parallel", c.solver.parallel);
    s.finish();
    if (!(c.solver.tolerance > 0)) throw ConfigError("/solver/tolerance", "must be positive");
  }
  if (rd.has("thresholds")) {
    Reader t(rd.at("thresholds"), "/thresholds");
    c.thresholds.parabolic_fraction = t.number("parabolic_fraction", c.thresholds.parabolic_fraction);
    c.thresholds.nonparabolic_fraction = t.number("nonparabolic_fraction", c.thresholds.nonparabolic_fraction);
    c.thresholds.rms_max = t.number("rms_max", c.thresholds.rms_max);
    t.finish();
  }
  if (rd.has("options")) {
    Reader o(rd.at("options"), "/options");
    c.core = o.string("core", c.core);
    c.distinguished = o.string("distinguished", c.distinguished);
    c.omega_delta = o.number("omega_delta", c.omega_delta);
    c.alpha = o.number("alpha", c.alpha);
    c.path_s = o.number("path_s", c.path_s);
    c.path_S = o.number("path_S", c.path_S);
    c.lambda_radius = o.number("lambda_radius", c.lambda_radius);
    c.green_radius = o.number("green_radius", c.green_radius);
    c.eta_factors = o.numbers("eta_factors", c.eta_factors);
    c.combination = o.numbers("combination", c.combination);
    c.quantity = o.string("quantity", c.quantity);
    c.converge_tolerance = o.number("converge_tolerance", c.converge_tolerance);
    c.min_order = o.number("min_order", c.min_order);
    o.finish();
    if (!c.quantity.empty() && std::find(kQuantities.begin(), kQuantities.end(), c.quantity) == kQuantities.end())
      throw ConfigError("/options/quantity", "unknown quantity '" + c.quantity + "'");
    if (!(c.alpha > 0)) throw ConfigError("/options/alpha", "must be positive");
  }
  if (rd.has("output")) {
    Reader o(rd.at("output"), "/output");
    c.report_path = o.string("report", c.report_path);
    c.table_path = o.string("table", c.table_path);
    o.finish();
  }
  rd.finish();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, "cannot read config file");
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

Json config_to_json(const ScenarioConfig& c) {
  Json j;
  j["schema_version"] = c.schema_version;
  j["pipeline"] = c.pipeline;
  j["scenario"] = scenario_to_json(c.scenario);
  j["resolution"] = c.resolution;
  j["exhaustion"] = {{"levels", c.exhaustion.levels}, {"ratio", c.exhaustion.ratio}};
  j["refinements"] = c.refinements;
  j["solver"] = {{"tolerance", c.solver.tolerance}, {"max_iter_factor", c.solver.max_iter_factor},
                 {"parallel", c.solver.parallel}};
  j["thresholds"] = thresholds_json(c.thresholds);
  Json o;
  o["core"] = c.core;
  o["distinguished"] = c.distinguished;
  o["omega_delta"] = c.omega_delta;
  o["alpha"] = c.alpha;
  o["path_s"] = c.path_s;
  o["path_S"] = c.path_S;
  o["lambda_radius"] = c.lambda_radius;
  o["green_radius"] = c.green_radius;
  o["eta_factors"] = c.eta_factors;
  o["combination"] = c.combination;
  o["quantity"] = c.quantity;
  o["converge_tolerance"] = c.converge_tolerance;
  o["min_order"] = c.min_order;
  j["options"] = o;
  j["output"] = {{"report", c.report_path}, {"table", c.table_path}};
  return j;
}

Report run_scenario(const ScenarioConfig& c) {
  if (c.pipeline == "converge") return convergence_study(c);
  Report r;
  r.config = config_to_json(c);
  const auto t0 = std::chrono::steady_clock::now();
  if (c.pipeline == "capacity") pipeline_capacity(r, c);
  else if (c.pipeline == "classify") pipeline_classify(r, c);
  else if (c.pipeline == "separate") pipeline_separate(r, c);
  else if (c.pipeline == "periods") pipeline_periods(r, c);
  else if (c.pipeline == "betti") pipeline_betti(r, c);
  else if (c.pipeline == "kahler") pipeline_kahler(r, c);
  else if (c.pipeline == "counterexample") pipeline_counterexample(r, c);
  else throw ConfigError("/pipeline", c.pipeline.empty() ? "missing" : "unknown pipeline '" + c.pipeline + "'");
  r.timings["pipeline"] = c.pipeline;
  r.timings["total_seconds"] = seconds_since(t0);
  return r;
}

Report convergence_study(const ScenarioConfig& c) {
  if (c.quantity.empty()) throw ConfigError("/options/quantity", "missing");
  Report r;
  r.config = config_to_json(c);
  const auto t0 = std::chrono::steady_clock::now();
  const SurfaceMesh base = generate(with_resolution(c.scenario, c.resolution.front()));
  MeshFamily fam = refine(base, c.refinements);
  std::vector<double> values, errors;
  double oracle_value = kNaN;
  Json hashes = Json::array();
  for (const SurfaceMesh& m : fam.meshes) {
    values.push_back(converge_value(c, m, oracle_value, r));
    errors.push_back(std::abs(values.back() - oracle_value));
    hashes.push_back(mesh_hash(m));
  }
  Table t{"convergence", {"resolution", "triangles", "value", "error", "observed_order", "richardson_order"}, {}};
  std::vector<double> orders;
  for (size_t k = 0; k < values.size(); ++k) {
    double p = kNaN, pr = kNaN;
    if (k >= 1) {
      p = std::log(errors[k - 1] / errors[k]) / std::log(fam.resolution[k] / fam.resolution[k - 1]);
      orders.push_back(p);
    }
    if (k >= 2) {
      const double d1 = values[k - 1] - values[k - 2], d2 = values[k] - values[k - 1];
      pr = std::log(std::abs(d1 / d2)) / std::log(fam.resolution[k] / fam.resolution[k - 1]);
    }
    t.rows.push_back({fam.resolution[k], double(fam.meshes[k].num_triangles()), values[k], errors[k], p, pr});
  }
  Json j;
  j["quantity"] = c.quantity;
  j["oracle"] = oracle_value;
  j["values"] = values;
  j["errors"] = errors;
  j["observed_orders"] = orders;
  j["mesh_hashes"] = hashes;
  j["finest_triangles"] = fam.meshes.back().num_triangles();
  r.results["convergence"] = j;
  r.tables.push_back(t);
  double min_order = INFINITY;
  for (double p : orders) min_order = std::min(min_order, std::isnan(p) ? -INFINITY : p);
  if (!orders.empty())
    r.checks.push_back(check_at_least("minimum observed order over refinements", min_order, c.min_order,
                                      kClosedForm));
  r.checks.push_back(check_relative("finest value vs oracle", values.back(), oracle_value, c.converge_tolerance,
                                    kClosedForm));
  r.timings["pipeline"] = "converge";
  r.timings["total_seconds"] = seconds_since(t0);
  return r;
}

void write_outputs(const Report& r, const ScenarioConfig& c) {
  if (!c.report_path.empty()) emit_report(r, c.report_path, ReportFormat::json);
  if (!c.table_path.empty()) {
    Report tables_only;
    tables_only.tables = r.tables;
    emit_report(tables_only, c.table_path, ReportFormat::csv);
  }
}

}  // namespace harmlab
