#include "harmlab/ends.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "harmlab/errors.hpp"

namespace harmlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> schedule(double base, double ratio, int levels) {
  std::vector<double> r;
  for (int k = 0; k < levels; ++k) r.push_back(base * std::pow(ratio, k));
  return r;
}

bool within(double c, double R) { return !(c > R + 1e-9 * std::max(1.0, std::abs(R))); }

void extract_levels(Exhaustion& ex) {
  const int nl = static_cast<int>(ex.ends.front().radius.size());
  for (int k = 0; k < nl; ++k) {
    auto keep = [&](int v) {
      for (const EndSchedule& e : ex.ends)
        if (!std::isnan(e.coord[v]) && !within(e.coord[v], e.radius[k])) return false;
      return true;
    };
    // New cycles are named below from the end their vertices belong to.
    auto label = [](const SurfaceMesh&, const std::vector<int>&) -> std::pair<std::string, LoopRole> {
      return {"", LoopRole::truncation};
    };
    Submesh s = extract_submesh(ex.master, keep, label);
    // Relabel new truncation cycles by end membership of their vertices.
    for (BoundaryLoop& L : s.mesh.loops) {
      if (!L.label.empty()) continue;
      const int mv = s.parent[L.cycle.front()];
      for (const EndSchedule& e : ex.ends)
        if (!std::isnan(e.coord[mv])) L.label = e.label;
      if (L.label.empty()) throw Error(ErrorKind::geometry, "truncation cycle outside every end");
    }
    std::sort(s.mesh.loops.begin(), s.mesh.loops.end(),
              [](const BoundaryLoop& a, const BoundaryLoop& b) { return a.label < b.label; });
    for (size_t i = 1; i < s.mesh.loops.size(); ++i)
      if (s.mesh.loops[i].label == s.mesh.loops[i - 1].label)
        throw Error(ErrorKind::geometry, "truncation of one end produced several cycles");
    ex.levels.push_back(std::move(s));
  }
}

void set_truncation_role(SurfaceMesh& m, const std::string& label) {
  for (BoundaryLoop& L : m.loops)
    if (L.label == label) L.role = LoopRole::truncation;
}

double rel_rms(const std::vector<double>& y, const std::vector<double>& fit) {
  double s = 0.0, mean = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    s += (y[i] - fit[i]) * (y[i] - fit[i]);
    mean += std::abs(y[i]);
  }
  mean /= y.size();
  return mean > 0 ? std::sqrt(s / y.size()) / mean : 0.0;
}

// Least squares y = L + c x.
ModelFit linear_fit(ModelKind kind, const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  ModelFit f;
  f.kind = kind;
  f.coefficient = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  f.limit = (sy - f.coefficient * sx) / n;
  std::vector<double> fit(y.size());
  for (size_t i = 0; i < y.size(); ++i) fit[i] = f.limit + f.coefficient * x[i];
  f.relative_rms = rel_rms(y, fit);
  return f;
}

}  // namespace

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::constant: return "constant";
    case ModelKind::inverse_log: return "c/log(R/r_core)";
    case ModelKind::power: return "c*R^-p";
  }
  return "?";
}

const char* to_string(EndClass c) {
  switch (c) {
    case EndClass::parabolic: return "parabolic";
    case EndClass::non_parabolic: return "non-parabolic";
    case EndClass::inconclusive: return "inconclusive";
  }
  return "?";
}

Exhaustion build_exhaustion(const ScenarioSpec& s, const ExhaustionOptions& opt) {
  if (opt.levels < 4) throw ParameterError("levels", "an exhaustion needs at least 4 levels");
  if (!(opt.ratio > 1.0)) throw ParameterError("ratio", "must exceed 1");
  Exhaustion ex;
  ex.scenario = scenario_name(s);
  if (auto* a = std::get_if<AnnulusSpec>(&s)) {
    AnnulusSpec m = *a;
    auto R = schedule(a->r_out, opt.ratio, opt.levels);
    m.r_out = R.back();
    m.rings_at.insert(m.rings_at.end(), R.begin(), R.end() - 1);
    ex.master = generate(m);
    set_truncation_role(ex.master, "L1");
    ex.core_radius = a->r_in;
    EndSchedule e{"L1", R, {}, "r"};
    for (const VertexAttr& v : ex.master.attr) e.coord.push_back(v.r);
    ex.ends.push_back(std::move(e));
  } else if (auto* h = std::get_if<HyperbolicDiskSpec>(&s)) {
    HyperbolicDiskSpec m = *h;
    if (m.r_core == 0.0) m.r_core = 1.0;
    auto R = schedule(h->r_max, opt.ratio, opt.levels);
    if (!(R.front() > m.r_core)) throw ParameterError("r_max", "first truncation must exceed r_core");
    m.r_max = R.back();
    m.rings_at.insert(m.rings_at.end(), R.begin(), R.end() - 1);
    ex.master = generate(m);
    ex.core_radius = m.r_core;
    EndSchedule e{"L1", R, {}, "geodesic r"};
    for (const VertexAttr& v : ex.master.attr) e.coord.push_back(v.r);
    ex.ends.push_back(std::move(e));
  } else if (auto* c = std::get_if<HyperbolicCylinderSpec>(&s)) {
    HyperbolicCylinderSpec m = *c;
    auto R = schedule(c->t_max, opt.ratio, opt.levels);
    m.t_max = R.back();
    m.rings_at.insert(m.rings_at.end(), R.begin(), R.end() - 1);
    ex.master = generate(m);
    ex.core_radius = 0.0;
    EndSchedule lo{"L0", R, {}, "t"}, hi{"L1", R, {}, "t"};
    for (const VertexAttr& v : ex.master.attr) {
      lo.coord.push_back(v.r < 0 ? -v.r : kNaN);
      hi.coord.push_back(v.r > 0 ? v.r : kNaN);
    }
    ex.ends.push_back(std::move(lo));
    ex.ends.push_back(std::move(hi));
  } else if (auto* g = std::get_if<GluedPlaneSpec>(&s)) {
    if (g->euclid_log_truncation.size() != g->hyper_truncation.size())
      throw ParameterError("euclid_log_truncation", "needs one entry per hyperbolic truncation");
    if (static_cast<int>(g->euclid_log_truncation.size()) < 4)
      throw ParameterError("euclid_log_truncation", "an exhaustion needs at least 4 levels");
    ex.master = generate(*g);
    ex.core_radius = 1.0;
    EndSchedule e{"L1", g->euclid_log_truncation, {}, "log r"};
    EndSchedule hh{"L2", g->hyper_truncation, {}, "geodesic r"};
    for (const VertexAttr& v : ex.master.attr) {
      e.coord.push_back(v.piece == piece::sheet ? std::log(v.r) : kNaN);
      hh.coord.push_back(v.piece == piece::hyper_sheet ? v.r : kNaN);
    }
    ex.ends.push_back(std::move(e));
    ex.ends.push_back(std::move(hh));
  } else {
    throw domain_error("scenario " + scenario_name(s) + " has no unbounded model to exhaust");
  }
  extract_levels(ex);
  return ex;
}

bool check_nesting(const Exhaustion& ex) {
  const SurfaceMesh& M = ex.master;
  std::vector<int> prev;
  for (const Submesh& s : ex.levels) {
    std::vector<char> in(M.num_vertices, 0);
    for (int p : s.parent) in[p] = 1;
    for (int p : prev)
      if (!in[p]) return false;
    for (const BoundaryLoop& L : M.loops) {
      if (L.role != LoopRole::true_boundary) continue;
      const int li = s.mesh.loop_index(L.label);
      if (li < 0) return false;
      const auto& cyc = s.mesh.loops[li].cycle;
      if (cyc.size() != L.cycle.size()) return false;
      for (int v : cyc)
        if (std::find(L.cycle.begin(), L.cycle.end(), s.parent[v]) == L.cycle.end()) return false;
    }
    prev = s.parent;
  }
  return true;
}

double capacity_level(const SurfaceMesh& m, const std::string& core, const SolverOptions& opt,
                      SolveReport* rep, VertexFunction* phi) {
  if (m.loop_index(core) < 0) throw ParameterError("core", "unknown loop " + core);
  BoundaryCondition bc;
  bool end = false;
  for (const BoundaryLoop& L : m.loops) {
    if (L.label == core) bc[L.label] = LoopCondition::dirichlet(1.0);
    else if (L.role == LoopRole::truncation) {
      bc[L.label] = LoopCondition::dirichlet(0.0);
      end = true;
    } else bc[L.label] = LoopCondition::neumann();
  }
  if (!end) throw domain_error("capacity needs an end: no truncation loop besides the core");
  LaplaceOperator L = laplace_operator(m, opt.parallel);
  SolveResult r = solve_laplace(L, bc, opt);
  if (rep) *rep = r.report;
  const double E = dirichlet_energy(L, r.f);
  if (phi) *phi = std::move(r.f);
  return E;
}

std::vector<ModelFit> fit_models(const std::vector<double>& radii, const std::vector<double>& energies,
                                 double core_radius) {
  std::vector<ModelFit> out;
  ModelFit c;
  c.kind = ModelKind::constant;
  for (double e : energies) c.limit += e;
  c.limit /= energies.size();
  c.relative_rms = rel_rms(energies, std::vector<double>(energies.size(), c.limit));
  out.push_back(c);

  std::vector<double> x(radii.size());
  const double rc = core_radius > 0 ? core_radius : 1.0;
  for (size_t i = 0; i < radii.size(); ++i) x[i] = 1.0 / std::log(radii[i] / rc);
  out.push_back(linear_fit(ModelKind::inverse_log, x, energies));

  ModelFit best;
  best.relative_rms = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 1000; ++k) {
    const double p = 0.01 * k;
    for (size_t i = 0; i < radii.size(); ++i) x[i] = std::pow(radii[i], -p);
    ModelFit f = linear_fit(ModelKind::power, x, energies);
    f.exponent = p;
    if (f.relative_rms < best.relative_rms) best = f;
  }
  out.push_back(best);
  return out;
}

CapacityEstimate capacity(const Exhaustion& ex, const std::string& core, const SolverOptions& opt) {
  CapacityEstimate est;
  est.radii = ex.ends.front().radius;
  est.core_radius = ex.core_radius;
  for (size_t k = 0; k < ex.levels.size(); ++k) {
    SolveReport rep;
    try {
      est.energies.push_back(capacity_level(ex.levels[k].mesh, core, opt, &rep));
    } catch (const Error& e) {
      throw Error(e.kind(), "capacity level " + std::to_string(k) + ": " + e.what());
    }
    est.solves.push_back(rep);
  }
  for (size_t k = 1; k < est.energies.size(); ++k)
    if (est.energies[k] > est.energies[k - 1] * (1.0 + est.monotonicity_slack)) est.monotone = false;
  // The Euclidean glued end is scheduled in log r.
  std::vector<double> R = est.radii;
  if (ex.ends.front().coordinate == "log r")
    for (double& r : R) r = std::exp(r);
  est.fits = fit_models(R, est.energies, est.core_radius);
  est.model = *std::min_element(est.fits.begin(), est.fits.end(),
                                [](const ModelFit& a, const ModelFit& b) { return a.relative_rms < b.relative_rms; });
  est.raw_limit = est.model.limit;
  est.limit = std::max(0.0, est.raw_limit);
  return est;
}

Classification classify_end(const CapacityEstimate& est, const ClassifyOptions& opt) {
  if (est.energies.size() < 4) throw Error(ErrorKind::insufficient_data, "classification needs at least 4 levels");
  Classification c;
  c.thresholds = opt;
  c.limit = est.limit;
  c.first_energy = est.energies.front();
  c.limit_fraction = c.first_energy > 0 ? c.limit / c.first_energy : 0.0;
  c.decreasing_rms = std::numeric_limits<double>::infinity();
  for (const ModelFit& f : est.fits)
    if (f.kind != ModelKind::constant) c.decreasing_rms = std::min(c.decreasing_rms, f.relative_rms);
  std::ostringstream ev;
  ev << "model " << to_string(est.model.kind) << ", limit/E1 = " << c.limit_fraction
     << ", best decreasing-model relative RMS = " << c.decreasing_rms;
  if (c.limit_fraction < opt.parabolic_fraction && c.decreasing_rms < opt.rms_max)
    c.verdict = EndClass::parabolic;
  else if (c.limit_fraction >= opt.nonparabolic_fraction)
    c.verdict = EndClass::non_parabolic;
  else
    c.verdict = EndClass::inconclusive;
  c.evidence = ev.str();
  return c;
}

ExhaustionHarmonic exhaustion_harmonic(const Exhaustion& ex, const std::string& distinguished,
                                       const SolverOptions& opt) {
  if (ex.levels.size() < 4) throw Error(ErrorKind::insufficient_data, "exhaustion_harmonic needs at least 4 levels");
  ExhaustionHarmonic out;
  for (size_t k = 0; k < ex.levels.size(); ++k) {
    const SurfaceMesh& m = ex.levels[k].mesh;
    if (m.loop_index(distinguished) < 0) throw ParameterError("distinguished", "unknown loop " + distinguished);
    BoundaryCondition bc;
    bool zero = false;
    for (const BoundaryLoop& L : m.loops) {
      if (L.label == distinguished) bc[L.label] = LoopCondition::dirichlet(1.0);
      else if (L.role == LoopRole::truncation) {
        bc[L.label] = LoopCondition::dirichlet(0.0);
        zero = true;
      } else bc[L.label] = LoopCondition::neumann();
    }
    if (!zero) throw domain_error("no second region to separate from " + distinguished);
    SolveResult r;
    try {
      r = solve_laplace(m, bc, opt);
    } catch (const Error& e) {
      throw Error(e.kind(), "exhaustion level " + std::to_string(k) + ": " + e.what());
    }
    out.solves.push_back(r.report);
    out.levels.push_back(std::move(r.f));
  }
  const int nv = ex.master.num_vertices;
  const size_t nl = ex.levels.size();
  // Master-indexed values per level (NaN where absent).
  std::vector<std::vector<double>> on(nl, std::vector<double>(nv, kNaN));
  for (size_t k = 0; k < nl; ++k)
    for (size_t i = 0; i < ex.levels[k].parent.size(); ++i) on[k][ex.levels[k].parent[i]] = out.levels[k][i];
  for (size_t k = 0; k < nl; ++k)
    for (double v : out.levels[k])
      if (v < -out.slack || v > 1.0 + out.slack) out.in_unit_interval = false;
  for (size_t k = 0; k + 1 < nl; ++k) {
    double inc = -std::numeric_limits<double>::infinity(), dif = 0.0;
    for (int v = 0; v < nv; ++v) {
      if (std::isnan(on[k][v])) continue;
      const double d = on[k + 1][v] - on[k][v];
      inc = std::max(inc, d);
      dif = std::max(dif, std::abs(d));
    }
    out.sup_increase.push_back(inc);
    out.sup_difference.push_back(dif);
    if (inc < -out.slack) out.sup_criterion = false;
  }
  for (int v = 0; v < nv; ++v) {
    bool up = true, down = true;
    for (size_t k = 0; k + 1 < nl; ++k) {
      if (std::isnan(on[k][v])) continue;
      const double d = on[k + 1][v] - on[k][v];
      if (d < -out.slack) up = false;
      if (d > out.slack) down = false;
    }
    if (!up && !down) out.pointwise_monotone = false;
  }
  out.limit = out.levels.back();
  return out;
}

OmegaCheck omega_check(const Exhaustion& ex, const ExhaustionHarmonic& h, const std::string& end, double delta) {
  OmegaCheck oc;
  oc.delta = delta;
  const EndSchedule* E = nullptr;
  for (const EndSchedule& e : ex.ends)
    if (e.label == end) E = &e;
  if (!E) throw ParameterError("end", "unknown end " + end);
  for (size_t k = 0; k < ex.levels.size(); ++k) {
    const Submesh& s = ex.levels[k];
    double extent = 0.0;
    for (size_t i = 0; i < s.parent.size(); ++i) {
      const double c = E->coord[s.parent[i]];
      const double phi = h.levels[k][i];
      if (phi > 1.0 - delta && std::isnan(c)) oc.inside_end = false;
      if (!std::isnan(c) && phi <= 1.0 - delta) extent = std::max(extent, c);
    }
    oc.extent.push_back(extent);
  }
  oc.extent_growth = oc.extent.back() - oc.extent[oc.extent.size() - 2];
  oc.truncation_growth = E->radius.back() - E->radius[E->radius.size() - 2];
  oc.compact_complement = oc.extent_growth <= 0.1 * oc.truncation_growth;
  return oc;
}

Profile distinguishability_profile(const VertexFunction& phi, const Exhaustion& ex, const std::string& end) {
  const EndSchedule* E = nullptr;
  for (const EndSchedule& e : ex.ends)
    if (e.label == end) E = &e;
  if (!E) throw ParameterError("end", "unknown end " + end);
  const Submesh& fine = ex.levels.back();
  Profile p;
  for (size_t k = 0; k + 1 < E->radius.size(); ++k) {
    double mk = 0.0;
    for (size_t i = 0; i < fine.parent.size(); ++i) {
      const double c = E->coord[fine.parent[i]];
      if (std::isnan(c)) continue;
      if (within(E->radius[k], c) && within(c, E->radius[k + 1])) mk = std::max(mk, phi[i]);
    }
    p.m.push_back(mk);
  }
  if (!p.m.empty()) {
    p.distinguishable_consistent = p.m.back() < 0.1 * p.m.front();
    p.not_distinguishable_consistent = true;
    for (double x : p.m)
      if (x < 0.5 * p.m.front()) p.not_distinguishable_consistent = false;
  }
  return p;
}

double inverse_square_tail(int A) { return 1.0 / A; }

BarrierFamily make_barrier(double eta, std::vector<Vec2> centers, std::vector<double> weights, double eta0_tail) {
  if (!(eta > 0)) throw ParameterError("eta", "must be positive");
  if (centers.size() != weights.size()) throw ParameterError("weights", "need one weight per centre");
  BarrierFamily F;
  F.eta = eta;
  F.centers = std::move(centers);
  F.weights = std::move(weights);
  F.eta0_tail = eta0_tail;
  for (size_t a = 0; a < F.weights.size(); ++a) {
    if (!(F.weights[a] > 0)) throw ParameterError("weights", "must be positive");
    F.eta0 += F.weights[a];
    F.C += F.weights[a] * std::log(1.0 + std::hypot(F.centers[a][0], F.centers[a][1]));
  }
  return F;
}

std::vector<double> barrier_evaluate(const BarrierFamily& F, const std::vector<Vec2>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const Vec2& x : points) {
    double v = 1.0 - F.eta * std::log(std::hypot(x[0], x[1]));
    for (size_t a = 0; a < F.centers.size(); ++a)
      v += F.weights[a] * std::log(std::hypot(x[0] - F.centers[a][0], x[1] - F.centers[a][1]));
    out.push_back(v);
  }
  return out;
}

DominationReport barrier_domination_check(const VertexFunction& phi, const SurfaceMesh& level,
                                          const BarrierFamily& F) {
  if (level.attr.size() != static_cast<size_t>(level.num_vertices))
    throw precondition_error("domination check needs glued-plane vertex attributes");
  DominationReport rep;
  rep.eta = F.eta;
  rep.C = F.C;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int v = 0; v < level.num_vertices; ++v) {
    const VertexAttr& a = level.attr[v];
    double x, y, absx;
    int own = -1;
    double own_dist = 0.0;
    if (a.piece == piece::sheet) {
      x = a.r * std::cos(a.theta);
      y = a.r * std::sin(a.theta);
      absx = a.r;
    } else if (piece::is_euclid_patch(a.piece)) {
      own = piece::handle_of(a.piece);
      if (own >= static_cast<int>(F.centers.size())) continue;
      x = F.centers[own][0] + a.r * std::cos(a.theta);
      y = F.centers[own][1] + a.r * std::sin(a.theta);
      absx = std::hypot(x, y);
      own_dist = a.r;
    } else {
      continue;
    }
    // The core circle |x| = 1 is the boundary of B_E.
    if (!(absx > 1.0 + 1e-12)) continue;
    double f = 1.0 - F.eta * std::log(absx);
    for (size_t b = 0; b < F.centers.size(); ++b) {
      const double d = static_cast<int>(b) == own ? own_dist : std::hypot(x - F.centers[b][0], y - F.centers[b][1]);
      f += F.weights[b] * std::log(d);
    }
    if (!(f > 0)) continue;
    ++rep.checked;
    rep.max_extent = std::max(rep.max_extent, absx);
    const double margin = F.C * phi[v] - f;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < 0) rep.violations.push_back(v);
  }
  if (rep.checked == 0) rep.worst_margin = 0.0;
  return rep;
}

}  // namespace harmlab
