#include "harmlab/kahler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "harmlab/errors.hpp"

namespace harmlab {

double smoothing_psi(double t, double d) {
  const double q = 0.25 * d;
  if (t <= q) return t;
  if (t >= 2.0 * q) return 1.5 * q;
  const double u = (t - q) / q;
  const SmoothingCoefficients c;
  return q * (c.c0 + u * (c.c1 + u * (c.c2 + u * c.c3)));
}

double smoothing_psi_slope(double t, double d) {
  const double q = 0.25 * d;
  if (t <= q) return 1.0;
  if (t >= 2.0 * q) return 0.0;
  const double u = (t - q) / q;
  const SmoothingCoefficients c;
  return c.c1 + u * (2.0 * c.c2 + u * 3.0 * c.c3);
}

VertexFunction smooth_defining_function(const DefiningFunctionSet& set, double delta) {
  if (!(delta > 0)) throw ParameterError("delta", "must be positive");
  if (set.f.size() != set.collar.size()) throw ParameterError("collar", "need one collar per defining function");
  size_t nv = 0;
  for (const auto& f : set.f) nv = std::max(nv, f.size());
  std::vector<int> owner(nv, -1);
  VertexFunction inf(nv, delta);
  for (size_t i = 0; i < set.f.size(); ++i)
    for (int v : set.collar[i]) {
      if (owner[v] >= 0 && owner[v] != static_cast<int>(i))
        throw domain_error("collars U_" + std::to_string(owner[v]) + " and U_" + std::to_string(i) + " overlap");
      owner[v] = static_cast<int>(i);
      inf[v] = std::min(inf[v], set.f[i][v]);
    }
  VertexFunction out(nv);
  for (size_t v = 0; v < nv; ++v) out[v] = smoothing_psi(inf[v], delta);
  return out;
}

double PotentialChoice::value(double t) const {
  switch (kind) {
    case Kind::power: return -std::pow(t, -alpha) / alpha;
    case Kind::log: return std::log(t);
    case Kind::constant: return 0.0;
  }
  return 0.0;
}

double PotentialChoice::slope(double t) const {
  switch (kind) {
    case Kind::power: return std::pow(t, -alpha - 1.0);
    case Kind::log: return 1.0 / t;
    case Kind::constant: return 0.0;
  }
  return 0.0;
}

double PotentialChoice::second(double t) const {
  switch (kind) {
    case Kind::power: return -(alpha + 1.0) * std::pow(t, -alpha - 2.0);
    case Kind::log: return -1.0 / (t * t);
    case Kind::constant: return 0.0;
  }
  return 0.0;
}

ConformalMetric potential_metric(const SurfaceMesh& m, const VertexFunction& f, const PotentialChoice& choice) {
  if (choice.kind == PotentialChoice::Kind::power && !(choice.alpha > 0))
    throw ParameterError("alpha", "must be positive for the power potential");
  const int nv = m.num_vertices;
  ConformalMetric g;
  g.f = f;
  g.evaluated.assign(nv, 0);
  g.vertex_lambda.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    if (m.on_boundary[v] || !(f[v] > 0)) continue;
    bool ok = true;
    for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) ok = ok && f[m.adj_vertex[k]] > 0;
    g.evaluated[v] = ok;
  }
  const LaplaceOperator L = laplace_operator(m);
  VertexFunction p(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    bool needed = g.evaluated[v];
    for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1] && !needed; ++k) needed = g.evaluated[m.adj_vertex[k]];
    if (needed) p[v] = choice.value(f[v]);
  }
  const VertexFunction Lp = apply_laplacian(L, p);
  const std::vector<double> A = vertex_mass(m);
  std::queue<int> q;
  for (int v = 0; v < nv; ++v)
    if (g.evaluated[v]) {
      g.vertex_lambda[v] = 1.0 + Lp[v] / A[v];
      q.push(v);
    }
  if (q.empty()) throw precondition_error("f is positive on no closed vertex star");
  // Breadth-first fill, each new vertex taking the max over settled neighbours.
  std::vector<char> settled(g.evaluated.begin(), g.evaluated.end());
  while (!q.empty()) {
    std::vector<int> frontier;
    while (!q.empty()) {
      frontier.push_back(q.front());
      q.pop();
    }
    std::vector<int> next;
    for (int v : frontier)
      for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) {
        const int u = m.adj_vertex[k];
        if (settled[u]) continue;
        double best = -std::numeric_limits<double>::infinity();
        for (int j = m.adj_offset[u]; j < m.adj_offset[u + 1]; ++j)
          if (settled[m.adj_vertex[j]]) best = std::max(best, g.vertex_lambda[m.adj_vertex[j]]);
        g.vertex_lambda[u] = best;
        next.push_back(u);
      }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    for (int u : next) {
      settled[u] = 1;
      q.push(u);
    }
  }
  g.triangle_lambda.resize(m.num_triangles());
  g.lambda_min = std::numeric_limits<double>::infinity();
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Tri& c = m.triangles[t];
    const double lam = (g.vertex_lambda[c[0]] + g.vertex_lambda[c[1]] + g.vertex_lambda[c[2]]) / 3.0;
    if (!(lam > 0))
      throw Error(ErrorKind::positivity, "triangle " + std::to_string(t) + ": conformal factor " +
                                             std::to_string(lam) + " <= 0 (needs phi' >= 0, phi'' <= 0)");
    g.triangle_lambda[t] = lam;
    g.lambda_min = std::min(g.lambda_min, lam);
  }
  g.mesh = m;
  g.mesh.tag = GeometryTag::conformal;
  for (int e = 0; e < m.num_edges(); ++e) {
    double s = 0.0;
    int n = 0;
    for (int t : m.edge_tri[e])
      if (t >= 0) {
        s += g.triangle_lambda[t];
        ++n;
      }
    g.mesh.length[e] = m.length[e] * std::sqrt(s / n);
  }
  return g;
}

double completeness_bound(double s, double S, double alpha) {
  return 2.0 * std::sqrt(1.0 + alpha) / alpha * (std::pow(s, -0.5 * alpha) - std::pow(S, -0.5 * alpha));
}

CompletenessReport completeness_check(const ConformalMetric& g, const std::vector<int>& path, double s, double S,
                                      double alpha) {
  if (!(s > 0 && s < S)) throw ParameterError("s", "need 0 < s < S");
  if (path.size() < 2) throw precondition_error("path needs at least two vertices");
  CompletenessReport r;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    if (!(g.f[path[i + 1]] < g.f[path[i]])) throw precondition_error("f is not decreasing along the path");
    const int e = g.mesh.find_edge(path[i], path[i + 1]);
    if (e < 0) throw precondition_error("path vertices are not adjacent");
    r.length += g.mesh.length[e];
  }
  r.bound = completeness_bound(s, S, alpha);
  r.pass = r.length >= 0.95 * r.bound;
  return r;
}

PluriharmonicResidual pluriharmonic_residual(const LaplaceOperator& L, const VertexFunction& h) {
  const SurfaceMesh& m = *L.mesh;
  PluriharmonicResidual r;
  const auto flux = flux_sum(m, conjugate_differential(L, h));
  for (int v = 0; v < m.num_vertices; ++v)
    if (!m.on_boundary[v]) r.flux = std::max(r.flux, std::abs(flux[v]));
  for (double c : triangle_circulation(m, differential(m, h))) r.circulation = std::max(r.circulation, std::abs(c));
  return r;
}

SuperharmonicReport superharmonicity_check(const LaplaceOperator& L, const VertexFunction& f,
                                           const std::vector<int>& collar, double tolerance) {
  const SurfaceMesh& m = *L.mesh;
  SuperharmonicReport r;
  r.tolerance = tolerance;
  r.min_value = std::numeric_limits<double>::infinity();
  const VertexFunction Lf = apply_laplacian(L, f);
  const std::vector<double> A = vertex_mass(m);
  for (int v : collar) {
    if (m.on_boundary[v]) continue;
    const double x = Lf[v] / A[v];
    if (x < r.min_value) {
      r.min_value = x;
      r.witness = v;
    }
  }
  if (r.witness < 0) r.min_value = 0.0;
  r.pass = r.min_value >= -tolerance;
  return r;
}

}  // namespace harmlab
