#include "harmlab/dec.hpp"

#include <algorithm>
#include <cmath>

#include "harmlab/errors.hpp"
#include "harmlab/kernels.hpp"

namespace harmlab {

namespace {

// Cotangent at the corner opposite side a; sides normalised by the largest.
double cot_opposite(double a, double b, double c, double area4) {
  return (b * b + c * c - a * a) / area4;
}

double half_cot_in(const SurfaceMesh& m, int t, int e) {
  const auto l = m.triangle_lengths(t);
  const Tri& te = m.tri_edge[t];
  const int k = te[0] == e ? 0 : te[1] == e ? 1 : 2;
  return 0.5 * triangle_cotangents(l[0], l[1], l[2])[k];
}

}  // namespace

double PrimalOneForm::on(const SurfaceMesh& m, int from, int to) const {
  const int e = m.find_edge(from, to);
  return from < to ? values[e] : -values[e];
}

bool triangle_degenerate(double l0, double l1, double l2) {
  double a = l0, b = l1, c = l2;
  if (a < b) std::swap(a, b);
  if (a < c) std::swap(a, c);
  if (b < c) std::swap(b, c);
  if (!(c > 0) || !std::isfinite(a)) return true;
  b /= a;
  c /= a;
  a = 1.0;
  // Largest angle A >= pi - eps  <=>  tan(A/2)^2 >= 4/eps^2.
  const double s = 0.5 * (a + (b + c));
  const double sa = 0.5 * (c - (a - b));
  const double sb = 0.5 * (c + (a - b));
  const double sc = 0.5 * (a + (b - c));
  if (!(sa > 0)) return true;
  return s * sa <= sb * sc * 2.5e-19;
}

std::array<double, 3> triangle_cotangents(double l0, double l1, double l2) {
  const double s = std::max({l0, l1, l2});
  const double a = l0 / s, b = l1 / s, c = l2 / s;
  const double area4 = 4.0 * triangle_area(a, b, c);
  return {cot_opposite(a, b, c, area4), cot_opposite(b, c, a, area4), cot_opposite(c, a, b, area4)};
}

std::vector<double> cotan_weights(const SurfaceMesh& m, bool parallel) {
  const int nt = m.num_triangles();
  for (int t = 0; t < nt; ++t) {
    const auto l = m.triangle_lengths(t);
    if (triangle_degenerate(l[0], l[1], l[2])) throw GeometryError(t, "degenerate triangle (angle >= pi - 1e-9)");
  }
  const int ne = m.num_edges();
  std::vector<double> w(ne, 0.0);
  auto edge_weight = [&](int e) {
    double s = 0.0;
    for (int side = 0; side < 2; ++side) {
      const int t = m.edge_tri[e][side];
      if (t >= 0) s += half_cot_in(m, t, e);
    }
    return s;
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e) w[e] = edge_weight(e);
  } else {
    for (int e = 0; e < ne; ++e) w[e] = edge_weight(e);
  }
  return w;
}

LaplaceOperator laplace_operator(const SurfaceMesh& m, bool parallel) {
  LaplaceOperator L;
  L.mesh = &m;
  L.parallel = parallel;
  L.weight = cotan_weights(m, parallel);
  L.diag.assign(m.num_vertices, 0.0);
  for (int v = 0; v < m.num_vertices; ++v)
    for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) L.diag[v] += L.weight[m.adj_edge[k]];
  return L;
}

VertexFunction apply_laplacian(const LaplaceOperator& L, const VertexFunction& f) {
  const SurfaceMesh& m = *L.mesh;
  VertexFunction y;
  if (L.parallel) kernels::laplacian_omp(m.adj_offset, m.adj_vertex, m.adj_edge, L.weight, f, y);
  else kernels::laplacian_serial(m.adj_offset, m.adj_vertex, m.adj_edge, L.weight, f, y);
  return y;
}

PrimalOneForm differential(const SurfaceMesh& m, const VertexFunction& f) {
  PrimalOneForm df;
  df.values.resize(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) df.values[e] = f[m.edges[e][1]] - f[m.edges[e][0]];
  return df;
}

DualOneForm conjugate_differential(const LaplaceOperator& L, const VertexFunction& f) {
  const SurfaceMesh& m = *L.mesh;
  DualOneForm w;
  w.values.resize(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) w.values[e] = L.weight[e] * (f[m.edges[e][1]] - f[m.edges[e][0]]);
  return w;
}

std::vector<double> flux_sum(const SurfaceMesh& m, const DualOneForm& w) {
  std::vector<double> s(m.num_vertices, 0.0);
  for (int v = 0; v < m.num_vertices; ++v) {
    double acc = 0.0;
    for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) {
      const int e = m.adj_edge[k];
      acc += m.edges[e][0] == v ? -w.values[e] : w.values[e];
    }
    s[v] = acc;
  }
  return s;
}

std::vector<double> triangle_circulation(const SurfaceMesh& m, const PrimalOneForm& df) {
  std::vector<double> c(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Tri& v = m.triangles[t];
    const Tri& te = m.tri_edge[t];
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int a = v[(k + 1) % 3], b = v[(k + 2) % 3];
      s += a < b ? df.values[te[k]] : -df.values[te[k]];
    }
    c[t] = s;
  }
  return c;
}

double dirichlet_energy(const LaplaceOperator& L, const VertexFunction& f) {
  const SurfaceMesh& m = *L.mesh;
  std::vector<int> ea(m.num_edges()), eb(m.num_edges());
  for (int e = 0; e < m.num_edges(); ++e) {
    ea[e] = m.edges[e][0];
    eb[e] = m.edges[e][1];
  }
  return L.parallel ? kernels::energy_omp(ea, eb, L.weight, f) : kernels::energy_serial(ea, eb, L.weight, f);
}

std::vector<double> vertex_mass(const SurfaceMesh& m) {
  std::vector<double> a(m.num_vertices, 0.0);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto l = m.triangle_lengths(t);
    const double third = triangle_area(l[0], l[1], l[2]) / 3.0;
    for (int v : m.triangles[t]) a[v] += third;
  }
  return a;
}

}  // namespace harmlab
