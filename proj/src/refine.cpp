#include "harmlab/refine.hpp"

#include <cmath>
#include <new>
#include <numbers>

#include "harmlab/errors.hpp"
#include "harmlab/generate.hpp"

namespace harmlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double d) {
  d = std::remainder(d, kTwoPi);
  return d;
}

struct Polar {
  double r, th;
};

Polar polar_of(Vec2 p) { return {std::hypot(p[0], p[1]), std::atan2(p[1], p[0])}; }

Vec2 chart_midpoint(const SurfaceMesh& m, Vec2 p, Vec2 q) {
  switch (m.chart) {
    case ChartKind::cartesian:
    case ChartKind::none:
      return {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])};
    case ChartKind::cylinder: {
      const double a = m.chart_param;
      auto sigma = [&](double t) { return std::atan(std::sinh(t)) / a; };
      const double s = 0.5 * (sigma(p[0]) + sigma(q[0]));
      return {std::asinh(std::tan(a * s)), p[1] + 0.5 * wrap(q[1] - p[1])};
    }
    case ChartKind::polar:
    case ChartKind::hyperbolic_polar: {
      Polar a = polar_of(p), b = polar_of(q);
      if (a.r == 0.0 || b.r == 0.0) {
        const Polar& o = a.r == 0.0 ? b : a;
        const double r = 0.5 * o.r;
        return {r * std::cos(o.th), r * std::sin(o.th)};
      }
      const double th = a.th + 0.5 * wrap(b.th - a.th);
      double r;
      if (m.chart == ChartKind::polar) r = std::sqrt(a.r) * std::sqrt(b.r);
      else r = inv_log_tanh_half(0.5 * (log_tanh_half(a.r) + log_tanh_half(b.r)));
      return {r * std::cos(th), r * std::sin(th)};
    }
  }
  return p;
}

double chart_distance(const SurfaceMesh& m, Vec2 p, Vec2 q) {
  switch (m.chart) {
    case ChartKind::cartesian:
    case ChartKind::polar:
    case ChartKind::none:
      return std::hypot(p[0] - q[0], p[1] - q[1]);
    case ChartKind::cylinder:
      return cylinder_distance(m.chart_param, p[0], p[1], q[0], q[1]);
    case ChartKind::hyperbolic_polar: {
      Polar a = polar_of(p), b = polar_of(q);
      return hyperbolic_polar_distance(a.r, a.th, b.r, b.th);
    }
  }
  return 0.0;
}

}  // namespace

SurfaceMesh quadrisect(const SurfaceMesh& m) {
  const bool chart = m.has_chart() && m.chart != ChartKind::none;
  SurfaceMesh out;
  out.tag = m.tag;
  out.chart = chart ? m.chart : ChartKind::none;
  out.chart_param = m.chart_param;
  const int nv = m.num_vertices;
  out.num_vertices = nv + m.num_edges();
  if (chart) {
    out.xy = m.xy;
    out.xy.resize(out.num_vertices);
    for (int e = 0; e < m.num_edges(); ++e)
      out.xy[nv + e] = chart_midpoint(m, m.xy[m.edges[e][0]], m.xy[m.edges[e][1]]);
  }
  out.triangles.reserve(4 * m.triangles.size());
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Tri& v = m.triangles[t];
    const Tri& te = m.tri_edge[t];
    // mid[k] is the midpoint of the edge opposite corner k.
    const int m0 = nv + te[0], m1 = nv + te[1], m2 = nv + te[2];
    out.triangles.push_back({v[0], m2, m1});
    out.triangles.push_back({v[1], m0, m2});
    out.triangles.push_back({v[2], m1, m0});
    out.triangles.push_back({m0, m1, m2});
  }
  out.edges = collect_edges(out.triangles);
  out.length.assign(out.edges.size(), 0.0);
  build_topology(out);
  if (chart) {
    for (int e = 0; e < out.num_edges(); ++e)
      out.length[e] = chart_distance(out, out.xy[out.edges[e][0]], out.xy[out.edges[e][1]]);
  } else {
    for (int t = 0; t < m.num_triangles(); ++t) {
      const Tri& v = m.triangles[t];
      const Tri& te = m.tri_edge[t];
      const auto l = m.triangle_lengths(t);
      for (int k = 0; k < 3; ++k) {
        const int mid = nv + te[k];
        const double half = 0.5 * l[k];
        out.length[out.find_edge(mid, v[(k + 1) % 3])] = half;
        out.length[out.find_edge(mid, v[(k + 2) % 3])] = half;
        // Segment joining the midpoints of the two edges at corner k.
        out.length[out.find_edge(nv + te[(k + 1) % 3], nv + te[(k + 2) % 3])] = half;
      }
    }
  }
  for (const BoundaryLoop& L : m.loops) {
    BoundaryLoop R;
    R.label = L.label;
    R.role = L.role;
    const size_t n = L.cycle.size();
    for (size_t i = 0; i < n; ++i) {
      const int a = L.cycle[i], b = L.cycle[(i + 1) % n];
      R.cycle.push_back(a);
      R.cycle.push_back(nv + m.find_edge(a, b));
    }
    out.loops.push_back(std::move(R));
  }
  return out;
}

MeshFamily refine(const SurfaceMesh& m, int levels) {
  if (levels < 1) throw ParameterError("levels", "must be at least 1");
  MeshFamily fam;
  try {
    fam.meshes.push_back(m);
    for (int k = 0; k < levels; ++k) fam.meshes.push_back(quadrisect(fam.meshes.back()));
  } catch (const std::bad_alloc&) {
    throw Error(ErrorKind::resource, "out of memory while refining");
  }
  for (const SurfaceMesh& x : fam.meshes) fam.resolution.push_back(std::sqrt(static_cast<double>(x.num_edges())));
  return fam;
}

}  // namespace harmlab
