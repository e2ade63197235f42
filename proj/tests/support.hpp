#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "harmlab/mesh.hpp"

namespace harmlab::test {

constexpr double kPi = std::numbers::pi;

// Flat mesh from coordinates; boundary cycles become true-boundary loops L0, L1, ...
inline SurfaceMesh flat_mesh(const std::vector<Vec2>& xy, const std::vector<Tri>& tris) {
  SurfaceMesh m;
  m.tag = GeometryTag::flat;
  m.chart = ChartKind::cartesian;
  m.num_vertices = static_cast<int>(xy.size());
  m.xy = xy;
  m.triangles = tris;
  m.edges = collect_edges(tris);
  for (const Edge& e : m.edges)
    m.length.push_back(std::hypot(xy[e[0]][0] - xy[e[1]][0], xy[e[0]][1] - xy[e[1]][1]));
  build_topology(m);
  auto cycles = trace_boundary_cycles(m);
  for (size_t i = 0; i < cycles.size(); ++i)
    m.loops.push_back({"L" + std::to_string(i), cycles[i], LoopRole::true_boundary});
  return m;
}

// Jittered grid on [0,1]^2 with alternating diagonals; jitter produces obtuse triangles.
inline SurfaceMesh jittered_square(int n, double jitter, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-jitter, jitter);
  std::vector<Vec2> xy;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const bool inner = i > 0 && i < n && j > 0 && j < n;
      xy.push_back({(i + (inner ? u(rng) : 0.0)) / n, (j + (inner ? u(rng) : 0.0)) / n});
    }
  std::vector<Tri> tris;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int a = j * (n + 1) + i, b = a + 1, c = a + n + 2, d = a + n + 1;
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  return flat_mesh(xy, tris);
}

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double radius(const SurfaceMesh& m, int v) { return std::hypot(m.xy[v][0], m.xy[v][1]); }

}  // namespace harmlab::test
