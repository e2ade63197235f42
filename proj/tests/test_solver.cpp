#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "harmlab/cohomology.hpp"
#include "harmlab/errors.hpp"
#include "harmlab/generate.hpp"
#include "harmlab/solver.hpp"
#include "support.hpp"

using namespace harmlab;
using namespace harmlab::test;

namespace {

const BoundaryCondition kCapacitor{{"L0", LoopCondition::dirichlet(1.0)}, {"L1", LoopCondition::dirichlet(0.0)}};

int nearest_vertex(const SurfaceMesh& m, Vec2 p) {
  int best = -1;
  double d = INFINITY;
  for (int v = 0; v < m.num_vertices; ++v) {
    const double dv = std::hypot(m.xy[v][0] - p[0], m.xy[v][1] - p[1]);
    if (dv < d) {
      d = dv;
      best = v;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("annulus capacitor potential at radius 2 is 1/2") {
  AnnulusSpec s;
  s.res = 64;
  s.rings_at = {2.0};
  SurfaceMesh m = generate(s);
  SolveResult r = solve_laplace(m, kCapacitor);
  const double oracle = std::log(4.0 / 2.0) / std::log(4.0);
  int n = 0;
  for (int v = 0; v < m.num_vertices; ++v)
    if (std::abs(radius(m, v) - 2.0) < 1e-12) {
      CHECK(r.f[v] == doctest::Approx(oracle).epsilon(0.01));
      ++n;
    }
  CHECK(n == 64);
  CHECK(r.report.relative_residual <= 1e-10);
}

TEST_CASE("all loops Dirichlet 1 gives the constant 1") {
  SurfaceMesh m = generate(PantsSpec{});
  BoundaryCondition bc;
  for (const BoundaryLoop& l : m.loops) bc[l.label] = LoopCondition::dirichlet(1.0);
  SolveResult r = solve_laplace(m, bc);
  for (double x : r.f) CHECK(std::abs(x - 1.0) <= 1e-9);
}

TEST_CASE("Neumann loops carry zero flux") {
  SurfaceMesh m = generate(PantsSpec{});
  LaplaceOperator L = laplace_operator(m);
  BoundaryCondition bc{{"L0", LoopCondition::dirichlet(1.0)},
                       {"L1", LoopCondition::dirichlet(0.0)},
                       {"L2", LoopCondition::neumann()}};
  SolveResult r = solve_laplace(L, bc);
  const auto Lf = apply_laplacian(L, r.f);
  const auto flux = flux_sum(m, conjugate_differential(L, r.f));
  double total = 0.0;
  for (int v : m.loop("L2").cycle) {
    CHECK(std::abs(Lf[v]) <= 1e-9);
    total += flux[v];
  }
  CHECK(std::abs(total) <= 1e-8);
}

TEST_CASE("flat disk Green's function at radius 1 is log(4) / 2 pi") {
  DiskSpec s;
  s.radius = 4.0;
  s.res = 64;
  s.rings_at = {1.0};
  SurfaceMesh m = generate(s);
  REQUIRE(radius(m, 0) == 0.0);
  SolveResult g = green_function(m, 0, "L0");
  const double oracle = std::log(4.0) / (2 * kPi);
  CHECK(oracle == doctest::Approx(0.2206).epsilon(1e-3));
  int n = 0;
  for (int v = 0; v < m.num_vertices; ++v)
    if (std::abs(radius(m, v) - 1.0) < 1e-12) {
      CHECK(g.f[v] == doctest::Approx(oracle).epsilon(0.03));
      ++n;
    }
  CHECK(n > 0);
}

TEST_CASE("hyperbolic disk Green's function at geodesic radius 1") {
  HyperbolicDiskSpec s;
  s.r_max = 8.0;
  s.res = 64;
  s.rings_at = {1.0};
  SurfaceMesh m = generate(s);
  SolveResult g = green_function(m, 0, "L0");
  const double oracle = std::abs(std::log(std::tanh(0.5))) / (2 * kPi);
  CHECK(oracle == doctest::Approx(0.1228).epsilon(1e-3));
  int n = 0;
  for (int v = 0; v < m.num_vertices; ++v)
    if (std::abs(m.attr[v].r - 1.0) < 1e-12) {
      CHECK(std::abs(g.f[v]) == doctest::Approx(oracle).epsilon(0.03));
      ++n;
    }
  CHECK(n > 0);
}

TEST_CASE("Green's functions are reciprocal") {
  DiskSpec s;
  s.res = 32;
  SurfaceMesh m = generate(s);
  const int a = nearest_vertex(m, {0.7, 0.3}), b = nearest_vertex(m, {-1.9, 1.1});
  REQUIRE(a != b);
  const double gab = green_function(m, a, "L0").f[b];
  const double gba = green_function(m, b, "L0").f[a];
  CHECK(std::abs(gab - gba) <= 1e-8 * std::abs(gab));
}

TEST_CASE("Green's function values grow with the truncation radius") {
  DiskSpec s;
  s.radius = 4.0;
  s.res = 32;
  s.rings_at = {2.0};
  SurfaceMesh big = generate(s);
  Submesh small = extract_submesh(
      big, [&](int v) { return radius(big, v) <= 2.0 + 1e-9; },
      [](const SurfaceMesh&, const std::vector<int>&) { return std::make_pair(std::string("T"), LoopRole::truncation); });
  const VertexFunction gb = green_function(big, 0, "L0").f;
  REQUIRE(small.parent[0] == 0);
  const VertexFunction gs = green_function(small.mesh, 0, "T").f;
  for (int v = 0; v < small.mesh.num_vertices; ++v) CHECK(gs[v] <= gb[small.parent[v]] + 1e-12);
  CHECK(gs[0] < gb[0]);
}

TEST_CASE("unit source flux leaves through any separating cycle") {
  DiskSpec s;
  s.res = 32;
  s.rings_at = {1.0, 2.0};
  SurfaceMesh m = generate(s);
  LaplaceOperator L = laplace_operator(m);
  SolveResult g = green_function(L, 0, "L0");
  DualOneForm w = conjugate_differential(L, g.f);
  for (double R : {1.0, 2.0}) {
    std::vector<char> in(m.num_vertices, 0);
    for (int v = 0; v < m.num_vertices; ++v) in[v] = radius(m, v) <= R + 1e-9;
    CHECK(std::abs(period(w, cycle_around(m, in))) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("solutions obey the discrete maximum principle") {
  for (const ScenarioSpec& sp : {ScenarioSpec{AnnulusSpec{}}, ScenarioSpec{PantsSpec{}}}) {
    SurfaceMesh m = generate(sp);
    BoundaryCondition bc;
    for (size_t i = 0; i < m.loops.size(); ++i)
      bc[m.loops[i].label] = LoopCondition::dirichlet(0.3 * static_cast<double>(i) - 0.2);
    SolveResult r = solve_laplace(m, bc);
    const double lo = -0.2, hi = 0.3 * (m.loops.size() - 1) - 0.2;
    for (double x : r.f) {
      CHECK(x >= lo - 1e-10);
      CHECK(x <= hi + 1e-10);
    }
  }
}

TEST_CASE("solutions are invariant under vertex relabeling") {
  SurfaceMesh m = generate(PantsSpec{});
  std::vector<int> perm(m.num_vertices);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(3));
  SurfaceMesh p = permute_vertices(m, perm);
  BoundaryCondition bc{{"L0", LoopCondition::dirichlet(1.0)},
                       {"L1", LoopCondition::dirichlet(0.0)},
                       {"L2", LoopCondition::dirichlet(0.5)}};
  const VertexFunction a = solve_laplace(m, bc).f, b = solve_laplace(p, bc).f;
  for (int v = 0; v < m.num_vertices; ++v) CHECK(std::abs(a[v] - b[perm[v]]) <= 1e-8);
}

TEST_CASE("pure Neumann problems are refused") {
  SurfaceMesh m = generate(AnnulusSpec{});
  try {
    solve_laplace(m, {{"L0", LoopCondition::neumann()}, {"L1", LoopCondition::neumann()}});
    FAIL("expected a constraint error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::constraint);
  }
}

TEST_CASE("boundary conditions must name existing loops and cover all of them") {
  SurfaceMesh m = generate(AnnulusSpec{});
  CHECK_THROWS_AS(solve_laplace(m, {{"L0", LoopCondition::dirichlet(1.0)}}), ParameterError);
  CHECK_THROWS_AS(solve_laplace(m, {{"L0", LoopCondition::dirichlet(1.0)},
                                    {"L1", LoopCondition::dirichlet(0.0)},
                                    {"L7", LoopCondition::neumann()}}),
                  ParameterError);
}

TEST_CASE("a source on the boundary is a domain error") {
  SurfaceMesh m = generate(DiskSpec{});
  try {
    green_function(m, m.loops[0].cycle[0], "L0");
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("an exhausted iteration cap reports the residual") {
  AnnulusSpec s;
  s.res = 64;
  SurfaceMesh m = generate(s);
  SolverOptions opt;
  opt.tolerance = 1e-14;
  opt.max_iter_factor = 1e-6;
  try {
    solve_laplace(m, kCapacitor, opt);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(e.residual() > opt.tolerance);
  }
}
