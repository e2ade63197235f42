#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <random>

#include "harmlab/cohomology.hpp"
#include "harmlab/dec.hpp"
#include "harmlab/errors.hpp"
#include "harmlab/generate.hpp"
#include "harmlab/solver.hpp"
#include "support.hpp"

using namespace harmlab;
using namespace harmlab::test;

namespace {

VertexFunction random_function(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VertexFunction f(n);
  for (double& x : f) x = u(rng);
  return f;
}

SolveResult capacitor(const SurfaceMesh& m) {
  return solve_laplace(m, {{"L0", LoopCondition::dirichlet(1.0)}, {"L1", LoopCondition::dirichlet(0.0)}});
}

}  // namespace

TEST_CASE("constant functions have zero differential, zero conjugate and zero energy") {
  SurfaceMesh m = generate(AnnulusSpec{});
  LaplaceOperator L = laplace_operator(m);
  VertexFunction c(m.num_vertices, 3.25);
  for (double x : differential(m, c).values) CHECK(x == 0.0);
  for (double x : conjugate_differential(L, c).values) CHECK(x == 0.0);
  for (double x : apply_laplacian(L, c)) CHECK(std::abs(x) <= 1e-12);
  CHECK(std::abs(dirichlet_energy(L, c)) <= 1e-12);
}

TEST_CASE("differential of the x coordinate on a rectangle is the coordinate difference") {
  RectangleSpec s;
  s.width = 2.0;
  s.height = 1.0;
  s.res = 8;
  SurfaceMesh m = generate(s);
  VertexFunction f(m.num_vertices);
  for (int v = 0; v < m.num_vertices; ++v) f[v] = m.xy[v][0];
  PrimalOneForm df = differential(m, f);
  for (int e = 0; e < m.num_edges(); ++e) {
    const auto [a, b] = m.edges[e];
    CHECK(df.values[e] == m.xy[b][0] - m.xy[a][0]);
    CHECK(df.on(m, b, a) == -df.values[e]);
  }
}

TEST_CASE("sum of df around every triangle vanishes") {
  SurfaceMesh m = generate(PantsSpec{});
  VertexFunction f = random_function(m.num_vertices, 7);
  for (double c : triangle_circulation(m, differential(m, f))) CHECK(std::abs(c) <= 1e-15);
}

TEST_CASE("flux sum equals apply_laplacian bitwise at interior vertices") {
  SurfaceMesh m = jittered_square(12, 0.35, 3);
  LaplaceOperator L = laplace_operator(m);
  VertexFunction f = random_function(m.num_vertices, 11);
  const auto flux = flux_sum(m, conjugate_differential(L, f));
  const auto Lf = apply_laplacian(L, f);
  for (int v = 0; v < m.num_vertices; ++v)
    if (!m.on_boundary[v]) CHECK(flux[v] == Lf[v]);
}

TEST_CASE("harmonic functions have vanishing flux sums") {
  SurfaceMesh m = generate(AnnulusSpec{});
  LaplaceOperator L = laplace_operator(m);
  SolveResult s = capacitor(m);
  const auto flux = flux_sum(m, conjugate_differential(L, s.f));
  for (int v = 0; v < m.num_vertices; ++v)
    if (!m.on_boundary[v]) CHECK(std::abs(flux[v]) <= 1e-9);
}

TEST_CASE("annulus capacitor flux across a separating circle is 2 pi / log 4") {
  AnnulusSpec s;
  s.res = 64;
  s.rings_at = {2.0};
  SurfaceMesh m = generate(s);
  LaplaceOperator L = laplace_operator(m);
  SolveResult h = capacitor(m);
  std::vector<char> inner(m.num_vertices, 0);
  for (int v = 0; v < m.num_vertices; ++v) inner[v] = radius(m, v) <= 2.0 + 1e-9;
  // The boundary loop L0 is inside the set; only interior edges are cut.
  const double flux = period(conjugate_differential(L, h.f), cycle_around(m, inner));
  const double oracle = 2 * kPi / std::log(4.0);
  CHECK(std::abs(flux) == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("Laplacian annihilates constants and is symmetric") {
  SurfaceMesh m = jittered_square(6, 0.3, 5);
  LaplaceOperator L = laplace_operator(m);
  const int n = m.num_vertices;
  Eigen::MatrixXd A(n, n);
  for (int j = 0; j < n; ++j) {
    VertexFunction e(n, 0.0);
    e[j] = 1.0;
    const auto col = apply_laplacian(L, e);
    for (int i = 0; i < n; ++i) A(i, j) = col[i];
  }
  CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((A * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && A(i, j) != 0.0) CHECK(m.find_edge(i, j) >= 0);
}

TEST_CASE("f = x on the unit square has Dirichlet energy 1") {
  for (unsigned seed : {1u, 2u, 3u}) {
    SurfaceMesh m = jittered_square(8, 0.3, seed);
    LaplaceOperator L = laplace_operator(m);
    VertexFunction f(m.num_vertices);
    for (int v = 0; v < m.num_vertices; ++v) f[v] = m.xy[v][0];
    CHECK(dirichlet_energy(L, f) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(total_area(m) == doctest::Approx(1.0).epsilon(1e-12));
  }
  RectangleSpec r;
  SurfaceMesh sq = generate(r);
  VertexFunction f(sq.num_vertices);
  for (int v = 0; v < sq.num_vertices; ++v) f[v] = sq.xy[v][0];
  CHECK(dirichlet_energy(laplace_operator(sq), f) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("obtuse meshes give negative weights and a positive semidefinite Laplacian") {
  for (unsigned seed : {4u, 9u, 21u}) {
    SurfaceMesh m = jittered_square(6, 0.45, seed);
    LaplaceOperator L = laplace_operator(m);
    CHECK(*std::min_element(L.weight.begin(), L.weight.end()) < 0.0);
    const int n = m.num_vertices;
    Eigen::MatrixXd A(n, n);
    for (int j = 0; j < n; ++j) {
      VertexFunction e(n, 0.0);
      e[j] = 1.0;
      const auto col = apply_laplacian(L, e);
      for (int i = 0; i < n; ++i) A(i, j) = col[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    const auto ev = es.eigenvalues();
    CHECK(ev.minCoeff() >= -1e-12 * ev.maxCoeff());
    CHECK(std::abs(ev(0)) <= 1e-12 * ev.maxCoeff());
    CHECK(ev(1) > 1e-8);
  }
}

TEST_CASE("annulus capacitor energy is 2 pi / log 4 within refinement tolerance") {
  AnnulusSpec s;
  s.res = 64;
  SurfaceMesh m = generate(s);
  const double E = dirichlet_energy(laplace_operator(m), capacitor(m).f);
  CHECK(E == doctest::Approx(2 * kPi / std::log(4.0)).epsilon(0.005));
}

TEST_CASE("energy is non-negative and vanishes only on constants") {
  SurfaceMesh m = jittered_square(8, 0.4, 8);
  LaplaceOperator L = laplace_operator(m);
  for (unsigned seed = 0; seed < 20; ++seed) CHECK(dirichlet_energy(L, random_function(m.num_vertices, seed)) > 0.0);
}

TEST_CASE("conjugate differential is linear") {
  SurfaceMesh m = generate(PantsSpec{});
  LaplaceOperator L = laplace_operator(m);
  VertexFunction f = random_function(m.num_vertices, 1), g = random_function(m.num_vertices, 2);
  VertexFunction h(m.num_vertices);
  for (int v = 0; v < m.num_vertices; ++v) h[v] = 2.5 * f[v] - 0.75 * g[v];
  const auto wf = conjugate_differential(L, f).values, wg = conjugate_differential(L, g).values,
             wh = conjugate_differential(L, h).values;
  for (size_t e = 0; e < wh.size(); ++e) CHECK(std::abs(wh[e] - (2.5 * wf[e] - 0.75 * wg[e])) <= 1e-12);
}

TEST_CASE("energy is invariant under vertex relabeling") {
  SurfaceMesh m = generate(AnnulusSpec{});
  VertexFunction f = random_function(m.num_vertices, 5);
  std::vector<int> perm(m.num_vertices);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(17));
  SurfaceMesh p = permute_vertices(m, perm);
  VertexFunction g(m.num_vertices);
  for (int v = 0; v < m.num_vertices; ++v) g[perm[v]] = f[v];
  CHECK(dirichlet_energy(laplace_operator(p), g) ==
        doctest::Approx(dirichlet_energy(laplace_operator(m), f)).epsilon(1e-12));
}

TEST_CASE("Jdh of a harmonic h integrates to zero around contractible dual cycles") {
  SurfaceMesh m = generate(AnnulusSpec{});
  LaplaceOperator L = laplace_operator(m);
  SolveResult h = capacitor(m);
  DualOneForm w = conjugate_differential(L, h.f);
  int tested = 0;
  for (int v = 0; v < m.num_vertices && tested < 20; v += 7) {
    if (m.on_boundary[v]) continue;
    bool near_boundary = false;
    for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) near_boundary |= m.on_boundary[m.adj_vertex[k]];
    if (near_boundary) continue;
    std::vector<char> star(m.num_vertices, 0);
    star[v] = 1;
    for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) star[m.adj_vertex[k]] = 1;
    CHECK(std::abs(period(w, cycle_around(m, star))) <= 1e-8);
    ++tested;
  }
  CHECK(tested > 5);
}

TEST_CASE("degenerate triangles are rejected with the triangle id") {
  SurfaceMesh m = flat_mesh({{0, 0}, {1, 0}, {2, 0}, {1, 1}}, {{0, 1, 3}, {1, 2, 3}});
  // Collapse triangle 1 by making one side the sum of the others.
  const int e = m.find_edge(2, 3);
  m.length[e] = m.length[m.find_edge(1, 2)] + m.length[m.find_edge(1, 3)];
  try {
    cotan_weights(m);
    FAIL("expected a geometry error");
  } catch (const GeometryError& g) {
    CHECK(g.triangle() == 1);
  }
}

TEST_CASE("cotangents of a right isosceles triangle") {
  const auto c = triangle_cotangents(std::sqrt(2.0), 1.0, 1.0);
  CHECK(c[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(c[1] == doctest::Approx(1.0));
  CHECK(c[2] == doctest::Approx(1.0));
  CHECK(triangle_degenerate(2.0, 1.0, 1.0));
  CHECK(!triangle_degenerate(1.0, 1.0, 1.0));
}

TEST_CASE("vertex masses sum to the total area") {
  SurfaceMesh m = generate(HyperbolicDiskSpec{});
  const auto mass = vertex_mass(m);
  CHECK(std::accumulate(mass.begin(), mass.end(), 0.0) == doctest::Approx(total_area(m)).epsilon(1e-12));
}
