#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "harmlab/cohomology.hpp"
#include "harmlab/errors.hpp"
#include "harmlab/generate.hpp"
#include "support.hpp"

using namespace harmlab;
using namespace harmlab::test;

namespace {

SolveResult first_loop_potential(const LaplaceOperator& L) {
  BoundaryCondition bc;
  const SurfaceMesh& m = *L.mesh;
  for (size_t i = 0; i < m.loops.size(); ++i) bc[m.loops[i].label] = LoopCondition::dirichlet(i == 0 ? 1.0 : 0.0);
  return solve_laplace(L, bc);
}

DualOneForm random_form(const SurfaceMesh& m, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DualOneForm w;
  w.values.resize(m.num_edges());
  for (double& x : w.values) x = u(rng);
  return w;
}

}  // namespace

TEST_CASE("homology basis sizes: annulus 1, pants 2, disk 0") {
  SurfaceMesh a = generate(AnnulusSpec{}), p = generate(PantsSpec{}), d = generate(DiskSpec{});
  HomologyBasis ba = homology_basis(a), bp = homology_basis(p), bd = homology_basis(d);
  CHECK(ba.cycles.size() == 1);
  CHECK(bp.cycles.size() == 2);
  CHECK(bd.cycles.empty());
  CHECK(cycle_rank(a, ba.cycles) == 1);
  CHECK(cycle_rank(p, bp.cycles) == 2);
  for (const DualCycle& c : bp.cycles)
    for (int e : c.edge) CHECK(!p.is_boundary_edge(e));
}

TEST_CASE("annulus capacitor period is 2 pi / log 4 and certifies a non-trivial class") {
  AnnulusSpec s;
  s.res = 64;
  SurfaceMesh m = generate(s);
  LaplaceOperator L = laplace_operator(m);
  SolveResult h = first_loop_potential(L);
  HomologyBasis b = homology_basis(m);
  const auto p = periods(m, conjugate_differential(L, h.f), b);
  REQUIRE(p.size() == 1);
  CHECK(std::abs(p[0]) == doctest::Approx(2 * kPi / std::log(4.0)).epsilon(0.02));
  ClassVerdict v = class_nontrivial(p, default_period_tolerance(h.report.relative_residual, mesh_diameter(m)));
  CHECK(v.nontrivial);
  CHECK(v.witness == 0);
}

TEST_CASE("harmonic forms on the disk have no periods; constants are trivial") {
  SurfaceMesh d = generate(DiskSpec{});
  LaplaceOperator L = laplace_operator(d);
  CHECK(periods(d, conjugate_differential(L, first_loop_potential(L).f), homology_basis(d)).empty());
  SurfaceMesh a = generate(AnnulusSpec{});
  VertexFunction c(a.num_vertices, 2.0);
  const auto p = periods(a, conjugate_differential(laplace_operator(a), c), homology_basis(a));
  ClassVerdict v = class_nontrivial(p, 1e-12);
  CHECK(!v.nontrivial);
  CHECK(!v.tolerance_dominated);
}

TEST_CASE("a tolerance above every period is flagged as tolerance-dominated") {
  ClassVerdict v = class_nontrivial({0.3, -0.7}, 1.0);
  CHECK(!v.nontrivial);
  CHECK(v.tolerance_dominated);
  CHECK(v.witness == 1);
}

TEST_CASE("pants period vectors sum to zero") {
  SurfaceMesh m = generate(PantsSpec{});
  BettiReport r = betti_lower_bound(m, {"L0", "L1", "L2"});
  CHECK(r.sum_period_norm <= 1e-6);
  CHECK(r.sum_h_deviation <= 1e-8);
  CHECK(r.rank == 2);
  CHECK(r.compact);
  CHECK(r.rank_within_bound);
  for (char c : r.collar_certified) CHECK(c);
}

TEST_CASE("annulus rank 1, disk rank 0 with h constant") {
  SurfaceMesh a = generate(AnnulusSpec{});
  CHECK(betti_lower_bound(a, {"L0", "L1"}).rank == 1);
  SurfaceMesh d = generate(DiskSpec{});
  BettiReport r = betti_lower_bound(d, {"L0"});
  CHECK(r.rank == 0);
  for (double x : r.h[0]) CHECK(std::abs(x - 1.0) <= 1e-9);
}

TEST_CASE("betti rank is invariant under loop relabeling") {
  SurfaceMesh m = generate(PantsSpec{});
  CHECK(betti_lower_bound(m, {"L2", "L0", "L1"}).rank == betti_lower_bound(m, {"L0", "L1", "L2"}).rank);
}

TEST_CASE("empty label list is a domain error") {
  SurfaceMesh m = generate(PantsSpec{});
  try {
    betti_lower_bound(m, {});
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("periods are linear in the form") {
  SurfaceMesh m = generate(PantsSpec{});
  HomologyBasis b = homology_basis(m);
  DualOneForm w1 = random_form(m, 1), w2 = random_form(m, 2), w3;
  for (size_t e = 0; e < w1.values.size(); ++e) w3.values.push_back(3.0 * w1.values[e] - 0.5 * w2.values[e]);
  const auto p1 = periods(m, w1, b), p2 = periods(m, w2, b), p3 = periods(m, w3, b);
  for (size_t k = 0; k < p3.size(); ++k) {
    const double expect = 3.0 * p1[k] - 0.5 * p2[k];
    CHECK(std::abs(p3[k] - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("periods of Jdh do not depend on the spanning tree") {
  SurfaceMesh m = generate(AnnulusSpec{});
  LaplaceOperator L = laplace_operator(m);
  DualOneForm w = conjugate_differential(L, first_loop_potential(L).f);
  const double p0 = periods(m, w, homology_basis(m, 0))[0];
  for (int root : {17, m.num_triangles() / 2, m.num_triangles() - 1}) {
    const double p = periods(m, w, homology_basis(m, root))[0];
    CHECK(std::abs(std::abs(p) - std::abs(p0)) <= 1e-8);
  }
}

TEST_CASE("homologous dual cycles give equal periods") {
  AnnulusSpec s;
  s.rings_at = {1.5, 2.5};
  SurfaceMesh m = generate(s);
  LaplaceOperator L = laplace_operator(m);
  DualOneForm w = conjugate_differential(L, first_loop_potential(L).f);
  auto around = [&](double R) {
    std::vector<char> in(m.num_vertices, 0);
    for (int v = 0; v < m.num_vertices; ++v) in[v] = radius(m, v) <= R + 1e-9;
    return period(w, cycle_around(m, in));
  };
  CHECK(std::abs(around(1.5) - around(2.5)) <= 1e-8);
}

TEST_CASE("rectangle conjugate of x / w is y / w and maps into the strip") {
  RectangleSpec s;
  s.width = 2.0;
  s.height = 1.0;
  s.res = 8;
  SurfaceMesh m = generate(s);
  LaplaceOperator L = laplace_operator(m);
  VertexFunction x(m.num_vertices);
  for (int v = 0; v < m.num_vertices; ++v) x[v] = m.xy[v][0] / s.width;
  ConjugateResult c = integrate_conjugate(L, x);
  CHECK(!c.obstructed);
  CHECK(c.cr_residual <= 1e-8);
  CHECK(c.in_strip);
  CHECK(c.h_min >= 0.0);
  CHECK(c.h_max <= 1.0);
  // y is linear in the transverse coordinate: compare with the circumcenter height.
  const Tri& t0 = m.triangles[0];
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Tri& tr = m.triangles[t];
    auto cc = [&](const Tri& q) {
      const Vec2 a = m.xy[q[0]], b = m.xy[q[1]], c2 = m.xy[q[2]];
      const double d = 2 * (a[0] * (b[1] - c2[1]) + b[0] * (c2[1] - a[1]) + c2[0] * (a[1] - b[1]));
      const double a2 = a[0] * a[0] + a[1] * a[1], b2 = b[0] * b[0] + b[1] * b[1], c22 = c2[0] * c2[0] + c2[1] * c2[1];
      return (a2 * (c2[0] - b[0]) + b2 * (a[0] - c2[0]) + c22 * (b[0] - a[0])) / d;
    };
    CHECK(std::abs(std::abs(c.y[t] - c.y[0]) - std::abs(cc(tr) - cc(t0)) / s.width) <= 1e-12);
  }
}

TEST_CASE("annulus capacitor conjugate is obstructed by its period") {
  SurfaceMesh m = generate(AnnulusSpec{});
  LaplaceOperator L = laplace_operator(m);
  ConjugateResult c = integrate_conjugate(L, first_loop_potential(L).f);
  CHECK(c.obstructed);
  REQUIRE(c.obstruction.size() == 1);
  CHECK(std::abs(c.obstruction[0]) == doctest::Approx(2 * kPi / std::log(4.0)).epsilon(0.02));
}

TEST_CASE("constant h integrates to the zero conjugate") {
  SurfaceMesh m = generate(AnnulusSpec{});
  VertexFunction c(m.num_vertices, 0.7);
  ConjugateResult r = integrate_conjugate(laplace_operator(m), c);
  CHECK(!r.obstructed);
  for (double y : r.y) CHECK(y == 0.0);
}

TEST_CASE("non-harmonic input to integrate_conjugate is a precondition error") {
  SurfaceMesh m = generate(RectangleSpec{});
  VertexFunction f(m.num_vertices);
  for (int v = 0; v < m.num_vertices; ++v) f[v] = m.xy[v][0] * m.xy[v][0];
  try {
    integrate_conjugate(laplace_operator(m), f);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition);
  }
}

TEST_CASE("combination certificate for h_c on the pair of pants") {
  SurfaceMesh m = generate(PantsSpec{});
  BettiReport b = betti_lower_bound(m, {"L0", "L1", "L2"});
  CombinationCertificate c = combination_certificate(m, b, {1.0, 0.0, 0.5});
  CHECK(c.max_on_boundary);
  CHECK(c.certified);
  CHECK(c.max_value == doctest::Approx(1.0).epsilon(1e-9));
  // Equal coefficients give a constant h_c with vanishing periods: refused.
  CombinationCertificate flat = combination_certificate(m, b, {1.0, 1.0, 1.0});
  CHECK(!flat.certified);
  CHECK_THROWS_AS(combination_certificate(m, b, {1.0}), ParameterError);
}

TEST_CASE("mismatched form and basis is a domain error") {
  SurfaceMesh a = generate(AnnulusSpec{}), p = generate(PantsSpec{});
  DualOneForm w = random_form(a, 3);
  try {
    periods(p, w, homology_basis(p));
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}
