#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "harmlab/ends.hpp"
#include "harmlab/errors.hpp"
#include "support.hpp"

using namespace harmlab;
using namespace harmlab::test;

namespace {

Exhaustion flat_exhaustion(int res, double r_in = 1.0) {
  AnnulusSpec s;
  s.r_in = r_in;
  s.r_out = 4.0;
  s.res = res;
  return build_exhaustion(s);
}

Exhaustion hyperbolic_exhaustion(int res) {
  HyperbolicDiskSpec s;
  s.r_max = 2.0;
  s.r_core = 1.0;
  s.res = res;
  return build_exhaustion(s);
}

}  // namespace

TEST_CASE("flat plane end schedule is 4, 8, 16, 32") {
  Exhaustion ex = flat_exhaustion(32);
  REQUIRE(ex.ends.size() == 1);
  CHECK(ex.ends[0].radius == std::vector<double>{4, 8, 16, 32});
  CHECK(ex.levels.size() == 4);
  CHECK(check_nesting(ex));
}

TEST_CASE("hyperbolic end schedule is 2, 4, 8, 16") {
  Exhaustion ex = hyperbolic_exhaustion(16);
  CHECK(ex.ends[0].radius == std::vector<double>{2, 4, 8, 16});
  CHECK(check_nesting(ex));
}

TEST_CASE("cylinder and glued plane exhaustions are nested") {
  CHECK(check_nesting(build_exhaustion(HyperbolicCylinderSpec{})));
  Exhaustion g = build_exhaustion(GluedPlaneSpec{});
  CHECK(check_nesting(g));
  CHECK(g.ends.size() == 2);
}

TEST_CASE("fewer than four levels is a parameter error") {
  ExhaustionOptions opt;
  opt.levels = 2;
  CHECK_THROWS_AS(build_exhaustion(AnnulusSpec{}, opt), ParameterError);
}

TEST_CASE("scenarios without an end cannot be exhausted") {
  try {
    build_exhaustion(PantsSpec{});
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("flat end energies track 2 pi / log R and extrapolate to zero") {
  Exhaustion ex = flat_exhaustion(64);
  CapacityEstimate est = capacity(ex, "L0");
  REQUIRE(est.energies.size() == 4);
  for (size_t k = 0; k < 4; ++k)
    CHECK(est.energies[k] == doctest::Approx(2 * kPi / std::log(est.radii[k])).epsilon(0.05));
  CHECK(est.monotone);
  CHECK(est.limit <= 0.05 * est.energies[0]);
  Classification c = classify_end(est);
  CHECK(c.verdict == EndClass::parabolic);
}

TEST_CASE("hyperbolic end energies approach 2 pi / |log tanh(1/2)|") {
  Exhaustion ex = hyperbolic_exhaustion(64);
  CapacityEstimate est = capacity(ex, "L0");
  const double oracle = 2 * kPi / std::abs(std::log(std::tanh(0.5)));
  CHECK(oracle == doctest::Approx(8.139).epsilon(1e-3));
  CHECK(est.monotone);
  for (size_t k = 0; k < est.energies.size(); ++k) {
    const double level = 2 * kPi / (std::log(std::tanh(est.radii[k] / 2)) - std::log(std::tanh(0.5)));
    CHECK(est.energies[k] == doctest::Approx(level).epsilon(0.03));
  }
  Classification c = classify_end(est);
  CHECK(c.verdict == EndClass::non_parabolic);
  CHECK(c.limit == doctest::Approx(oracle).epsilon(0.03));
}

TEST_CASE("capacity on a compact mesh is a domain error") {
  SurfaceMesh compact = generate(PantsSpec{});
  try {
    capacity_level(compact, "L0");
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("classification from two levels is insufficient data") {
  CapacityEstimate est;
  est.radii = {4, 8};
  est.energies = {4.5, 3.0};
  try {
    classify_end(est);
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
}

TEST_CASE("capacity does not increase when the core shrinks") {
  const CapacityEstimate small = capacity(flat_exhaustion(32, 1.0), "L0");
  const CapacityEstimate large = capacity(flat_exhaustion(32, 1.5), "L0");
  for (size_t k = 0; k < small.energies.size(); ++k) CHECK(small.energies[k] <= large.energies[k]);
}

TEST_CASE("symmetric cylinder separates its ends at 1/2 on the neck") {
  Exhaustion ex = build_exhaustion(HyperbolicCylinderSpec{});
  ExhaustionHarmonic h = exhaustion_harmonic(ex, "L1");
  CHECK(h.sup_criterion);
  CHECK(h.pointwise_monotone);
  CHECK(h.in_unit_interval);
  for (double s : h.sup_increase) CHECK(s >= -1e-8);
  const Submesh& fin = ex.levels.back();
  int n = 0;
  for (int v = 0; v < fin.mesh.num_vertices; ++v)
    if (ex.master.attr[fin.parent[v]].r == 0.0) {
      CHECK(h.limit[v] == doctest::Approx(0.5).epsilon(0.01));
      ++n;
    }
  CHECK(n > 0);
  OmegaCheck om = omega_check(ex, h, "L1", 0.1);
  CHECK(om.inside_end);
  CHECK(om.compact_complement);
}

TEST_CASE("hyperbolic funnel profile decays toward zero") {
  Exhaustion ex = hyperbolic_exhaustion(32);
  ExhaustionHarmonic h = exhaustion_harmonic(ex, "L0");
  Profile p = distinguishability_profile(h.limit, ex, "L1");
  REQUIRE(p.m.size() >= 2);
  for (size_t k = 1; k < p.m.size(); ++k) CHECK(p.m[k] < p.m[k - 1]);
  // Barrier oracle: the potential at the inner radius of each annulus.
  const double core = std::log(std::tanh(0.5));
  const double outer = std::log(std::tanh(ex.ends[0].radius.back() / 2));
  for (size_t k = 0; k < p.m.size(); ++k) {
    const double r0 = k == 0 ? 1.0 : ex.ends[0].radius[k - 1];
    const double oracle = (std::log(std::tanh(r0 / 2)) - outer) / (core - outer);
    CHECK(p.m[k] <= oracle * 1.05 + 1e-12);
  }
  CHECK(p.distinguishable_consistent);
}

TEST_CASE("constant potential has constant profile 1") {
  Exhaustion ex = hyperbolic_exhaustion(16);
  VertexFunction one(ex.levels.back().mesh.num_vertices, 1.0);
  Profile p = distinguishability_profile(one, ex, "L1");
  for (double x : p.m) CHECK(x == 1.0);
  CHECK(p.not_distinguishable_consistent);
}

TEST_CASE("barrier without centers vanishes at |x| = e") {
  BarrierFamily F = make_barrier(1.0, {}, {});
  const auto v = barrier_evaluate(F, {{std::exp(1.0), 0.0}, {0.0, std::exp(1.0)}});
  CHECK(std::abs(v[0]) <= 1e-15);
  CHECK(std::abs(v[1]) <= 1e-15);
  CHECK_THROWS_AS(make_barrier(0.0, {}, {}), ParameterError);
}

TEST_CASE("eta0 partial sum and tail bracket pi^2 / 6") {
  std::vector<double> w;
  std::vector<Vec2> c;
  for (int a = 1; a <= 4; ++a) {
    w.push_back(1.0 / (a * a));
    c.push_back({double(a), 0.0});
  }
  BarrierFamily F = make_barrier(1.0, c, w, inverse_square_tail(4));
  CHECK(F.eta0 == doctest::Approx(1.4236).epsilon(1e-4));
  CHECK(F.eta0_tail == 0.25);
  CHECK(F.eta0 <= kPi * kPi / 6);
  CHECK(kPi * kPi / 6 <= F.eta0 + F.eta0_tail);
  CHECK(F.C == doctest::Approx(2.2224).epsilon(1e-4));
}

TEST_CASE("glued plane: non-parabolic, not distinguishable, barrier dominated") {
  GluedPlaneSpec s;
  Exhaustion ex = build_exhaustion(s);
  CapacityEstimate est = capacity(ex, "L0");
  CHECK(est.monotone);
  CHECK(classify_end(est).verdict == EndClass::non_parabolic);
  ExhaustionHarmonic h = exhaustion_harmonic(ex, "L0");
  CHECK(h.in_unit_interval);
  Profile p = distinguishability_profile(h.limit, ex, "L1");
  CHECK(p.not_distinguishable_consistent);
  for (double m : p.m) CHECK(m >= 0.5 * p.m.front());

  GluedParams gp = resolve_glued(s);
  std::vector<Vec2> centers;
  for (double x : gp.centers) centers.push_back({x, 0.0});
  const double eta0 = make_barrier(1.0, centers, gp.weights).eta0;
  for (double factor : {1.25, 1.5, 2.0}) {
    BarrierFamily F = make_barrier(factor * eta0, centers, gp.weights);
    for (size_t k = 0; k < ex.levels.size(); ++k) {
      DominationReport d = barrier_domination_check(h.levels[k], ex.levels[k].mesh, F);
      if (std::log(d.max_extent) >= ex.ends[0].radius[k] - 0.5) continue;
      CAPTURE(factor);
      CAPTURE(k);
      CHECK(d.checked > 0);
      CHECK(d.violations.empty());
    }
  }
}
