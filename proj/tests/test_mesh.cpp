#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "harmlab/errors.hpp"
#include "harmlab/generate.hpp"
#include "harmlab/mesh_io.hpp"
#include "harmlab/refine.hpp"
#include "support.hpp"

using namespace harmlab;
using namespace harmlab::test;

namespace {

bool has_violation(const ValidationReport& r, const std::string& invariant) {
  return std::any_of(r.violations.begin(), r.violations.end(),
                     [&](const Violation& v) { return v.invariant == invariant; });
}

std::vector<ScenarioSpec> all_scenarios() {
  HyperbolicDiskSpec hc;
  hc.r_core = 1.0;
  return {AnnulusSpec{}, DiskSpec{}, PantsSpec{}, HyperbolicDiskSpec{}, hc,
          HyperbolicCylinderSpec{}, GluedPlaneSpec{}, RectangleSpec{}};
}

}  // namespace

TEST_CASE("annulus(1, 4, 64) has two loops and Euler characteristic 0") {
  AnnulusSpec s;
  s.res = 64;
  SurfaceMesh m = generate(s);
  CHECK(m.loops.size() == 2);
  CHECK(euler_characteristic(m) == 0);
  CHECK(first_betti(m) == 1);
  CHECK(m.loops[0].label == "L0");
  CHECK(m.loops[1].label == "L1");
}

TEST_CASE("pair of pants has three loops and first Betti number 2") {
  SurfaceMesh m = generate(PantsSpec{});
  CHECK(m.loops.size() == 3);
  CHECK(first_betti(m) == 2);
  CHECK(euler_characteristic(m) == -1);
}

TEST_CASE("hyperbolic disk area matches 2 pi (cosh 3 - 1) within 2 percent") {
  HyperbolicDiskSpec s;
  s.r_max = 3.0;
  s.res = 64;
  SurfaceMesh m = generate(s);
  const double oracle = simpson([](double r) { return 2 * kPi * std::sinh(r); }, 0.0, 3.0, 2000);
  CHECK(oracle == doctest::Approx(56.97).epsilon(1e-3));
  CHECK(total_area(m) == doctest::Approx(oracle).epsilon(0.02));
  CHECK(m.tag == GeometryTag::hyperbolic);
}

TEST_CASE("every generator output validates and has the documented Euler characteristic") {
  for (const ScenarioSpec& s : all_scenarios()) {
    CAPTURE(scenario_name(s));
    SurfaceMesh m = generate(s);
    ValidationReport r = validate(m);
    CHECK(r.ok());
    CHECK(euler_characteristic(m) == documented_euler_characteristic(s));
    CHECK(connected_components(m) == 1);
  }
}

TEST_CASE("generate is deterministic") {
  for (const ScenarioSpec& s : {ScenarioSpec{AnnulusSpec{}}, ScenarioSpec{PantsSpec{}},
                                ScenarioSpec{HyperbolicCylinderSpec{}}}) {
    CHECK(mesh_to_json(generate(s)) == mesh_to_json(generate(s)));
  }
}

TEST_CASE("glued plane tube radii respect delta_a <= exp(-C / c_a)") {
  GluedPlaneSpec s;
  GluedParams p = resolve_glued(s);
  REQUIRE(p.weights.size() == 4);
  double C = 1.0;
  for (int a = 1; a <= 4; ++a) C += std::log(1.0 + p.centers[a - 1]) / (a * a);
  CHECK(p.C == doctest::Approx(C).epsilon(1e-14));
  for (int a = 1; a <= 4; ++a) {
    CHECK(p.weights[a - 1] == doctest::Approx(1.0 / (a * a)));
    CHECK(p.tube_radii[a - 1] <= std::exp(-C * a * a));
  }
  SurfaceMesh m = generate(s);
  CHECK(euler_characteristic(m) == -7);
  CHECK(m.loops.size() == 3);
}

TEST_CASE("glued plane C for centers at (a, 0) is 2.2224") {
  double C = 1.0;
  for (int a = 1; a <= 4; ++a) C += std::log(1.0 + a) / (a * a);
  CHECK(C == doctest::Approx(2.2224).epsilon(1e-4));
}

TEST_CASE("glued plane rejects a tube radius above the bound") {
  GluedPlaneSpec s;
  GluedParams p = resolve_glued(s);
  s.tube_radii = p.tube_radii;
  s.tube_radii[1] = 2.0 * p.tube_bound[1];
  try {
    resolve_glued(s);
    FAIL("expected a parameter error");
  } catch (const ParameterError& e) {
    CHECK(e.field() == "tube_radii[1]");
  }
}

TEST_CASE("invalid scenario parameters name the field") {
  AnnulusSpec s;
  s.r_out = 0.5;
  try {
    generate(s);
    FAIL("expected a parameter error");
  } catch (const ParameterError& e) {
    CHECK(!e.field().empty());
  }
}

TEST_CASE("two quadrisection levels multiply triangles by 16 and keep loops") {
  AnnulusSpec s;
  s.res = 16;
  SurfaceMesh m = generate(s);
  MeshFamily f = refine(m, 2);
  REQUIRE(f.meshes.size() == 3);
  CHECK(f.meshes[2].num_triangles() == 16 * m.num_triangles());
  for (const SurfaceMesh& mm : f.meshes) {
    CHECK(mm.loops.size() == m.loops.size());
    CHECK(validate(mm).ok());
    CHECK(euler_characteristic(mm) == 0);
  }
}

TEST_CASE("hyperbolic refinement areas approach the analytic value monotonically") {
  HyperbolicDiskSpec s;
  s.r_max = 3.0;
  s.res = 16;
  MeshFamily f = refine(generate(s), 3);
  const double oracle = simpson([](double r) { return 2 * kPi * std::sinh(r); }, 0.0, 3.0, 2000);
  double prev = INFINITY;
  for (const SurfaceMesh& m : f.meshes) {
    const double err = std::abs(total_area(m) - oracle);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("validate reports a forced triangle-inequality violation") {
  SurfaceMesh m = generate(AnnulusSpec{});
  m.length[7] = 1e6;
  ValidationReport r = validate(m);
  CHECK(has_violation(r, "triangle-inequality"));
}

TEST_CASE("validate reports a flipped triangle") {
  SurfaceMesh m = generate(RectangleSpec{});
  std::swap(m.triangles[5][1], m.triangles[5][2]);
  ValidationReport r = validate(m);
  CHECK(has_violation(r, "orientation"));
}

TEST_CASE("boundary loops cover every boundary edge") {
  SurfaceMesh m = generate(PantsSpec{});
  int boundary_edges = 0;
  for (int e = 0; e < m.num_edges(); ++e) boundary_edges += m.is_boundary_edge(e);
  size_t loop_edges = 0;
  for (const BoundaryLoop& l : m.loops) loop_edges += l.cycle.size();
  CHECK(static_cast<size_t>(boundary_edges) == loop_edges);
}

TEST_CASE("mesh JSON round trip is lossless") {
  for (const ScenarioSpec& s : {ScenarioSpec{HyperbolicDiskSpec{}}, ScenarioSpec{GluedPlaneSpec{}}}) {
    SurfaceMesh m = generate(s);
    const std::string path = (std::filesystem::temp_directory_path() / "harmlab_roundtrip.json").string();
    write_mesh(m, path);
    SurfaceMesh r = read_mesh(path);
    std::filesystem::remove(path);
    CHECK(r.num_vertices == m.num_vertices);
    CHECK(r.triangles == m.triangles);
    CHECK(r.edges == m.edges);
    CHECK(r.length == m.length);  // bitwise
    CHECK(r.xy == m.xy);
    CHECK(r.attr == m.attr);
    CHECK(r.tag == m.tag);
    CHECK(r.chart == m.chart);
    REQUIRE(r.loops.size() == m.loops.size());
    for (size_t i = 0; i < m.loops.size(); ++i) {
      CHECK(r.loops[i].label == m.loops[i].label);
      CHECK(r.loops[i].cycle == m.loops[i].cycle);
      CHECK(r.loops[i].role == m.loops[i].role);
    }
    CHECK(mesh_to_json(r) == mesh_to_json(m));
    CHECK(mesh_hash(r) == mesh_hash(m));
  }
}

TEST_CASE("reading a malformed mesh document is an io error") {
  try {
    mesh_from_json("{\"format_version\": 1");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}

TEST_CASE("submesh extraction keeps intact loops") {
  AnnulusSpec s;
  s.rings_at = {2.0};
  SurfaceMesh m = generate(s);
  Submesh sub = extract_submesh(
      m, [&](int v) { return m.attr[v].r <= 2.0 + 1e-12; },
      [](const SurfaceMesh&, const std::vector<int>&) { return std::make_pair(std::string("cut"), LoopRole::truncation); });
  CHECK(validate(sub.mesh).ok());
  REQUIRE(sub.mesh.loops.size() == 2);
  CHECK(sub.mesh.loop_index("L0") >= 0);
  CHECK(sub.mesh.loop_index("cut") >= 0);
  CHECK(sub.mesh.loop(std::string("cut")).role == LoopRole::truncation);
}
