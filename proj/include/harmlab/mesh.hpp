#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace harmlab {

using Vec2 = std::array<double, 2>;
using Tri = std::array<int, 3>;
using Edge = std::array<int, 2>;  // canonical: [0] < [1]

enum class GeometryTag { flat, hyperbolic, glued, conformal };
enum class LoopRole { true_boundary, truncation };

// How chart coordinates are interpreted by refinement.
//   cartesian         xy are flat coordinates
//   polar             xy = r(cos t, sin t), flat metric, midpoints in (log r, t)
//   hyperbolic_polar  xy = r(cos t, sin t) with r geodesic, midpoints in (log tanh(r/2), t)
//   cylinder          xy = (t, angle) on dt^2 + a^2 cosh^2 t dangle^2, a = chart_param
//   none              no chart; refinement uses intrinsic edge midpoints
enum class ChartKind { none, cartesian, polar, hyperbolic_polar, cylinder };

const char* to_string(GeometryTag t);
const char* to_string(LoopRole r);
const char* to_string(ChartKind c);
GeometryTag geometry_tag_from(const std::string& s);
LoopRole loop_role_from(const std::string& s);
ChartKind chart_kind_from(const std::string& s);

struct BoundaryLoop {
  std::string label;
  std::vector<int> cycle;  // closed implicitly: last connects to first
  LoopRole role = LoopRole::true_boundary;
};

// Generator bookkeeping per vertex. `piece` identifies the sheet, patch or
// tube a vertex was created in; (r, theta) are that piece's polar coordinates.
struct VertexAttr {
  int piece = -1;
  int ring = -1;
  int index = -1;
  double r = 0.0;
  double theta = 0.0;
  bool operator==(const VertexAttr&) const = default;
};

struct SurfaceMesh {
  GeometryTag tag = GeometryTag::flat;
  ChartKind chart = ChartKind::none;
  double chart_param = 0.0;
  int num_vertices = 0;
  std::vector<Vec2> xy;           // empty or num_vertices entries
  std::vector<VertexAttr> attr;   // empty or num_vertices entries
  std::vector<Tri> triangles;
  std::vector<Edge> edges;        // sorted
  std::vector<double> length;     // per edge
  std::vector<BoundaryLoop> loops;

  // Derived topology, filled by build_topology().
  std::vector<Tri> tri_edge;                // edge index opposite corner k
  std::vector<std::array<int, 2>> edge_tri; // {left, right}; left holds a->b; -1 if absent
  std::vector<int> adj_offset;              // CSR over vertices, neighbours ascending
  std::vector<int> adj_vertex;
  std::vector<int> adj_edge;
  std::vector<char> on_boundary;            // per vertex

  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  bool is_boundary_edge(int e) const { return edge_tri[e][0] < 0 || edge_tri[e][1] < 0; }
  bool has_chart() const { return !xy.empty(); }
  int find_edge(int a, int b) const;  // -1 if absent
  int loop_index(const std::string& label) const;  // -1 if absent
  const BoundaryLoop& loop(const std::string& label) const;
  std::array<double, 3> triangle_lengths(int t) const;  // opposite corners 0,1,2
};

// Fills edges (if empty) and all derived arrays. Throws GeometryError on a
// non-manifold edge; use validate() for diagnosis of arbitrary input.
void build_topology(SurfaceMesh& m);

// Edges of the triangles in canonical sorted order.
std::vector<Edge> collect_edges(const std::vector<Tri>& tris);

struct Violation {
  std::string invariant;
  std::vector<int> ids;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const SurfaceMesh& m);

// Boundary cycles with the surface on the left, each starting at its
// smallest vertex id, ordered by that id.
std::vector<std::vector<int>> trace_boundary_cycles(const SurfaceMesh& m);

int euler_characteristic(const SurfaceMesh& m);
int connected_components(const SurfaceMesh& m);
int genus(const SurfaceMesh& m);  // orientable, connected
int first_betti(const SurfaceMesh& m);
double total_area(const SurfaceMesh& m);
double triangle_area(double a, double b, double c);

// Submesh keeping triangles whose corners all satisfy keep. Unreferenced
// vertices are dropped; parent[i] is the source id of new vertex i. Loops of
// the source that survive intact keep their label and role; other boundary
// cycles are passed to `label` which returns their (label, role).
struct Submesh {
  SurfaceMesh mesh;
  std::vector<int> parent;
};
using CycleLabeler = std::function<std::pair<std::string, LoopRole>(const SurfaceMesh&, const std::vector<int>&)>;
Submesh extract_submesh(const SurfaceMesh& m, const std::function<bool(int)>& keep,
                        const CycleLabeler& label);

// Relabels vertex ids through perm (new id of old vertex v is perm[v]).
SurfaceMesh permute_vertices(const SurfaceMesh& m, const std::vector<int>& perm);

struct MeshFamily {
  std::vector<SurfaceMesh> meshes;
  std::vector<double> resolution;  // characteristic edge-count scale per level
};

}  // namespace harmlab
