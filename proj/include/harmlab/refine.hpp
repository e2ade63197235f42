#pragma once

#include "harmlab/mesh.hpp"

namespace harmlab {

// One quadrisection step. New vertex ids: old vertices keep theirs, the
// midpoint of edge e gets num_vertices + e. Midpoints are taken in the chart
// (see ChartKind) and all edge lengths are recomputed from its metric; without
// a chart, lengths follow the flat midpoint construction inside each triangle.
// Vertex attributes are dropped.
SurfaceMesh quadrisect(const SurfaceMesh& m);

// meshes[0] is the input, meshes[k] has 4^k times its triangles.
MeshFamily refine(const SurfaceMesh& m, int levels);

}  // namespace harmlab
