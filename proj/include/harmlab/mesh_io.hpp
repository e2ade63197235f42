#pragma once

#include <string>

#include "harmlab/mesh.hpp"

namespace harmlab {

constexpr int kMeshFormatVersion = 1;

// Lengths and coordinates are written with shortest round-trip decimal
// representation, so write-then-read is bit exact.
std::string mesh_to_json(const SurfaceMesh& m);
SurfaceMesh mesh_from_json(const std::string& text);
void write_mesh(const SurfaceMesh& m, const std::string& path);
SurfaceMesh read_mesh(const std::string& path);

// FNV-1a over the serialized document, as 16 hex digits.
std::string mesh_hash(const SurfaceMesh& m);
std::string fnv1a_hex(const std::string& bytes);

}  // namespace harmlab
