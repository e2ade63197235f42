#pragma once

#include <vector>

#include "harmlab/mesh.hpp"

namespace harmlab {

using VertexFunction = std::vector<double>;

// Value on canonical edge (a, b), a < b: f(b) - f(a).
struct PrimalOneForm {
  std::vector<double> values;
  double on(const SurfaceMesh& m, int from, int to) const;  // oriented lookup
};

// Flux across canonical edge (a, b) into its left triangle (the one holding
// a -> b): w_ab (f(b) - f(a)). Entries on boundary edges are kept so that flux
// balance can be read at boundary vertices; dual cycles use interior edges only.
struct DualOneForm {
  std::vector<double> values;
};

// Cotangent Laplacian L = -Delta (positive semidefinite):
// (Lf)(v) = sum_j w_vj (f(v) - f(j)), w_ij = (cot a_ij + cot b_ij) / 2.
struct LaplaceOperator {
  const SurfaceMesh* mesh = nullptr;
  std::vector<double> weight;  // per edge
  std::vector<double> diag;    // per vertex: sum of incident weights
  bool parallel = true;
};

// Per-edge cotangent weights. Throws GeometryError naming a triangle with an
// angle >= pi - 1e-9 (or zero area).
std::vector<double> cotan_weights(const SurfaceMesh& m, bool parallel = true);

// Cotangent of the three corner angles of a triangle with the given opposite
// side lengths; lengths may be of any scale.
std::array<double, 3> triangle_cotangents(double l0, double l1, double l2);
bool triangle_degenerate(double l0, double l1, double l2);

LaplaceOperator laplace_operator(const SurfaceMesh& m, bool parallel = true);

VertexFunction apply_laplacian(const LaplaceOperator& L, const VertexFunction& f);

PrimalOneForm differential(const SurfaceMesh& m, const VertexFunction& f);
DualOneForm conjugate_differential(const LaplaceOperator& L, const VertexFunction& f);

// Signed sum of fluxes around each vertex's dual cell; at interior vertices it
// equals apply_laplacian(L, f) bitwise.
std::vector<double> flux_sum(const SurfaceMesh& m, const DualOneForm& w);

// Sum over each triangle of df around its boundary (identically zero).
std::vector<double> triangle_circulation(const SurfaceMesh& m, const PrimalOneForm& df);

double dirichlet_energy(const LaplaceOperator& L, const VertexFunction& f);

// Barycentric dual areas.
std::vector<double> vertex_mass(const SurfaceMesh& m);

}  // namespace harmlab
