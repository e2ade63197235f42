#pragma once

#include <map>
#include <string>
#include <vector>

#include "harmlab/dec.hpp"
#include "harmlab/kernels.hpp"

namespace harmlab {

struct LoopCondition {
  enum class Kind { dirichlet, neumann };
  Kind kind = Kind::neumann;
  double value = 0.0;
  static LoopCondition dirichlet(double v) { return {Kind::dirichlet, v}; }
  static LoopCondition neumann() { return {Kind::neumann, 0.0}; }
};

// Keyed by loop label; must cover every loop of the mesh.
using BoundaryCondition = std::map<std::string, LoopCondition>;

struct SolverOptions {
  double tolerance = 1e-10;       // relative residual of the reduced system
  double max_iter_factor = 50.0;  // cap = factor * sqrt(unknowns)
  bool parallel = true;
};

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  double wall_time = 0.0;  // seconds
  int unknowns = 0;
  double ic_shift = 0.0;   // diagonal shift used by the preconditioner
};

struct SolveResult {
  VertexFunction f;
  SolveReport report;
};

// Solves (L x)(v) = rhs(v) at free vertices with x = values on fixed ones.
// Every connected component must contain a fixed vertex (constraint error).
SolveResult solve_constrained(const LaplaceOperator& L, const std::vector<char>& fixed,
                              const VertexFunction& values, const VertexFunction& rhs,
                              const SolverOptions& opt = {});

SolveResult solve_laplace(const LaplaceOperator& L, const BoundaryCondition& bc,
                          const SolverOptions& opt = {});
SolveResult solve_laplace(const SurfaceMesh& m, const BoundaryCondition& bc,
                          const SolverOptions& opt = {});

// L G = e_source with Dirichlet 0 on the named loop and on every other
// truncation loop, Neumann on true-boundary loops.
SolveResult green_function(const LaplaceOperator& L, int source, const std::string& truncation,
                           const SolverOptions& opt = {});
SolveResult green_function(const SurfaceMesh& m, int source, const std::string& truncation,
                           const SolverOptions& opt = {});

// Preconditioned CG on an SPD CSR matrix with a zero-fill incomplete Cholesky
// factor; exposed for tests and benchmarks.
SolveReport pcg(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x,
                const SolverOptions& opt);

}  // namespace harmlab
