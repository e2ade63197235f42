#include <doctest.h>
#include <omp.h>

#include <random>

#include "harmlab/dec.hpp"
#include "harmlab/generate.hpp"
#include "harmlab/kernels.hpp"
#include "harmlab/solver.hpp"

using namespace harmlab;

namespace {

std::vector<double> random_vector(size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  return x;
}

// Laplacian of a generated mesh in CSR form (diagonal included).
CsrMatrix mesh_matrix(const SurfaceMesh& m, const LaplaceOperator& L) {
  CsrMatrix A;
  A.n = m.num_vertices;
  A.row.push_back(0);
  for (int v = 0; v < m.num_vertices; ++v) {
    bool diag_done = false;
    for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) {
      const int j = m.adj_vertex[k];
      if (!diag_done && j > v) {
        A.col.push_back(v);
        A.val.push_back(L.diag[v] + 1.0);
        diag_done = true;
      }
      A.col.push_back(j);
      A.val.push_back(-L.weight[m.adj_edge[k]]);
    }
    if (!diag_done) {
      A.col.push_back(v);
      A.val.push_back(L.diag[v] + 1.0);
    }
    A.row.push_back(static_cast<int>(A.col.size()));
  }
  return A;
}

struct ThreadGuard {
  int saved = omp_get_max_threads();
  explicit ThreadGuard(int n) { omp_set_num_threads(n); }
  ~ThreadGuard() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("serial and OpenMP kernels agree bitwise") {
  AnnulusSpec s;
  s.res = 256;
  SurfaceMesh m = generate(s);
  REQUIRE(m.num_vertices > 2 * kernels::kBlock);
  LaplaceOperator L = laplace_operator(m);
  CsrMatrix A = mesh_matrix(m, L);
  const auto x = random_vector(m.num_vertices, 1), z = random_vector(m.num_vertices, 2);
  std::vector<int> ea, eb;
  for (const Edge& e : m.edges) {
    ea.push_back(e[0]);
    eb.push_back(e[1]);
  }
  for (int threads : {1, 2, 3, 4}) {
    ThreadGuard guard(threads);
    CAPTURE(threads);
    std::vector<double> y1(A.n), y2(A.n);
    kernels::spmv_serial(A, x, y1);
    kernels::spmv_omp(A, x, y2);
    CHECK(y1 == y2);
    CHECK(kernels::dot_serial(x, z) == kernels::dot_omp(x, z));
    std::vector<double> a1 = z, a2 = z;
    kernels::axpy_serial(0.37, x, a1);
    kernels::axpy_omp(0.37, x, a2);
    CHECK(a1 == a2);
    std::vector<double> l1(A.n), l2(A.n);
    kernels::laplacian_serial(m.adj_offset, m.adj_vertex, m.adj_edge, L.weight, x, l1);
    kernels::laplacian_omp(m.adj_offset, m.adj_vertex, m.adj_edge, L.weight, x, l2);
    CHECK(l1 == l2);
    CHECK(kernels::energy_serial(ea, eb, L.weight, x) == kernels::energy_omp(ea, eb, L.weight, x));
  }
}

TEST_CASE("parallel and serial solves agree bitwise") {
  SurfaceMesh m = generate(PantsSpec{});
  BoundaryCondition bc{{"L0", LoopCondition::dirichlet(1.0)},
                       {"L1", LoopCondition::dirichlet(0.0)},
                       {"L2", LoopCondition::neumann()}};
  SolverOptions serial;
  serial.parallel = false;
  ThreadGuard guard(3);
  SolveResult a = solve_laplace(laplace_operator(m, false), bc, serial);
  SolveResult b = solve_laplace(laplace_operator(m, true), bc, SolverOptions{});
  CHECK(a.f == b.f);
  CHECK(a.report.iterations == b.report.iterations);
}

TEST_CASE("cotangent weights do not depend on the parallel flag") {
  SurfaceMesh m = generate(HyperbolicDiskSpec{});
  ThreadGuard guard(4);
  CHECK(cotan_weights(m, false) == cotan_weights(m, true));
}

TEST_CASE("spmv matches a dense product") {
  SurfaceMesh m = generate(RectangleSpec{});
  LaplaceOperator L = laplace_operator(m);
  CsrMatrix A = mesh_matrix(m, L);
  const auto x = random_vector(m.num_vertices, 3);
  std::vector<double> y(A.n);
  kernels::spmv_serial(A, x, y);
  for (int i = 0; i < A.n; ++i) {
    double s = 0.0;
    for (int k = A.row[i]; k < A.row[i + 1]; ++k) s += A.val[k] * x[A.col[k]];
    CHECK(y[i] == doctest::Approx(s).epsilon(1e-14));
  }
}
