#include "harmlab/solver.hpp"

#include <chrono>
#include <cmath>
#include <queue>

#include "harmlab/errors.hpp"

namespace harmlab {

namespace {

// Lower-triangular zero-fill incomplete Cholesky factor, CSR, diagonal last in
// each row.
struct IcFactor {
  CsrMatrix L;
  double shift = 0.0;
};

bool try_ic(const CsrMatrix& A, double shift, CsrMatrix& L) {
  const int n = A.n;
  L.n = n;
  L.row.assign(n + 1, 0);
  L.col.clear();
  L.val.clear();
  for (int i = 0; i < n; ++i) {
    for (int k = A.row[i]; k < A.row[i + 1]; ++k)
      if (A.col[k] <= i) {
        L.col.push_back(A.col[k]);
        L.val.push_back(A.col[k] == i ? A.val[k] * (1.0 + shift) : A.val[k]);
      }
    L.row[i + 1] = static_cast<int>(L.col.size());
  }
  std::vector<int> pos(n, -1);
  for (int i = 0; i < n; ++i) {
    const int lo = L.row[i], hi = L.row[i + 1];
    for (int k = lo; k < hi; ++k) pos[L.col[k]] = k;
    for (int k = lo; k < hi - 1; ++k) {
      const int j = L.col[k];
      // L_ij = (A_ij - sum_{c<j} L_ic L_jc) / L_jj
      double s = L.val[k];
      const int jlo = L.row[j], jhi = L.row[j + 1];
      for (int q = jlo; q < jhi - 1; ++q) {
        const int p = pos[L.col[q]];
        if (p >= lo && p < k) s -= L.val[p] * L.val[q];
      }
      L.val[k] = s / L.val[jhi - 1];
    }
    double d = L.val[hi - 1];
    for (int k = lo; k < hi - 1; ++k) d -= L.val[k] * L.val[k];
    for (int k = lo; k < hi; ++k) pos[L.col[k]] = -1;
    if (!(d > 0) || !std::isfinite(d)) return false;
    L.val[hi - 1] = std::sqrt(d);
  }
  return true;
}

IcFactor incomplete_cholesky(const CsrMatrix& A) {
  IcFactor f;
  double shift = 0.0;
  while (!try_ic(A, shift, f.L)) {
    shift = shift == 0.0 ? 1e-3 : 2.0 * shift;
    if (shift > 1.0) throw NumericalError("incomplete Cholesky breakdown", NAN);
  }
  f.shift = shift;
  return f;
}

void ic_apply(const IcFactor& f, const std::vector<double>& r, std::vector<double>& z) {
  const CsrMatrix& L = f.L;
  const int n = L.n;
  z = r;
  for (int i = 0; i < n; ++i) {
    double s = z[i];
    const int hi = L.row[i + 1] - 1;
    for (int k = L.row[i]; k < hi; ++k) s -= L.val[k] * z[L.col[k]];
    z[i] = s / L.val[hi];
  }
  for (int i = n - 1; i >= 0; --i) {
    const int hi = L.row[i + 1] - 1;
    z[i] /= L.val[hi];
    const double zi = z[i];
    for (int k = L.row[i]; k < hi; ++k) z[L.col[k]] -= L.val[k] * zi;
  }
}

}  // namespace

SolveReport pcg(const CsrMatrix& A, const std::vector<double>& b, std::vector<double>& x,
                const SolverOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = A.n;
  auto dot = opt.parallel ? kernels::dot_omp : kernels::dot_serial;
  auto axpy = opt.parallel ? kernels::axpy_omp : kernels::axpy_serial;
  auto spmv = opt.parallel ? kernels::spmv_omp : kernels::spmv_serial;
  SolveReport rep;
  rep.unknowns = n;
  x.assign(n, 0.0);
  const double bnorm = std::sqrt(dot(b, b));
  if (n == 0 || bnorm == 0.0) return rep;
  const IcFactor M = incomplete_cholesky(A);
  rep.ic_shift = M.shift;
  const int cap = std::max(10, static_cast<int>(std::ceil(opt.max_iter_factor * std::sqrt(double(n)))));

  std::vector<double> r = b, z, p, q;
  double rel = 1.0;
  int it = 0;
  while (it < cap) {
    ic_apply(M, r, z);
    p = z;
    double rz = dot(r, z);
    while (it < cap) {
      spmv(A, p, q);
      const double alpha = rz / dot(p, q);
      axpy(alpha, p, x);
      axpy(-alpha, q, r);
      ++it;
      rel = std::sqrt(dot(r, r)) / bnorm;
      if (rel <= opt.tolerance) break;
      ic_apply(M, r, z);
      const double rz1 = dot(r, z);
      const double beta = rz1 / rz;
      rz = rz1;
      for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    // Recompute the true residual; restart if recursion drift hid it.
    spmv(A, x, q);
    for (int i = 0; i < n; ++i) r[i] = b[i] - q[i];
    rel = std::sqrt(dot(r, r)) / bnorm;
    if (rel <= opt.tolerance) break;
  }
  rep.iterations = it;
  rep.relative_residual = rel;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!(rel <= opt.tolerance))
    throw NumericalError("conjugate gradients did not converge within " + std::to_string(cap) +
                             " iterations (relative residual " + std::to_string(rel) + ")",
                         rel);
  return rep;
}

SolveResult solve_constrained(const LaplaceOperator& L, const std::vector<char>& fixed,
                              const VertexFunction& values, const VertexFunction& rhs,
                              const SolverOptions& opt) {
  const SurfaceMesh& m = *L.mesh;
  const int nv = m.num_vertices;
  // Each component needs a pinned vertex.
  std::vector<char> seen(nv, 0);
  for (int s = 0; s < nv; ++s) {
    if (seen[s]) continue;
    bool pinned = false;
    std::queue<int> qu;
    qu.push(s);
    seen[s] = 1;
    while (!qu.empty()) {
      const int v = qu.front();
      qu.pop();
      pinned = pinned || fixed[v];
      for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) {
        const int u = m.adj_vertex[k];
        if (!seen[u]) {
          seen[u] = 1;
          qu.push(u);
        }
      }
    }
    if (!pinned) throw constraint_error("a connected component has no Dirichlet constraint (singular system)");
  }

  std::vector<int> idx(nv, -1);
  int n = 0;
  for (int v = 0; v < nv; ++v)
    if (!fixed[v]) idx[v] = n++;
  CsrMatrix A;
  A.n = n;
  A.row.assign(n + 1, 0);
  std::vector<double> b(n, 0.0);
  for (int v = 0; v < nv; ++v) {
    if (fixed[v]) continue;
    const int i = idx[v];
    double bi = rhs.empty() ? 0.0 : rhs[v];
    bool diag_done = false;
    for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) {
      const int u = m.adj_vertex[k];
      const double w = L.weight[m.adj_edge[k]];
      if (fixed[u]) {
        bi += w * values[u];
        continue;
      }
      if (!diag_done && u > v) {
        A.col.push_back(i);
        A.val.push_back(L.diag[v]);
        diag_done = true;
      }
      A.col.push_back(idx[u]);
      A.val.push_back(-w);
    }
    if (!diag_done) {
      A.col.push_back(i);
      A.val.push_back(L.diag[v]);
    }
    A.row[i + 1] = static_cast<int>(A.col.size());
    b[i] = bi;
  }
  SolveResult res;
  std::vector<double> x;
  res.report = pcg(A, b, x, opt);
  res.f.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v) res.f[v] = fixed[v] ? values[v] : x[idx[v]];
  return res;
}

SolveResult solve_laplace(const LaplaceOperator& L, const BoundaryCondition& bc, const SolverOptions& opt) {
  const SurfaceMesh& m = *L.mesh;
  for (const auto& [label, c] : bc)
    if (m.loop_index(label) < 0) throw ParameterError("bc", "unknown loop " + label);
  std::vector<char> fixed(m.num_vertices, 0);
  VertexFunction values(m.num_vertices, 0.0);
  bool any = false;
  for (const BoundaryLoop& loop : m.loops) {
    auto it = bc.find(loop.label);
    if (it == bc.end()) throw ParameterError("bc", "loop " + loop.label + " has no condition");
    if (it->second.kind != LoopCondition::Kind::dirichlet) continue;
    any = true;
    for (int v : loop.cycle) {
      fixed[v] = 1;
      values[v] = it->second.value;
    }
  }
  if (!any) throw constraint_error("no Dirichlet loop: pure Neumann problems are refused");
  return solve_constrained(L, fixed, values, {}, opt);
}

SolveResult solve_laplace(const SurfaceMesh& m, const BoundaryCondition& bc, const SolverOptions& opt) {
  return solve_laplace(laplace_operator(m, opt.parallel), bc, opt);
}

SolveResult green_function(const LaplaceOperator& L, int source, const std::string& truncation,
                           const SolverOptions& opt) {
  const SurfaceMesh& m = *L.mesh;
  if (source < 0 || source >= m.num_vertices) throw domain_error("source vertex out of range");
  if (m.on_boundary[source]) throw domain_error("source vertex lies on the boundary");
  if (m.loop_index(truncation) < 0) throw ParameterError("truncation", "unknown loop " + truncation);
  BoundaryCondition bc;
  for (const BoundaryLoop& loop : m.loops)
    bc[loop.label] = loop.label == truncation || loop.role == LoopRole::truncation ? LoopCondition::dirichlet(0.0)
                                                                                     : LoopCondition::neumann();
  std::vector<char> fixed(m.num_vertices, 0);
  for (const BoundaryLoop& loop : m.loops)
    if (bc[loop.label].kind == LoopCondition::Kind::dirichlet)
      for (int v : loop.cycle) fixed[v] = 1;
  VertexFunction values(m.num_vertices, 0.0), rhs(m.num_vertices, 0.0);
  rhs[source] = 1.0;
  return solve_constrained(L, fixed, values, rhs, opt);
}

SolveResult green_function(const SurfaceMesh& m, int source, const std::string& truncation,
                           const SolverOptions& opt) {
  return green_function(laplace_operator(m, opt.parallel), source, truncation, opt);
}

}  // namespace harmlab
