#include "harmlab/cohomology.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "harmlab/errors.hpp"

namespace harmlab {

namespace {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

// Sign of crossing edge e from triangle `from` into its other triangle.
int crossing_sign(const SurfaceMesh& m, int e, int from) { return m.edge_tri[e][1] == from ? 1 : -1; }

int other_triangle(const SurfaceMesh& m, int e, int t) {
  return m.edge_tri[e][0] == t ? m.edge_tri[e][1] : m.edge_tri[e][0];
}

struct DualTree {
  std::vector<int> parent_edge;
  std::vector<int> depth;
  std::vector<int> order;  // BFS order
  std::vector<int> roots;
  std::vector<char> in_tree;  // per edge
};

DualTree dual_tree(const SurfaceMesh& m, int root) {
  const int nt = m.num_triangles();
  DualTree T;
  T.parent_edge.assign(nt, -1);
  T.depth.assign(nt, -1);
  T.in_tree.assign(m.num_edges(), 0);
  if (nt == 0) return T;
  if (root < 0 || root >= nt) throw ParameterError("root", "triangle out of range");
  std::vector<int> starts{root};
  for (int t = 0; t < nt; ++t) starts.push_back(t);
  for (int s : starts) {
    if (T.depth[s] >= 0) continue;
    T.roots.push_back(s);
    T.depth[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      const int t = q.front();
      q.pop();
      T.order.push_back(t);
      for (int e : m.tri_edge[t]) {
        if (m.is_boundary_edge(e)) continue;
        const int u = other_triangle(m, e, t);
        if (T.depth[u] >= 0) continue;
        T.depth[u] = T.depth[t] + 1;
        T.parent_edge[u] = e;
        T.in_tree[e] = 1;
        q.push(u);
      }
    }
  }
  return T;
}

// Crossings from t up to the tree root, each oriented child -> parent.
void path_to_root(const SurfaceMesh& m, const DualTree& T, int t, std::vector<std::pair<int, int>>& out) {
  while (T.parent_edge[t] >= 0) {
    const int e = T.parent_edge[t];
    out.push_back({e, crossing_sign(m, e, t)});
    t = other_triangle(m, e, t);
  }
}

}  // namespace

HomologyBasis homology_basis(const SurfaceMesh& m, int root) {
  HomologyBasis B;
  B.mesh_edges = m.num_edges();
  B.mesh_triangles = m.num_triangles();
  const DualTree T = dual_tree(m, root);
  B.tree_parent_edge = T.parent_edge;
  B.roots = T.roots;
  if (T.roots.size() > 1)
    B.warnings.push_back("mesh has " + std::to_string(T.roots.size()) + " components; each is processed separately");

  const int nv = m.num_vertices;
  UnionFind uf(nv + 1);
  const int merged = nv;
  // Boundary vertices of one component share a merged node; components stay
  // apart because no edge links them.
  for (int v = 0; v < nv; ++v)
    if (m.on_boundary[v]) uf.unite(v, merged);
  std::vector<int> leftover;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.is_boundary_edge(e) || T.in_tree[e]) continue;
    if (!uf.unite(m.edges[e][0], m.edges[e][1])) leftover.push_back(e);
  }
  for (int e : leftover) {
    // Cross e right -> left, then return through the tree from left to right.
    const int left = m.edge_tri[e][0], right = m.edge_tri[e][1];
    std::vector<std::pair<int, int>> up_left, up_right;
    path_to_root(m, T, left, up_left);
    path_to_root(m, T, right, up_right);
    // Drop the shared part above the lowest common ancestor.
    while (!up_left.empty() && !up_right.empty() && up_left.back().first == up_right.back().first) {
      up_left.pop_back();
      up_right.pop_back();
    }
    DualCycle c;
    c.edge.push_back(e);
    c.sign.push_back(1);
    for (auto [edge, s] : up_left) {
      c.edge.push_back(edge);
      c.sign.push_back(s);
    }
    for (auto it = up_right.rbegin(); it != up_right.rend(); ++it) {
      c.edge.push_back(it->first);
      c.sign.push_back(-it->second);
    }
    B.cycles.push_back(std::move(c));
  }
  return B;
}

double period(const DualOneForm& w, const DualCycle& c) {
  double s = 0.0;
  for (size_t i = 0; i < c.edge.size(); ++i) s += c.sign[i] * w.values[c.edge[i]];
  return s;
}

std::vector<double> periods(const SurfaceMesh& m, const DualOneForm& w, const HomologyBasis& b) {
  if (static_cast<int>(w.values.size()) != m.num_edges() || b.mesh_edges != m.num_edges() ||
      b.mesh_triangles != m.num_triangles())
    throw domain_error("form, basis and mesh do not match");
  std::vector<double> p;
  for (const DualCycle& c : b.cycles) p.push_back(period(w, c));
  return p;
}

DualCycle cycle_around(const SurfaceMesh& m, const std::vector<char>& in_set) {
  DualCycle c;
  for (int e = 0; e < m.num_edges(); ++e) {
    const int a = m.edges[e][0], b = m.edges[e][1];
    if (in_set[a] == in_set[b]) continue;
    if (m.is_boundary_edge(e)) throw precondition_error("vertex set meets the boundary away from its own loops");
    c.edge.push_back(e);
    // Counter-clockwise around S crosses a -> b from right to left when a is in S.
    c.sign.push_back(in_set[a] ? 1 : -1);
  }
  return c;
}

int cycle_rank(const SurfaceMesh& m, const std::vector<DualCycle>& cycles) {
  if (cycles.empty()) return 0;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cycles.size()), m.num_edges());
  for (size_t i = 0; i < cycles.size(); ++i)
    for (size_t k = 0; k < cycles[i].edge.size(); ++k) A(i, cycles[i].edge[k]) += cycles[i].sign[k];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  return static_cast<int>(lu.rank());
}

double default_period_tolerance(double solver_residual, double diameter) {
  return 1e3 * std::max(solver_residual, std::numeric_limits<double>::epsilon()) * diameter;
}

double mesh_diameter(const SurfaceMesh& m) {
  if (m.num_vertices == 0) return 0.0;
  auto sweep = [&](int s, int* far) {
    std::vector<double> d(m.num_vertices, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> q;
    d[s] = 0.0;
    q.push({0.0, s});
    while (!q.empty()) {
      auto [dv, v] = q.top();
      q.pop();
      if (dv > d[v]) continue;
      for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) {
        const int u = m.adj_vertex[k];
        const double nd = dv + m.length[m.adj_edge[k]];
        if (nd < d[u]) {
          d[u] = nd;
          q.push({nd, u});
        }
      }
    }
    double best = 0.0;
    for (int v = 0; v < m.num_vertices; ++v)
      if (std::isfinite(d[v]) && d[v] >= best) {
        best = d[v];
        *far = v;
      }
    return best;
  };
  int a = 0, b = 0;
  sweep(0, &a);
  return sweep(a, &b);
}

ClassVerdict class_nontrivial(const std::vector<double>& p, double tol) {
  if (!(tol > 0)) throw ParameterError("tol", "must be positive");
  ClassVerdict v;
  v.tolerance = tol;
  for (size_t i = 0; i < p.size(); ++i)
    if (std::abs(p[i]) > v.max_period) {
      v.max_period = std::abs(p[i]);
      v.witness = static_cast<int>(i);
    }
  v.nontrivial = v.max_period > tol;
  v.tolerance_dominated = !v.nontrivial && v.max_period > 0.0;
  return v;
}

std::vector<char> loop_collar(const SurfaceMesh& m, const std::string& label, int depth) {
  const int li = m.loop_index(label);
  if (li < 0) throw ParameterError("label", "unknown loop " + label);
  std::vector<char> other(m.num_vertices, 0);
  for (size_t j = 0; j < m.loops.size(); ++j)
    if (static_cast<int>(j) != li)
      for (int v : m.loops[j].cycle) other[v] = 1;
  for (int d = depth; d >= 0; --d) {
    std::vector<int> dist(m.num_vertices, -1);
    std::queue<int> q;
    for (int v : m.loops[li].cycle) {
      dist[v] = 0;
      q.push(v);
    }
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      if (dist[v] == d) continue;
      for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) {
        const int u = m.adj_vertex[k];
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          q.push(u);
        }
      }
    }
    std::vector<char> in(m.num_vertices, 0);
    bool clash = false;
    for (int v = 0; v < m.num_vertices; ++v) {
      in[v] = dist[v] >= 0;
      // A neighbour of S on another loop would put a boundary edge in the cut.
      if (in[v])
        for (int k = m.adj_offset[v]; k < m.adj_offset[v + 1]; ++k) clash = clash || other[m.adj_vertex[k]];
    }
    if (!clash) return in;
  }
  throw precondition_error("loop " + label + " touches another loop; no collar exists");
}

BettiReport betti_lower_bound(const SurfaceMesh& m, const std::vector<std::string>& labels, const SolverOptions& opt) {
  if (labels.empty()) throw domain_error("betti_lower_bound needs at least one boundary loop");
  for (const std::string& l : labels)
    if (m.loop_index(l) < 0) throw ParameterError("labels", "unknown loop " + l);
  BettiReport R;
  R.labels = labels;
  for (const BoundaryLoop& L : m.loops) R.compact = R.compact && L.role == LoopRole::true_boundary;
  const LaplaceOperator L = laplace_operator(m, opt.parallel);
  const HomologyBasis B = homology_basis(m);
  const int nc = static_cast<int>(B.cycles.size());
  const int l = static_cast<int>(labels.size());
  R.matrix.assign(nc, std::vector<double>(l, 0.0));
  VertexFunction sum(m.num_vertices, 0.0);
  double max_res = 0.0;
  for (int i = 0; i < l; ++i) {
    BoundaryCondition bc;
    for (const BoundaryLoop& loop : m.loops)
      bc[loop.label] = LoopCondition::dirichlet(loop.label == labels[i] ? 1.0 : 0.0);
    SolveResult s = solve_laplace(L, bc, opt);
    max_res = std::max(max_res, s.report.relative_residual);
    const DualOneForm w = conjugate_differential(L, s.f);
    const auto p = periods(m, w, B);
    for (int c = 0; c < nc; ++c) R.matrix[c][i] = p[c];
    for (int v = 0; v < m.num_vertices; ++v) sum[v] += s.f[v];
    R.collar_period.push_back(period(w, cycle_around(m, loop_collar(m, labels[i], 2))));
    R.solves.push_back(s.report);
    R.h.push_back(std::move(s.f));
  }
  for (double s : sum) R.sum_h_deviation = std::max(R.sum_h_deviation, std::abs(s - 1.0));
  for (int c = 0; c < nc; ++c) {
    double s = 0.0;
    for (int i = 0; i < l; ++i) s += R.matrix[c][i];
    R.sum_period_norm = std::max(R.sum_period_norm, std::abs(s));
  }
  if (nc > 0) {
    Eigen::MatrixXd P(nc, l);
    for (int c = 0; c < nc; ++c)
      for (int i = 0; i < l; ++i) P(c, i) = R.matrix[c][i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(P);
    const auto sv = svd.singularValues();
    for (Eigen::Index k = 0; k < sv.size(); ++k) R.singular_values.push_back(sv(k));
    const double smax = sv.size() ? sv(0) : 0.0;
    for (double s : R.singular_values)
      if (smax > 0 && s > R.rank_tolerance * smax) ++R.rank;
  }
  // Only meaningful when every loop of the mesh is among the labels.
  if (R.compact && l == static_cast<int>(m.loops.size())) R.rank_within_bound = R.rank <= l - 1;
  R.collar_tolerance = default_period_tolerance(max_res, mesh_diameter(m));
  for (double p : R.collar_period) R.collar_certified.push_back(std::abs(p) > R.collar_tolerance);
  return R;
}

CombinationCertificate combination_certificate(const SurfaceMesh& m, const BettiReport& b,
                                               const std::vector<double>& c) {
  if (c.size() != b.h.size()) throw ParameterError("c", "needs one coefficient per boundary label");
  CombinationCertificate r;
  r.c = c;
  VertexFunction hc(m.num_vertices, 0.0);
  for (size_t i = 0; i < c.size(); ++i)
    for (int v = 0; v < m.num_vertices; ++v) hc[v] += c[i] * b.h[i][v];
  r.max_value = -INFINITY;
  r.boundary_max = -INFINITY;
  for (int v = 0; v < m.num_vertices; ++v) {
    if (hc[v] > r.max_value) {
      r.max_value = hc[v];
      r.argmax = v;
    }
    if (m.on_boundary[v]) r.boundary_max = std::max(r.boundary_max, hc[v]);
  }
  const double cmin = *std::min_element(c.begin(), c.end()), cmax = *std::max_element(c.begin(), c.end());
  const double slack = 1e-10 * std::max(1.0, cmax - cmin);
  r.max_on_boundary = r.max_value <= r.boundary_max + slack;
  r.periods.assign(b.matrix.size(), 0.0);
  for (size_t k = 0; k < b.matrix.size(); ++k)
    for (size_t i = 0; i < c.size(); ++i) r.periods[k] += c[i] * b.matrix[k][i];
  r.verdict = class_nontrivial(r.periods, b.collar_tolerance);
  if (!r.max_on_boundary) {
    r.reason = "h_c attains its maximum at interior vertex " + std::to_string(r.argmax);
  } else if (!r.verdict.nontrivial) {
    r.reason = r.verdict.tolerance_dominated ? "periods below tolerance" : "all periods vanish";
  } else {
    r.certified = true;
    r.reason = "non-trivial period on cycle " + std::to_string(r.verdict.witness);
  }
  return r;
}

ConjugateResult integrate_conjugate(const LaplaceOperator& L, const VertexFunction& h, double tol, int root) {
  const SurfaceMesh& m = *L.mesh;
  ConjugateResult r;
  r.tolerance = tol;
  const VertexFunction Lh = apply_laplacian(L, h);
  for (int v = 0; v < m.num_vertices; ++v)
    if (!m.on_boundary[v]) r.harmonic_residual = std::max(r.harmonic_residual, std::abs(Lh[v]));
  if (r.harmonic_residual > 1e-6) throw precondition_error("h is not harmonic (max interior |Lh| > 1e-6)");
  const DualOneForm w = conjugate_differential(L, h);
  const HomologyBasis B = homology_basis(m, root);
  const auto p = periods(m, w, B);
  for (double x : p)
    if (std::abs(x) > tol) r.obstructed = true;
  if (r.obstructed) {
    r.obstruction = p;
    return r;
  }
  const DualTree T = dual_tree(m, root);
  r.y.assign(m.num_triangles(), 0.0);
  for (int t : T.order) {
    const int e = T.parent_edge[t];
    if (e < 0) continue;
    const int parent = other_triangle(m, e, t);
    r.y[t] = r.y[parent] + crossing_sign(m, e, parent) * w.values[e];
  }
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.is_boundary_edge(e)) continue;
    const double d = r.y[m.edge_tri[e][0]] - r.y[m.edge_tri[e][1]] - w.values[e];
    r.cr_residual = std::max(r.cr_residual, std::abs(d));
  }
  r.h_min = *std::min_element(h.begin(), h.end());
  r.h_max = *std::max_element(h.begin(), h.end());
  r.bc_min = std::numeric_limits<double>::infinity();
  r.bc_max = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < m.num_vertices; ++v)
    if (m.on_boundary[v]) {
      r.bc_min = std::min(r.bc_min, h[v]);
      r.bc_max = std::max(r.bc_max, h[v]);
    }
  r.in_strip = r.h_min >= r.bc_min - 1e-12 && r.h_max <= r.bc_max + 1e-12;
  return r;
}

}  // namespace harmlab
