#include "harmlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "harmlab/errors.hpp"

namespace harmlab {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::domain: return "domain";
    case ErrorKind::constraint: return "constraint";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::positivity: return "positivity";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::resource: return "resource";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

const char* to_string(GeometryTag t) {
  switch (t) {
    case GeometryTag::flat: return "flat";
    case GeometryTag::hyperbolic: return "hyperbolic";
    case GeometryTag::glued: return "glued";
    case GeometryTag::conformal: return "conformal";
  }
  return "flat";
}

const char* to_string(LoopRole r) {
  return r == LoopRole::true_boundary ? "true-boundary" : "truncation";
}

const char* to_string(ChartKind c) {
  switch (c) {
    case ChartKind::none: return "none";
    case ChartKind::cartesian: return "cartesian";
    case ChartKind::polar: return "polar";
    case ChartKind::hyperbolic_polar: return "hyperbolic_polar";
    case ChartKind::cylinder: return "cylinder";
  }
  return "none";
}

GeometryTag geometry_tag_from(const std::string& s) {
  if (s == "flat") return GeometryTag::flat;
  if (s == "hyperbolic") return GeometryTag::hyperbolic;
  if (s == "glued") return GeometryTag::glued;
  if (s == "conformal") return GeometryTag::conformal;
  throw ParameterError("geometry_tag", "unknown value '" + s + "'");
}

LoopRole loop_role_from(const std::string& s) {
  if (s == "true-boundary") return LoopRole::true_boundary;
  if (s == "truncation") return LoopRole::truncation;
  throw ParameterError("role", "unknown value '" + s + "'");
}

ChartKind chart_kind_from(const std::string& s) {
  if (s == "none") return ChartKind::none;
  if (s == "cartesian") return ChartKind::cartesian;
  if (s == "polar") return ChartKind::polar;
  if (s == "hyperbolic_polar") return ChartKind::hyperbolic_polar;
  if (s == "cylinder") return ChartKind::cylinder;
  throw ParameterError("chart", "unknown value '" + s + "'");
}

int SurfaceMesh::find_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  if (a < 0 || a >= num_vertices) return -1;
  if (!adj_offset.empty()) {
    auto first = adj_vertex.begin() + adj_offset[a];
    auto last = adj_vertex.begin() + adj_offset[a + 1];
    auto it = std::lower_bound(first, last, b);
    if (it != last && *it == b) return adj_edge[adj_offset[a] + (it - first)];
    return -1;
  }
  auto it = std::lower_bound(edges.begin(), edges.end(), Edge{a, b});
  if (it != edges.end() && *it == Edge{a, b}) return static_cast<int>(it - edges.begin());
  return -1;
}

int SurfaceMesh::loop_index(const std::string& label) const {
  for (size_t i = 0; i < loops.size(); ++i)
    if (loops[i].label == label) return static_cast<int>(i);
  return -1;
}

const BoundaryLoop& SurfaceMesh::loop(const std::string& label) const {
  int i = loop_index(label);
  if (i < 0) throw domain_error("no boundary loop labelled '" + label + "'");
  return loops[i];
}

std::array<double, 3> SurfaceMesh::triangle_lengths(int t) const {
  const Tri& e = tri_edge[t];
  return {length[e[0]], length[e[1]], length[e[2]]};
}

std::vector<Edge> collect_edges(const std::vector<Tri>& tris) {
  std::vector<Edge> out;
  out.reserve(tris.size() * 3);
  for (const Tri& t : tris)
    for (int k = 0; k < 3; ++k) {
      int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      out.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void build_topology(SurfaceMesh& m) {
  std::vector<Edge> e = collect_edges(m.triangles);
  if (m.edges.empty()) {
    m.edges = e;
  } else if (m.edges != e) {
    throw Error(ErrorKind::geometry, "edge list does not match triangle edges");
  }
  const int ne = m.num_edges();
  if (static_cast<int>(m.length.size()) != ne)
    throw Error(ErrorKind::geometry, "edge length count does not match edge count");

  std::vector<int> deg(m.num_vertices + 1, 0);
  for (const Edge& ed : m.edges) {
    ++deg[ed[0]];
    ++deg[ed[1]];
  }
  m.adj_offset.assign(m.num_vertices + 1, 0);
  for (int v = 0; v < m.num_vertices; ++v) m.adj_offset[v + 1] = m.adj_offset[v] + deg[v];
  m.adj_vertex.assign(m.adj_offset.back(), -1);
  m.adj_edge.assign(m.adj_offset.back(), -1);
  std::vector<int> fill(m.adj_offset.begin(), m.adj_offset.end() - 1);
  // Edges are sorted by (a,b), so each vertex's neighbour list comes out sorted
  // if we insert lower neighbours first. Do two passes to guarantee order.
  for (int i = 0; i < ne; ++i) {
    int b = m.edges[i][1];
    m.adj_vertex[fill[b]] = m.edges[i][0];
    m.adj_edge[fill[b]++] = i;
  }
  for (int i = 0; i < ne; ++i) {
    int a = m.edges[i][0];
    m.adj_vertex[fill[a]] = m.edges[i][1];
    m.adj_edge[fill[a]++] = i;
  }

  m.tri_edge.assign(m.triangles.size(), Tri{-1, -1, -1});
  m.edge_tri.assign(ne, {-1, -1});
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Tri& tr = m.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tr[(k + 1) % 3], b = tr[(k + 2) % 3];
      int ei = m.find_edge(a, b);
      m.tri_edge[t][k] = ei;
      int side = a < b ? 0 : 1;
      if (m.edge_tri[ei][side] >= 0)
        throw GeometryError(t, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                   ") repeated with the same orientation or non-manifold");
      m.edge_tri[ei][side] = t;
    }
  }
  m.on_boundary.assign(m.num_vertices, 0);
  for (int i = 0; i < ne; ++i)
    if (m.is_boundary_edge(i)) {
      m.on_boundary[m.edges[i][0]] = 1;
      m.on_boundary[m.edges[i][1]] = 1;
    }
}

double triangle_area(double a, double b, double c) {
  // Kahan's formula on sorted sides a >= b >= c.
  if (a < b) std::swap(a, b);
  if (a < c) std::swap(a, c);
  if (b < c) std::swap(b, c);
  if (!(a > 0)) return 0.0;
  const double s = a;  // scaled to avoid overflow for huge lengths
  a = 1.0;
  b /= s;
  c /= s;
  double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
  return p > 0 ? 0.25 * std::sqrt(p) * s * s : 0.0;
}

ValidationReport validate(const SurfaceMesh& m) {
  ValidationReport rep;
  auto add = [&](std::string inv, std::vector<int> ids, std::string detail) {
    rep.violations.push_back({std::move(inv), std::move(ids), std::move(detail)});
  };
  const int nv = m.num_vertices;
  if (!m.xy.empty() && static_cast<int>(m.xy.size()) != nv)
    add("chart-size", {}, "xy count differs from vertex count");
  if (!m.attr.empty() && static_cast<int>(m.attr.size()) != nv)
    add("attr-size", {}, "attribute count differs from vertex count");

  bool indices_ok = true;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Tri& tr = m.triangles[t];
    bool ok = true;
    for (int k = 0; k < 3; ++k) ok = ok && tr[k] >= 0 && tr[k] < nv;
    if (!ok || tr[0] == tr[1] || tr[1] == tr[2] || tr[0] == tr[2]) {
      add("triangle-indices", {t}, "corner ids out of range or repeated");
      indices_ok = false;
    }
  }
  if (!indices_ok) return rep;

  // Half-edge multiplicities.
  std::map<std::pair<int, int>, std::vector<int>> half;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Tri& tr = m.triangles[t];
    for (int k = 0; k < 3; ++k) half[{tr[k], tr[(k + 1) % 3]}].push_back(t);
  }
  std::map<Edge, int> use;
  for (const auto& [he, ts] : half) {
    Edge e{std::min(he.first, he.second), std::max(he.first, he.second)};
    use[e] += static_cast<int>(ts.size());
    if (ts.size() > 1)
      add("orientation", ts,
          "half-edge " + std::to_string(he.first) + "->" + std::to_string(he.second) +
              " used by more than one triangle");
  }
  std::set<Edge> boundary_edges;
  for (const auto& [e, n] : use) {
    if (n > 2) add("edge-manifold", {e[0], e[1]}, "edge shared by more than two triangles");
    if (n == 1) boundary_edges.insert(e);
  }

  // Edge lengths.
  std::map<Edge, double> len;
  if (m.edges.size() != m.length.size()) {
    add("edge-lengths", {}, "edge and length arrays differ in size");
  } else {
    for (size_t i = 0; i < m.edges.size(); ++i) len[m.edges[i]] = m.length[i];
  }
  for (const auto& [e, n] : use) {
    auto it = len.find(e);
    if (it == len.end()) {
      add("edge-lengths", {e[0], e[1]}, "edge has no length");
    } else if (!(it->second > 0) || !std::isfinite(it->second)) {
      add("edge-lengths", {e[0], e[1]}, "length not positive and finite");
    }
  }
  for (int t = 0; t < m.num_triangles(); ++t) {
    const Tri& tr = m.triangles[t];
    double l[3];
    bool have = true;
    for (int k = 0; k < 3; ++k) {
      int a = tr[(k + 1) % 3], b = tr[(k + 2) % 3];
      auto it = len.find({std::min(a, b), std::max(a, b)});
      if (it == len.end()) {
        have = false;
        break;
      }
      l[k] = it->second;
    }
    if (!have) continue;
    for (int k = 0; k < 3; ++k) {
      if (!(l[k] < l[(k + 1) % 3] + l[(k + 2) % 3])) {
        add("triangle-inequality", {t},
            "side " + std::to_string(k) + " is not shorter than the sum of the others");
        break;
      }
    }
  }

  // Boundary loops.
  std::set<std::string> labels;
  std::set<Edge> covered;
  std::vector<int> owner(nv, -1);
  for (size_t li = 0; li < m.loops.size(); ++li) {
    const BoundaryLoop& L = m.loops[li];
    if (!labels.insert(L.label).second) add("loop-labels", {static_cast<int>(li)}, "duplicate label " + L.label);
    if (L.cycle.size() < 3) {
      add("loop-closed", {static_cast<int>(li)}, "loop " + L.label + " has fewer than 3 vertices");
      continue;
    }
    std::set<int> seen;
    for (size_t i = 0; i < L.cycle.size(); ++i) {
      int a = L.cycle[i], b = L.cycle[(i + 1) % L.cycle.size()];
      if (a < 0 || a >= nv) {
        add("loop-closed", {static_cast<int>(li)}, "vertex id out of range");
        break;
      }
      if (!seen.insert(a).second) add("loop-simple", {a}, "loop " + L.label + " revisits a vertex");
      if (owner[a] >= 0 && owner[a] != static_cast<int>(li))
        add("loop-disjoint", {a}, "vertex on loops " + m.loops[owner[a]].label + " and " + L.label);
      owner[a] = static_cast<int>(li);
      Edge e{std::min(a, b), std::max(a, b)};
      if (!boundary_edges.count(e)) {
        add("loop-closed", {a, b}, "loop " + L.label + " step is not a boundary edge");
      } else {
        covered.insert(e);
      }
    }
  }
  for (const Edge& e : boundary_edges)
    if (!covered.count(e)) add("loop-cover", {e[0], e[1]}, "boundary edge on no loop");

  std::vector<char> used(nv, 0);
  for (const Tri& tr : m.triangles)
    for (int v : tr) used[v] = 1;
  for (int v = 0; v < nv; ++v)
    if (!used[v]) add("isolated-vertex", {v}, "vertex in no triangle");
  return rep;
}

std::vector<std::vector<int>> trace_boundary_cycles(const SurfaceMesh& m) {
  // next[a] = b for each boundary half-edge a->b (surface on the left).
  std::unordered_map<int, int> next;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (!m.is_boundary_edge(e)) continue;
    int a = m.edges[e][0], b = m.edges[e][1];
    if (m.edge_tri[e][0] >= 0) next[a] = b;
    else next[b] = a;
  }
  std::vector<int> starts;
  for (const auto& kv : next) starts.push_back(kv.first);
  std::sort(starts.begin(), starts.end());
  std::set<int> done;
  std::vector<std::vector<int>> out;
  for (int s : starts) {
    if (done.count(s)) continue;
    std::vector<int> cyc;
    int v = s;
    do {
      cyc.push_back(v);
      done.insert(v);
      v = next.at(v);
    } while (v != s && cyc.size() <= next.size());
    out.push_back(std::move(cyc));
  }
  return out;
}

int euler_characteristic(const SurfaceMesh& m) {
  return m.num_vertices - static_cast<int>(collect_edges(m.triangles).size()) + m.num_triangles();
}

int connected_components(const SurfaceMesh& m) {
  std::vector<int> p(m.num_vertices);
  std::iota(p.begin(), p.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  };
  for (const Tri& t : m.triangles) {
    p[find(t[0])] = find(t[1]);
    p[find(t[1])] = find(t[2]);
  }
  int c = 0;
  for (int v = 0; v < m.num_vertices; ++v) c += find(v) == v;
  return c;
}

int genus(const SurfaceMesh& m) {
  int l = static_cast<int>(trace_boundary_cycles(m).size());
  return (2 - l - euler_characteristic(m)) / 2;
}

int first_betti(const SurfaceMesh& m) {
  int l = static_cast<int>(trace_boundary_cycles(m).size());
  return 2 * genus(m) + std::max(0, l - 1);
}

double total_area(const SurfaceMesh& m) {
  double s = 0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    auto l = m.triangle_lengths(t);
    s += triangle_area(l[0], l[1], l[2]);
  }
  return s;
}

Submesh extract_submesh(const SurfaceMesh& m, const std::function<bool(int)>& keep,
                        const CycleLabeler& label) {
  Submesh out;
  std::vector<int> newid(m.num_vertices, -1);
  std::vector<Tri> tris;
  for (const Tri& t : m.triangles)
    if (keep(t[0]) && keep(t[1]) && keep(t[2])) tris.push_back(t);
  std::vector<char> used(m.num_vertices, 0);
  for (const Tri& t : tris)
    for (int v : t) used[v] = 1;
  for (int v = 0; v < m.num_vertices; ++v)
    if (used[v]) {
      newid[v] = static_cast<int>(out.parent.size());
      out.parent.push_back(v);
    }
  SurfaceMesh& s = out.mesh;
  s.tag = m.tag;
  s.chart = m.chart;
  s.chart_param = m.chart_param;
  s.num_vertices = static_cast<int>(out.parent.size());
  for (int v : out.parent) {
    if (!m.xy.empty()) s.xy.push_back(m.xy[v]);
    if (!m.attr.empty()) s.attr.push_back(m.attr[v]);
  }
  for (Tri t : tris) {
    for (int& v : t) v = newid[v];
    s.triangles.push_back(t);
  }
  s.edges = collect_edges(s.triangles);
  s.length.resize(s.edges.size());
  for (size_t i = 0; i < s.edges.size(); ++i) {
    int e = m.find_edge(out.parent[s.edges[i][0]], out.parent[s.edges[i][1]]);
    s.length[i] = m.length[e];
  }
  build_topology(s);

  auto cycles = trace_boundary_cycles(s);
  std::vector<std::pair<size_t, BoundaryLoop>> kept;
  for (auto& cyc : cycles) {
    // A surviving source loop has the same vertex set.
    std::vector<int> src;
    for (int v : cyc) src.push_back(out.parent[v]);
    std::vector<int> sorted_src = src;
    std::sort(sorted_src.begin(), sorted_src.end());
    int match = -1;
    for (size_t li = 0; li < m.loops.size(); ++li) {
      if (m.loops[li].cycle.size() != cyc.size()) continue;
      std::vector<int> lv = m.loops[li].cycle;
      std::sort(lv.begin(), lv.end());
      if (lv == sorted_src) {
        match = static_cast<int>(li);
        break;
      }
    }
    BoundaryLoop L;
    if (match >= 0) {
      L.label = m.loops[match].label;
      L.role = m.loops[match].role;
      for (int v : m.loops[match].cycle) L.cycle.push_back(newid[v]);
    } else {
      auto [lab, role] = label(s, cyc);
      L.label = lab;
      L.role = role;
      L.cycle = cyc;
    }
    kept.push_back({0, std::move(L)});
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) { return a.second.label < b.second.label; });
  for (auto& k : kept) s.loops.push_back(std::move(k.second));
  return out;
}

SurfaceMesh permute_vertices(const SurfaceMesh& m, const std::vector<int>& perm) {
  SurfaceMesh s;
  s.tag = m.tag;
  s.chart = m.chart;
  s.chart_param = m.chart_param;
  s.num_vertices = m.num_vertices;
  if (!m.xy.empty()) {
    s.xy.resize(m.num_vertices);
    for (int v = 0; v < m.num_vertices; ++v) s.xy[perm[v]] = m.xy[v];
  }
  if (!m.attr.empty()) {
    s.attr.resize(m.num_vertices);
    for (int v = 0; v < m.num_vertices; ++v) s.attr[perm[v]] = m.attr[v];
  }
  for (Tri t : m.triangles) {
    for (int& v : t) v = perm[v];
    s.triangles.push_back(t);
  }
  s.edges = collect_edges(s.triangles);
  s.length.resize(s.edges.size());
  std::vector<int> inv(m.num_vertices);
  for (int v = 0; v < m.num_vertices; ++v) inv[perm[v]] = v;
  for (size_t i = 0; i < s.edges.size(); ++i)
    s.length[i] = m.length[m.find_edge(inv[s.edges[i][0]], inv[s.edges[i][1]])];
  for (const BoundaryLoop& L : m.loops) {
    BoundaryLoop n = L;
    for (int& v : n.cycle) v = perm[v];
    s.loops.push_back(n);
  }
  build_topology(s);
  return s;
}

}  // namespace harmlab
