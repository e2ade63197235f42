#include "harmlab/mesh_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "harmlab/errors.hpp"
#include "json.hpp"

namespace harmlab {

using nlohmann::json;

namespace {

json attr_to_json(const VertexAttr& a) {
  return json{{"piece", a.piece}, {"ring", a.ring}, {"index", a.index}, {"r", a.r}, {"theta", a.theta}};
}

VertexAttr attr_from_json(const json& j) {
  VertexAttr a;
  a.piece = j.at("piece").get<int>();
  a.ring = j.at("ring").get<int>();
  a.index = j.at("index").get<int>();
  a.r = j.at("r").get<double>();
  a.theta = j.at("theta").get<double>();
  return a;
}

}  // namespace

std::string mesh_to_json(const SurfaceMesh& m) {
  json doc;
  doc["version"] = kMeshFormatVersion;
  doc["geometry_tag"] = to_string(m.tag);
  doc["chart"] = to_string(m.chart);
  doc["chart_param"] = m.chart_param;
  json verts = json::array();
  for (int v = 0; v < m.num_vertices; ++v) {
    json jv{{"id", v}};
    if (!m.xy.empty()) jv["xy"] = {m.xy[v][0], m.xy[v][1]};
    if (!m.attr.empty()) jv["attr"] = attr_to_json(m.attr[v]);
    verts.push_back(std::move(jv));
  }
  doc["vertices"] = std::move(verts);
  json tris = json::array();
  for (const Tri& t : m.triangles) tris.push_back({t[0], t[1], t[2]});
  doc["triangles"] = std::move(tris);
  json el = json::array();
  for (size_t i = 0; i < m.edges.size(); ++i)
    el.push_back({{"edge", {m.edges[i][0], m.edges[i][1]}}, {"len", m.length[i]}});
  doc["edge_lengths"] = std::move(el);
  json loops = json::array();
  for (const BoundaryLoop& L : m.loops)
    loops.push_back({{"label", L.label}, {"role", to_string(L.role)}, {"cycle", L.cycle}});
  doc["boundary_loops"] = std::move(loops);
  return doc.dump();
}

SurfaceMesh mesh_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("mesh document is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != kMeshFormatVersion)
      throw Error(ErrorKind::io, "unsupported mesh format version");
    SurfaceMesh m;
    m.tag = geometry_tag_from(doc.at("geometry_tag").get<std::string>());
    if (doc.contains("chart")) m.chart = chart_kind_from(doc["chart"].get<std::string>());
    if (doc.contains("chart_param")) m.chart_param = doc["chart_param"].get<double>();
    const json& verts = doc.at("vertices");
    m.num_vertices = static_cast<int>(verts.size());
    bool has_xy = m.num_vertices > 0 && verts[0].contains("xy");
    bool has_attr = m.num_vertices > 0 && verts[0].contains("attr");
    if (has_xy) m.xy.resize(m.num_vertices);
    if (has_attr) m.attr.resize(m.num_vertices);
    for (const json& jv : verts) {
      int id = jv.at("id").get<int>();
      if (id < 0 || id >= m.num_vertices) throw Error(ErrorKind::io, "vertex id out of range");
      if (has_xy) m.xy[id] = {jv.at("xy")[0].get<double>(), jv.at("xy")[1].get<double>()};
      if (has_attr) m.attr[id] = attr_from_json(jv.at("attr"));
    }
    for (const json& jt : doc.at("triangles"))
      m.triangles.push_back({jt[0].get<int>(), jt[1].get<int>(), jt[2].get<int>()});
    std::vector<std::pair<Edge, double>> el;
    for (const json& je : doc.at("edge_lengths")) {
      int a = je.at("edge")[0].get<int>(), b = je.at("edge")[1].get<int>();
      el.push_back({{std::min(a, b), std::max(a, b)}, je.at("len").get<double>()});
    }
    std::sort(el.begin(), el.end());
    for (auto& [e, l] : el) {
      m.edges.push_back(e);
      m.length.push_back(l);
    }
    for (const json& jl : doc.at("boundary_loops")) {
      BoundaryLoop L;
      L.label = jl.at("label").get<std::string>();
      L.role = loop_role_from(jl.at("role").get<std::string>());
      L.cycle = jl.at("cycle").get<std::vector<int>>();
      m.loops.push_back(std::move(L));
    }
    build_topology(m);
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, std::string("malformed mesh document: ") + e.what());
  }
}

void write_mesh(const SurfaceMesh& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot write " + path);
  f << mesh_to_json(m) << '\n';
  if (!f) throw Error(ErrorKind::io, "write failed for " + path);
}

SurfaceMesh read_mesh(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return mesh_from_json(ss.str());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string mesh_hash(const SurfaceMesh& m) { return fnv1a_hex(mesh_to_json(m)); }

}  // namespace harmlab
