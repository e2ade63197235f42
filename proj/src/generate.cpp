#include "harmlab/generate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <unordered_map>

#include "harmlab/errors.hpp"

namespace harmlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double d) {
  d = std::fmod(d, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d < -kPi) d += kTwoPi;
  return d;
}

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ParameterError(field, what);
}

// ---------------------------------------------------------------- builder

struct Local {
  int anchor = -1;  // patch key; -1 if none
  double rho = 0.0;
  double psi = 0.0;
};

class MeshBuilder {
 public:
  using LengthFn = std::function<double(int, int)>;

  int add_vertex(Vec2 xy, VertexAttr a) {
    xy_.push_back(xy);
    attr_.push_back(a);
    local_.push_back({});
    return static_cast<int>(xy_.size()) - 1;
  }

  Local& local(int v) { return local_[v]; }
  const VertexAttr& attr(int v) const { return attr_[v]; }

  // Lengths are computed once per edge by the first piece that emits it.
  void add_tri(int a, int b, int c, bool flip, const LengthFn& len) {
    if (flip) std::swap(b, c);
    tris_.push_back({a, b, c});
    edge(a, b, len);
    edge(b, c, len);
    edge(c, a, len);
  }

  void set_length(int a, int b, double l) { len_[key(a, b)] = l; }

  SurfaceMesh finish(GeometryTag tag, ChartKind chart, double param, bool keep_xy) {
    SurfaceMesh m;
    m.tag = tag;
    m.chart = chart;
    m.chart_param = param;
    m.num_vertices = static_cast<int>(xy_.size());
    if (keep_xy) m.xy = xy_;
    m.attr = attr_;
    m.triangles = tris_;
    m.edges = collect_edges(m.triangles);
    m.length.resize(m.edges.size());
    for (size_t i = 0; i < m.edges.size(); ++i) m.length[i] = len_.at(key(m.edges[i][0], m.edges[i][1]));
    build_topology(m);
    return m;
  }

 private:
  static std::uint64_t key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  }
  void edge(int a, int b, const LengthFn& len) {
    auto k = key(a, b);
    if (!len_.count(k)) len_[k] = len(a, b);
  }

  std::vector<Vec2> xy_;
  std::vector<VertexAttr> attr_;
  std::vector<Local> local_;
  std::vector<Tri> tris_;
  std::unordered_map<std::uint64_t, double> len_;
};

// ---------------------------------------------------------------- sheets

enum class Model { euclid, hyper, cylinder };

struct SheetGeom {
  Model model = Model::euclid;
  double a = 1.0;  // cylinder scale l / 2pi

  double radius_of(double u) const {
    switch (model) {
      case Model::euclid: return std::exp(u);
      case Model::hyper: return inv_log_tanh_half(u);
      case Model::cylinder: return std::asinh(std::tan(a * u));
    }
    return 0;
  }
  double u_of(double r) const {
    switch (model) {
      case Model::euclid: return std::log(r);
      case Model::hyper: return log_tanh_half(r);
      case Model::cylinder: return std::atan(std::sinh(r)) / a;
    }
    return 0;
  }
  // Metric length of one unit of angle at radius r.
  double scale(double r) const {
    switch (model) {
      case Model::euclid: return r;
      case Model::hyper: return std::sinh(r);
      case Model::cylinder: return a * std::cosh(r);
    }
    return 0;
  }
  double dist(double r1, double t1, double r2, double t2) const {
    switch (model) {
      case Model::euclid: return euclid_polar_distance(r1, t1, r2, t2);
      case Model::hyper: return hyperbolic_polar_distance(r1, t1, r2, t2);
      case Model::cylinder: return cylinder_distance(a, r1, t1, r2, t2);
    }
    return 0;
  }
  Vec2 chart(double r, double th) const {
    if (model == Model::cylinder) return {r, th};
    return {r * std::cos(th), r * std::sin(th)};
  }
};

struct RingPlan {
  std::vector<double> u;
  std::vector<int> n;
};

struct ScheduleRule {
  double u0 = 0, u1 = 0;
  int n0 = 8;
  std::vector<double> breaks;  // u values in (u0, u1)
  std::function<int(double radius, int n)> desired;
  std::vector<std::pair<double, double>> keepout;
  double grade_first = 0, grade_ratio = 1;
  int n_min = 4, n_max = 1 << 20;
};

RingPlan plan_rings(const SheetGeom& g, const ScheduleRule& rule) {
  RingPlan p;
  std::vector<double> br;
  for (double b : rule.breaks)
    if (b > rule.u0 && b < rule.u1) br.push_back(b);
  br.push_back(rule.u1);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());

  double u = rule.u0;
  int n = rule.n0;
  p.u.push_back(u);
  p.n.push_back(n);
  size_t bi = 0;
  double grade = rule.grade_first;
  const double span = std::max(1.0, std::abs(rule.u1 - rule.u0));
  while (u < rule.u1) {
    while (bi < br.size() && br[bi] <= u + 1e-14 * span) ++bi;
    double b = br[bi];
    double step = kTwoPi / n;
    if (grade > 0) {
      if (grade < step) step = grade;
      grade *= rule.grade_ratio;
    }
    double rem = b - u;
    double next;
    if (rem <= 1.5 * step) next = b;
    else if (rem < 2.5 * step) next = u + 0.5 * rem;
    else next = u + step;

    int nn = n;
    bool blocked = false;
    for (auto [lo, hi] : rule.keepout)
      if (next >= lo && u <= hi) blocked = true;
    if (!blocked && rule.desired) {
      int want = rule.desired(g.radius_of(next), n);
      if (want > n && 2 * n <= rule.n_max) nn = 2 * n;
      else if (want < n && n % 2 == 0 && n / 2 >= rule.n_min) nn = n / 2;
    }
    u = next;
    n = nn;
    p.u.push_back(u);
    p.n.push_back(n);
  }
  return p;
}

struct Block {
  int ring = 0;  // centre ring index
  int j0 = 0;    // centre angular index
  int m = 1;     // half-width in cells
};

struct Sheet {
  std::vector<std::vector<int>> ids;  // ids[ring][j], -1 inside blocks
  int center = -1;
  std::vector<double> radius;
};

bool cell_in_block(const Block& b, int ring, int j, int n) {
  if (ring < b.ring - b.m || ring >= b.ring + b.m) return false;
  int d = ((j - (b.j0 - b.m)) % n + n) % n;
  return d < 2 * b.m;
}

bool node_inside_block(const Block& b, int ring, int j, int n) {
  if (ring <= b.ring - b.m || ring >= b.ring + b.m) return false;
  int d = ((j - b.j0) % n + n) % n;
  if (d > n / 2) d -= n;
  return std::abs(d) < b.m;
}

Sheet build_sheet(MeshBuilder& B, const SheetGeom& g, const RingPlan& plan, bool with_center,
                  const std::vector<Block>& blocks, int piece_id, bool flip) {
  Sheet s;
  const int R = static_cast<int>(plan.u.size());
  s.ids.resize(R);
  s.radius.resize(R);
  for (const Block& b : blocks) {
    if (b.ring - b.m < 0 || b.ring + b.m >= R)
      throw Error(ErrorKind::parameter, "handle block does not fit inside the ring grid");
    for (int k = b.ring - b.m; k <= b.ring + b.m; ++k)
      if (plan.n[k] != plan.n[b.ring])
        throw Error(ErrorKind::parameter, "angular count changes inside a handle block");
  }
  if (with_center) {
    s.center = B.add_vertex({0.0, 0.0}, {piece_id, -1, 0, 0.0, 0.0});
  }
  for (int k = 0; k < R; ++k) {
    const int n = plan.n[k];
    const double r = g.radius_of(plan.u[k]);
    s.radius[k] = r;
    s.ids[k].assign(n, -1);
    for (int j = 0; j < n; ++j) {
      bool inside = false;
      for (const Block& b : blocks) inside = inside || node_inside_block(b, k, j, n);
      if (inside) continue;
      double th = kTwoPi * j / n;
      s.ids[k][j] = B.add_vertex(g.chart(r, th), {piece_id, k, j, r, th});
    }
  }
  auto len = [&](int a, int b) {
    const VertexAttr& x = B.attr(a);
    const VertexAttr& y = B.attr(b);
    if (x.ring < 0) return y.r;
    if (y.ring < 0) return x.r;
    return g.dist(x.r, x.theta, y.r, y.theta);
  };
  if (with_center) {
    const int n = plan.n[0];
    for (int j = 0; j < n; ++j) B.add_tri(s.center, s.ids[0][j], s.ids[0][(j + 1) % n], flip, len);
  }
  for (int k = 0; k + 1 < R; ++k) {
    const int n = plan.n[k], n2 = plan.n[k + 1];
    const auto& I = s.ids[k];
    const auto& O = s.ids[k + 1];
    if (n2 == n) {
      for (int j = 0; j < n; ++j) {
        bool skip = false;
        for (const Block& b : blocks) skip = skip || cell_in_block(b, k, j, n);
        if (skip) continue;
        int j1 = (j + 1) % n;
        B.add_tri(I[j], O[j], O[j1], flip, len);
        B.add_tri(I[j], O[j1], I[j1], flip, len);
      }
    } else if (n2 == 2 * n) {
      for (int j = 0; j < n; ++j) {
        int a = I[j], b = I[(j + 1) % n];
        int c = O[2 * j], mid = O[2 * j + 1], d = O[(2 * j + 2) % n2];
        B.add_tri(a, c, mid, flip, len);
        B.add_tri(a, mid, b, flip, len);
        B.add_tri(b, mid, d, flip, len);
      }
    } else if (2 * n2 == n) {
      for (int j = 0; j < n2; ++j) {
        int a = O[j], b = O[(j + 1) % n2];
        int c = I[2 * j], mid = I[2 * j + 1], d = I[(2 * j + 2) % n];
        B.add_tri(c, a, mid, flip, len);
        B.add_tri(mid, a, b, flip, len);
        B.add_tri(mid, b, d, flip, len);
      }
    } else {
      throw Error(ErrorKind::parameter, "ring angular counts must change by a factor of two");
    }
  }
  return s;
}

// Perimeter of a block, counter-clockwise, starting at the outward node.
std::vector<int> block_perimeter(const Sheet& s, const Block& b) {
  const int n = static_cast<int>(s.ids[b.ring].size());
  auto at = [&](int ring, int j) { return s.ids[ring][((j % n) + n) % n]; };
  std::vector<int> out;
  const int top = b.ring + b.m, bot = b.ring - b.m;
  for (int j = b.j0; j < b.j0 + b.m; ++j) out.push_back(at(top, j));
  for (int k = top; k > bot; --k) out.push_back(at(k, b.j0 + b.m));
  for (int j = b.j0 + b.m; j > b.j0 - b.m; --j) out.push_back(at(bot, j));
  for (int k = bot; k < top; ++k) out.push_back(at(k, b.j0 - b.m));
  for (int j = b.j0 - b.m; j < b.j0; ++j) out.push_back(at(top, j));
  return out;
}

// ---------------------------------------------------------------- patches

enum class LocalModel { euclid, hyper };

double local_dist(LocalModel lm, double r1, double p1, double r2, double p2) {
  return lm == LocalModel::euclid ? euclid_polar_distance(r1, p1, r2, p2)
                                  : hyperbolic_polar_distance(r1, p1, r2, p2);
}

// Annular patch from a circle of radius rho_in about the handle centre out to
// the block perimeter. Perimeter vertices must already carry local coords for
// this anchor. Returns the inner ring ids (uniform angles from psi_0).
std::vector<int> build_patch(MeshBuilder& B, const std::vector<int>& perim, int anchor,
                             double rho_in, LocalModel lm, int piece_id, bool flip,
                             std::vector<double>* inner_psi) {
  const int M = static_cast<int>(perim.size());
  std::vector<double> pr(M), pp(M);
  double logsum = 0;
  for (int j = 0; j < M; ++j) {
    pr[j] = B.local(perim[j]).rho;
    pp[j] = B.local(perim[j]).psi;
    logsum += std::log(pr[j]);
  }
  const double psi0 = pp[0];
  for (int j = 1; j < M; ++j) {
    double d = std::fmod(pp[j] - psi0, kTwoPi);
    if (d < 0) d += kTwoPi;
    pp[j] = psi0 + d;
  }
  const double rho_out = std::exp(logsum / M);
  if (!(rho_in < 0.8 * rho_out))
    throw Error(ErrorKind::parameter, "handle radius does not fit inside its block");
  const double q = std::log(rho_out / rho_in);
  const int K = std::max(1, static_cast<int>(std::lround(q / (kTwoPi / M))));
  const int kb = std::min(K, 3);

  std::vector<std::vector<int>> ring(K + 1);
  ring[K] = perim;
  for (int k = 0; k < K; ++k) {
    const double rk = rho_in * std::exp(q * k / K);
    double t = (k - (K - kb)) / static_cast<double>(kb);
    double beta = t <= 0 ? 0.0 : t * t * (3 - 2 * t);
    ring[k].resize(M);
    for (int j = 0; j < M; ++j) {
      double rho = rk * ((1 - beta) + beta * pr[j] / rho_out);
      double psi = (1 - beta) * (psi0 + kTwoPi * j / M) + beta * pp[j];
      int v = B.add_vertex({0.0, 0.0}, {piece_id, k, j, rho, psi});
      B.local(v) = {anchor, rho, psi};
      ring[k][j] = v;
    }
  }
  auto len = [&](int a, int b) {
    const Local& x = B.local(a);
    const Local& y = B.local(b);
    return local_dist(lm, x.rho, x.psi, y.rho, y.psi);
  };
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < M; ++j) {
      int j1 = (j + 1) % M;
      B.add_tri(ring[k][j], ring[k + 1][j], ring[k + 1][j1], flip, len);
      B.add_tri(ring[k][j], ring[k + 1][j1], ring[k][j1], flip, len);
    }
  if (inner_psi) {
    inner_psi->clear();
    for (int j = 0; j < M; ++j) inner_psi->push_back(psi0 + kTwoPi * j / M);
  }
  return ring[0];
}

void set_euclid_local(MeshBuilder& B, const std::vector<int>& perim, int anchor, double rc, double tc) {
  for (int v : perim) {
    const VertexAttr& a = B.attr(v);
    double d = a.theta - tc;
    double x = a.r * std::cos(d) - rc, y = a.r * std::sin(d);
    B.local(v) = {anchor, std::hypot(x, y), std::atan2(y, x) + tc};
  }
}

void set_hyper_local(MeshBuilder& B, const std::vector<int>& perim, int anchor, double rc, double tc) {
  const double wr = std::tanh(0.5 * rc);
  const double wx = wr * std::cos(tc), wy = wr * std::sin(tc);
  for (int v : perim) {
    const VertexAttr& a = B.attr(v);
    const double zr = std::tanh(0.5 * a.r);
    const double zx = zr * std::cos(a.theta), zy = zr * std::sin(a.theta);
    // (z - w) / (1 - conj(w) z)
    const double nx = zx - wx, ny = zy - wy;
    const double dx = 1 - (wx * zx + wy * zy), dy = -(wx * zy - wy * zx);
    const double den = dx * dx + dy * dy;
    const double tx = (nx * dx + ny * dy) / den, ty = (ny * dx - nx * dy) / den;
    B.local(v) = {anchor, 2.0 * std::atanh(std::hypot(tx, ty)), std::atan2(ty, tx)};
  }
}

// ---------------------------------------------------------------- loops

void label_loops(SurfaceMesh& m,
                 const std::function<std::pair<int, LoopRole>(const std::vector<int>&)>& classify) {
  auto cycles = trace_boundary_cycles(m);
  std::vector<std::pair<int, BoundaryLoop>> tagged;
  for (auto& c : cycles) {
    auto [idx, role] = classify(c);
    BoundaryLoop L;
    L.label = "L" + std::to_string(idx);
    L.role = role;
    L.cycle = std::move(c);
    tagged.push_back({idx, std::move(L)});
  }
  std::sort(tagged.begin(), tagged.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  m.loops.clear();
  for (size_t i = 0; i < tagged.size(); ++i) {
    if (tagged[i].first != static_cast<int>(i))
      throw Error(ErrorKind::geometry, "generator produced an unexpected boundary loop set");
    m.loops.push_back(std::move(tagged[i].second));
  }
}

std::vector<double> to_u(const SheetGeom& g, const std::vector<double>& radii, double lo, double hi) {
  std::vector<double> out;
  for (double r : radii) {
    double u = g.u_of(r);
    if (u > lo && u < hi) out.push_back(u);
  }
  return out;
}

std::function<int(double, int)> hyper_desired(const SheetGeom& g, int res, int max_doublings) {
  const double h = kTwoPi / res;
  return [=](double r, int) {
    int n = res;
    for (int k = 0; k < max_doublings; ++k) {
      if (kTwoPi * g.scale(r) / n <= h * std::exp(0.25 * r)) break;
      n *= 2;
    }
    return n;
  };
}

// ---------------------------------------------------------------- scenarios

SurfaceMesh gen_annulus(const AnnulusSpec& s) {
  require(s.r_in > 0, "r_in", "must be positive");
  require(s.r_out > 0, "r_out", "must be positive");
  require(s.r_in < s.r_out, "r_in", "must be smaller than r_out");
  require(s.res >= 8, "res", "must be at least 8");
  require(s.grade_first >= 0, "grade_first", "must be non-negative");
  require(s.grade_ratio >= 1, "grade_ratio", "must be at least 1");
  SheetGeom g{Model::euclid};
  ScheduleRule rule;
  rule.u0 = std::log(s.r_in);
  rule.u1 = std::log(s.r_out);
  rule.n0 = s.res;
  rule.breaks = to_u(g, s.rings_at, rule.u0, rule.u1);
  rule.grade_first = s.grade_first;
  rule.grade_ratio = s.grade_ratio;
  RingPlan plan = plan_rings(g, rule);
  MeshBuilder B;
  build_sheet(B, g, plan, false, {}, piece::sheet, false);
  SurfaceMesh m = B.finish(GeometryTag::flat, ChartKind::polar, 0.0, true);
  const int last = static_cast<int>(plan.u.size()) - 1;
  label_loops(m, [&](const std::vector<int>& c) {
    return std::make_pair(m.attr[c[0]].ring == last ? 1 : 0, LoopRole::true_boundary);
  });
  return m;
}

SurfaceMesh gen_disk(const DiskSpec& s) {
  require(s.radius > 0, "radius", "must be positive");
  require(s.res >= 8, "res", "must be at least 8");
  SheetGeom g{Model::euclid};
  ScheduleRule rule;
  rule.u1 = std::log(s.radius);
  rule.u0 = rule.u1 - std::max(kTwoPi / s.res, std::floor(std::log(s.res / kTwoPi) / (kTwoPi / s.res)) * (kTwoPi / s.res));
  rule.n0 = s.res;
  rule.breaks = to_u(g, s.rings_at, rule.u0, rule.u1);
  RingPlan plan = plan_rings(g, rule);
  MeshBuilder B;
  build_sheet(B, g, plan, true, {}, piece::sheet, false);
  SurfaceMesh m = B.finish(GeometryTag::flat, ChartKind::polar, 0.0, true);
  label_loops(m, [](const std::vector<int>&) { return std::make_pair(0, LoopRole::true_boundary); });
  return m;
}

SurfaceMesh gen_pants(const PantsSpec& s) {
  require(s.outer_radius > 0, "outer_radius", "must be positive");
  require(s.res >= 8, "res", "must be at least 8");
  require(s.hole_centers.size() == 2, "hole_centers", "exactly two holes");
  require(s.hole_radii.size() == 2, "hole_radii", "exactly two radii");
  SheetGeom g{Model::euclid};
  const double du = kTwoPi / s.res;
  ScheduleRule rule;
  rule.u1 = std::log(s.outer_radius);
  rule.u0 = rule.u1 - std::floor(std::log(s.res / kTwoPi) / du) * du;
  rule.n0 = s.res;
  std::vector<double> rc(2), tc(2);
  std::vector<int> jc(2), mm(2);
  for (int h = 0; h < 2; ++h) {
    require(s.hole_radii[h] > 0, "hole_radii", "must be positive");
    rc[h] = std::hypot(s.hole_centers[h][0], s.hole_centers[h][1]);
    tc[h] = std::atan2(s.hole_centers[h][1], s.hole_centers[h][0]);
    if (tc[h] < 0) tc[h] += kTwoPi;
    double jf = tc[h] * s.res / kTwoPi;
    require(std::abs(jf - std::lround(jf)) < 1e-9, "hole_centers", "angle must be a multiple of 2*pi/res");
    jc[h] = static_cast<int>(std::lround(jf)) % s.res;
    const double spacing = rc[h] * du;
    mm[h] = std::max(1, static_cast<int>(std::ceil(1.5 * s.hole_radii[h] / spacing)));
    double ulo = std::log(rc[h]) - (mm[h] + 1) * du, uhi = std::log(rc[h]) + (mm[h] + 1) * du;
    require(ulo > rule.u0 && uhi < rule.u1, "hole_radii", "hole block does not fit between centre and rim");
    rule.breaks.push_back(std::log(rc[h]));
    rule.keepout.push_back({ulo, uhi});
  }
  RingPlan plan = plan_rings(g, rule);
  std::vector<Block> blocks;
  for (int h = 0; h < 2; ++h) {
    int ring = static_cast<int>(std::find(plan.u.begin(), plan.u.end(), std::log(rc[h])) - plan.u.begin());
    blocks.push_back({ring, jc[h], mm[h]});
  }
  if (blocks[0].ring == blocks[1].ring) {
    int d = std::abs(blocks[0].j0 - blocks[1].j0);
    d = std::min(d, s.res - d);
    require(d > blocks[0].m + blocks[1].m, "hole_centers", "hole blocks overlap");
  }
  MeshBuilder B;
  Sheet sh = build_sheet(B, g, plan, true, blocks, piece::sheet, false);
  std::vector<std::vector<int>> inner(2);
  for (int h = 0; h < 2; ++h) {
    auto per = block_perimeter(sh, blocks[h]);
    set_euclid_local(B, per, h, rc[h], tc[h]);
    require(s.hole_radii[h] < 0.8 * rc[h] * du * mm[h], "hole_radii", "hole too large for its block");
    inner[h] = build_patch(B, per, h, s.hole_radii[h], LocalModel::euclid, piece::euclid_patch(h), false, nullptr);
  }
  // Chart positions of patch vertices from their local coordinates.
  SurfaceMesh m = B.finish(GeometryTag::flat, ChartKind::cartesian, 0.0, true);
  for (int v = 0; v < m.num_vertices; ++v) {
    const VertexAttr& a = m.attr[v];
    if (piece::is_euclid_patch(a.piece)) {
      int h = piece::handle_of(a.piece);
      m.xy[v] = {rc[h] * std::cos(tc[h]) + a.r * std::cos(a.theta), rc[h] * std::sin(tc[h]) + a.r * std::sin(a.theta)};
    }
  }
  std::set<int> inner0(inner[0].begin(), inner[0].end()), inner1(inner[1].begin(), inner[1].end());
  label_loops(m, [&](const std::vector<int>& c) {
    int idx = inner0.count(c[0]) ? 1 : inner1.count(c[0]) ? 2 : 0;
    return std::make_pair(idx, LoopRole::true_boundary);
  });
  return m;
}

SurfaceMesh gen_hyperbolic_disk(const HyperbolicDiskSpec& s) {
  require(s.r_max > 0, "r_max", "must be positive");
  require(s.r_core >= 0, "r_core", "must be non-negative");
  require(s.r_core < s.r_max, "r_core", "must be smaller than r_max");
  require(s.res >= 8, "res", "must be at least 8");
  require(s.max_doublings >= 0, "max_doublings", "must be non-negative");
  SheetGeom g{Model::hyper};
  ScheduleRule rule;
  const bool center = s.r_core == 0;
  const double r0 = center ? std::min(kTwoPi / s.res, 0.5 * s.r_max) : s.r_core;
  rule.u0 = g.u_of(r0);
  rule.u1 = g.u_of(s.r_max);
  rule.n0 = s.res;
  rule.n_max = s.res << s.max_doublings;
  rule.breaks = to_u(g, s.rings_at, rule.u0, rule.u1);
  rule.desired = hyper_desired(g, s.res, s.max_doublings);
  RingPlan plan = plan_rings(g, rule);
  MeshBuilder B;
  build_sheet(B, g, plan, center, {}, piece::sheet, false);
  SurfaceMesh m = B.finish(GeometryTag::hyperbolic, ChartKind::hyperbolic_polar, 0.0, true);
  const int last = static_cast<int>(plan.u.size()) - 1;
  label_loops(m, [&](const std::vector<int>& c) {
    bool rim = m.attr[c[0]].ring == last;
    if (center) return std::make_pair(0, LoopRole::truncation);
    return rim ? std::make_pair(1, LoopRole::truncation) : std::make_pair(0, LoopRole::true_boundary);
  });
  return m;
}

SurfaceMesh gen_cylinder(const HyperbolicCylinderSpec& s) {
  require(s.neck_length > 0, "neck_length", "must be positive");
  require(s.t_max > 0, "t_max", "must be positive");
  require(s.res >= 8 && s.res % 2 == 0, "res", "must be even and at least 8");
  SheetGeom g{Model::cylinder, s.neck_length / kTwoPi};
  ScheduleRule rule;
  rule.u0 = 0.0;
  rule.u1 = g.u_of(s.t_max);
  rule.n0 = s.res;
  rule.n_max = s.res << s.max_doublings;
  std::vector<double> pos;
  for (double t : s.rings_at) pos.push_back(std::abs(t));
  rule.breaks = to_u(g, pos, rule.u0, rule.u1);
  rule.desired = hyper_desired(g, s.res, s.max_doublings);
  RingPlan half = plan_rings(g, rule);
  RingPlan plan;
  for (size_t k = half.u.size(); k-- > 1;) {
    plan.u.push_back(-half.u[k]);
    plan.n.push_back(half.n[k]);
  }
  for (size_t k = 0; k < half.u.size(); ++k) {
    plan.u.push_back(half.u[k]);
    plan.n.push_back(half.n[k]);
  }
  MeshBuilder B;
  build_sheet(B, g, plan, false, {}, piece::sheet, false);
  SurfaceMesh m = B.finish(GeometryTag::hyperbolic, ChartKind::cylinder, g.a, true);
  // Angles of the negative half are measured so that (t, theta) -> (-t, -theta)
  // maps vertices to vertices; theta = 2 pi j / n on every ring already does.
  label_loops(m, [&](const std::vector<int>& c) {
    return std::make_pair(m.attr[c[0]].r > 0 ? 1 : 0, LoopRole::truncation);
  });
  return m;
}

SurfaceMesh gen_rectangle(const RectangleSpec& s) {
  require(s.width > 0, "width", "must be positive");
  require(s.height > 0, "height", "must be positive");
  require(s.res >= 1, "res", "must be positive");
  const int nx = s.res;
  const int ny = std::max(1, static_cast<int>(std::lround(s.res * s.height / s.width)));
  MeshBuilder B;
  std::vector<int> id((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      id[j * (nx + 1) + i] = B.add_vertex({s.width * i / nx, s.height * j / ny}, {piece::sheet, j, i, 0.0, 0.0});
  const double hx = s.width / nx, hy = s.height / ny;
  auto len = [&](int a, int b) {
    const VertexAttr& x = B.attr(a);
    const VertexAttr& y = B.attr(b);
    return std::hypot((x.index - y.index) * hx, (x.ring - y.ring) * hy);
  };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int a = id[j * (nx + 1) + i], b = id[j * (nx + 1) + i + 1];
      int c = id[(j + 1) * (nx + 1) + i + 1], d = id[(j + 1) * (nx + 1) + i];
      B.add_tri(a, b, c, false, len);
      B.add_tri(a, c, d, false, len);
    }
  SurfaceMesh m = B.finish(GeometryTag::flat, ChartKind::cartesian, 0.0, true);
  label_loops(m, [](const std::vector<int>&) { return std::make_pair(0, LoopRole::true_boundary); });
  return m;
}

SurfaceMesh gen_glued(const GluedPlaneSpec& s) {
  GluedParams gp = resolve_glued(s);
  const int A = s.handles;
  require(s.res >= 8 && s.res % 4 == 0, "res", "must be a multiple of 4 and at least 8");
  require(s.hyper_res >= 8 && s.hyper_res % A == 0, "hyper_res", "must be a multiple of handles and at least 8");
  require(s.far_res >= 8 && s.far_res <= s.res, "far_res", "must lie in [8, res]");
  require(s.block >= 1, "block", "must be positive");
  require(!s.euclid_log_truncation.empty(), "euclid_log_truncation", "must not be empty");
  require(!s.hyper_truncation.empty(), "hyper_truncation", "must not be empty");
  require(std::is_sorted(s.euclid_log_truncation.begin(), s.euclid_log_truncation.end()),
          "euclid_log_truncation", "must be increasing");
  require(std::is_sorted(s.hyper_truncation.begin(), s.hyper_truncation.end()), "hyper_truncation",
          "must be increasing");
  const double max_center = *std::max_element(gp.centers.begin(), gp.centers.end());
  require(s.euclid_log_truncation.front() > std::log(2.0 * max_center), "euclid_log_truncation",
          "first truncation must enclose the handles");
  require(s.hyper_truncation.front() > s.hyper_hole_radius + 0.5, "hyper_truncation",
          "first truncation must enclose the handles");

  MeshBuilder B;
  const int m = s.block;

  // Euclidean sheet.
  SheetGeom ge{Model::euclid};
  const double du = kTwoPi / s.res;
  ScheduleRule re;
  re.u0 = 0.0;
  re.u1 = s.euclid_log_truncation.back();
  re.n0 = s.res;
  re.n_min = s.far_res;
  re.n_max = s.res;
  for (double lt : s.euclid_log_truncation) re.breaks.push_back(lt);
  const double r_far = 2.0 * max_center + 2.0;
  for (double c : gp.centers) {
    re.breaks.push_back(std::log(c));
    re.keepout.push_back({std::log(c) - (m + 1) * du, std::log(c) + (m + 1) * du});
  }
  re.desired = [&](double r, int) { return r <= r_far ? s.res : s.far_res; };
  RingPlan pe = plan_rings(ge, re);
  std::vector<Block> eblocks;
  for (double c : gp.centers) {
    auto it = std::find(pe.u.begin(), pe.u.end(), std::log(c));
    eblocks.push_back({static_cast<int>(it - pe.u.begin()), 0, m});
  }
  for (size_t a = 1; a < eblocks.size(); ++a)
    require(eblocks[a].ring - eblocks[a - 1].ring > 2 * m, "centers", "handle blocks overlap at this res");
  Sheet se = build_sheet(B, ge, pe, false, eblocks, piece::sheet, false);

  // Hyperbolic sheet, mirrored so the tubes join consistently oriented sheets.
  SheetGeom gh{Model::hyper};
  const double h0 = kTwoPi / s.hyper_res;
  ScheduleRule rh;
  rh.u0 = gh.u_of(h0);
  rh.u1 = gh.u_of(s.hyper_truncation.back());
  rh.n0 = s.hyper_res;
  rh.n_max = s.hyper_res << s.max_doublings;
  for (double t : s.hyper_truncation) rh.breaks.push_back(gh.u_of(t));
  const double uh = gh.u_of(s.hyper_hole_radius);
  rh.breaks.push_back(uh);
  rh.keepout.push_back({uh - (m + 2) * h0, uh + (m + 2) * h0});
  rh.desired = hyper_desired(gh, s.hyper_res, s.max_doublings);
  RingPlan ph = plan_rings(gh, rh);
  const int hring = static_cast<int>(std::find(ph.u.begin(), ph.u.end(), uh) - ph.u.begin());
  const int nh = ph.n[hring];
  std::vector<Block> hblocks;
  for (int a = 0; a < A; ++a) hblocks.push_back({hring, a * nh / A, m});
  Sheet sh = build_sheet(B, gh, ph, true, hblocks, piece::hyper_sheet, true);

  const int M = 8 * m;
  for (int a = 0; a < A; ++a) {
    const double rho = 0.5 * gp.tube_radii[a];
    auto pe_ = block_perimeter(se, eblocks[a]);
    set_euclid_local(B, pe_, 1000 + a, gp.centers[a], 0.0);
    std::vector<double> psi_e, psi_h;
    auto ie = build_patch(B, pe_, 1000 + a, rho, LocalModel::euclid, piece::euclid_patch(a), false, &psi_e);
    auto ph_ = block_perimeter(sh, hblocks[a]);
    const double th = kTwoPi * a / A;
    set_hyper_local(B, ph_, 2000 + a, s.hyper_hole_radius, th);
    auto ih = build_patch(B, ph_, 2000 + a, rho, LocalModel::hyper, piece::hyper_patch(a), true, &psi_h);

    // Flat tube of radius rho and length 2 rho; angles interpolate between
    // the two patch frames.
    const double L = 2.0 * rho;
    const double chord = 2.0 * rho * std::sin(kPi / M);
    const int T = std::max(2, static_cast<int>(std::lround(L / chord)));
    std::vector<std::vector<int>> tr(T + 1);
    std::vector<std::vector<double>> ang(T + 1, std::vector<double>(M));
    tr[0] = ie;
    tr[T] = ih;
    for (int k = 0; k <= T; ++k) {
      double w = static_cast<double>(k) / T;
      for (int j = 0; j < M; ++j) ang[k][j] = (1 - w) * psi_e[j] + w * (psi_h[0] + (psi_e[j] - psi_e[0]));
      if (k == 0 || k == T) continue;
      tr[k].resize(M);
      for (int j = 0; j < M; ++j)
        tr[k][j] = B.add_vertex({0.0, 0.0}, {piece::tube(a), k, j, L * w, ang[k][j]});
    }
    std::unordered_map<int, std::pair<double, double>> pos;  // vertex -> (z, angle)
    for (int k = 0; k <= T; ++k)
      for (int j = 0; j < M; ++j) pos[tr[k][j]] = {L * k / T, ang[k][j]};
    auto len = [&](int x, int y) {
      auto [z1, a1] = pos.at(x);
      auto [z2, a2] = pos.at(y);
      double s2 = std::sin(0.5 * (a1 - a2));
      return std::sqrt((z1 - z2) * (z1 - z2) + 4.0 * rho * rho * s2 * s2);
    };
    for (int k = 0; k < T; ++k)
      for (int j = 0; j < M; ++j) {
        int j1 = (j + 1) % M;
        B.add_tri(tr[k][j], tr[k][j1], tr[k + 1][j1], false, len);
        B.add_tri(tr[k][j], tr[k + 1][j1], tr[k + 1][j], false, len);
      }
  }

  SurfaceMesh out = B.finish(GeometryTag::glued, ChartKind::none, 0.0, false);
  const int elast = static_cast<int>(pe.u.size()) - 1;
  label_loops(out, [&](const std::vector<int>& c) {
    const VertexAttr& a = out.attr[c[0]];
    if (a.piece == piece::hyper_sheet) return std::make_pair(2, LoopRole::truncation);
    if (a.ring == elast) return std::make_pair(1, LoopRole::truncation);
    return std::make_pair(0, LoopRole::true_boundary);
  });
  return out;
}

}  // namespace

double euclid_polar_distance(double r1, double t1, double r2, double t2) {
  const double s = std::sin(0.5 * wrap_angle(t1 - t2));
  const double dr = r1 - r2;
  return std::sqrt(dr * dr + 4.0 * r1 * r2 * s * s);
}

double hyperbolic_polar_distance(double r1, double t1, double r2, double t2) {
  const double s = std::sin(0.5 * wrap_angle(t1 - t2));
  const double h = std::sinh(0.5 * (r1 - r2));
  return 2.0 * std::asinh(std::sqrt(h * h + std::sinh(r1) * std::sinh(r2) * s * s));
}

double cylinder_distance(double a, double t1, double th1, double t2, double th2) {
  const double s = std::sinh(0.5 * a * wrap_angle(th1 - th2));
  const double h = std::sinh(0.5 * (t1 - t2));
  return 2.0 * std::asinh(std::sqrt(h * h + std::cosh(t1) * std::cosh(t2) * s * s));
}

double log_tanh_half(double r) {
  if (r < 1.0) return std::log(std::tanh(0.5 * r));
  const double e = std::exp(-r);
  return std::log1p(-e) - std::log1p(e);
}

double inv_log_tanh_half(double s) {
  const double rho = std::exp(s);
  return std::log((1.0 + rho) / (-std::expm1(s)));
}

GluedParams resolve_glued(const GluedPlaneSpec& s) {
  require(s.handles >= 1, "handles", "must be positive");
  GluedParams p;
  const int A = s.handles;
  p.weights = s.weights;
  if (p.weights.empty())
    for (int a = 1; a <= A; ++a) p.weights.push_back(1.0 / (double(a) * a));
  require(static_cast<int>(p.weights.size()) == A, "weights", "need one weight per handle");
  for (double c : p.weights) require(c > 0, "weights", "must be positive");
  p.centers = s.centers;
  if (p.centers.empty())
    for (int a = 1; a <= A; ++a) p.centers.push_back(a + 1.0);
  require(static_cast<int>(p.centers.size()) == A, "centers", "need one centre per handle");
  for (size_t a = 0; a < p.centers.size(); ++a) {
    require(p.centers[a] > 1.0, "centers", "handles must lie outside the unit core");
    if (a > 0) require(p.centers[a] > p.centers[a - 1], "centers", "must be increasing");
  }
  p.C = 1.0;
  for (int a = 0; a < A; ++a) p.C += p.weights[a] * std::log(1.0 + std::abs(p.centers[a]));
  for (int a = 0; a < A; ++a) p.tube_bound.push_back(std::exp(-p.C / p.weights[a]));
  p.tube_radii = s.tube_radii.empty() ? p.tube_bound : s.tube_radii;
  require(static_cast<int>(p.tube_radii.size()) == A, "tube_radii", "need one radius per handle");
  for (int a = 0; a < A; ++a) {
    const std::string f = "tube_radii[" + std::to_string(a) + "]";
    if (!(p.tube_radii[a] > 0)) throw ParameterError(f, "must be positive");
    if (p.tube_radii[a] > p.tube_bound[a])
      throw ParameterError(f, "violates delta_a <= exp(-C/c_a) = " + std::to_string(p.tube_bound[a]));
    if (p.centers[a] - p.tube_radii[a] <= 1.0) throw ParameterError(f, "handle ball meets the unit core");
  }
  return p;
}

std::string scenario_name(const ScenarioSpec& s) {
  switch (s.index()) {
    case 0: return "annulus";
    case 1: return "disk";
    case 2: return "pair_of_pants";
    case 3: return "hyperbolic_disk";
    case 4: return "hyperbolic_cylinder";
    case 5: return "glued_plane";
    case 6: return "rectangle";
  }
  return "unknown";
}

int documented_euler_characteristic(const ScenarioSpec& s) {
  switch (s.index()) {
    case 0: return 0;
    case 1: return 1;
    case 2: return -1;
    case 3: return std::get<HyperbolicDiskSpec>(s).r_core > 0 ? 0 : 1;
    case 4: return 0;
    case 5: return 1 - 2 * std::get<GluedPlaneSpec>(s).handles;
    case 6: return 1;
  }
  return 0;
}

SurfaceMesh generate(const ScenarioSpec& s) {
  return std::visit(
      [](const auto& spec) -> SurfaceMesh {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, AnnulusSpec>) return gen_annulus(spec);
        else if constexpr (std::is_same_v<T, DiskSpec>) return gen_disk(spec);
        else if constexpr (std::is_same_v<T, PantsSpec>) return gen_pants(spec);
        else if constexpr (std::is_same_v<T, HyperbolicDiskSpec>) return gen_hyperbolic_disk(spec);
        else if constexpr (std::is_same_v<T, HyperbolicCylinderSpec>) return gen_cylinder(spec);
        else if constexpr (std::is_same_v<T, GluedPlaneSpec>) return gen_glued(spec);
        else return gen_rectangle(spec);
      },
      s);
}

}  // namespace harmlab
