#pragma once

#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "harmlab/mesh.hpp"

namespace harmlab {

// Boundary loops are labelled in the order documented on each scenario struct.
// `rings_at` lists extra radii (model radius: Euclidean r, geodesic r, or t)
// at which a full vertex ring is forced.

// L0 inner (r_in), L1 outer (r_out); both true-boundary. res = angular count.
// Optional geometric grading of the first ring steps in log r.
struct AnnulusSpec {
  double r_in = 1.0;
  double r_out = 4.0;
  int res = 32;
  std::vector<double> rings_at;
  double grade_first = 0.0;  // first step in log r; 0 disables grading
  double grade_ratio = 1.1;
};

// L0 rim, true-boundary. res = angular count.
struct DiskSpec {
  double radius = 4.0;
  int res = 32;
  std::vector<double> rings_at;
};

// L0 outer rim, L1 and L2 the holes in listed order; all true-boundary.
// Hole centers must sit at angles that are multiples of 2*pi/res.
struct PantsSpec {
  double outer_radius = 4.0;
  std::vector<Vec2> hole_centers{{-2.0, 0.0}, {2.0, 0.0}};
  std::vector<double> hole_radii{0.5, 0.5};
  int res = 32;
};

// Geodesic polar grid. r_core == 0: disk with L0 = rim (truncation).
// r_core > 0: annulus with L0 = core circle (true-boundary), L1 = rim
// (truncation). res sets the target spacing 2*pi/res; the angular count
// doubles outward while the ring spacing exceeds the target, at most
// max_doublings times.
struct HyperbolicDiskSpec {
  double r_max = 3.0;
  int res = 32;
  double r_core = 0.0;
  std::vector<double> rings_at;
  int max_doublings = 6;
};

// Funnel cylinder dt^2 + (l/2pi)^2 cosh^2 t dtheta^2 for |t| <= t_max with the
// closed geodesic of length l at t = 0. L0 at t = -t_max, L1 at t = +t_max,
// both truncation. The grid is symmetric under (t, theta) -> (-t, -theta).
struct HyperbolicCylinderSpec {
  double neck_length = 2.0 * std::numbers::pi;
  int res = 32;
  double t_max = 1.0;
  std::vector<double> rings_at;
  int max_doublings = 6;
};

// Euclidean plane (core unit disk removed) joined to a hyperbolic plane by A
// thin flat tubes. Euclidean handle a sits at (centers[a], 0); hyperbolic
// handle a at geodesic radius hyper_hole_radius, angle 2*pi*a/A. Default
// weights c_a = a^-2, default tube radii delta_a = exp(-C/c_a).
// L0 core circle (true-boundary), L1 Euclidean truncation, L2 hyperbolic
// truncation (both truncation) at the largest listed radii.
struct GluedPlaneSpec {
  int handles = 4;
  std::vector<double> weights;
  std::vector<double> tube_radii;
  std::vector<double> centers;
  std::vector<double> euclid_log_truncation{4.0, 16.0, 64.0, 256.0};
  std::vector<double> hyper_truncation{2.0, 4.0, 8.0, 16.0};
  int res = 128;       // Euclidean angular count near the handles
  int far_res = 16;    // Euclidean angular count far out
  int hyper_res = 32;  // hyperbolic base angular count
  int block = 2;       // handle block half-width in grid cells
  double hyper_hole_radius = 1.0;
  int max_doublings = 6;
};

// L0 outer boundary, true-boundary. res = cells along the width.
struct RectangleSpec {
  double width = 1.0;
  double height = 1.0;
  int res = 16;
};

using ScenarioSpec = std::variant<AnnulusSpec, DiskSpec, PantsSpec, HyperbolicDiskSpec,
                                  HyperbolicCylinderSpec, GluedPlaneSpec, RectangleSpec>;

std::string scenario_name(const ScenarioSpec& s);
int documented_euler_characteristic(const ScenarioSpec& s);

SurfaceMesh generate(const ScenarioSpec& s);

// Piece ids written into VertexAttr::piece.
namespace piece {
constexpr int sheet = 0;
constexpr int hyper_sheet = 1;
inline int euclid_patch(int a) { return 100 + a; }
inline int hyper_patch(int a) { return 200 + a; }
inline int tube(int a) { return 300 + a; }
inline bool is_euclid_patch(int p) { return p >= 100 && p < 200; }
inline bool is_hyper_patch(int p) { return p >= 200 && p < 300; }
inline bool is_tube(int p) { return p >= 300 && p < 400; }
inline int handle_of(int p) { return p % 100; }
}  // namespace piece

// Resolved glued-plane parameters (defaults filled in, 0-based handle index).
struct GluedParams {
  std::vector<double> weights;
  std::vector<double> centers;
  std::vector<double> tube_radii;
  double C = 0.0;           // 1 + sum c_a log(1 + |x_a|)
  std::vector<double> tube_bound;  // exp(-C / c_a)
};
GluedParams resolve_glued(const GluedPlaneSpec& s);

// Stable distance formulas in polar form.
double euclid_polar_distance(double r1, double t1, double r2, double t2);
double hyperbolic_polar_distance(double r1, double t1, double r2, double t2);
double cylinder_distance(double a, double t1, double th1, double t2, double th2);

// Log tanh(r/2) and its inverse without cancellation for large r.
double log_tanh_half(double r);
double inv_log_tanh_half(double s);

}  // namespace harmlab
