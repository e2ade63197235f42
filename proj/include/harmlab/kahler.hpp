#pragma once

#include <string>
#include <vector>

#include "harmlab/dec.hpp"
#include "harmlab/mesh.hpp"

namespace harmlab {

struct DefiningFunctionSet {
  std::vector<VertexFunction> f;          // one per boundary loop
  std::vector<std::vector<int>> collar;   // U_i: vertices where f[i] is defined
  double delta = 1.0;
};

// psi(t) = t on t <= d/4; with u = (t - d/4)/(d/4), the Hermite cubic through
// (d/4, slope 1) and (d/2, 3d/8, slope 0) on [d/4, d/2]:
// psi = d/4 (1 + u - u^2/2), cubic coefficient 0; psi = 3d/8 beyond d/2.
struct SmoothingCoefficients {
  double c0 = 1.0, c1 = 1.0, c2 = -0.5, c3 = 0.0;  // psi = (d/4) sum c_k u^k
};
double smoothing_psi(double t, double delta);
double smoothing_psi_slope(double t, double delta);

// psi(inf{delta, f_1, ..., f_l}); f_i counts as +inf outside U_i.
// Overlapping collars: domain error.
VertexFunction smooth_defining_function(const DefiningFunctionSet& set, double delta);

struct PotentialChoice {
  enum class Kind { power, log, constant };
  Kind kind = Kind::power;
  double alpha = 1.0;
  double value(double t) const;   // -t^-alpha/alpha, log t, or 0
  double slope(double t) const;
  double second(double t) const;
};

// omega = omega0 + dJd phi(f) as conformal factor lambda = 1 + (L phi(f))(v) / A(v)
// at vertices where f > 0 on the whole closed star and v is interior;
// remaining vertices take the largest value of an evaluated neighbour,
// propagated breadth-first. Triangles take the mean of their corners; edges
// scale by sqrt of the mean over adjacent triangles.
struct ConformalMetric {
  std::vector<double> vertex_lambda;
  std::vector<char> evaluated;
  std::vector<double> triangle_lambda;
  VertexFunction f;
  SurfaceMesh mesh;  // geometry_tag conformal, rescaled lengths
  double lambda_min = 0.0;
};

// Throws Error(positivity) naming the first triangle with lambda <= 0.
ConformalMetric potential_metric(const SurfaceMesh& m, const VertexFunction& f, const PotentialChoice& choice);

// (2 sqrt(1 + alpha) / alpha) (s^(-alpha/2) - S^(-alpha/2))
double completeness_bound(double s, double S, double alpha);

struct CompletenessReport {
  double length = 0.0;
  double bound = 0.0;
  bool pass = false;  // length >= 0.95 bound
};

// Path from {f = S} to {f = s}; f must decrease strictly along it.
CompletenessReport completeness_check(const ConformalMetric& g, const std::vector<int>& path, double s, double S,
                                      double alpha);

struct PluriharmonicResidual {
  double flux = 0.0;         // max over interior vertices of |dJdh|
  double circulation = 0.0;  // max over triangles of |sum of dh|
};
PluriharmonicResidual pluriharmonic_residual(const LaplaceOperator& L, const VertexFunction& h);

// Convention: L = -Delta, so superharmonic (Delta f <= 0) means L f >= 0.
// Reports min over the interior vertices of `collar` of (L f)(v) / A(v).
struct SuperharmonicReport {
  double min_value = 0.0;
  int witness = -1;
  bool pass = false;  // min_value >= -tolerance
  double tolerance = 1e-6;
  std::string convention = "L = -Delta; reported value (Lf)/A = -Delta f; superharmonic iff >= 0";
};
SuperharmonicReport superharmonicity_check(const LaplaceOperator& L, const VertexFunction& f,
                                           const std::vector<int>& collar, double tolerance = 1e-6);

}  // namespace harmlab
