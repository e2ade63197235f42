#include "harmlab/kernels.hpp"

#include <algorithm>

namespace harmlab::kernels {

namespace {

int num_blocks(int n) { return (n + kBlock - 1) / kBlock; }

template <class F>
double blocked_sum_serial(int n, F term) {
  const int nb = num_blocks(n);
  double total = 0.0;
  for (int b = 0; b < nb; ++b) {
    const int lo = b * kBlock, hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (int i = lo; i < hi; ++i) s += term(i);
    total += s;
  }
  return total;
}

template <class F>
double blocked_sum_omp(int n, F term) {
  const int nb = num_blocks(n);
  std::vector<double> part(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < nb; ++b) {
    const int lo = b * kBlock, hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (int i = lo; i < hi; ++i) s += term(i);
    part[b] = s;
  }
  double total = 0.0;
  for (int b = 0; b < nb; ++b) total += part[b];
  return total;
}

inline double row_product(const CsrMatrix& A, const std::vector<double>& x, int i) {
  double s = 0.0;
  for (int k = A.row[i]; k < A.row[i + 1]; ++k) s += A.val[k] * x[A.col[k]];
  return s;
}

inline double lap_row(const std::vector<int>& offset, const std::vector<int>& nbr,
                      const std::vector<int>& edge, const std::vector<double>& w,
                      const std::vector<double>& x, int v) {
  double s = 0.0;
  for (int k = offset[v]; k < offset[v + 1]; ++k) s += w[edge[k]] * (x[v] - x[nbr[k]]);
  return s;
}

}  // namespace

void spmv_serial(const CsrMatrix& A, const std::vector<double>& x, std::vector<double>& y) {
  y.resize(A.n);
  for (int i = 0; i < A.n; ++i) y[i] = row_product(A, x, i);
}

void spmv_omp(const CsrMatrix& A, const std::vector<double>& x, std::vector<double>& y) {
  y.resize(A.n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < A.n; ++i) y[i] = row_product(A, x, i);
}

double dot_serial(const std::vector<double>& a, const std::vector<double>& b) {
  return blocked_sum_serial(static_cast<int>(a.size()), [&](int i) { return a[i] * b[i]; });
}

double dot_omp(const std::vector<double>& a, const std::vector<double>& b) {
  return blocked_sum_omp(static_cast<int>(a.size()), [&](int i) { return a[i] * b[i]; });
}

void axpy_serial(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_omp(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void laplacian_serial(const std::vector<int>& offset, const std::vector<int>& nbr,
                      const std::vector<int>& edge, const std::vector<double>& w,
                      const std::vector<double>& x, std::vector<double>& y) {
  const int n = static_cast<int>(offset.size()) - 1;
  y.resize(n);
  for (int v = 0; v < n; ++v) y[v] = lap_row(offset, nbr, edge, w, x, v);
}

void laplacian_omp(const std::vector<int>& offset, const std::vector<int>& nbr,
                   const std::vector<int>& edge, const std::vector<double>& w,
                   const std::vector<double>& x, std::vector<double>& y) {
  const int n = static_cast<int>(offset.size()) - 1;
  y.resize(n);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < n; ++v) y[v] = lap_row(offset, nbr, edge, w, x, v);
}

double energy_serial(const std::vector<int>& ea, const std::vector<int>& eb,
                     const std::vector<double>& w, const std::vector<double>& x) {
  return blocked_sum_serial(static_cast<int>(w.size()), [&](int e) {
    const double d = x[ea[e]] - x[eb[e]];
    return w[e] * (d * d);
  });
}

double energy_omp(const std::vector<int>& ea, const std::vector<int>& eb,
                  const std::vector<double>& w, const std::vector<double>& x) {
  return blocked_sum_omp(static_cast<int>(w.size()), [&](int e) {
    const double d = x[ea[e]] - x[eb[e]];
    return w[e] * (d * d);
  });
}

}  // namespace harmlab::kernels
