#pragma once

#include <vector>

namespace harmlab {

// Symmetric sparse matrix in CSR form, columns ascending within a row.
struct CsrMatrix {
  int n = 0;
  std::vector<int> row;
  std::vector<int> col;
  std::vector<double> val;
};

// Kernels exist in a serial reference form and an OpenMP form. Reductions are
// blocked with a fixed block size and combined in block order, so both forms
// return bitwise identical results for any thread count.
namespace kernels {

constexpr int kBlock = 4096;

void spmv_serial(const CsrMatrix& A, const std::vector<double>& x, std::vector<double>& y);
void spmv_omp(const CsrMatrix& A, const std::vector<double>& x, std::vector<double>& y);

double dot_serial(const std::vector<double>& a, const std::vector<double>& b);
double dot_omp(const std::vector<double>& a, const std::vector<double>& b);

// y += alpha * x
void axpy_serial(double alpha, const std::vector<double>& x, std::vector<double>& y);
void axpy_omp(double alpha, const std::vector<double>& x, std::vector<double>& y);

// Edge-form Laplacian product over CSR adjacency:
// y[v] = sum_j w[adj_edge] * (x[v] - x[j]), neighbours in ascending order.
void laplacian_serial(const std::vector<int>& offset, const std::vector<int>& nbr,
                      const std::vector<int>& edge, const std::vector<double>& w,
                      const std::vector<double>& x, std::vector<double>& y);
void laplacian_omp(const std::vector<int>& offset, const std::vector<int>& nbr,
                   const std::vector<int>& edge, const std::vector<double>& w,
                   const std::vector<double>& x, std::vector<double>& y);

// sum_e w[e] * (x[a_e] - x[b_e])^2, blocked over edges.
double energy_serial(const std::vector<int>& ea, const std::vector<int>& eb,
                     const std::vector<double>& w, const std::vector<double>& x);
double energy_omp(const std::vector<int>& ea, const std::vector<int>& eb,
                  const std::vector<double>& w, const std::vector<double>& x);

}  // namespace kernels
}  // namespace harmlab
