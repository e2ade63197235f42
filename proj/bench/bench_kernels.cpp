#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "harmlab/dec.hpp"
#include "harmlab/generate.hpp"
#include "harmlab/kernels.hpp"

using namespace harmlab;

namespace {

struct Fixture {
  SurfaceMesh m;
  LaplaceOperator L;
  std::vector<double> x, y;
  std::vector<int> ea, eb;
  CsrMatrix A;  // L + I, neighbours and diagonal in column order
  explicit Fixture(int res) {
    AnnulusSpec s;
    s.res = res;
    m = generate(s);
    L = laplace_operator(m);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    x.resize(m.num_vertices);
    for (double& v : x) v = u(rng);
    y.resize(m.num_vertices);
    for (const Edge& e : m.edges) {
      ea.push_back(e[0]);
      eb.push_back(e[1]);
    }
    A.n = m.num_vertices;
    A.row.push_back(0);
    for (int v = 0; v < m.num_vertices; ++v) {
      bool diag = false;
      for (int k = m.adj_offset[v]; k <= m.adj_offset[v + 1]; ++k) {
        const bool end = k == m.adj_offset[v + 1];
        if (!diag && (end || m.adj_vertex[k] > v)) {
          A.col.push_back(v);
          A.val.push_back(L.diag[v] + 1.0);
          diag = true;
        }
        if (end) break;
        A.col.push_back(m.adj_vertex[k]);
        A.val.push_back(-L.weight[m.adj_edge[k]]);
      }
      A.row.push_back(static_cast<int>(A.col.size()));
    }
  }
};

Fixture& fixture(int res) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(res);
  if (it == cache.end()) it = cache.emplace(res, Fixture(res)).first;
  return it->second;
}

void BM_spmv_serial(benchmark::State& st) {
  Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    kernels::spmv_serial(f.A, f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(f.A.val.size()));
}

void BM_spmv_omp(benchmark::State& st) {
  Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    kernels::spmv_omp(f.A, f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<int64_t>(f.A.val.size()));
}

void BM_laplacian_serial(benchmark::State& st) {
  Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    kernels::laplacian_serial(f.m.adj_offset, f.m.adj_vertex, f.m.adj_edge, f.L.weight, f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
  st.SetItemsProcessed(st.iterations() * f.m.num_edges());
}

void BM_laplacian_omp(benchmark::State& st) {
  Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    kernels::laplacian_omp(f.m.adj_offset, f.m.adj_vertex, f.m.adj_edge, f.L.weight, f.x, f.y);
    benchmark::DoNotOptimize(f.y.data());
  }
  st.SetItemsProcessed(st.iterations() * f.m.num_edges());
}

void BM_energy_serial(benchmark::State& st) {
  Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::energy_serial(f.ea, f.eb, f.L.weight, f.x));
  st.SetItemsProcessed(st.iterations() * f.m.num_edges());
}

void BM_energy_omp(benchmark::State& st) {
  Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::energy_omp(f.ea, f.eb, f.L.weight, f.x));
  st.SetItemsProcessed(st.iterations() * f.m.num_edges());
}

void BM_dot_serial(benchmark::State& st) {
  Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::dot_serial(f.x, f.x));
  st.SetItemsProcessed(st.iterations() * f.m.num_vertices);
}

void BM_dot_omp(benchmark::State& st) {
  Fixture& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::dot_omp(f.x, f.x));
  st.SetItemsProcessed(st.iterations() * f.m.num_vertices);
}

}  // namespace

BENCHMARK(BM_spmv_serial)->Arg(128)->Arg(512);
BENCHMARK(BM_spmv_omp)->Arg(128)->Arg(512);
BENCHMARK(BM_laplacian_serial)->Arg(128)->Arg(512);
BENCHMARK(BM_laplacian_omp)->Arg(128)->Arg(512);
BENCHMARK(BM_energy_serial)->Arg(128)->Arg(512);
BENCHMARK(BM_energy_omp)->Arg(128)->Arg(512);
BENCHMARK(BM_dot_serial)->Arg(128)->Arg(512);
BENCHMARK(BM_dot_omp)->Arg(128)->Arg(512);

BENCHMARK_MAIN();
