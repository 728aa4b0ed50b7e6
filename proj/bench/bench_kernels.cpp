// Serial reference vs OpenMP kernels. Thread count comes from
// NETCLUST_THREADS or the OpenMP default.
#include <benchmark/benchmark.h>
#include <omp.h>

#include <map>
#include <random>

#include "netclust/graphgen.hpp"
#include "netclust/kernels.hpp"

using namespace netclust;
using kernels::RowMatrix;

namespace {

const Graph& rgg(std::size_t n) {
  static std::map<std::size_t, Graph> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gen_rgg(n, 5.0, 11).graph).first;
  return it->second;
}

RowMatrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

void set_threads() { omp_set_num_threads(kernels::resolve_threads(0)); }

template <bool Parallel>
void BM_NeighborhoodSizes(benchmark::State& st) {
  set_threads();
  const Graph& g = rgg(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    auto r = Parallel ? kernels::neighborhood_sizes(g, 3) : kernels::serial::neighborhood_sizes(g, 3);
    benchmark::DoNotOptimize(r.data());
  }
}

template <bool Parallel>
void BM_NeighborhoodRowSums(benchmark::State& st) {
  set_threads();
  const Graph& g = rgg(static_cast<std::size_t>(st.range(0)));
  const RowMatrix x = gaussian(static_cast<Eigen::Index>(g.num_nodes()), 2, 1);
  for (auto _ : st) {
    auto r = Parallel ? kernels::neighborhood_row_sums(g, x, 3) : kernels::serial::neighborhood_row_sums(g, x, 3);
    benchmark::DoNotOptimize(r.data());
  }
}

template <bool Parallel>
void BM_SignFlip(benchmark::State& st) {
  set_threads();
  const RowMatrix dev = gaussian(st.range(0), 2, 2);
  const Eigen::MatrixXd inv = Eigen::Matrix2d::Identity();
  for (auto _ : st) {
    auto r = Parallel ? kernels::sign_flip_statistics(dev, inv) : kernels::serial::sign_flip_statistics(dev, inv);
    benchmark::DoNotOptimize(r.data());
  }
  st.SetItemsProcessed(st.iterations() * (int64_t{1} << st.range(0)));
}

template <bool Parallel>
void BM_AssignNearest(benchmark::State& st) {
  set_threads();
  const RowMatrix pts = gaussian(st.range(0), 8, 3);
  const RowMatrix cen = gaussian(16, 8, 4);
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(st.range(0)));
  std::vector<double> dist(labels.size());
  for (auto _ : st) {
    const auto changed = Parallel ? kernels::assign_nearest(pts, cen, labels, dist)
                                  : kernels::serial::assign_nearest(pts, cen, labels, dist);
    benchmark::DoNotOptimize(changed);
  }
}

}  // namespace

BENCHMARK(BM_NeighborhoodSizes<false>)->Name("neighborhood_sizes/serial")->Arg(2000)->Arg(10000);
BENCHMARK(BM_NeighborhoodSizes<true>)->Name("neighborhood_sizes/omp")->Arg(2000)->Arg(10000);
BENCHMARK(BM_NeighborhoodRowSums<false>)->Name("neighborhood_row_sums/serial")->Arg(2000)->Arg(10000);
BENCHMARK(BM_NeighborhoodRowSums<true>)->Name("neighborhood_row_sums/omp")->Arg(2000)->Arg(10000);
BENCHMARK(BM_SignFlip<false>)->Name("sign_flip/serial")->Arg(12)->Arg(16);
BENCHMARK(BM_SignFlip<true>)->Name("sign_flip/omp")->Arg(12)->Arg(16);
BENCHMARK(BM_AssignNearest<false>)->Name("assign_nearest/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_AssignNearest<true>)->Name("assign_nearest/omp")->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
