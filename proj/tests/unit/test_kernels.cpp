#include <doctest.h>

#include <omp.h>

#include <cstring>
#include <random>

#include "netclust/graphgen.hpp"
#include "netclust/kernels.hpp"
#include "support/oracles.hpp"

using namespace netclust;
namespace k = netclust::kernels;

namespace {

bool same_bits(const k::RowMatrix& a, const k::RowMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

k::RowMatrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  k::RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference bit for bit") {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  const Graph g = gen_rgg(600, 6.0, 11).graph;

  for (std::size_t s : {0u, 1u, 2u, 4u}) CHECK(k::neighborhood_sizes(g, s) == k::serial::neighborhood_sizes(g, s));

  const k::RowMatrix c = gaussian(600, 2, 5);
  for (std::size_t b : {0u, 1u, 3u}) CHECK(same_bits(k::neighborhood_row_sums(g, c, b), k::serial::neighborhood_row_sums(g, c, b)));

  const k::RowMatrix dev = gaussian(10, 2, 6);
  const Eigen::MatrixXd middle = Eigen::MatrixXd(dev.transpose() * dev / 10.0).inverse();
  CHECK(same_bits(k::sign_flip_statistics(dev, middle), k::serial::sign_flip_statistics(dev, middle)));

  const k::RowMatrix pts = gaussian(2000, 3, 7);
  const k::RowMatrix cen = gaussian(9, 3, 8);
  std::vector<std::uint32_t> l1(2000, 0), l2(2000, 0);
  std::vector<double> d1(2000), d2(2000);
  CHECK(k::assign_nearest(pts, cen, l1, d1) == k::serial::assign_nearest(pts, cen, l2, d2));
  CHECK(l1 == l2);
  CHECK(same_bits(d1, d2));
  omp_set_num_threads(saved);
}

TEST_CASE("neighborhood sizes agree with Floyd-Warshall") {
  const Graph g = oracle::random_graph(35, 0.07, 2);
  const auto fw = oracle::floyd_distances(g);
  for (int s = 0; s <= 4; ++s) {
    const auto sizes = k::serial::neighborhood_sizes(g, static_cast<std::size_t>(s));
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
      std::size_t count = 0;
      for (std::size_t j = 0; j < g.num_nodes(); ++j) count += fw[i][j] <= s;
      CHECK(sizes[i] == count);
    }
  }
}

TEST_CASE("sign flip statistic of the identity and the full flip coincide") {
  const k::RowMatrix dev = gaussian(6, 1, 3);
  const Eigen::MatrixXd middle = Eigen::MatrixXd(dev.transpose() * dev / 6.0).inverse();
  const auto stats = k::serial::sign_flip_statistics(dev, middle);
  REQUIRE(stats.size() == 64);
  CHECK(stats[0] == doctest::Approx(stats[63]));
}

TEST_CASE("thread count resolution") {
  CHECK(k::resolve_threads(3) >= 1);
  CHECK(k::resolve_threads(0) >= 1);
}
