#include <doctest.h>

#include <algorithm>
#include <set>

#include "netclust/diagnostics.hpp"
#include "netclust/error.hpp"
#include "netclust/graphgen.hpp"
#include "support/oracles.hpp"

using namespace netclust;

namespace {

SpectrumReport fake_spectrum(std::vector<double> ev) {
  SpectrumReport r;
  r.eigenvalues = Eigen::Map<Eigen::VectorXd>(ev.data(), static_cast<Eigen::Index>(ev.size()));
  r.n = ev.size();
  return r;
}

Graph complete(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> p;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) p.emplace_back(i, j);
  return Graph::from_pairs(n, p);
}

// Disjoint union with ids laid out block by block.
Graph blocks(const std::vector<Graph>& parts) {
  std::vector<WeightedEdge> e;
  std::size_t base = 0;
  for (const auto& g : parts) {
    for (auto x : g.edges()) e.push_back({static_cast<NodeId>(x.u + base), static_cast<NodeId>(x.v + base), x.w});
    base += g.num_nodes();
  }
  return Graph(base, e);
}

}  // namespace

TEST_CASE("choose_num_clusters") {
  CHECK(choose_num_clusters(fake_spectrum({0.0, 0.01, 0.3, 0.5})) == 2);
  CHECK(choose_num_clusters(fake_spectrum({0.0, 0.2, 0.3})) == 1);
  CHECK(choose_num_clusters(fake_spectrum({0.0, 0.01, 0.02, 0.03}), 0.05, 2) == 2);
  CHECK_THROWS_AS(choose_num_clusters(fake_spectrum({0.0}), 0.0), InputError);
  const auto rep = fake_spectrum({0.0, 0.01, 0.04, 0.06, 0.09, 0.2, 0.4});
  std::size_t prev = 0;
  for (double t = 0.005; t < 1.0; t += 0.01) {
    const std::size_t L = choose_num_clusters(rep, t);
    CHECK(L >= prev);
    prev = L;
  }
}

TEST_CASE("quality report warnings") {
  const Graph tt = oracle::planted_components({3, 3}, 1.0, 0);
  const auto cc = connected_components(tt);
  const auto comp = quality_report(tt, Partition(cc.labels));
  CHECK(comp.max_conductance == 0.0);
  CHECK_FALSE(comp.has(Warning::kHighConductance));
  CHECK(comp.has(Warning::kTooFewClusters));

  const auto single = quality_report(complete(5), Partition({0, 0, 0, 0, 0}));
  CHECK(single.has(Warning::kTooFewClusters));
  CHECK(single.has(Warning::kUnbalanced));

  const auto k10 = quality_report(complete(10), Partition({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}));
  CHECK(k10.has(Warning::kHighConductance));
  CHECK(k10.max_conductance == doctest::Approx(5.0 / 9.0));
  CHECK(to_string(Warning::kHighConductance) == "HIGH_CONDUCTANCE");
}

TEST_CASE("quality report agrees with max_conductance") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = oracle::random_connected_graph(40, 0.08, seed);
    std::vector<std::uint32_t> labels(40);
    for (NodeId i = 0; i < 40; ++i) labels[i] = (i * 7 + static_cast<NodeId>(seed)) % 6;
    const Partition p = Partition::canonical(labels);
    const auto q = quality_report(g, p);
    CHECK(q.max_conductance == max_conductance(g, p));
    std::size_t total = 0;
    for (const auto& c : q.clusters) total += c.size;
    CHECK(total == 40);
  }
}

TEST_CASE("pipeline: giant clusters, components, discards") {
  // components of sizes 500, 30 and 5
  const Graph g = blocks({oracle::random_connected_graph(500, 0.02, 1), oracle::random_connected_graph(30, 0.2, 2),
                          oracle::random_connected_graph(5, 0.5, 3)});
  PipelineOptions opt;
  opt.L_giant = 2;
  opt.min_size = 20;
  const auto res = cluster_pipeline(g, opt);
  CHECK(res.partition.num_clusters() == 4);
  CHECK(res.diagnostics.retained == 3);
  CHECK(std::count(res.discarded.begin(), res.discarded.end(), true) == 1);
  CHECK(res.giant_size == 500);
  std::set<std::uint32_t> small, mid;
  for (NodeId i = 500; i < 530; ++i) mid.insert(res.partition.label(i));
  for (NodeId i = 530; i < 535; ++i) small.insert(res.partition.label(i));
  CHECK(mid.size() == 1);
  CHECK(small.size() == 1);
  CHECK(res.discarded[*small.begin()]);
  CHECK_FALSE(res.discarded[*mid.begin()]);
  const auto retained = res.retained_clusters();
  CHECK(retained.size() == 3);

  PipelineOptions one;
  one.L_giant = 1;
  const auto trivial = cluster_pipeline(oracle::random_connected_graph(60, 0.1, 4), one);
  CHECK(trivial.partition.num_clusters() == 1);
  CHECK(trivial.diagnostics.max_conductance == 0.0);

  PipelineOptions big;
  big.min_size = 600;
  CHECK_THROWS_AS(cluster_pipeline(g, big), DomainError);
}

TEST_CASE("pipeline on planted components with L_giant = 1") {
  const Graph g = oracle::planted_components({40, 30, 25, 22}, 0.2, 6);
  PipelineOptions opt;
  opt.L_giant = 1;
  const auto res = cluster_pipeline(g, opt);
  CHECK(res.diagnostics.retained == 4);
  CHECK(res.diagnostics.max_conductance == 0.0);
}

TEST_CASE("pipeline on SBM picks a single giant cluster") {
  const Graph g = gen_sbm(1000, 10, 10.0 / 1000, 40.0 / 9.0 / 1000, 3).graph;
  PipelineOptions opt;
  opt.min_size = 1;
  opt.seed = 3;
  const auto res = cluster_pipeline(g, opt);
  CHECK(res.diagnostics.L_effective == 1);
  REQUIRE(res.diagnostics.spectral_gap.has_value());
  CHECK(*res.diagnostics.spectral_gap > 0.1);
}

TEST_CASE("pipeline discards isolated nodes even at min_size 1") {
  const Graph g = Graph::from_pairs(5, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}, {0, 2}});
  PipelineOptions opt;
  opt.min_size = 1;
  opt.L_giant = 1;
  const auto res = cluster_pipeline(g, opt);
  CHECK(res.diagnostics.retained == 1);
  CHECK(res.partition.num_clusters() == 3);
}
