#include "netclust/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <queue>
#include <string>

#include "netclust/error.hpp"
#include "netclust/kernels.hpp"

namespace netclust {

Graph::Graph(std::size_t n, std::span<const WeightedEdge> edges) {
  if (n > std::numeric_limits<NodeId>::max()) throw InputError("graph too large for 32-bit node ids");
  std::vector<std::size_t> count(n + 1, 0);
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) {
      throw InputError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") references a node outside 0.." + std::to_string(n == 0 ? 0 : n - 1));
    }
    if (e.u == e.v) throw InputError("self-link on node " + std::to_string(e.u));
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw InputError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") has non-positive or non-finite weight");
    }
    if (e.w != 1.0) binary_ = false;
    ++count[e.u + 1];
    ++count[e.v + 1];
  }
  offsets_.assign(n + 1, 0);
  std::partial_sum(count.begin(), count.end(), offsets_.begin());

  std::vector<std::pair<NodeId, double>> slots(offsets_[n]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges) {
    slots[cursor[e.u]++] = {e.v, e.w};
    slots[cursor[e.v]++] = {e.u, e.w};
  }

  neighbors_.resize(slots.size());
  weights_.resize(slots.size());
  degree_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto first = slots.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
    auto last = slots.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
    std::sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = first; it != last; ++it) {
      if (it + 1 != last && (it + 1)->first == it->first) {
        throw InputError("duplicate edge (" + std::to_string(i) + "," + std::to_string(it->first) + ")");
      }
      const auto k = static_cast<std::size_t>(it - slots.begin());
      neighbors_[k] = it->first;
      weights_[k] = it->second;
      degree_[i] += it->second;
    }
  }
}

Graph Graph::from_pairs(std::size_t n, std::span<const std::pair<NodeId, NodeId>> pairs) {
  std::vector<WeightedEdge> edges;
  edges.reserve(pairs.size());
  for (auto [u, v] : pairs) edges.push_back({u, v, 1.0});
  return Graph(n, edges);
}

void Graph::check_node(NodeId i) const {
  if (i >= num_nodes()) {
    throw InputError("node id " + std::to_string(i) + " out of range (n=" + std::to_string(num_nodes()) + ")");
  }
}

double Graph::degree(NodeId i) const {
  check_node(i);
  return degree_[i];
}

std::vector<WeightedEdge> Graph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(num_edges());
  for (NodeId i = 0; i < num_nodes(); ++i) {
    auto nb = neighbors(i);
    auto wt = weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] > i) out.push_back({i, nb[k], wt[k]});
    }
  }
  return out;
}

Partition::Partition(std::vector<std::uint32_t> labels) : labels_(std::move(labels)) {
  std::uint32_t max_label = 0;
  for (auto l : labels_) max_label = std::max(max_label, l);
  if (labels_.empty()) return;
  sizes_.assign(static_cast<std::size_t>(max_label) + 1, 0);
  for (auto l : labels_) ++sizes_[l];
  for (std::size_t l = 0; l < sizes_.size(); ++l) {
    if (sizes_[l] == 0) throw InputError("partition label " + std::to_string(l) + " is unused");
  }
}

Partition Partition::canonical(std::span<const std::uint32_t> labels) {
  std::uint32_t max_label = 0;
  for (auto l : labels) max_label = std::max(max_label, l);
  const std::size_t slots = labels.empty() ? 0 : static_cast<std::size_t>(max_label) + 1;
  std::vector<std::size_t> size(slots, 0);
  std::vector<std::size_t> first(slots, labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++size[labels[i]];
    first[labels[i]] = std::min(first[labels[i]], i);
  }
  std::vector<std::uint32_t> order;
  for (std::uint32_t l = 0; l < slots; ++l) {
    if (size[l] > 0) order.push_back(l);
  }
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return size[a] != size[b] ? size[a] > size[b] : first[a] < first[b];
  });
  std::vector<std::uint32_t> remap(slots, 0);
  for (std::uint32_t r = 0; r < order.size(); ++r) remap[order[r]] = r;
  std::vector<std::uint32_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
  return Partition(std::move(out));
}

std::vector<NodeId> Partition::members(std::uint32_t cluster) const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == cluster) out.push_back(i);
  }
  return out;
}

std::vector<NodeId> ComponentLabeling::members(std::uint32_t component) const {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < labels.size(); ++i) {
    if (labels[i] == component) out.push_back(i);
  }
  return out;
}

std::size_t PathLength::hops() const {
  if (is_infinite()) throw DomainError("path length is infinite");
  return hops_;
}

double average_degree(const Graph& g) {
  if (g.num_nodes() == 0) throw InputError("average degree of an empty graph");
  double total = 0.0;
  for (double d : g.degrees()) total += d;
  return total / static_cast<double>(g.num_nodes());
}

PathLength path_distance(const Graph& g, NodeId i, NodeId j) {
  g.check_node(i);
  g.check_node(j);
  if (i == j) return PathLength(0);
  std::vector<std::size_t> dist(g.num_nodes(), std::numeric_limits<std::size_t>::max());
  std::queue<NodeId> frontier;
  dist[i] = 0;
  frontier.push(i);
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] != std::numeric_limits<std::size_t>::max()) continue;
      dist[v] = dist[u] + 1;
      if (v == j) return PathLength(dist[v]);
      frontier.push(v);
    }
  }
  return PathLength::infinite();
}

std::vector<NodeId> neighborhood(const Graph& g, NodeId i, std::size_t s) {
  g.check_node(i);
  std::vector<NodeId> visited{i};
  std::vector<char> seen(g.num_nodes(), 0);
  seen[i] = 1;
  std::size_t level_begin = 0;
  for (std::size_t depth = 0; depth < s; ++depth) {
    const std::size_t level_end = visited.size();
    if (level_begin == level_end) break;
    for (std::size_t k = level_begin; k < level_end; ++k) {
      for (NodeId v : g.neighbors(visited[k])) {
        if (!seen[v]) {
          seen[v] = 1;
          visited.push_back(v);
        }
      }
    }
    level_begin = level_end;
  }
  std::sort(visited.begin(), visited.end());
  return visited;
}

double neighborhood_moment(const Graph& g, std::size_t s, double k) {
  if (g.num_nodes() == 0) throw InputError("neighborhood moment of an empty graph");
  if (!(k > 0.0)) throw InputError("neighborhood moment order k must be positive");
  const auto sizes = kernels::neighborhood_sizes(g, s);
  double total = 0.0;
  for (auto sz : sizes) total += std::pow(static_cast<double>(sz), k);
  return total / static_cast<double>(g.num_nodes());
}

ComponentLabeling connected_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  ComponentLabeling out;
  out.labels.assign(n, kUnset);
  std::vector<NodeId> stack;
  for (NodeId root = 0; root < n; ++root) {
    if (out.labels[root] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(out.sizes.size());
    std::size_t size = 0;
    out.labels[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      ++size;
      for (NodeId v : g.neighbors(u)) {
        if (out.labels[v] == kUnset) {
          out.labels[v] = id;
          stack.push_back(v);
        }
      }
    }
    out.sizes.push_back(size);
    if (size > out.sizes[out.giant]) out.giant = id;
  }
  return out;
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  constexpr auto kAbsent = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> local(g.num_nodes(), kAbsent);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    g.check_node(nodes[k]);
    if (local[nodes[k]] != kAbsent) throw InputError("induced_subgraph: repeated node " + std::to_string(nodes[k]));
    local[nodes[k]] = static_cast<NodeId>(k);
  }
  std::vector<WeightedEdge> edges;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    auto nb = g.neighbors(nodes[k]);
    auto wt = g.weights(nodes[k]);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const NodeId other = local[nb[e]];
      if (other != kAbsent && other > k) edges.push_back({static_cast<NodeId>(k), other, wt[e]});
    }
  }
  return {Graph(nodes.size(), edges), std::vector<NodeId>(nodes.begin(), nodes.end())};
}

namespace {

std::vector<char> membership(const Graph& g, std::span<const NodeId> set) {
  std::vector<char> in(g.num_nodes(), 0);
  for (NodeId i : set) {
    g.check_node(i);
    in[i] = 1;
  }
  return in;
}

}  // namespace

double volume(const Graph& g, std::span<const NodeId> set) {
  const auto in = membership(g, set);
  double vol = 0.0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (in[i]) vol += g.degrees()[i];
  }
  return vol;
}

double edge_boundary(const Graph& g, std::span<const NodeId> set) {
  const auto in = membership(g, set);
  double cut = 0.0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (!in[i]) continue;
    auto nb = g.neighbors(i);
    auto wt = g.weights(i);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      if (!in[nb[e]]) cut += wt[e];
    }
  }
  return cut;
}

double conductance(const Graph& g, std::span<const NodeId> set) {
  const double vol = volume(g, set);
  if (!(vol > 0.0)) throw DomainError("conductance undefined for link-free set");
  return edge_boundary(g, set) / vol;
}

std::vector<ClusterCut> cluster_cuts(const Graph& g, const Partition& p) {
  if (p.num_nodes() != g.num_nodes()) throw InputError("partition size does not match graph");
  std::vector<ClusterCut> cuts(p.num_clusters());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    auto& c = cuts[p.label(i)];
    ++c.size;
    c.volume += g.degrees()[i];
    auto nb = g.neighbors(i);
    auto wt = g.weights(i);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      if (p.label(nb[e]) != p.label(i)) c.boundary += wt[e];
    }
  }
  return cuts;
}

double max_conductance(const Graph& g, const Partition& p) {
  double worst = 0.0;
  const auto cuts = cluster_cuts(g, p);
  for (std::size_t l = 0; l < cuts.size(); ++l) {
    if (!(cuts[l].volume > 0.0)) {
      throw DomainError("cluster " + std::to_string(l) + " has zero volume; conductance undefined");
    }
    worst = std::max(worst, cuts[l].boundary / cuts[l].volume);
  }
  return worst;
}

std::uint64_t graph_hash(const Graph& g) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  feed(g.num_nodes());
  for (const auto& e : g.edges()) {
    feed(e.u);
    feed(e.v);
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof e.w);
    std::memcpy(&bits, &e.w, sizeof bits);
    feed(bits);
  }
  return h;
}

}  // namespace netclust
