#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace netclust {

using NodeId = std::uint32_t;

struct WeightedEdge {
  NodeId u;
  NodeId v;
  double w = 1.0;
};

/// Undirected weighted graph in compressed sparse row layout.
///
/// Every undirected edge is stored twice (once per endpoint). Neighbor lists
/// are sorted by id. There are no self-links, no duplicate edges and every
/// stored weight is strictly positive; the constructor rejects anything else.
/// Immutable after construction, hence safe to share across threads.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph on nodes 0..n-1. Each undirected edge must be listed
  /// exactly once, in either orientation.
  Graph(std::size_t n, std::span<const WeightedEdge> edges);

  /// Unit-weight convenience overload.
  static Graph from_pairs(std::size_t n, std::span<const std::pair<NodeId, NodeId>> pairs);

  std::size_t num_nodes() const noexcept { return degree_.size(); }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {neighbors_.data() + offsets_[i], neighbors_.data() + offsets_[i + 1]};
  }
  std::span<const double> weights(NodeId i) const {
    return {weights_.data() + offsets_[i], weights_.data() + offsets_[i + 1]};
  }
  std::size_t neighbor_count(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }

  /// Weighted degree; throws InputError for an out-of-range id.
  double degree(NodeId i) const;
  std::span<const double> degrees() const noexcept { return degree_; }

  bool is_binary() const noexcept { return binary_; }

  /// Each undirected edge once, with u < v, in (u, v) lexicographic order.
  std::vector<WeightedEdge> edges() const;

  void check_node(NodeId i) const;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
  std::vector<double> weights_;
  std::vector<double> degree_;
  bool binary_ = true;
};

/// Assignment of every node to exactly one of `num_clusters()` labels, each
/// label used at least once.
class Partition {
 public:
  Partition() = default;
  /// Validates the labels; throws InputError when a label in 0..L-1 is unused.
  explicit Partition(std::vector<std::uint32_t> labels);

  /// Relabels so cluster 0 is the largest; ties go to the cluster holding
  /// the smallest node id.
  static Partition canonical(std::span<const std::uint32_t> labels);

  std::size_t num_nodes() const noexcept { return labels_.size(); }
  std::size_t num_clusters() const noexcept { return sizes_.size(); }
  std::uint32_t label(NodeId i) const { return labels_[i]; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }
  std::span<const std::size_t> sizes() const noexcept { return sizes_; }
  std::vector<NodeId> members(std::uint32_t cluster) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::uint32_t> labels_;
  std::vector<std::size_t> sizes_;
};

struct ComponentLabeling {
  std::vector<std::uint32_t> labels;
  std::vector<std::size_t> sizes;
  std::uint32_t giant = 0;

  std::size_t count() const noexcept { return sizes.size(); }
  std::vector<NodeId> members(std::uint32_t component) const;
};

/// Hop count between two nodes, or the infinite sentinel for nodes in
/// different components. Infinity compares greater than every finite length.
class PathLength {
 public:
  constexpr PathLength() = default;
  constexpr explicit PathLength(std::size_t hops) : hops_(hops) {}
  static constexpr PathLength infinite() { return PathLength(kInf); }

  constexpr bool is_infinite() const noexcept { return hops_ == kInf; }
  /// Throws DomainError when infinite.
  std::size_t hops() const;

  constexpr auto operator<=>(const PathLength&) const = default;

 private:
  static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::size_t hops_ = 0;
};

/// Induced subgraph with the map back to parent ids (`to_parent[k]` is the
/// parent id of local node k).
struct Subgraph {
  Graph graph;
  std::vector<NodeId> to_parent;
};

double average_degree(const Graph& g);

PathLength path_distance(const Graph& g, NodeId i, NodeId j);

/// All nodes within `s` hops of `i`, sorted ascending.
std::vector<NodeId> neighborhood(const Graph& g, NodeId i, std::size_t s);

/// (1/n) * sum_i |neighborhood(i, s)|^k.
double neighborhood_moment(const Graph& g, std::size_t s, double k);

ComponentLabeling connected_components(const Graph& g);

/// Nodes must be distinct; each must be a valid id.
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

// Set functions. Repeated ids in `set` count once.
double volume(const Graph& g, std::span<const NodeId> set);
double edge_boundary(const Graph& g, std::span<const NodeId> set);
/// Throws DomainError when the set has zero volume.
double conductance(const Graph& g, std::span<const NodeId> set);

struct ClusterCut {
  std::size_t size = 0;
  double volume = 0.0;
  double boundary = 0.0;
};

/// Size, volume and boundary of every cluster in one pass over the edges.
std::vector<ClusterCut> cluster_cuts(const Graph& g, const Partition& p);

/// Largest cluster conductance; throws DomainError on a zero-volume cluster.
double max_conductance(const Graph& g, const Partition& p);

/// FNV-1a digest of the node count and the canonical edge list.
std::uint64_t graph_hash(const Graph& g);

}  // namespace netclust
