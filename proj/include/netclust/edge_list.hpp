#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "netclust/graph.hpp"

namespace netclust {

/// Graph read from an edge-list file together with the id relabeling.
/// Internal node k corresponds to `external_ids[k]`; external ids are
/// assigned dense ids in ascending order.
struct LabeledGraph {
  Graph graph;
  std::vector<std::uint64_t> external_ids;

  /// Throws InputError for an id not present in the graph.
  NodeId internal_id(std::uint64_t external) const;

  std::unordered_map<std::uint64_t, NodeId> index;
};

/// Parses "u v" or "u v w" lines. '#' starts a comment, blank lines are
/// ignored, each undirected edge is listed once. `extra_nodes` adds ids that
/// may have no edges (isolated nodes). A leading "# netclust edge-list v1
/// nodes=N" header also adds ids 0..N-1 when every listed id is below N.
/// Throws ParseError with the line number.
LabeledGraph parse_edge_list(std::istream& in, std::span<const std::uint64_t> extra_nodes = {});
LabeledGraph read_edge_list(const std::filesystem::path& path, std::span<const std::uint64_t> extra_nodes = {});

/// Writes the graph with internal ids (or `external_ids` when given), one
/// edge per line, weights only for non-binary graphs, after a header comment.
void write_edge_list(std::ostream& out, const Graph& g, std::span<const std::uint64_t> external_ids = {});

}  // namespace netclust
