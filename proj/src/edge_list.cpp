#include "netclust/edge_list.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>

#include "netclust/error.hpp"

namespace netclust {

namespace {

struct RawEdge {
  std::uint64_t u;
  std::uint64_t v;
  double w;
  std::size_t line;
};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint64_t parse_id(std::string_view tok, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(fmt::format("expected a nonnegative integer node id, got '{}'", tok), line);
  }
  return value;
}

double parse_weight(std::string_view tok, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(fmt::format("expected a numeric weight, got '{}'", tok), line);
  }
  if (!(value > 0.0)) throw ParseError(fmt::format("edge weight must be positive, got '{}'", tok), line);
  return value;
}

}  // namespace

NodeId LabeledGraph::internal_id(std::uint64_t external) const {
  auto it = index.find(external);
  if (it == index.end()) throw InputError(fmt::format("node {} is not in the graph", external));
  return it->second;
}

LabeledGraph parse_edge_list(std::istream& in, std::span<const std::uint64_t> extra_nodes) {
  std::vector<RawEdge> raw;
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::uint64_t> declared_nodes;
  constexpr std::string_view kHeader = "# netclust edge-list v1 nodes=";
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body(line);
    if (lineno == 1 && body.starts_with(kHeader)) {
      std::uint64_t n = 0;
      const char* first = body.data() + kHeader.size();
      if (std::from_chars(first, body.data() + body.size(), n).ec == std::errc{}) declared_nodes = n;
    }
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    const auto tokens = split_ws(body);
    if (tokens.empty()) continue;
    if (tokens.size() != 2 && tokens.size() != 3) {
      throw ParseError(fmt::format("expected 'u v' or 'u v w', got {} fields", tokens.size()), lineno);
    }
    RawEdge e{parse_id(tokens[0], lineno), parse_id(tokens[1], lineno), 1.0, lineno};
    if (tokens.size() == 3) e.w = parse_weight(tokens[2], lineno);
    if (e.u == e.v) throw ParseError(fmt::format("self-link on node {}", e.u), lineno);
    raw.push_back(e);
  }

  LabeledGraph out;
  out.external_ids.reserve(2 * raw.size() + extra_nodes.size());
  for (const auto& e : raw) {
    out.external_ids.push_back(e.u);
    out.external_ids.push_back(e.v);
  }
  out.external_ids.insert(out.external_ids.end(), extra_nodes.begin(), extra_nodes.end());
  // Our own header restores isolated nodes, but only when the ids are plainly 0..n-1.
  if (declared_nodes && std::all_of(out.external_ids.begin(), out.external_ids.end(),
                                    [&](std::uint64_t id) { return id < *declared_nodes; })) {
    for (std::uint64_t id = 0; id < *declared_nodes; ++id) out.external_ids.push_back(id);
  }
  std::sort(out.external_ids.begin(), out.external_ids.end());
  out.external_ids.erase(std::unique(out.external_ids.begin(), out.external_ids.end()), out.external_ids.end());
  out.index.reserve(out.external_ids.size());
  for (std::size_t k = 0; k < out.external_ids.size(); ++k) {
    out.index.emplace(out.external_ids[k], static_cast<NodeId>(k));
  }

  // Duplicate detection here so the error can cite both lines.
  std::vector<std::pair<std::pair<NodeId, NodeId>, std::size_t>> keyed;
  keyed.reserve(raw.size());
  std::vector<WeightedEdge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) {
    NodeId a = out.index.at(e.u);
    NodeId b = out.index.at(e.v);
    edges.push_back({a, b, e.w});
    keyed.push_back({{std::min(a, b), std::max(a, b)}, e.line});
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t k = 1; k < keyed.size(); ++k) {
    if (keyed[k].first == keyed[k - 1].first) {
      throw ParseError(fmt::format("duplicate edge ({},{}), first listed on line {}",
                                   out.external_ids[keyed[k].first.first], out.external_ids[keyed[k].first.second],
                                   keyed[k - 1].second),
                       keyed[k].second);
    }
  }
  out.graph = Graph(out.external_ids.size(), edges);
  return out;
}

LabeledGraph read_edge_list(const std::filesystem::path& path, std::span<const std::uint64_t> extra_nodes) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open edge list '{}'", path.string()));
  return parse_edge_list(in, extra_nodes);
}

void write_edge_list(std::ostream& out, const Graph& g, std::span<const std::uint64_t> external_ids) {
  if (!external_ids.empty() && external_ids.size() != g.num_nodes()) {
    throw InputError("external id map does not match graph size");
  }
  auto id = [&](NodeId i) -> std::uint64_t { return external_ids.empty() ? i : external_ids[i]; };
  out << fmt::format("# netclust edge-list v1 nodes={} edges={}\n", g.num_nodes(), g.num_edges());
  for (const auto& e : g.edges()) {
    if (g.is_binary()) {
      out << fmt::format("{} {}\n", id(e.u), id(e.v));
    } else {
      out << fmt::format("{} {} {}\n", id(e.u), id(e.v), e.w);
    }
  }
}

}  // namespace netclust
