#include "netclust/diagnostics.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "netclust/error.hpp"

namespace netclust {

std::string to_string(Warning w) {
  switch (w) {
    case Warning::kHighConductance:
      return "HIGH_CONDUCTANCE";
    case Warning::kTooFewClusters:
      return "TOO_FEW_CLUSTERS";
    case Warning::kUnbalanced:
      return "UNBALANCED";
  }
  return "UNKNOWN";
}

bool ClusterDiagnostics::has(Warning w) const {
  return std::find(warnings.begin(), warnings.end(), w) != warnings.end();
}

std::size_t choose_num_clusters(const SpectrumReport& report, double threshold, std::size_t max_L) {
  if (!(threshold > 0.0 && threshold < 2.0)) throw InputError("cluster-count threshold must lie in (0, 2)");
  std::size_t L = 0;
  const std::size_t limit = std::min(max_L, report.count());
  for (std::size_t k = 1; k <= limit; ++k) {
    if (report.lambda(k) < threshold) L = k;
  }
  return std::max<std::size_t>(L, 1);
}

ClusterDiagnostics quality_report(const Graph& g, const Partition& p, const std::vector<bool>& discarded,
                                  const QualityThresholds& thresholds) {
  if (!discarded.empty() && discarded.size() != p.num_clusters()) {
    throw InputError("discard flags do not match the cluster count");
  }
  ClusterDiagnostics out;
  const auto cuts = cluster_cuts(g, p);
  std::size_t retained_nodes = 0;
  std::size_t largest = 0;
  for (std::uint32_t l = 0; l < cuts.size(); ++l) {
    ClusterStats s{l, cuts[l].size, cuts[l].volume, cuts[l].boundary, std::nullopt, !discarded.empty() && discarded[l]};
    if (cuts[l].volume > 0.0) s.conductance = cuts[l].boundary / cuts[l].volume;
    if (!s.discarded) {
      if (!s.conductance) {
        throw DomainError(fmt::format("retained cluster {} has zero volume; conductance undefined", l));
      }
      out.max_conductance = std::max(out.max_conductance, *s.conductance);
      ++out.retained;
      retained_nodes += s.size;
      largest = std::max(largest, s.size);
    }
    out.clusters.push_back(s);
  }
  out.L_effective = out.retained;

  if (out.max_conductance > thresholds.high_conductance) out.warnings.push_back(Warning::kHighConductance);
  if (out.retained < thresholds.min_clusters) out.warnings.push_back(Warning::kTooFewClusters);
  if (retained_nodes > 0 &&
      static_cast<double>(largest) > thresholds.unbalanced_fraction * static_cast<double>(retained_nodes)) {
    out.warnings.push_back(Warning::kUnbalanced);
  }
  return out;
}

std::vector<std::uint32_t> PipelineResult::retained_clusters() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t l = 0; l < discarded.size(); ++l) {
    if (!discarded[l]) out.push_back(l);
  }
  return out;
}

PipelineResult cluster_pipeline(const Graph& g, const PipelineOptions& options) {
  if (g.num_nodes() == 0) throw InputError("cluster pipeline on an empty graph");
  const ComponentLabeling comps = connected_components(g);
  const std::size_t giant_size = comps.sizes[comps.giant];
  if (giant_size < options.min_size) {
    throw DomainError(fmt::format("giant component has {} nodes, below min_size {}", giant_size, options.min_size));
  }
  const std::vector<NodeId> giant_nodes = comps.members(comps.giant);
  const Subgraph giant = induced_subgraph(g, giant_nodes);

  PipelineResult out;
  out.giant_size = giant_size;
  std::size_t L = 1;
  std::optional<double> lambda_L, gap;
  std::vector<std::uint32_t> giant_labels(giant_size, 0);

  if (options.L_giant && (*options.L_giant < 1 || *options.L_giant > giant_size)) {
    throw InputError(fmt::format("L_giant={} outside 1..{}", *options.L_giant, giant_size));
  }
  if (giant.graph.num_edges() > 0) {
    const std::size_t k = std::min(giant_size, (options.L_giant ? *options.L_giant : options.max_L) + 1);
    const SpectrumReport report = spectrum(giant.graph, k, options.spectrum);
    L = options.L_giant ? *options.L_giant : choose_num_clusters(report, options.threshold, options.max_L);
    lambda_L = report.lambda(L);
    if (L + 1 <= report.count()) gap = report.lambda(L + 1) - report.lambda(L);
    const SpectralClustering sc = spectral_cluster(report, L, options.seed, options.kmeans);
    std::copy(sc.partition.labels().begin(), sc.partition.labels().end(), giant_labels.begin());
    for (NodeId local : sc.zero_rows) out.zero_rows.push_back(giant.to_parent[local]);
  }

  // Giant clusters take ids 0..L-1, every other component one id after that.
  std::vector<std::uint32_t> labels(g.num_nodes(), 0);
  for (std::size_t k = 0; k < giant_size; ++k) labels[giant_nodes[k]] = giant_labels[k];
  std::vector<std::uint32_t> component_id(comps.count(), 0);
  std::uint32_t next = static_cast<std::uint32_t>(L);
  for (std::uint32_t c = 0; c < comps.count(); ++c) {
    if (c != comps.giant) component_id[c] = next++;
  }
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (comps.labels[i] != comps.giant) labels[i] = component_id[comps.labels[i]];
  }
  out.partition = Partition::canonical(labels);

  const auto cuts = cluster_cuts(g, out.partition);
  out.discarded.resize(cuts.size());
  for (std::size_t l = 0; l < cuts.size(); ++l) {
    out.discarded[l] = cuts[l].size < options.min_size || !(cuts[l].volume > 0.0);
  }
  out.diagnostics = quality_report(g, out.partition, out.discarded, options.quality);
  out.diagnostics.L_effective = L;
  out.diagnostics.lambda_L = lambda_L;
  out.diagnostics.spectral_gap = gap;
  return out;
}

}  // namespace netclust
