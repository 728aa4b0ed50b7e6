#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "netclust/graph.hpp"
#include "netclust/kmeans.hpp"
#include "netclust/spectral.hpp"

namespace netclust {

enum class Warning {
  kHighConductance,  ///< max conductance above the configured ceiling
  kTooFewClusters,   ///< fewer retained clusters than the configured floor
  kUnbalanced,       ///< largest retained cluster holds too much of the sample
};

std::string to_string(Warning w);

struct ClusterStats {
  std::uint32_t id = 0;
  std::size_t size = 0;
  double volume = 0.0;
  double boundary = 0.0;
  std::optional<double> conductance;  ///< empty for a zero-volume cluster
  bool discarded = false;
};

struct ClusterDiagnostics {
  std::vector<ClusterStats> clusters;  ///< every cluster, discarded ones flagged
  double max_conductance = 0.0;        ///< over retained clusters
  std::size_t retained = 0;
  std::size_t L_effective = 0;  ///< clusters carved out of the giant component
  std::optional<double> lambda_L;
  std::optional<double> spectral_gap;  ///< lambda_{L+1} - lambda_L on the giant
  std::vector<Warning> warnings;

  bool has(Warning w) const;
};

struct QualityThresholds {
  double high_conductance = 0.1;
  std::size_t min_clusters = 5;
  double unbalanced_fraction = 0.9;
};

/// Largest L <= max_L with lambda_L < threshold (at least 1). Only the
/// eigenvalues held by `report` are examined.
std::size_t choose_num_clusters(const SpectrumReport& report, double threshold = 0.05,
                                std::size_t max_L = std::numeric_limits<std::size_t>::max());

/// Per-cluster statistics and warnings. `discarded[l]` excludes cluster l from
/// max_conductance and the warning rules (empty = keep all). Retained
/// clusters must have positive volume.
ClusterDiagnostics quality_report(const Graph& g, const Partition& p, const std::vector<bool>& discarded = {},
                                  const QualityThresholds& thresholds = {});

struct PipelineOptions {
  std::optional<std::size_t> L_giant;  ///< empty = choose from the giant's spectrum
  std::size_t min_size = 20;
  double threshold = 0.05;
  std::size_t max_L = 100;
  std::uint64_t seed = 0;
  KMeansOptions kmeans;
  SpectrumOptions spectrum;
  QualityThresholds quality;
};

struct PipelineResult {
  Partition partition;          ///< canonical over the whole graph
  std::vector<bool> discarded;  ///< per cluster
  ClusterDiagnostics diagnostics;
  std::size_t giant_size = 0;
  std::vector<NodeId> zero_rows;  ///< giant nodes with a zero spectral embedding row

  std::vector<std::uint32_t> retained_clusters() const;
};

/// Spectral clustering of the giant component into L clusters, every other
/// component its own cluster, clusters below min_size (or with no edges)
/// flagged as discarded. Throws DomainError when the giant is smaller than
/// min_size.
PipelineResult cluster_pipeline(const Graph& g, const PipelineOptions& options);

}  // namespace netclust
