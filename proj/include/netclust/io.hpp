#pragma once

// File formats shared by the CLI and the plotting scripts. Every CSV starts
// with a "# netclust <kind> v1" comment line; every JSON document carries a
// "schema" key and is written pretty-printed with sorted keys.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "netclust/diagnostics.hpp"
#include "netclust/graphgen.hpp"
#include "netclust/inference.hpp"
#include "netclust/simharness.hpp"
#include "netclust/spectral.hpp"

namespace netclust::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Shortest representation that round-trips.
std::string format_double(double x);

void write_json(std::ostream& out, const Json& j);

/// `index,eigenvalue`, 1-based index.
void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);

/// `node,coord_1..coord_L`. `ids` maps internal ids to external ones (empty = identity).
void write_embedding_csv(std::ostream& out, const Embedding& emb, std::span<const std::uint64_t> ids = {});

/// `node,cluster,discarded`.
void write_partition_csv(std::ostream& out, const Partition& p, const std::vector<bool>& discarded,
                         std::span<const std::uint64_t> ids = {});

/// `node,x,y`.
void write_positions_csv(std::ostream& out, const std::vector<Point2>& positions);

/// `method,model,n,value,mc_se`.
void write_results_csv(std::ostream& out, const MCResult& result);

Json diagnostics_json(const ClusterDiagnostics& d);
Json test_result_json(const TestResult& r);

/// Eigenvalues, consecutive gaps, near-zero count and a suggested cluster count.
Json spectrum_summary_json(const SpectrumReport& report, std::size_t suggested_L, std::size_t near_zero);

/// `node,value` rows keyed by external node id. Throws ParseError.
std::map<std::uint64_t, double> read_values_csv(std::istream& in);

struct PartitionRow {
  std::uint32_t cluster = 0;
  bool discarded = false;
};

/// `node,cluster[,discarded]` rows keyed by external node id. Throws ParseError.
std::map<std::uint64_t, PartitionRow> read_partition_csv(std::istream& in);

}  // namespace netclust::io
