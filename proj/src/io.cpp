#include "netclust/io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "netclust/error.hpp"

namespace netclust::io {

namespace {

std::string node_name(NodeId i, std::span<const std::uint64_t> ids) {
  return ids.empty() ? std::to_string(i) : std::to_string(ids[i]);
}

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    out.push_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& value) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

/// Calls row(fields, line) for each data row; skips comments, blank lines and
/// a header row whose first field is `header`.
template <typename Row>
void for_each_row(std::istream& in, std::string_view header, Row&& row) {
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view(line);
    const auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || view[first] == '#') continue;
    const auto fields = split_fields(view);
    if (!seen_data && fields.front() == header) {
      seen_data = true;
      continue;
    }
    seen_data = true;
    row(fields, lineno);
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report) {
  out << fmt::format("# netclust spectrum v{} n={}\n", kSchemaVersion, report.n);
  out << "index,eigenvalue\n";
  for (std::size_t k = 1; k <= report.count(); ++k) out << k << ',' << format_double(report.lambda(k)) << '\n';
}

void write_embedding_csv(std::ostream& out, const Embedding& emb, std::span<const std::uint64_t> ids) {
  const auto L = emb.positions.cols();
  out << fmt::format("# netclust embedding v{} L={}\n", kSchemaVersion, L);
  out << "node";
  for (Eigen::Index c = 1; c <= L; ++c) out << ",coord_" << c;
  out << '\n';
  for (Eigen::Index i = 0; i < emb.positions.rows(); ++i) {
    out << node_name(static_cast<NodeId>(i), ids);
    for (Eigen::Index c = 0; c < L; ++c) out << ',' << format_double(emb.positions(i, c));
    out << '\n';
  }
}

void write_partition_csv(std::ostream& out, const Partition& p, const std::vector<bool>& discarded,
                         std::span<const std::uint64_t> ids) {
  out << fmt::format("# netclust partition v{} clusters={}\n", kSchemaVersion, p.num_clusters());
  out << "node,cluster,discarded\n";
  for (NodeId i = 0; i < p.num_nodes(); ++i) {
    const auto l = p.label(i);
    const bool d = !discarded.empty() && discarded[l];
    out << node_name(i, ids) << ',' << l << ',' << (d ? 1 : 0) << '\n';
  }
}

void write_positions_csv(std::ostream& out, const std::vector<Point2>& positions) {
  out << fmt::format("# netclust positions v{}\n", kSchemaVersion);
  out << "node,x,y\n";
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out << i << ',' << format_double(positions[i][0]) << ',' << format_double(positions[i][1]) << '\n';
  }
}

void write_results_csv(std::ostream& out, const MCResult& result) {
  const auto& cfg = result.config;
  out << fmt::format("# netclust results v{} design={} replications={} seed={} alpha={} L_giant={} min_size={}\n",
                     kSchemaVersion, to_string(cfg.design), cfg.replications, cfg.seed, format_double(cfg.alpha),
                     cfg.L_giant ? std::to_string(*cfg.L_giant) : "auto", cfg.min_size);
  out << "method,model,n,value,mc_se\n";
  for (const auto& row : result.rows) {
    out << row.method << ',' << to_string(cfg.model) << ',' << cfg.n << ',' << format_double(row.value) << ','
        << format_double(row.mc_se) << '\n';
  }
}

Json diagnostics_json(const ClusterDiagnostics& d) {
  Json clusters = Json::array();
  for (const auto& c : d.clusters) {
    clusters.push_back({{"id", c.id},
                        {"size", c.size},
                        {"volume", c.volume},
                        {"boundary", c.boundary},
                        {"conductance", optional_number(c.conductance)},
                        {"discarded", c.discarded}});
  }
  Json warnings = Json::array();
  for (auto w : d.warnings) warnings.push_back(to_string(w));
  return {{"schema", fmt::format("netclust.diagnostics.v{}", kSchemaVersion)},
          {"clusters", clusters},
          {"max_conductance", d.max_conductance},
          {"retained", d.retained},
          {"L_effective", d.L_effective},
          {"lambda_L", optional_number(d.lambda_L)},
          {"spectral_gap", optional_number(d.spectral_gap)},
          {"warnings", warnings}};
}

Json test_result_json(const TestResult& r) {
  Json details = Json::object();
  for (const auto& [k, v] : r.details) details[k] = v;
  // JSON has no infinity; a singular randomization test reports strings.
  auto number = [](double x) { return std::isfinite(x) ? Json(x) : Json(format_double(x)); };
  return {{"schema", fmt::format("netclust.test.v{}", kSchemaVersion)},
          {"statistic", number(r.statistic)},
          {"critical_value", number(r.critical_value)},
          {"reject", r.reject},
          {"alpha", r.alpha},
          {"method", r.method},
          {"details", details}};
}

Json spectrum_summary_json(const SpectrumReport& report, std::size_t suggested_L, std::size_t near_zero) {
  Json values = Json::array();
  Json gaps = Json::array();
  for (std::size_t k = 1; k <= report.count(); ++k) {
    values.push_back(report.lambda(k));
    if (k + 1 <= report.count()) gaps.push_back(report.lambda(k + 1) - report.lambda(k));
  }
  return {{"schema", fmt::format("netclust.spectrum.v{}", kSchemaVersion)},
          {"n", report.n},
          {"eigenvalues", values},
          {"gaps", gaps},
          {"near_zero_count", near_zero},
          {"suggested_L", suggested_L}};
}

std::map<std::uint64_t, double> read_values_csv(std::istream& in) {
  std::map<std::uint64_t, double> out;
  for_each_row(in, "node", [&](const std::vector<std::string_view>& f, std::size_t line) {
    if (f.size() != 2) throw ParseError(fmt::format("expected 'node,value', got {} fields", f.size()), line);
    std::uint64_t node = 0;
    double value = 0.0;
    if (!parse_number(f[0], node)) throw ParseError(fmt::format("bad node id '{}'", f[0]), line);
    if (!parse_number(f[1], value) || !std::isfinite(value)) {
      throw ParseError(fmt::format("bad value '{}'", f[1]), line);
    }
    if (!out.emplace(node, value).second) throw ParseError(fmt::format("node {} listed twice", node), line);
  });
  return out;
}

std::map<std::uint64_t, PartitionRow> read_partition_csv(std::istream& in) {
  std::map<std::uint64_t, PartitionRow> out;
  for_each_row(in, "node", [&](const std::vector<std::string_view>& f, std::size_t line) {
    if (f.size() != 2 && f.size() != 3) {
      throw ParseError(fmt::format("expected 'node,cluster[,discarded]', got {} fields", f.size()), line);
    }
    std::uint64_t node = 0;
    PartitionRow row;
    if (!parse_number(f[0], node)) throw ParseError(fmt::format("bad node id '{}'", f[0]), line);
    if (!parse_number(f[1], row.cluster)) throw ParseError(fmt::format("bad cluster label '{}'", f[1]), line);
    if (f.size() == 3) {
      if (f[2] != "0" && f[2] != "1") throw ParseError(fmt::format("discarded flag must be 0 or 1, got '{}'", f[2]), line);
      row.discarded = f[2] == "1";
    }
    if (!out.emplace(node, row).second) throw ParseError(fmt::format("node {} listed twice", node), line);
  });
  return out;
}

}  // namespace netclust::io
