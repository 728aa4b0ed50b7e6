// netclust command-line front end.
//
// Exit codes: 0 success, 2 bad input, 3 numeric failure, 10 quality warning
// (outputs are still written).

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "netclust/diagnostics.hpp"
#include "netclust/edge_list.hpp"
#include "netclust/error.hpp"
#include "netclust/graphgen.hpp"
#include "netclust/inference.hpp"
#include "netclust/io.hpp"
#include "netclust/kernels.hpp"
#include "netclust/rng.hpp"
#include "netclust/simharness.hpp"
#include "netclust/spectral.hpp"

namespace fs = std::filesystem;
using namespace netclust;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitWarning = 10;

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out = ".";
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw InputError(fmt::format("cannot write {}", path.string()));
  return f;
}

fs::path out_dir(const Globals& g) {
  fs::path dir(g.out);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::uint64_t> keys_of(const auto& map) {
  std::vector<std::uint64_t> out;
  for (const auto& [k, _] : map) out.push_back(k);
  return out;
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  std::string edges;
  std::optional<std::size_t> k;
  std::optional<std::size_t> embed;
  double threshold = 0.05;
  std::size_t max_L = 100;
};

int cmd_spectrum(const Globals& glob, const SpectrumArgs& a) {
  const LabeledGraph lg = read_edge_list(a.edges);
  const Graph& g = lg.graph;

  // Isolated nodes have no Laplacian row; each is a component of its own and
  // contributes one zero eigenvalue.
  std::vector<NodeId> active, isolated;
  for (NodeId i = 0; i < g.num_nodes(); ++i) (g.neighbor_count(i) ? active : isolated).push_back(i);
  const std::size_t n_active = active.size();
  const std::size_t want = a.k.value_or(g.num_nodes() <= SpectrumOptions{}.dense_threshold ? g.num_nodes()
                                                                                          : std::min<std::size_t>(g.num_nodes(), a.max_L + 1));
  if (want < 1 || want > g.num_nodes()) throw InputError(fmt::format("--k must lie in 1..{}", g.num_nodes()));

  SpectrumReport report;
  report.n = g.num_nodes();
  std::vector<double> values(isolated.size(), 0.0);
  if (n_active > 0) {
    const Subgraph sub = induced_subgraph(g, active);
    const SpectrumReport part = spectrum(sub.graph, std::min(want, n_active));
    for (std::size_t k = 1; k <= part.count(); ++k) values.push_back(part.lambda(k));
  }
  std::sort(values.begin(), values.end());
  values.resize(std::min(values.size(), want));
  report.eigenvalues = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));

  std::size_t near_zero = 0;
  for (double v : values) near_zero += v < kZeroEigenvalue ? 1 : 0;

  // Suggested L refers to the giant component, the part that gets clustered.
  const ComponentLabeling comps = connected_components(g);
  const Subgraph giant = induced_subgraph(g, comps.members(comps.giant));
  std::size_t suggested = 1;
  std::optional<SpectrumReport> giant_report;
  if (giant.graph.num_edges() > 0) {
    const std::size_t need = std::max(a.max_L + 1, a.embed.value_or(0));
    giant_report = spectrum(giant.graph, std::min(giant.graph.num_nodes(), need));
    suggested = choose_num_clusters(*giant_report, a.threshold, a.max_L);
  }

  const fs::path dir = out_dir(glob);
  {
    auto f = open_output(dir / "spectrum.csv");
    io::write_spectrum_csv(f, report);
  }
  {
    auto f = open_output(dir / "spectrum.json");
    io::write_json(f, io::spectrum_summary_json(report, suggested, near_zero));
  }
  if (a.embed) {
    if (!giant_report) throw InputError("giant component has no edges; nothing to embed");
    const Embedding emb = spectral_embedding(*giant_report, *a.embed);
    std::vector<std::uint64_t> ids;
    for (NodeId local = 0; local < giant.graph.num_nodes(); ++local) ids.push_back(lg.external_ids[giant.to_parent[local]]);
    auto f = open_output(dir / "embedding.csv");
    io::write_embedding_csv(f, emb, ids);
  }
  std::cout << fmt::format("{} eigenvalues, {} near zero, suggested L = {}\n", values.size(), near_zero, suggested);
  return kExitOk;
}

// ----------------------------------------------------------------- cluster

struct ClusterArgs {
  std::string edges;
  std::optional<std::size_t> L;
  std::size_t min_size = 20;
  double threshold = 0.05;
  std::size_t max_L = 100;
};

int cmd_cluster(const Globals& glob, const ClusterArgs& a) {
  const LabeledGraph lg = read_edge_list(a.edges);
  PipelineOptions po;
  po.L_giant = a.L;
  po.min_size = a.min_size;
  po.threshold = a.threshold;
  po.max_L = a.max_L;
  po.seed = derive_seed(glob.seed.value_or(0), stream::kClustering);
  const PipelineResult res = cluster_pipeline(lg.graph, po);

  const fs::path dir = out_dir(glob);
  {
    auto f = open_output(dir / "partition.csv");
    io::write_partition_csv(f, res.partition, res.discarded, lg.external_ids);
  }
  {
    auto f = open_output(dir / "diagnostics.json");
    io::write_json(f, io::diagnostics_json(res.diagnostics));
  }
  const auto& d = res.diagnostics;
  std::cout << fmt::format("{} clusters ({} retained), max conductance {}\n", res.partition.num_clusters(), d.retained,
                           io::format_double(d.max_conductance));
  for (auto w : d.warnings) std::cerr << "warning: " << to_string(w) << '\n';
  const bool warn = d.has(Warning::kHighConductance) || d.has(Warning::kTooFewClusters);
  return warn ? kExitWarning : kExitOk;
}

// -------------------------------------------------------------------- test

struct TestArgs {
  std::string edges;
  std::string values;
  std::string partition;
  std::string method = "rand";
  double alpha = 0.05;
  std::optional<std::size_t> bandwidth;
  double null_value = 0.0;
};

int cmd_test(const Globals& glob, const TestArgs& a) {
  std::ifstream vf(a.values);
  if (!vf) throw InputError(fmt::format("cannot read {}", a.values));
  const auto values = io::read_values_csv(vf);
  const auto valued = keys_of(values);
  const LabeledGraph lg = read_edge_list(a.edges, valued);
  const Graph& g = lg.graph;
  if (values.size() != g.num_nodes()) {
    for (auto id : lg.external_ids) {
      if (!values.count(id)) throw InputError(fmt::format("node {} has no value", id));
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(g.num_nodes()), 1);
  for (NodeId i = 0; i < g.num_nodes(); ++i) m(i, 0) = values.at(lg.external_ids[i]);
  const MomentSample sample(std::move(m));

  TestResult result;
  if (a.method == "rand") {
    if (a.partition.empty()) throw InputError("--method rand needs --partition");
    std::ifstream pf(a.partition);
    if (!pf) throw InputError(fmt::format("cannot read {}", a.partition));
    const auto rows = io::read_partition_csv(pf);
    std::vector<std::uint32_t> labels(g.num_nodes());
    std::map<std::uint32_t, bool> flag;
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      const auto it = rows.find(lg.external_ids[i]);
      if (it == rows.end()) throw InputError(fmt::format("node {} missing from the partition", lg.external_ids[i]));
      labels[i] = it->second.cluster;
      const auto [pos, fresh] = flag.emplace(it->second.cluster, it->second.discarded);
      if (!fresh && pos->second != it->second.discarded) {
        throw InputError(fmt::format("cluster {} has inconsistent discard flags", it->second.cluster));
      }
    }
    // Relabel to dense ids in the order of the input labels.
    std::map<std::uint32_t, std::uint32_t> dense;
    for (const auto& [l, _] : flag) dense.emplace(l, static_cast<std::uint32_t>(dense.size()));
    std::vector<bool> discarded(dense.size());
    for (const auto& [l, d] : flag) discarded[dense[l]] = d;
    for (auto& l : labels) l = dense[l];
    const Partition p(labels);
    const ClusterEstimates est = cluster_means(sample, p, discarded);
    result = randomization_test(est, Eigen::VectorXd::Constant(1, a.null_value), a.alpha);
  } else if (a.method == "hac") {
    result = hac_ttest(sample, g, a.null_value, a.alpha, a.bandwidth);
  } else {
    result = iid_ttest(sample, a.null_value, a.alpha);
  }

  auto f = open_output(out_dir(glob) / "test.json");
  io::write_json(f, io::test_result_json(result));
  std::cout << fmt::format("{}: statistic {} critical {} -> {}\n", result.method, io::format_double(result.statistic),
                           io::format_double(result.critical_value), result.reject ? "reject" : "do not reject");
  return kExitOk;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string model = "rgg";
  std::size_t n = 1000;
  std::string design = "SPECTRA";
  std::vector<std::string> params;
  bool design1_values = false;
};

std::map<std::string, double> parse_params(const std::vector<std::string>& kv) {
  std::map<std::string, double> out;
  for (const auto& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError(fmt::format("--param expects key=value, got '{}'", s));
    try {
      std::size_t used = 0;
      const double v = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument(s);
      out[s.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw InputError(fmt::format("--param value in '{}' is not a number", s));
    }
  }
  return out;
}

int cmd_generate(const Globals& glob, const GenerateArgs& a) {
  SimulationConfig cfg;
  cfg.model = parse_graph_model(a.model);
  cfg.n = a.n;
  cfg.design = parse_design(a.design);
  cfg.seed = glob.seed.value_or(0);
  cfg.dgp_params = parse_params(a.params);
  cfg.validate();
  const GeneratedGraph gg = simulate_graph(cfg, derive_seed(cfg.seed, stream::kGraph));

  const fs::path dir = out_dir(glob);
  {
    auto f = open_output(dir / "edges.txt");
    write_edge_list(f, gg.graph);
  }
  if (gg.positions) {
    auto f = open_output(dir / "positions.csv");
    io::write_positions_csv(f, *gg.positions);
  }
  if (a.design1_values) {
    const Eigen::VectorXd w = design1_outcomes(gg.graph, derive_seed(cfg.seed, stream::kOutcomes));
    auto f = open_output(dir / "values.csv");
    f << fmt::format("# netclust values v{}\n", io::kSchemaVersion) << "node,value\n";
    for (Eigen::Index i = 0; i < w.size(); ++i) f << i << ',' << io::format_double(w(i)) << '\n';
  }
  io::Json meta = {{"schema", fmt::format("netclust.generate.v{}", io::kSchemaVersion)},
                   {"model", to_string(cfg.model)},
                   {"design", to_string(cfg.design)},
                   {"n", cfg.n},
                   {"seed", cfg.seed},
                   {"params", cfg.dgp_params},
                   {"edges", gg.graph.num_edges()},
                   {"average_degree", average_degree(gg.graph)},
                   {"dropped_stubs", gg.dropped_stubs}};
  auto f = open_output(dir / "metadata.json");
  io::write_json(f, meta);
  std::cout << fmt::format("{} nodes, {} edges\n", gg.graph.num_nodes(), gg.graph.num_edges());
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::optional<std::size_t> replications;
};

int cmd_simulate(const Globals& glob, const SimulateArgs& a) {
  std::ifstream cf(a.config);
  if (!cf) throw InputError(fmt::format("cannot read {}", a.config));
  const std::string text((std::istreambuf_iterator<char>(cf)), std::istreambuf_iterator<char>());
  SimulationConfig cfg = SimulationConfig::from_json(text);
  if (glob.seed) cfg.seed = *glob.seed;
  if (glob.threads > 0) cfg.threads = glob.threads;
  if (a.replications) cfg.replications = *a.replications;
  cfg.validate();
  const MCResult result = run_monte_carlo(cfg);

  fs::path target(glob.out);
  if (target.extension() != ".csv") {
    fs::create_directories(target);
    target /= "results.csv";
  }
  auto f = open_output(target);
  io::write_results_csv(f, result);
  std::cout << fmt::format("{} replications written to {}\n", cfg.replications, target.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netclust: network clusters, conductance and cluster-robust tests"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals glob;
  app.add_option("--seed", glob.seed, "Master seed");
  app.add_option("--threads", glob.threads, "Worker threads (NETCLUST_THREADS overrides)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", glob.out, "Output directory (simulate: a .csv path is used as the results file)");

  SpectrumArgs sa;
  auto* spec = app.add_subcommand("spectrum", "Normalized Laplacian spectrum and a suggested cluster count");
  spec->add_option("edges", sa.edges, "Edge list")->required();
  spec->add_option("--k", sa.k, "Number of smallest eigenvalues")->check(CLI::PositiveNumber);
  spec->add_option("--embed", sa.embed, "Also write the L-dimensional embedding of the giant")->check(CLI::PositiveNumber);
  spec->add_option("--threshold", sa.threshold, "Eigenvalue cutoff for the suggested L");
  spec->add_option("--max-L", sa.max_L, "Upper bound on the suggested L")->check(CLI::PositiveNumber);

  ClusterArgs ca;
  auto* clus = app.add_subcommand("cluster", "Spectral clustering with conductance diagnostics");
  clus->add_option("edges", ca.edges, "Edge list")->required();
  auto* l_opt = clus->add_option("--L", ca.L, "Clusters in the giant component")->check(CLI::PositiveNumber);
  clus->add_option("--min-size", ca.min_size, "Discard clusters smaller than this");
  auto* thr = clus->add_option("--threshold", ca.threshold, "Eigenvalue cutoff when choosing L");
  clus->add_option("--max-L", ca.max_L, "Upper bound when choosing L")->check(CLI::PositiveNumber);
  l_opt->excludes(thr);

  TestArgs ta;
  auto* test = app.add_subcommand("test", "Randomization, HAC or i.i.d. test of a mean");
  test->add_option("--edges", ta.edges, "Edge list")->required();
  test->add_option("--values", ta.values, "node,value CSV")->required();
  test->add_option("--partition", ta.partition, "node,cluster,discarded CSV (rand only)");
  test->add_option("--method", ta.method)->check(CLI::IsMember({"rand", "hac", "iid"}));
  test->add_option("--alpha", ta.alpha)->check(CLI::Range(0.0, 1.0));
  auto* bw = test->add_option("--bandwidth", ta.bandwidth, "HAC bandwidth in hops");
  test->add_option("--null", ta.null_value, "Null value of the mean");
  (void)bw;

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Draw a random graph");
  gen->add_option("--model", ga.model)->check(CLI::IsMember({"rgg", "rcm", "er", "sbm", "config"}, CLI::ignore_case));
  gen->add_option("--n", ga.n)->check(CLI::Range(2, 10'000'000));
  gen->add_option("--design", ga.design, "Calibration: SPECTRA, D1, D2_LIM, D2_BG");
  gen->add_option("--param", ga.params, "Model parameter override key=value (repeatable)");
  gen->add_flag("--design1-values", ga.design1_values, "Also write Design 1 outcomes to values.csv");

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo experiment from a JSON config");
  sim->add_option("--config", ma.config, "Simulation config JSON")->required();
  sim->add_option("--replications", ma.replications, "Override the replication count")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*spec) return cmd_spectrum(glob, sa);
    if (*clus) return cmd_cluster(glob, ca);
    if (*test) return cmd_test(glob, ta);
    if (*gen) return cmd_generate(glob, ga);
    if (*sim) return cmd_simulate(glob, ma);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
