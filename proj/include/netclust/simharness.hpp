#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netclust/graph.hpp"
#include "netclust/graphgen.hpp"

namespace netclust {

enum class Design { kSpectra, kD1, kD2Lim, kD2Bg };

std::string to_string(Design d);
/// Accepts "SPECTRA", "D1", "D2_LIM", "D2_BG" (case-insensitive).
Design parse_design(const std::string& name);

struct SimulationConfig {
  GraphModel model = GraphModel::kRgg;
  std::size_t n = 1000;
  Design design = Design::kSpectra;
  std::size_t replications = 1;
  std::optional<std::size_t> L_giant;  ///< empty = choose from the spectrum
  std::size_t min_size = 20;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;                           ///< 0 = OpenMP default
  std::map<std::string, double> dgp_params;  ///< overrides, see README

  double param(const std::string& key, double fallback) const;
  void validate() const;

  /// Parses a JSON object. Unknown top-level keys are rejected.
  static SimulationConfig from_json(const std::string& text);
  std::string to_json() const;
};

/// Graph for one replication with the model calibration of the chosen design.
GeneratedGraph simulate_graph(const SimulationConfig& cfg, std::uint64_t seed);

/// 1/deg-weighted neighbour sum, 0 for isolated nodes.
Eigen::VectorXd neighbor_average(const Graph& g, const Eigen::VectorXd& x);

/// W_i = eps_i + neighbour average of eps, eps iid N(0,1).
Eigen::VectorXd design1_outcomes(const Graph& g, std::uint64_t seed);

struct Design2Params {
  double alpha = 1.0;
  double beta = 0.5;
  double delta = 1.0;
  double gamma = 1.0;
  double p_treat = 0.5;
  double nu_scale = 1.0;

  static Design2Params defaults(Design d);
  static Design2Params from_config(const SimulationConfig& cfg);
};

/// Treatments and structural errors for one draw. The error is nu_i plus
/// (x-coordinate - 0.5) when the graph carries positions.
struct Design2Primitives {
  std::vector<std::uint8_t> treatments;
  Eigen::VectorXd errors;
};

Design2Primitives draw_design2_primitives(const GeneratedGraph& g, const Design2Params& params, std::uint64_t seed);

/// Reusable solver for Y = a + beta G Y with G the row-normalised adjacency.
class LinearInMeansSolver {
 public:
  LinearInMeansSolver(const Graph& g, double beta);
  ~LinearInMeansSolver();
  LinearInMeansSolver(const LinearInMeansSolver&) = delete;
  LinearInMeansSolver& operator=(const LinearInMeansSolver&) = delete;

  /// Throws NumericError if the sup-norm residual exceeds 1e-10.
  Eigen::VectorXd solve(const Eigen::VectorXd& intercepts) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Everything in V_i except the beta term: alpha + delta (GD)_i + gamma D_i + eps_i.
Eigen::VectorXd design2_intercepts(const Graph& g, const Design2Params& params, const Design2Primitives& prim);

Eigen::VectorXd lim_outcomes(const Graph& g, const Design2Params& params, const Design2Primitives& prim);

/// Least equilibrium of the binary game by best-response sweeps from Y = 0.
/// `sweeps` receives the number of sweeps used.
Eigen::VectorXd bg_outcomes(const Graph& g, const Design2Params& params, const Design2Primitives& prim,
                            int* sweeps = nullptr, int max_sweeps = 1000);

struct Design2Draw {
  Design2Primitives primitives;
  Eigen::VectorXd outcomes;
};

Design2Draw design2_lim_outcomes(const GeneratedGraph& g, const Design2Params& params, std::uint64_t seed);
Design2Draw design2_bg_outcomes(const GeneratedGraph& g, const Design2Params& params, std::uint64_t seed);

struct IpwTerms {
  Eigen::VectorXd contributions;  ///< Y_i (T_i/P_i - (1-T_i)/(1-P_i)); 0 where excluded
  std::vector<bool> included;     ///< false for isolated nodes
};

/// Per-node IPW terms with exposure T_i = 1{some neighbour treated} and
/// P(T_i = 1) = 1 - (1 - p)^deg(i).
IpwTerms ipw_terms(const Eigen::VectorXd& outcomes, std::span<const std::uint8_t> treatments, const Graph& g,
                   double p_treat);

/// IPW spillover estimate averaged over `nodes` (empty = all), isolates skipped.
double ipw_estimator(const Eigen::VectorXd& outcomes, std::span<const std::uint8_t> treatments, const Graph& g,
                     double p_treat, std::span<const NodeId> nodes = {});

/// One replication's outcome.
struct ReplicationRecord {
  std::size_t index = 0;
  std::uint64_t graph_hash = 0;
  double average_degree = 0.0;
  std::size_t giant_size = 0;
  std::size_t L = 0;         ///< clusters requested or chosen on the giant
  std::size_t retained = 0;  ///< clusters surviving the size filter
  double max_conductance = 0.0;
  double lambda_L = 0.0;
  double spectral_gap = 0.0;
  double median_cluster = 0.0;             ///< median size of the giant's clusters
  std::vector<std::size_t> cluster_sizes;  ///< retained clusters, descending
  std::map<std::string, bool> reject;      ///< per test method; absent when the test was undefined
  double theta_null = 0.0;
  double estimate = 0.0;
  int equilibrium_sweeps = 0;
};

struct ResultRow {
  std::string method;
  double value = 0.0;
  double mc_se = 0.0;
};

struct MCResult {
  SimulationConfig config;
  std::vector<ReplicationRecord> records;  ///< ordered by replication index
  std::vector<ResultRow> rows;
  std::map<std::string, double> summary;  ///< method -> value, same content as rows

  double value(const std::string& method) const;
};

/// One replication (exposed for tests and the acceptance runner).
ReplicationRecord run_replication(const SimulationConfig& cfg, std::size_t index);

/// All replications, in parallel over `cfg.threads` workers. Output does not
/// depend on the worker count.
MCResult run_monte_carlo(const SimulationConfig& cfg);

/// Aggregates records into result rows.
std::vector<ResultRow> summarize(const SimulationConfig& cfg, const std::vector<ReplicationRecord>& records);

}  // namespace netclust
