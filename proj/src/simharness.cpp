#include "netclust/simharness.hpp"

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <nlohmann/json.hpp>
#include <random>

#include "netclust/diagnostics.hpp"
#include "netclust/error.hpp"
#include "netclust/inference.hpp"
#include "netclust/kernels.hpp"
#include "netclust/rng.hpp"

extern "C" void openblas_set_num_threads(int);

namespace netclust {

namespace {

using json = nlohmann::json;

constexpr double kLimResidualTolerance = 1e-10;

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

bool is_design2(Design d) { return d == Design::kD2Lim || d == Design::kD2Bg; }

/// Running sum with Kahan compensation; fed in replication order.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

ResultRow mean_row(const std::string& method, const std::vector<double>& xs) {
  ResultRow row{method, 0.0, 0.0};
  if (xs.empty()) return row;
  KahanSum s;
  for (double x : xs) s.add(x);
  const double mean = s.value() / static_cast<double>(xs.size());
  KahanSum ss;
  for (double x : xs) ss.add((x - mean) * (x - mean));
  row.value = mean;
  if (xs.size() > 1) {
    const double var = ss.value() / static_cast<double>(xs.size() - 1);
    row.mc_se = std::sqrt(var / static_cast<double>(xs.size()));
  }
  return row;
}

ResultRow rate_row(const std::string& method, std::size_t hits, std::size_t total) {
  const double p = static_cast<double>(hits) / static_cast<double>(total);
  return {method, p, std::sqrt(p * (1.0 - p) / static_cast<double>(total))};
}

double median(std::vector<std::size_t> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? static_cast<double>(v[m]) : 0.5 * static_cast<double>(v[m - 1] + v[m]);
}

struct Subsample {
  MomentSample values;
  Subgraph graph;
};

Subsample restrict_to(const Eigen::VectorXd& values, const std::vector<bool>& include, const Graph& g) {
  std::vector<NodeId> keep;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    if (include[i]) keep.push_back(i);
  }
  Eigen::MatrixXd v(static_cast<Eigen::Index>(keep.size()), 1);
  for (std::size_t k = 0; k < keep.size(); ++k) v(static_cast<Eigen::Index>(k), 0) = values(keep[k]);
  return {MomentSample(std::move(v)), induced_subgraph(g, keep)};
}

/// Runs the three tests on one moment sample; isolates already removed from
/// `sub` when the estimator excludes them.
void run_tests(const SimulationConfig& cfg, const PipelineResult& clusters, const MomentSample& full,
               const std::vector<bool>& include, const Subsample& sub, double theta_null, ReplicationRecord& rec) {
  const ClusterEstimates est = cluster_means(full, clusters.partition, clusters.discarded, include);
  // With fewer than two retained clusters the sign-flip group is trivial and
  // the test cannot reject.
  rec.reject["rand"] =
      est.L() >= 2 && randomization_test(est, Eigen::VectorXd::Constant(1, theta_null), cfg.alpha).reject;
  std::optional<std::size_t> bandwidth;
  if (cfg.dgp_params.count("bandwidth")) bandwidth = static_cast<std::size_t>(cfg.param("bandwidth", 1));
  // A t-test whose variance estimate is zero is undefined for this draw; it
  // is left out of that method's rejection rate and counted separately.
  try {
    rec.reject["hac"] = hac_ttest(sub.values, sub.graph.graph, theta_null, cfg.alpha, bandwidth).reject;
  } catch (const NumericError&) {
  }
  try {
    rec.reject["iid"] = iid_ttest(sub.values, theta_null, cfg.alpha).reject;
  } catch (const NumericError&) {
  }
  rec.estimate = sub.values.values.col(0).mean();
}

}  // namespace

std::string to_string(Design d) {
  switch (d) {
    case Design::kSpectra:
      return "SPECTRA";
    case Design::kD1:
      return "D1";
    case Design::kD2Lim:
      return "D2_LIM";
    case Design::kD2Bg:
      return "D2_BG";
  }
  return "UNKNOWN";
}

Design parse_design(const std::string& name) {
  const std::string s = upper(name);
  if (s == "SPECTRA") return Design::kSpectra;
  if (s == "D1") return Design::kD1;
  if (s == "D2_LIM") return Design::kD2Lim;
  if (s == "D2_BG") return Design::kD2Bg;
  throw InputError(fmt::format("unknown design '{}'", name));
}

double SimulationConfig::param(const std::string& key, double fallback) const {
  const auto it = dgp_params.find(key);
  return it == dgp_params.end() ? fallback : it->second;
}

void SimulationConfig::validate() const {
  if (replications < 1) throw InputError("replications must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
  if (n < 2) throw InputError("n must be at least 2");
  if (L_giant && *L_giant < 1) throw InputError("L_giant must be positive");
  for (const auto& [k, v] : dgp_params) {
    if (!std::isfinite(v)) throw InputError(fmt::format("dgp parameter '{}' is not finite", k));
  }
}

SimulationConfig SimulationConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  static const std::vector<std::string> known = {"model",  "n",    "design", "replications", "L_giant", "min_size",
                                                 "alpha",  "seed", "threads", "dgp_params"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InputError(fmt::format("unknown config key '{}'", key));
    }
  }
  SimulationConfig cfg;
  try {
    if (j.contains("model")) cfg.model = parse_graph_model(j["model"].get<std::string>());
    if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
    if (j.contains("design")) cfg.design = parse_design(j["design"].get<std::string>());
    if (j.contains("replications")) cfg.replications = j["replications"].get<std::size_t>();
    if (j.contains("L_giant")) {
      const auto& l = j["L_giant"];
      if (l.is_string()) {
        if (upper(l.get<std::string>()) != "AUTO") throw InputError("L_giant must be an integer or \"auto\"");
      } else if (!l.is_null()) {
        cfg.L_giant = l.get<std::size_t>();
      }
    }
    if (j.contains("min_size")) cfg.min_size = j["min_size"].get<std::size_t>();
    if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("dgp_params")) {
      for (const auto& [k, v] : j["dgp_params"].items()) cfg.dgp_params[k] = v.get<double>();
    }
  } catch (const json::exception& e) {
    throw InputError(fmt::format("bad config value: {}", e.what()));
  }
  cfg.validate();
  return cfg;
}

std::string SimulationConfig::to_json() const {
  json j;
  j["model"] = to_string(model);
  j["n"] = n;
  j["design"] = to_string(design);
  j["replications"] = replications;
  j["L_giant"] = L_giant ? json(*L_giant) : json("auto");
  j["min_size"] = min_size;
  j["alpha"] = alpha;
  j["seed"] = seed;
  j["dgp_params"] = json::object();
  for (const auto& [k, v] : dgp_params) j["dgp_params"][k] = v;
  return j.dump(2);
}

GeneratedGraph simulate_graph(const SimulationConfig& cfg, std::uint64_t seed) {
  const bool d2 = is_design2(cfg.design);
  const double n = static_cast<double>(cfg.n);
  switch (cfg.model) {
    case GraphModel::kRgg:
      return gen_rgg(cfg.n, cfg.param("target_degree", d2 ? 8.0 : 5.0), seed);
    case GraphModel::kRcm:
      return gen_rcm(cfg.n, seed,
                     {cfg.param("target_degree", d2 ? 8.0 : 5.0), cfg.param("radius_scale", d2 ? 3.0 : 3.5)});
    case GraphModel::kEr:
      return gen_er(cfg.n, cfg.param("kappa", 5.0), seed);
    case GraphModel::kSbm:
      return gen_sbm(cfg.n, static_cast<std::size_t>(cfg.param("blocks", 10)), cfg.param("p_in_scale", 10.0) / n,
                     cfg.param("p_out_scale", 40.0 / 9.0) / n, seed);
    case GraphModel::kConfiguration: {
      const auto degrees =
          poisson_degree_sequence(cfg.n, cfg.param("degree_mean", 8.0), static_cast<std::size_t>(cfg.param("degree_min", 1)),
                                  static_cast<std::size_t>(cfg.param("degree_max", 20)), derive_seed(seed, 1));
      return gen_configuration(degrees, derive_seed(seed, 2));
    }
  }
  throw InputError("unknown graph model");
}

Eigen::VectorXd neighbor_average(const Graph& g, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != g.num_nodes()) throw InputError("vector length differs from node count");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const double d = g.degrees()[i];
    if (!(d > 0.0)) continue;
    auto nb = g.neighbors(i);
    auto wt = g.weights(i);
    double s = 0.0;
    for (std::size_t e = 0; e < nb.size(); ++e) s += wt[e] * x(nb[e]);
    out(i) = s / d;
  }
  return out;
}

Eigen::VectorXd design1_outcomes(const Graph& g, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd eps(static_cast<Eigen::Index>(g.num_nodes()));
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = normal(rng);
  return eps + neighbor_average(g, eps);
}

Design2Params Design2Params::defaults(Design d) {
  Design2Params p;
  if (d == Design::kD2Bg) p.beta = 1.0;
  return p;
}

Design2Params Design2Params::from_config(const SimulationConfig& cfg) {
  Design2Params p = defaults(cfg.design);
  p.alpha = cfg.param("alpha", p.alpha);
  p.beta = cfg.param("beta", p.beta);
  p.delta = cfg.param("delta", p.delta);
  p.gamma = cfg.param("gamma", p.gamma);
  p.p_treat = cfg.param("p_treat", p.p_treat);
  p.nu_scale = cfg.param("nu_scale", p.nu_scale);
  return p;
}

Design2Primitives draw_design2_primitives(const GeneratedGraph& g, const Design2Params& params, std::uint64_t seed) {
  if (!(params.p_treat > 0.0 && params.p_treat < 1.0)) throw InputError("p_treat must lie in (0, 1)");
  const std::size_t n = g.graph.num_nodes();
  Rng rng(seed);
  std::bernoulli_distribution coin(params.p_treat);
  std::normal_distribution<double> normal(0.0, 1.0);
  Design2Primitives prim;
  prim.treatments.resize(n);
  for (auto& d : prim.treatments) d = coin(rng) ? 1 : 0;
  prim.errors.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double e = params.nu_scale * normal(rng);
    if (g.positions) e += (*g.positions)[i][0] - 0.5;
    prim.errors(static_cast<Eigen::Index>(i)) = e;
  }
  return prim;
}

Eigen::VectorXd design2_intercepts(const Graph& g, const Design2Params& params, const Design2Primitives& prim) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  if (static_cast<Eigen::Index>(prim.treatments.size()) != n || prim.errors.size() != n) {
    throw InputError("treatments or errors do not match the node count");
  }
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = prim.treatments[static_cast<std::size_t>(i)];
  return (params.alpha + (params.delta * neighbor_average(g, d) + params.gamma * d + prim.errors).array()).matrix();
}

struct LinearInMeansSolver::Impl {
  Eigen::SparseMatrix<double> system;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

LinearInMeansSolver::LinearInMeansSolver(const Graph& g, double beta) : impl_(std::make_unique<Impl>()) {
  if (!(std::abs(beta) < 1.0)) throw InputError(fmt::format("linear-in-means needs |beta| < 1, got {}", beta));
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.num_nodes() + 2 * g.num_edges());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    trips.emplace_back(i, i, 1.0);
    const double d = g.degrees()[i];
    if (!(d > 0.0)) continue;
    auto nb = g.neighbors(i);
    auto wt = g.weights(i);
    for (std::size_t e = 0; e < nb.size(); ++e) trips.emplace_back(i, nb[e], -beta * wt[e] / d);
  }
  impl_->system.resize(n, n);
  impl_->system.setFromTriplets(trips.begin(), trips.end());
  impl_->system.makeCompressed();
  impl_->lu.compute(impl_->system);
  if (impl_->lu.info() != Eigen::Success) throw NumericError("linear-in-means: sparse LU factorization failed");
}

LinearInMeansSolver::~LinearInMeansSolver() = default;

Eigen::VectorXd LinearInMeansSolver::solve(const Eigen::VectorXd& intercepts) const {
  Eigen::VectorXd y = impl_->lu.solve(intercepts);
  if (impl_->lu.info() != Eigen::Success) throw NumericError("linear-in-means: sparse solve failed");
  const double residual = (impl_->system * y - intercepts).lpNorm<Eigen::Infinity>();
  if (!(residual < kLimResidualTolerance)) {
    throw NumericError(fmt::format("linear-in-means residual {:.3e} above tolerance", residual));
  }
  return y;
}

Eigen::VectorXd lim_outcomes(const Graph& g, const Design2Params& params, const Design2Primitives& prim) {
  return LinearInMeansSolver(g, params.beta).solve(design2_intercepts(g, params, prim));
}

Eigen::VectorXd bg_outcomes(const Graph& g, const Design2Params& params, const Design2Primitives& prim, int* sweeps,
                            int max_sweeps) {
  if (params.beta < 0.0) throw InputError("binary game needs beta >= 0");
  const Eigen::VectorXd base = design2_intercepts(g, params, prim);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(base.size());
  for (int s = 1; s <= max_sweeps; ++s) {
    const Eigen::VectorXd v = base + params.beta * neighbor_average(g, y);
    const Eigen::VectorXd next = (v.array() > 0.0).cast<double>().matrix();
    if (next == y) {
      if (sweeps) *sweeps = s;
      return y;
    }
    y = next;
  }
  throw NumericError(fmt::format("binary game: no equilibrium after {} best-response sweeps", max_sweeps));
}

Design2Draw design2_lim_outcomes(const GeneratedGraph& g, const Design2Params& params, std::uint64_t seed) {
  Design2Draw out{draw_design2_primitives(g, params, seed), {}};
  out.outcomes = lim_outcomes(g.graph, params, out.primitives);
  return out;
}

Design2Draw design2_bg_outcomes(const GeneratedGraph& g, const Design2Params& params, std::uint64_t seed) {
  Design2Draw out{draw_design2_primitives(g, params, seed), {}};
  out.outcomes = bg_outcomes(g.graph, params, out.primitives);
  return out;
}

IpwTerms ipw_terms(const Eigen::VectorXd& outcomes, std::span<const std::uint8_t> treatments, const Graph& g,
                   double p_treat) {
  if (!(p_treat > 0.0 && p_treat < 1.0)) throw InputError("p_treat must lie in (0, 1)");
  const std::size_t n = g.num_nodes();
  if (static_cast<std::size_t>(outcomes.size()) != n || treatments.size() != n) {
    throw InputError("outcomes or treatments do not match the node count");
  }
  IpwTerms out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), std::vector<bool>(n, false)};
  for (NodeId i = 0; i < n; ++i) {
    auto nb = g.neighbors(i);
    if (nb.empty()) continue;
    bool exposed = false;
    for (NodeId j : nb) exposed = exposed || treatments[j] != 0;
    const double p1 = 1.0 - std::pow(1.0 - p_treat, static_cast<double>(nb.size()));
    const double w = exposed ? 1.0 / p1 : -1.0 / (1.0 - p1);
    out.contributions(i) = outcomes(i) * w;
    out.included[i] = true;
  }
  return out;
}

double ipw_estimator(const Eigen::VectorXd& outcomes, std::span<const std::uint8_t> treatments, const Graph& g,
                     double p_treat, std::span<const NodeId> nodes) {
  const IpwTerms terms = ipw_terms(outcomes, treatments, g, p_treat);
  double sum = 0.0;
  std::size_t count = 0;
  auto add = [&](NodeId i) {
    g.check_node(i);
    if (!terms.included[i]) return;
    sum += terms.contributions(i);
    ++count;
  };
  if (nodes.empty()) {
    for (NodeId i = 0; i < g.num_nodes(); ++i) add(i);
  } else {
    for (NodeId i : nodes) add(i);
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

ReplicationRecord run_replication(const SimulationConfig& cfg, std::size_t index) {
  const std::uint64_t rep_seed = derive_seed(cfg.seed, index);
  const GeneratedGraph gg = simulate_graph(cfg, derive_seed(rep_seed, stream::kGraph));
  const Graph& g = gg.graph;

  PipelineOptions po;
  po.L_giant = cfg.L_giant;
  po.min_size = cfg.min_size;
  po.threshold = cfg.param("threshold", 0.05);
  po.max_L = static_cast<std::size_t>(cfg.param("max_L", 100));
  po.seed = derive_seed(rep_seed, stream::kClustering);
  po.spectrum.dense_threshold = static_cast<std::size_t>(cfg.param("dense_threshold", 2000));
  const PipelineResult clusters = cluster_pipeline(g, po);

  ReplicationRecord rec;
  rec.index = index;
  rec.graph_hash = graph_hash(g);
  rec.average_degree = average_degree(g);
  rec.giant_size = clusters.giant_size;
  rec.L = clusters.diagnostics.L_effective;
  rec.retained = clusters.diagnostics.retained;
  rec.max_conductance = clusters.diagnostics.max_conductance;
  rec.lambda_L = clusters.diagnostics.lambda_L.value_or(0.0);
  rec.spectral_gap = clusters.diagnostics.spectral_gap.value_or(0.0);

  const ComponentLabeling comps = connected_components(g);
  const auto sizes = clusters.partition.sizes();
  std::vector<std::size_t> giant_sizes;
  for (std::uint32_t l = 0; l < sizes.size(); ++l) {
    const NodeId first = clusters.partition.members(l).front();
    if (comps.labels[first] == comps.giant) giant_sizes.push_back(sizes[l]);
    if (!clusters.discarded[l]) rec.cluster_sizes.push_back(sizes[l]);
  }
  rec.median_cluster = median(giant_sizes);
  std::sort(rec.cluster_sizes.begin(), rec.cluster_sizes.end(), std::greater<>());

  const std::uint64_t outcome_seed = derive_seed(rep_seed, stream::kOutcomes);
  if (cfg.design == Design::kD1) {
    const Eigen::VectorXd w = design1_outcomes(g, outcome_seed);
    const MomentSample full = MomentSample::scalar(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())));
    const Subsample sub{full, {g, {}}};
    run_tests(cfg, clusters, full, {}, sub, 0.0, rec);
  } else if (is_design2(cfg.design)) {
    const Design2Params params = Design2Params::from_config(cfg);
    std::optional<LinearInMeansSolver> lim;
    if (cfg.design == Design::kD2Lim) lim.emplace(g, params.beta);
    auto outcomes = [&](const Design2Primitives& prim) {
      if (lim) return lim->solve(design2_intercepts(g, params, prim));
      int sweeps = 0;
      Eigen::VectorXd y = bg_outcomes(g, params, prim, &sweeps);
      rec.equilibrium_sweeps = std::max(rec.equilibrium_sweeps, sweeps);
      return y;
    };

    // theta_0 is the conditional mean of the estimator given the graph,
    // approximated by averaging fresh (D, nu) draws on this graph.
    const auto pilot_draws = static_cast<std::size_t>(cfg.param("pilot_draws", 200));
    const std::uint64_t pilot_seed = derive_seed(rep_seed, stream::kPilot);
    KahanSum pilot;
    for (std::size_t r = 0; r < pilot_draws; ++r) {
      const Design2Primitives prim = draw_design2_primitives(gg, params, derive_seed(pilot_seed, r));
      pilot.add(ipw_estimator(outcomes(prim), prim.treatments, g, params.p_treat));
    }
    rec.theta_null = pilot_draws ? pilot.value() / static_cast<double>(pilot_draws) : 0.0;

    const Design2Primitives prim = draw_design2_primitives(gg, params, outcome_seed);
    const IpwTerms terms = ipw_terms(outcomes(prim), prim.treatments, g, params.p_treat);
    const MomentSample full(terms.contributions);
    const Subsample sub = restrict_to(terms.contributions, terms.included, g);
    run_tests(cfg, clusters, full, terms.included, sub, rec.theta_null, rec);
  }
  return rec;
}

std::vector<ResultRow> summarize(const SimulationConfig& cfg, const std::vector<ReplicationRecord>& records) {
  std::vector<ResultRow> rows;
  if (records.empty()) return rows;
  const std::size_t R = records.size();
  if (cfg.design != Design::kSpectra) {
    for (const std::string m : {"rand", "hac", "iid"}) {
      std::size_t hits = 0, defined = 0;
      for (const auto& r : records) {
        const auto it = r.reject.find(m);
        if (it == r.reject.end()) continue;
        ++defined;
        hits += it->second ? 1 : 0;
      }
      rows.push_back(defined ? rate_row(m, hits, defined) : ResultRow{m, std::nan(""), std::nan("")});
      rows.push_back(rate_row(m + "_undefined", R - defined, R));
    }
  }
  auto column = [&](auto get) {
    std::vector<double> xs;
    xs.reserve(R);
    for (const auto& r : records) xs.push_back(static_cast<double>(get(r)));
    return xs;
  };
  rows.push_back(mean_row("max_conductance", column([](const auto& r) { return r.max_conductance; })));
  rows.push_back(mean_row("L", column([](const auto& r) { return r.L; })));
  rows.push_back(mean_row("retained", column([](const auto& r) { return r.retained; })));
  rows.push_back(mean_row("gap", column([](const auto& r) { return r.spectral_gap; })));
  rows.push_back(mean_row("lambda_L", column([](const auto& r) { return r.lambda_L; })));
  rows.push_back(mean_row("median_cluster", column([](const auto& r) { return r.median_cluster; })));
  rows.push_back(mean_row("giant", column([](const auto& r) { return r.giant_size; })));
  rows.push_back(mean_row("degree", column([](const auto& r) { return r.average_degree; })));

  auto order_stat = [&](const std::string& name, auto pick) {
    std::vector<double> xs;
    for (const auto& r : records) {
      if (!r.cluster_sizes.empty()) xs.push_back(static_cast<double>(pick(r.cluster_sizes)));
    }
    rows.push_back(mean_row(name, xs));
  };
  order_stat("cluster_1", [](const auto& s) { return s.front(); });
  std::vector<double> second;
  for (const auto& r : records) {
    if (r.cluster_sizes.size() >= 2) second.push_back(static_cast<double>(r.cluster_sizes[1]));
  }
  rows.push_back(mean_row("cluster_2", second));
  order_stat("cluster_last", [](const auto& s) { return s.back(); });
  if (is_design2(cfg.design)) {
    rows.push_back(mean_row("theta_null", column([](const auto& r) { return r.theta_null; })));
    rows.push_back(mean_row("estimate", column([](const auto& r) { return r.estimate; })));
  }
  return rows;
}

double MCResult::value(const std::string& method) const {
  const auto it = summary.find(method);
  if (it == summary.end()) throw InputError(fmt::format("no result row '{}'", method));
  return it->second;
}

MCResult run_monte_carlo(const SimulationConfig& cfg) {
  cfg.validate();
  // Replications are the unit of parallelism; keep BLAS single-threaded inside them.
  openblas_set_num_threads(1);
  const std::size_t R = cfg.replications;
  const int threads = kernels::resolve_threads(cfg.threads);
  std::vector<ReplicationRecord> records(R);
  std::vector<std::exception_ptr> errors(R);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(R); ++r) {
    const auto k = static_cast<std::size_t>(r);
    try {
      records[k] = run_replication(cfg, k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }

  for (std::size_t k = 0; k < R; ++k) {
    if (!errors[k]) continue;
    const auto tag = [k](const std::exception& e) { return fmt::format("replication {}: {}", k, e.what()); };
    try {
      std::rethrow_exception(errors[k]);
    } catch (const InputError& e) {
      throw InputError(tag(e));
    } catch (const DomainError& e) {
      throw DomainError(tag(e));
    } catch (const NumericError& e) {
      throw NumericError(tag(e));
    } catch (const CapacityError& e) {
      throw CapacityError(tag(e));
    } catch (const std::exception& e) {
      throw Error(tag(e));
    }
  }

  MCResult out;
  out.config = cfg;
  out.records = std::move(records);
  out.rows = summarize(cfg, out.records);
  for (const auto& row : out.rows) out.summary[row.method] = row.value;
  return out;
}

}  // namespace netclust
