// Acceptance runner. Each criterion prints exactly one PASS/FAIL line with the
// measured values; the exit status is nonzero when any selected criterion fails.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "netclust/cheeger.hpp"
#include "netclust/inference.hpp"
#include "netclust/simharness.hpp"
#include "netclust/spectral.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace netclust;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "!! ") + what;
  }
};

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

std::string show(double x) { return fmt::format("{:.4f}", x); }

MCResult run(GraphModel model, std::size_t n, Design design, std::size_t reps, std::optional<std::size_t> L,
             std::size_t min_size, std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.model = model;
  cfg.n = n;
  cfg.design = design;
  cfg.replications = reps;
  cfg.L_giant = L;
  cfg.min_size = min_size;
  cfg.seed = seed;
  return run_monte_carlo(cfg);
}

// ---------------------------------------------------------------------------

Outcome cheeger_bound() {
  Outcome out;
  std::mt19937_64 rng(20240601);
  double worst = -1e9;
  std::size_t checked = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 12)(rng);
    const double p = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    const Graph g = oracle::random_connected_graph(n, p, rng());
    const SpectrumReport rep = spectrum(g);
    for (std::size_t k : {2u, 3u}) {
      const double h = brute_force_cheeger(g, k).value;
      worst = std::max(worst, rep.lambda(k) / 2.0 - h);
      ++checked;
    }
  }
  out.require(worst <= 1e-9, fmt::format("{} (graph, k) pairs, max(lambda_k/2 - h_k) = {:.4g}", checked, worst));
  return out;
}

Outcome zero_eigenvalue_components() {
  Outcome out;
  std::mt19937_64 rng(7);
  int bad = 0;
  double smallest_nonzero = 2.0, largest_zero = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    std::vector<std::size_t> sizes(m);
    for (auto& s : sizes) s = std::uniform_int_distribution<std::size_t>(2, 30)(rng);
    const Graph g = oracle::planted_components(sizes, std::uniform_real_distribution<double>(0.05, 0.5)(rng), rng());
    const SpectrumReport rep = spectrum(g);
    std::size_t zeros = 0;
    for (Eigen::Index i = 0; i < rep.eigenvalues.size(); ++i) {
      const double v = rep.eigenvalues(i);
      if (v < kZeroEigenvalue) {
        ++zeros;
        largest_zero = std::max(largest_zero, v);
      } else {
        smallest_nonzero = std::min(smallest_nonzero, v);
        if (v <= 1e-3) ++bad;
      }
    }
    if (zeros != m) ++bad;
  }
  out.require(bad == 0, fmt::format("100 instances, mismatches {}, largest zero {:.2g}, smallest nonzero {:.4g}", bad,
                                    largest_zero, smallest_nonzero));
  return out;
}

Outcome clustering_statistics() {
  Outcome out;
  struct Row {
    GraphModel model;
    double giant;
  };
  const std::vector<Row> rows{{GraphModel::kRgg, 758.41}, {GraphModel::kRcm, 983.9}, {GraphModel::kEr, 993.1},
                              {GraphModel::kSbm, 993.0}};
  for (const auto& r : rows) {
    const MCResult mc = run(r.model, 1000, Design::kSpectra, 200, std::nullopt, 1, 101);
    const std::string name = to_string(r.model);
    const double phi = mc.value("max_conductance"), L = mc.value("L"), deg = mc.value("degree"),
                 giant = mc.value("giant"), gap = mc.value("gap");
    switch (r.model) {
      case GraphModel::kRgg:
        out.require(within(phi, 0.158, 0.03), name + " max_phi " + show(phi));
        out.require(within(L, 40.0, 6.0), name + " clusters " + show(L));
        out.require(within(deg, 4.83, 0.15), name + " degree " + show(deg));
        break;
      case GraphModel::kRcm:
        out.require(within(L, 12.7, 3.0), name + " clusters " + show(L));
        out.require(within(deg, 4.98, 0.15), name + " degree " + show(deg));
        break;
      default:
        out.require(L == 1.0, name + " clusters " + show(L));
        out.require(within(gap, 0.180, 0.02), name + " gap " + show(gap));
        break;
    }
    out.require(std::abs(giant / r.giant - 1.0) <= 0.02, name + " giant " + fmt::format("{:.1f}", giant));
  }
  return out;
}

Outcome design1_rejection() {
  Outcome out;
  const MCResult rgg = run(GraphModel::kRgg, 1000, Design::kD1, 2000, 8, 20, 202);
  const MCResult sbm = run(GraphModel::kSbm, 1000, Design::kD1, 2000, 8, 20, 203);
  out.require(within(rgg.value("rand"), 0.051, 0.012), "rand/rgg " + show(rgg.value("rand")));
  out.require(within(sbm.value("rand"), 0.101, 0.015), "rand/sbm " + show(sbm.value("rand")));
  out.require(within(rgg.value("hac"), 0.058, 0.015), "hac/rgg " + show(rgg.value("hac")));
  out.require(within(rgg.value("iid"), 0.279, 0.03), "iid/rgg " + show(rgg.value("iid")));
  return out;
}

Outcome design2_ordering() {
  Outcome out;
  constexpr std::size_t kReps = 300;
  struct Column {
    GraphModel model;
    std::size_t n;
  };
  const std::vector<Column> cols{{GraphModel::kRgg, 1408}, {GraphModel::kRcm, 1427}, {GraphModel::kConfiguration, 1375}};
  std::map<std::pair<GraphModel, Design>, MCResult> res;
  for (Design d : {Design::kD2Lim, Design::kD2Bg}) {
    for (const auto& c : cols) res.emplace(std::pair{c.model, d}, run(c.model, c.n, d, kReps, 8, 20, 303));
  }
  for (Design d : {Design::kD2Lim, Design::kD2Bg}) {
    const std::string tag = d == Design::kD2Lim ? "LIM" : "BG";
    const MCResult& cfg = res.at({GraphModel::kConfiguration, d});
    const MCResult& rgg = res.at({GraphModel::kRgg, d});
    const double diff = cfg.value("rand") - cfg.value("hac");
    out.require(diff >= 0.05, fmt::format("{} config rand {} - hac {} = {}", tag, show(cfg.value("rand")),
                                          show(cfg.value("hac")), show(diff)));
    out.require(rgg.value("rand") >= 0.03 && rgg.value("rand") <= 0.08, tag + " rgg rand " + show(rgg.value("rand")));
  }
  // Graphs depend only on (model, seed, index), so LIM records suffice.
  const auto& a = res.at({GraphModel::kRgg, Design::kD2Lim}).records;
  const auto& b = res.at({GraphModel::kRcm, Design::kD2Lim}).records;
  const auto& c = res.at({GraphModel::kConfiguration, Design::kD2Lim}).records;
  std::size_t ordered = 0;
  for (std::size_t i = 0; i < kReps; ++i) {
    ordered += a[i].max_conductance < b[i].max_conductance && b[i].max_conductance < c[i].max_conductance;
  }
  const double share = static_cast<double>(ordered) / kReps;
  out.require(share >= 0.95, fmt::format("max_phi ordering rgg<rcm<config in {} of reps (means {} {} {})", show(share),
                                         show(res.at({GraphModel::kRgg, Design::kD2Lim}).value("max_conductance")),
                                         show(res.at({GraphModel::kRcm, Design::kD2Lim}).value("max_conductance")),
                                         show(res.at({GraphModel::kConfiguration, Design::kD2Lim}).value("max_conductance"))));
  return out;
}

Outcome randomization_exactness() {
  Outcome out;
  std::mt19937_64 rng(31337);
  std::normal_distribution<double> z;
  auto rate = [&](std::size_t L, int reps) {
    int rej = 0;
    for (int r = 0; r < reps; ++r) {
      ClusterEstimates est;
      est.estimates.resize(static_cast<Eigen::Index>(L), 1);
      for (std::size_t l = 0; l < L; ++l) est.estimates(static_cast<Eigen::Index>(l), 0) = z(rng);
      est.sizes.assign(L, 1);
      for (std::uint32_t l = 0; l < L; ++l) est.cluster.push_back(l);
      rej += randomization_test(est, Eigen::VectorXd::Zero(1), 0.05).reject;
    }
    return static_cast<double>(rej) / reps;
  };
  const double r8 = rate(8, 10000);
  const double r2 = rate(2, 10000);
  out.require(r8 <= 0.057, "L=8 rate " + show(r8));
  out.require(r2 == 0.0, "L=2 rate " + show(r2));
  out.require(randomization_rank(2, 0.05) == 4, fmt::format("k(L=2) = {}", randomization_rank(2, 0.05)));
  return out;
}

// Eigenvalue clipping of a symmetric matrix of dimension <= 2 in closed form.
Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& m) {
  if (m.rows() == 1) return Eigen::MatrixXd::Constant(1, 1, std::max(0.0, m(0, 0)));
  const double a = m(0, 0), b = m(0, 1), d = m(1, 1);
  const double mid = 0.5 * (a + d), rad = std::hypot(0.5 * (a - d), b);
  const double l1 = mid + rad, l2 = mid - rad;
  if (l2 >= 0.0) return m;
  if (l1 <= 0.0) return Eigen::MatrixXd::Zero(2, 2);
  Eigen::Vector2d v = std::abs(b) > 1e-300 ? Eigen::Vector2d(l1 - d, b) : (a >= d ? Eigen::Vector2d(1, 0) : Eigen::Vector2d(0, 1));
  v.normalize();
  return l1 * v * v.transpose();
}

Outcome hac_oracle() {
  Outcome out;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> z;
  double worst = 0.0;
  bool zero_exact = true;
  std::size_t cases = 0, repaired = 0;
  for (std::size_t n = 1; n <= 10; ++n) {
    for (int t = 0; t < 30; ++t) {
      const double p = std::uniform_real_distribution<double>(0.0, 0.7)(rng);
      const Graph g = oracle::random_graph(n, p, rng());
      const Eigen::Index d = 1 + (t % 2);
      Eigen::MatrixXd x(static_cast<Eigen::Index>(n), d);
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = z(rng);
      for (int b = 0; b <= static_cast<int>(n); ++b) {
        const HacVariance v = hac_variance(MomentSample(x), g, static_cast<std::size_t>(b));
        const Eigen::MatrixXd raw = oracle::hac_double_loop(x, g, b);
        repaired += v.repaired;
        worst = std::max(worst, (v.matrix - clip_psd(raw)).cwiseAbs().maxCoeff());
        ++cases;
      }
      // (1/n) sum_i (g_i - gbar)(g_i - gbar)', summed in node order
      const auto rows = static_cast<Eigen::Index>(n);
      Eigen::MatrixXd c(rows, d);
      for (Eigen::Index a = 0; a < d; ++a) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < rows; ++i) s += x(i, a);
        for (Eigen::Index i = 0; i < rows; ++i) c(i, a) = x(i, a) - s / static_cast<double>(n);
      }
      Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(d, d);
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index a = 0; a < d; ++a) {
          for (Eigen::Index b = 0; b < d; ++b) outer(a, b) += c(i, a) * c(i, b);
        }
      }
      outer /= static_cast<double>(n);
      const Eigen::MatrixXd h0 = hac_variance(MomentSample(x), g, 0).matrix;
      if ((h0 - outer).cwiseAbs().maxCoeff() > 0.0) zero_exact = false;
    }
  }
  out.require(worst <= 1e-12, fmt::format("{} (graph, bandwidth) cases ({} PSD-repaired), max abs diff {:.3g}", cases,
                                          repaired, worst));
  out.require(zero_exact, "bandwidth 0 equals the outer-product average exactly");
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / fmt::format("netclust_accept_{}", ::getpid());
  fs::create_directories(dir);
  ::unsetenv("NETCLUST_THREADS");
  const std::vector<std::pair<std::string, std::string>> configs{
      {"d1", R"({"model":"rgg","n":500,"design":"D1","replications":16,"L_giant":8,"seed":1})"},
      {"spectra", R"({"model":"rcm","n":500,"design":"SPECTRA","replications":8,"min_size":1,"seed":2})"},
      {"d2", R"({"model":"config","n":600,"design":"D2_LIM","replications":8,"L_giant":6,"seed":3,"dgp_params":{"pilot_draws":40}})"},
      {"d2bg", R"({"model":"rgg","n":600,"design":"D2_BG","replications":8,"L_giant":6,"seed":4,"dgp_params":{"pilot_draws":40}})"}};
  for (const auto& [name, text] : configs) {
    const fs::path cfg = dir / (name + ".json");
    std::ofstream(cfg) << text;
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "8"}) {
      const fs::path csv = dir / fmt::format("{}_{}_{}.csv", name, threads, outputs.size());
      const std::string cmd = fmt::format("{} --threads {} simulate --config {} --out {} > /dev/null 2>&1",
                                          NETCLUST_CLI, threads, cfg.string(), csv.string());
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        out.require(false, name + ": simulate failed");
        break;
      }
      outputs.push_back(slurp(csv));
    }
    if (outputs.size() == 3) {
      out.require(outputs[0] == outputs[1] && outputs[0] == outputs[2] && !outputs[0].empty(),
                  name + " identical (run twice, 1 vs 8 workers)");
    }
  }
  fs::remove_all(dir);
  return out;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> r{
      {"cheeger_bound", cheeger_bound},
      {"zero_eigenvalue_components", zero_eigenvalue_components},
      {"clustering_statistics", clustering_statistics},
      {"design1_rejection", design1_rejection},
      {"design2_ordering", design2_ordering},
      {"randomization_exactness", randomization_exactness},
      {"hac_oracle", hac_oracle},
      {"determinism", determinism},
  };
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netclust acceptance criteria"};
  std::vector<std::string> selected;
  bool list = false;
  app.add_option("--criterion", selected, "Run only these criteria (repeatable)");
  app.add_flag("--list", list, "Print criterion names");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& [name, fn] : registry()) std::cout << name << '\n';
    return 0;
  }
  for (const auto& s : selected) {
    bool known = false;
    for (const auto& [name, fn] : registry()) known = known || name == s;
    if (!known) {
      std::cerr << "unknown criterion " << s << '\n';
      return 2;
    }
  }

  int failures = 0;
  for (const auto& [name, fn] : registry()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), name) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << fmt::format(" [{:.1f}s] ", secs) << o.detail << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
