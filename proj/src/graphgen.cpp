#include "netclust/graphgen.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <unordered_set>

#include "netclust/error.hpp"
#include "netclust/rng.hpp"

namespace netclust {

namespace {

std::vector<Point2> uniform_points(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point2> pts(n);
  for (auto& p : pts) {
    p[0] = unit(rng);
    p[1] = unit(rng);
  }
  return pts;
}

double sq_dist(const Point2& a, const Point2& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

/// Number of failures before the next success of a Bernoulli(p) sequence.
std::uint64_t geometric_gap(double log_q, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double gap = std::floor(std::log1p(-unit(rng)) / log_q);
  return gap >= 1e18 ? std::uint64_t{1} << 62 : static_cast<std::uint64_t>(gap);
}

/// Calls emit(i, j), i > j, for each pair of 0..n-1 independently with
/// probability p (Batagelj-Brandes skipping).
template <typename Emit>
void sample_triangle(std::size_t n, double p, Rng& rng, Emit&& emit) {
  if (p <= 0.0 || n < 2) return;
  if (p >= 1.0) {
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) emit(i, j);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t v = 1;
  std::int64_t w = -1;
  while (v < n) {
    w += 1 + static_cast<std::int64_t>(geometric_gap(log_q, rng));
    while (w >= static_cast<std::int64_t>(v) && v < n) {
      w -= static_cast<std::int64_t>(v);
      ++v;
    }
    if (v < n) emit(v, static_cast<std::size_t>(w));
  }
}

/// Calls emit(a, b) for each cell of an rows x cols grid independently with
/// probability p.
template <typename Emit>
void sample_rectangle(std::size_t rows, std::size_t cols, double p, Rng& rng, Emit&& emit) {
  if (p <= 0.0 || rows == 0 || cols == 0) return;
  const std::uint64_t total = static_cast<std::uint64_t>(rows) * cols;
  if (p >= 1.0) {
    for (std::uint64_t k = 0; k < total; ++k) emit(k / cols, k % cols);
    return;
  }
  const double log_q = std::log1p(-p);
  std::uint64_t k = 0;
  while (true) {
    k += geometric_gap(log_q, rng);
    if (k >= total) break;
    emit(k / cols, k % cols);
    ++k;
  }
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError(fmt::format("{} must lie in [0, 1], got {}", name, p));
}

}  // namespace

std::string to_string(GraphModel m) {
  switch (m) {
    case GraphModel::kRgg:
      return "rgg";
    case GraphModel::kRcm:
      return "rcm";
    case GraphModel::kEr:
      return "er";
    case GraphModel::kSbm:
      return "sbm";
    case GraphModel::kConfiguration:
      return "config";
  }
  return "unknown";
}

GraphModel parse_graph_model(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "rgg") return GraphModel::kRgg;
  if (s == "rcm") return GraphModel::kRcm;
  if (s == "er") return GraphModel::kEr;
  if (s == "sbm") return GraphModel::kSbm;
  if (s == "config" || s == "configuration") return GraphModel::kConfiguration;
  throw InputError(fmt::format("unknown graph model '{}'", name));
}

GeneratedGraph gen_rgg(std::size_t n, double target_degree, std::uint64_t seed) {
  if (n < 2) throw InputError("RGG needs n >= 2");
  if (!(target_degree > 0.0)) throw InputError("RGG target degree must be positive");
  Rng rng(seed);
  auto pts = uniform_points(n, rng);
  const double r = std::sqrt(target_degree / (std::numbers::pi * static_cast<double>(n)));
  const double r2 = r * r;

  // Bucket points in a grid of cells at least r wide; only adjacent cells can link.
  const auto cells = static_cast<std::size_t>(std::clamp(std::floor(1.0 / r), 1.0, 4096.0));
  auto cell_of = [&](double x) { return std::min(cells - 1, static_cast<std::size_t>(x * static_cast<double>(cells))); };
  std::vector<std::vector<NodeId>> grid(cells * cells);
  for (NodeId i = 0; i < n; ++i) grid[cell_of(pts[i][0]) * cells + cell_of(pts[i][1])].push_back(i);

  std::vector<WeightedEdge> edges;
  for (NodeId i = 0; i < n; ++i) {
    const auto cx = static_cast<std::int64_t>(cell_of(pts[i][0]));
    const auto cy = static_cast<std::int64_t>(cell_of(pts[i][1]));
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const std::int64_t x = cx + dx, y = cy + dy;
        if (x < 0 || y < 0 || x >= static_cast<std::int64_t>(cells) || y >= static_cast<std::int64_t>(cells)) continue;
        for (NodeId j : grid[static_cast<std::size_t>(x) * cells + static_cast<std::size_t>(y)]) {
          if (j > i && sq_dist(pts[i], pts[j]) <= r2) edges.push_back({i, j, 1.0});
        }
      }
    }
  }
  GeneratedGraph out{Graph(n, edges), GraphModel::kRgg, std::move(pts), std::nullopt, 0};
  return out;
}

GeneratedGraph gen_rcm(std::size_t n, std::uint64_t seed, const RcmParams& params) {
  if (n < 2) throw InputError("RCM needs n >= 2");
  if (!(params.target_degree > 0.0) || !(params.radius_scale > 0.0)) {
    throw InputError("RCM target degree and radius scale must be positive");
  }
  Rng rng(seed);
  auto pts = uniform_points(n, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> alpha(n);
  for (auto& a : alpha) a = unit(rng);
  const double r =
      std::sqrt(params.target_degree / (params.radius_scale * std::numbers::pi * static_cast<double>(n)));

  std::vector<WeightedEdge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      double u = unit(rng);
      while (u == 0.0) u = unit(rng);
      const double eps = std::log(u / (1.0 - u));
      if (alpha[i] + alpha[j] - std::sqrt(sq_dist(pts[i], pts[j])) / r > eps) edges.push_back({i, j, 1.0});
    }
  }
  return {Graph(n, edges), GraphModel::kRcm, std::move(pts), std::move(alpha), 0};
}

GeneratedGraph gen_er(std::size_t n, double kappa, std::uint64_t seed) {
  if (n < 2) throw InputError("ER needs n >= 2");
  if (!(kappa > 0.0) || !(kappa < static_cast<double>(n))) {
    throw InputError(fmt::format("ER needs 0 < kappa < n, got kappa={} n={}", kappa, n));
  }
  Rng rng(seed);
  std::vector<WeightedEdge> edges;
  sample_triangle(n, kappa / static_cast<double>(n), rng, [&](std::size_t i, std::size_t j) {
    edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j), 1.0});
  });
  return {Graph(n, edges), GraphModel::kEr, std::nullopt, std::nullopt, 0};
}

GeneratedGraph gen_sbm(std::size_t n, std::size_t blocks, double p_in, double p_out, std::uint64_t seed) {
  if (blocks < 1 || n % blocks != 0) throw InputError(fmt::format("SBM: {} blocks do not divide n={}", blocks, n));
  check_probability(p_in, "p_in");
  check_probability(p_out, "p_out");
  Rng rng(seed);
  const std::size_t size = n / blocks;
  std::vector<WeightedEdge> edges;
  for (std::size_t a = 0; a < blocks; ++a) {
    const std::size_t base_a = a * size;
    sample_triangle(size, p_in, rng, [&](std::size_t i, std::size_t j) {
      edges.push_back({static_cast<NodeId>(base_a + i), static_cast<NodeId>(base_a + j), 1.0});
    });
    for (std::size_t b = a + 1; b < blocks; ++b) {
      const std::size_t base_b = b * size;
      sample_rectangle(size, size, p_out, rng, [&](std::size_t i, std::size_t j) {
        edges.push_back({static_cast<NodeId>(base_a + i), static_cast<NodeId>(base_b + j), 1.0});
      });
    }
  }
  std::vector<double> types(n);
  for (std::size_t i = 0; i < n; ++i) types[i] = static_cast<double>(i / size);
  return {Graph(n, edges), GraphModel::kSbm, std::nullopt, std::move(types), 0};
}

bool is_graphical(std::vector<std::size_t> d) {
  std::sort(d.begin(), d.end(), std::greater<>());
  const std::size_t n = d.size();
  std::uint64_t total = std::accumulate(d.begin(), d.end(), std::uint64_t{0});
  if (total % 2 != 0) return false;
  if (n > 0 && d.front() >= n) return false;
  std::uint64_t lhs = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    lhs += d[k - 1];
    std::uint64_t rhs = static_cast<std::uint64_t>(k) * (k - 1);
    for (std::size_t i = k; i < n; ++i) rhs += std::min<std::uint64_t>(d[i], k);
    if (lhs > rhs) return false;
  }
  return true;
}

GeneratedGraph gen_configuration(const std::vector<std::size_t>& degrees, std::uint64_t seed,
                                 const ConfigurationOptions& options) {
  const std::size_t n = degrees.size();
  if (n < 2) throw InputError("configuration model needs n >= 2");
  for (std::size_t i = 0; i < n; ++i) {
    if (degrees[i] >= n) throw InputError(fmt::format("degree {} of node {} is not below n={}", degrees[i], i, n));
  }
  const auto total = std::accumulate(degrees.begin(), degrees.end(), std::uint64_t{0});
  if (total % 2 != 0) throw InputError(fmt::format("degree sum {} is odd", total));
  if (!is_graphical(degrees)) throw InputError("degree sequence is not graphical");

  Rng rng(seed);
  std::vector<NodeId> pool;
  pool.reserve(total);
  for (NodeId i = 0; i < n; ++i) pool.insert(pool.end(), degrees[i], i);

  auto key = [n](NodeId a, NodeId b) {
    return static_cast<std::uint64_t>(std::min(a, b)) * n + std::max(a, b);
  };
  std::unordered_set<std::uint64_t> present;
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(total / 2);

  auto shuffle = [&rng](std::vector<NodeId>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(v[i - 1], v[pick(rng)]);
    }
  };

  for (int pass = 0; pass <= options.max_passes && !pool.empty(); ++pass) {
    if (pass > 0) {
      // Free one random existing edge per clashing pair so the leftovers can rewire.
      const std::size_t release = std::min(pool.size() / 2, edges.size());
      for (std::size_t r = 0; r < release; ++r) {
        std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
        const std::size_t e = pick(rng);
        present.erase(key(edges[e].first, edges[e].second));
        pool.push_back(edges[e].first);
        pool.push_back(edges[e].second);
        edges[e] = edges.back();
        edges.pop_back();
      }
    }
    shuffle(pool);
    std::vector<NodeId> leftover;
    for (std::size_t k = 0; k + 1 < pool.size(); k += 2) {
      const NodeId a = pool[k], b = pool[k + 1];
      if (a == b || present.count(key(a, b))) {
        leftover.push_back(a);
        leftover.push_back(b);
        continue;
      }
      present.insert(key(a, b));
      edges.emplace_back(a, b);
    }
    pool = std::move(leftover);
  }

  std::sort(edges.begin(), edges.end());
  return {Graph::from_pairs(n, edges), GraphModel::kConfiguration, std::nullopt, std::nullopt, pool.size()};
}

std::vector<std::size_t> poisson_degree_sequence(std::size_t n, double mean, std::size_t lo, std::size_t hi,
                                                 std::uint64_t seed) {
  if (n < 2 || !(mean > 0.0) || lo > hi) throw InputError("invalid truncated Poisson degree parameters");
  Rng rng(seed);
  std::poisson_distribution<std::size_t> poisson(mean);
  auto draw = [&] {
    std::size_t d;
    do {
      d = poisson(rng);
    } while (d < lo || d > hi);
    return d;
  };
  std::vector<std::size_t> degrees(n);
  for (auto& d : degrees) d = draw();
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (std::accumulate(degrees.begin(), degrees.end(), std::uint64_t{0}) % 2 != 0) {
    degrees[pick(rng)] = draw();
  }
  return degrees;
}

}  // namespace netclust
