#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netclust/graph.hpp"

namespace netclust {

enum class GraphModel { kRgg, kRcm, kEr, kSbm, kConfiguration };

std::string to_string(GraphModel m);
/// Accepts "rgg", "rcm", "er", "sbm", "config" (case-insensitive).
GraphModel parse_graph_model(const std::string& name);

using Point2 = std::array<double, 2>;

struct GeneratedGraph {
  Graph graph;
  GraphModel model{};
  std::optional<std::vector<Point2>> positions;  ///< RGG and RCM only
  std::optional<std::vector<double>> types;      ///< alpha_i for RCM, block id for SBM
  std::size_t dropped_stubs = 0;                 ///< configuration model only
};

/// Uniform points in [0,1]^2 linked within r = sqrt(target_degree / (pi n)).
GeneratedGraph gen_rgg(std::size_t n, double target_degree, std::uint64_t seed);

struct RcmParams {
  double target_degree = 5.0;
  /// r = sqrt(target_degree / (radius_scale * pi * n)).
  double radius_scale = 3.5;
};

/// Random connections model: alpha_i ~ U[0,1], positions U[0,1]^2, pairs
/// linked when alpha_i + alpha_j - |X_i - X_j| / r > eps_ij with eps_ij iid
/// standard logistic. Linking probability decreases with distance.
GeneratedGraph gen_rcm(std::size_t n, std::uint64_t seed, const RcmParams& params = {});

/// Erdos-Renyi with link probability kappa / n. Requires 0 < kappa < n.
GeneratedGraph gen_er(std::size_t n, double kappa, std::uint64_t seed);

/// Equal-size blocks (block b holds ids [b n/B, (b+1) n/B)), independent
/// links with p_in inside and p_out across blocks.
GeneratedGraph gen_sbm(std::size_t n, std::size_t blocks, double p_in, double p_out, std::uint64_t seed);

struct ConfigurationOptions {
  int max_passes = 100;
};

/// Stub matching. Self-links and repeated pairs are sent back for
/// re-matching (each pass also frees as many random existing edges as there
/// are clashes); stubs still unmatched after max_passes are dropped and
/// counted in `dropped_stubs`. Throws InputError for a non-graphical sequence.
GeneratedGraph gen_configuration(const std::vector<std::size_t>& degrees, std::uint64_t seed,
                                 const ConfigurationOptions& options = {});

/// iid Poisson(mean) draws redrawn until they fall in [lo, hi], with one
/// node redrawn until the total is even.
std::vector<std::size_t> poisson_degree_sequence(std::size_t n, double mean, std::size_t lo, std::size_t hi,
                                                 std::uint64_t seed);

/// Erdos-Gallai test.
bool is_graphical(std::vector<std::size_t> degrees);

}  // namespace netclust
