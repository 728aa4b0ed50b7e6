#include "netclust/cheeger.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <vector>

#include "netclust/error.hpp"

namespace netclust {

namespace {

/// Walks restricted growth strings a[0..n-1] with a[0] = 0 and
/// a[i] <= 1 + max(a[0..i-1]), using exactly k block labels.
class SetPartitionWalker {
 public:
  SetPartitionWalker(const Graph& g, std::size_t k)
      : g_(g), k_(k), labels_(g.num_nodes(), 0), volume_(k, 0.0), boundary_(k, 0.0) {}

  CheegerResult run() {
    recurse(0, 0);
    if (best_labels_.empty()) {
      throw DomainError(fmt::format("no {}-partition with all blocks of positive volume", k_));
    }
    return {best_, Partition::canonical(best_labels_)};
  }

 private:
  void recurse(std::size_t i, std::uint32_t used) {
    const std::size_t n = labels_.size();
    if (n - i < k_ - used) return;  // not enough nodes left to open the remaining blocks
    if (i == n) {
      evaluate();
      return;
    }
    const std::uint32_t limit = std::min<std::uint32_t>(used + 1, static_cast<std::uint32_t>(k_));
    for (std::uint32_t b = 0; b < limit; ++b) {
      labels_[i] = b;
      recurse(i + 1, std::max(used, b + 1));
    }
  }

  void evaluate() {
    std::fill(volume_.begin(), volume_.end(), 0.0);
    std::fill(boundary_.begin(), boundary_.end(), 0.0);
    for (NodeId i = 0; i < labels_.size(); ++i) {
      volume_[labels_[i]] += g_.degrees()[i];
      auto nb = g_.neighbors(i);
      auto wt = g_.weights(i);
      for (std::size_t e = 0; e < nb.size(); ++e) {
        if (labels_[nb[e]] != labels_[i]) boundary_[labels_[i]] += wt[e];
      }
    }
    double worst = 0.0;
    for (std::size_t b = 0; b < k_; ++b) {
      if (!(volume_[b] > 0.0)) return;
      worst = std::max(worst, boundary_[b] / volume_[b]);
    }
    if (worst < best_) {
      best_ = worst;
      best_labels_ = labels_;
    }
  }

  const Graph& g_;
  std::size_t k_;
  std::vector<std::uint32_t> labels_;
  std::vector<double> volume_;
  std::vector<double> boundary_;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> best_labels_;
};

}  // namespace

CheegerResult brute_force_cheeger(const Graph& g, std::size_t k) {
  if (g.num_nodes() > kMaxCheegerNodes) {
    throw CapacityError(fmt::format("exhaustive Cheeger search limited to {} nodes, got {}", kMaxCheegerNodes,
                                    g.num_nodes()));
  }
  if (k < 1 || k > g.num_nodes()) throw InputError(fmt::format("Cheeger order k={} outside 1..n", k));
  return SetPartitionWalker(g, k).run();
}

}  // namespace netclust
