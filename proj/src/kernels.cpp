#include "netclust/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

namespace netclust::kernels {

namespace {

/// Reusable truncated BFS. `visit` is called once per reached node,
/// including the source.
class BoundedBfs {
 public:
  explicit BoundedBfs(std::size_t n) : stamp_(n, 0) {}

  template <typename Visit>
  void run(const Graph& g, NodeId source, std::size_t depth, Visit&& visit) {
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    order_.clear();
    order_.push_back(source);
    stamp_[source] = epoch_;
    visit(source);
    std::size_t level_begin = 0;
    for (std::size_t d = 0; d < depth; ++d) {
      const std::size_t level_end = order_.size();
      if (level_begin == level_end) break;
      for (std::size_t k = level_begin; k < level_end; ++k) {
        for (NodeId v : g.neighbors(order_[k])) {
          if (stamp_[v] != epoch_) {
            stamp_[v] = epoch_;
            order_.push_back(v);
            visit(v);
          }
        }
      }
      level_begin = level_end;
    }
  }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<NodeId> order_;
};

double sign_statistic(std::size_t mask, const RowMatrix& dev, const Eigen::MatrixXd& minv,
                      Eigen::VectorXd& sum) {
  const auto L = static_cast<std::size_t>(dev.rows());
  sum.setZero();
  for (std::size_t l = 0; l < L; ++l) {
    if ((mask >> l) & 1U) {
      sum -= dev.row(static_cast<Eigen::Index>(l)).transpose();
    } else {
      sum += dev.row(static_cast<Eigen::Index>(l)).transpose();
    }
  }
  // (1/sqrt(L)) sum, squared through the middle matrix.
  return sum.dot(minv * sum) / static_cast<double>(L);
}

std::uint32_t nearest(const RowMatrix& points, const RowMatrix& centroids, Eigen::Index i, double& best) {
  best = std::numeric_limits<double>::infinity();
  std::uint32_t arg = 0;
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (points.row(i) - centroids.row(c)).squaredNorm();
    if (d < best) {
      best = d;
      arg = static_cast<std::uint32_t>(c);
    }
  }
  return arg;
}

}  // namespace

std::vector<std::size_t> neighborhood_sizes(const Graph& g, std::size_t s) {
  const auto n = static_cast<std::int64_t>(g.num_nodes());
  std::vector<std::size_t> sizes(g.num_nodes(), 0);
#pragma omp parallel
  {
    BoundedBfs bfs(g.num_nodes());
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
      std::size_t count = 0;
      bfs.run(g, static_cast<NodeId>(i), s, [&](NodeId) { ++count; });
      sizes[static_cast<std::size_t>(i)] = count;
    }
  }
  return sizes;
}

RowMatrix neighborhood_row_sums(const Graph& g, const RowMatrix& centered, std::size_t bandwidth) {
  const auto n = static_cast<std::int64_t>(g.num_nodes());
  RowMatrix sums = RowMatrix::Zero(centered.rows(), centered.cols());
#pragma omp parallel
  {
    BoundedBfs bfs(g.num_nodes());
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
      auto row = sums.row(i);
      bfs.run(g, static_cast<NodeId>(i), bandwidth, [&](NodeId j) { row += centered.row(j); });
    }
  }
  return sums;
}

std::vector<double> sign_flip_statistics(const RowMatrix& deviations, const Eigen::MatrixXd& middle_inverse) {
  const std::size_t count = std::size_t{1} << deviations.rows();
  std::vector<double> stats(count);
#pragma omp parallel
  {
    Eigen::VectorXd sum(deviations.cols());
#pragma omp for schedule(static)
    for (std::int64_t m = 0; m < static_cast<std::int64_t>(count); ++m) {
      stats[static_cast<std::size_t>(m)] = sign_statistic(static_cast<std::size_t>(m), deviations, middle_inverse, sum);
    }
  }
  return stats;
}

std::size_t assign_nearest(const RowMatrix& points, const RowMatrix& centroids, std::span<std::uint32_t> labels,
                           std::span<double> sq_dist) {
  std::size_t changed = 0;
#pragma omp parallel for schedule(static) reduction(+ : changed)
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double best;
    const auto arg = nearest(points, centroids, i, best);
    const auto k = static_cast<std::size_t>(i);
    if (labels[k] != arg) ++changed;
    labels[k] = arg;
    sq_dist[k] = best;
  }
  return changed;
}

namespace serial {

std::vector<std::size_t> neighborhood_sizes(const Graph& g, std::size_t s) {
  std::vector<std::size_t> sizes(g.num_nodes(), 0);
  BoundedBfs bfs(g.num_nodes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    bfs.run(g, i, s, [&](NodeId) { ++sizes[i]; });
  }
  return sizes;
}

RowMatrix neighborhood_row_sums(const Graph& g, const RowMatrix& centered, std::size_t bandwidth) {
  RowMatrix sums = RowMatrix::Zero(centered.rows(), centered.cols());
  BoundedBfs bfs(g.num_nodes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    auto row = sums.row(i);
    bfs.run(g, i, bandwidth, [&](NodeId j) { row += centered.row(j); });
  }
  return sums;
}

std::vector<double> sign_flip_statistics(const RowMatrix& deviations, const Eigen::MatrixXd& middle_inverse) {
  const std::size_t count = std::size_t{1} << deviations.rows();
  std::vector<double> stats(count);
  Eigen::VectorXd sum(deviations.cols());
  for (std::size_t m = 0; m < count; ++m) stats[m] = sign_statistic(m, deviations, middle_inverse, sum);
  return stats;
}

std::size_t assign_nearest(const RowMatrix& points, const RowMatrix& centroids, std::span<std::uint32_t> labels,
                           std::span<double> sq_dist) {
  std::size_t changed = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    double best;
    const auto arg = nearest(points, centroids, i, best);
    const auto k = static_cast<std::size_t>(i);
    if (labels[k] != arg) ++changed;
    labels[k] = arg;
    sq_dist[k] = best;
  }
  return changed;
}

}  // namespace serial

int resolve_threads(int requested) {
  if (const char* env = std::getenv("NETCLUST_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::exception&) {
      // fall through to the explicit request
    }
  }
  if (requested > 0) return requested;
  return omp_get_max_threads();
}

}  // namespace netclust::kernels
