#include "netclust/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "netclust/error.hpp"
#include "netclust/rng.hpp"

namespace netclust {

namespace {

using kernels::RowMatrix;

std::size_t count_distinct_rows(const RowMatrix& points) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(points.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      if (points(a, c) != points(b, c)) return points(a, c) < points(b, c);
    }
    return false;
  };
  std::sort(idx.begin(), idx.end(), less);
  std::size_t distinct = idx.empty() ? 0 : 1;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (less(idx[k - 1], idx[k])) ++distinct;
  }
  return distinct;
}

Eigen::Index sample_by_weight(const std::vector<double>& w, double total, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double target = unit(rng) * total;
  double run = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    run += w[i];
    if (run > target && w[i] > 0.0) return static_cast<Eigen::Index>(i);
  }
  // Rounding ran past the end; fall back to the heaviest point.
  return static_cast<Eigen::Index>(std::max_element(w.begin(), w.end()) - w.begin());
}

/// k-means++ seeding. Each step draws `trials` candidates with probability
/// proportional to D^2 and keeps the one that lowers the potential most
/// (trials = 1 is the plain scheme).
RowMatrix seed_plus_plus(const RowMatrix& points, std::size_t k, int trials, Rng& rng) {
  const auto n = points.rows();
  const auto un = static_cast<std::size_t>(n);
  RowMatrix centers(static_cast<Eigen::Index>(k), points.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = points.row(pick(rng));
  std::vector<double> d2(un);
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (points.row(i) - centers.row(0)).squaredNorm();

  std::vector<double> candidate(un), best(un);
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    double best_potential = std::numeric_limits<double>::infinity();
    Eigen::Index chosen = 0;
    for (int t = 0; t < trials; ++t) {
      const Eigen::Index cand = sample_by_weight(d2, total, rng);
      double potential = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        candidate[u] = std::min(d2[u], (points.row(i) - points.row(cand)).squaredNorm());
        potential += candidate[u];
      }
      if (potential < best_potential) {
        best_potential = potential;
        chosen = cand;
        best.swap(candidate);
      }
    }
    centers.row(static_cast<Eigen::Index>(c)) = points.row(chosen);
    d2 = best;
  }
  return centers;
}

struct Run {
  std::vector<std::uint32_t> labels;
  RowMatrix centroids;
  double wcss = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> trace;
};

/// Moves the farthest point of a multi-point cluster into each empty cluster.
void fill_empty_clusters(const RowMatrix& points, RowMatrix& centroids, std::vector<std::uint32_t>& labels,
                         std::vector<double>& sq_dist) {
  const auto k = static_cast<std::size_t>(centroids.rows());
  std::vector<std::size_t> size(k, 0);
  for (auto l : labels) ++size[l];
  for (std::size_t c = 0; c < k; ++c) {
    if (size[c] > 0) continue;
    std::size_t far = labels.size();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (size[labels[i]] > 1 && (far == labels.size() || sq_dist[i] > sq_dist[far])) far = i;
    }
    --size[labels[far]];
    labels[far] = static_cast<std::uint32_t>(c);
    ++size[c];
    sq_dist[far] = 0.0;
    centroids.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(far));
  }
}

Run lloyd(const RowMatrix& points, RowMatrix centroids, const KMeansOptions& opt) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto k = static_cast<std::size_t>(centroids.rows());
  Run run;
  run.labels.assign(n, std::numeric_limits<std::uint32_t>::max());
  std::vector<double> sq_dist(n, 0.0);
  auto assign = opt.parallel ? &kernels::assign_nearest : &kernels::serial::assign_nearest;

  double previous = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_iterations; ++it) {
    const std::size_t changed = assign(points, centroids, run.labels, sq_dist);
    fill_empty_clusters(points, centroids, run.labels, sq_dist);
    const double wcss = std::accumulate(sq_dist.begin(), sq_dist.end(), 0.0);
    run.trace.push_back(wcss);
    run.iterations = it + 1;
    const bool converged = it > 0 && (changed == 0 || previous - wcss <= opt.relative_tolerance * previous);
    if (converged || it + 1 == opt.max_iterations) break;
    previous = wcss;

    RowMatrix sums = RowMatrix::Zero(static_cast<Eigen::Index>(k), points.cols());
    std::vector<std::size_t> size(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(run.labels[i]) += points.row(static_cast<Eigen::Index>(i));
      ++size[run.labels[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      centroids.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(size[c]);
    }
  }
  run.wcss = run.trace.back();
  run.centroids = std::move(centroids);
  return run;
}

}  // namespace

KMeansResult kmeans(const RowMatrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw InputError("k-means needs k >= 1");
  if (static_cast<Eigen::Index>(k) > points.rows()) {
    throw InputError("k-means k exceeds the number of points");
  }
  if (options.restarts < 1 || options.max_iterations < 1) throw InputError("k-means needs restarts, iterations >= 1");
  if (count_distinct_rows(points) < k) {
    throw DegenerateInputError("k-means: fewer distinct points than k=" + std::to_string(k));
  }

  const int trials =
      options.local_trials > 0 ? options.local_trials : 2 + static_cast<int>(std::log(static_cast<double>(k)));
  Run best;
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(r));
    Run run = lloyd(points, seed_plus_plus(points, k, trials, rng), options);
    if (run.wcss < best.wcss) best = std::move(run);
  }

  KMeansResult out;
  out.partition = Partition::canonical(best.labels);
  out.centroids.resize(static_cast<Eigen::Index>(k), points.cols());
  for (std::size_t i = 0; i < best.labels.size(); ++i) {
    out.centroids.row(out.partition.label(static_cast<NodeId>(i))) = best.centroids.row(best.labels[i]);
  }
  out.wcss = best.wcss;
  out.iterations = best.iterations;
  out.wcss_trace = std::move(best.trace);
  return out;
}

}  // namespace netclust
