#pragma once

#include <cstdint>
#include <vector>

#include "netclust/graph.hpp"
#include "netclust/kernels.hpp"

namespace netclust {

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
  /// Lloyd stops once the within-cluster sum of squares improves by less
  /// than this fraction of its previous value.
  double relative_tolerance = 1e-6;
  /// Candidates drawn per k-means++ step, keeping the one with the lowest
  /// potential. 0 selects 2 + floor(ln k); 1 is the plain scheme.
  int local_trials = 0;
  /// Use the OpenMP assignment kernel; off selects the serial reference.
  bool parallel = true;
};

struct KMeansResult {
  Partition partition;  ///< canonical: cluster 0 largest
  kernels::RowMatrix centroids;  ///< row l is the centroid of cluster l
  double wcss = 0.0;
  int iterations = 0;  ///< Lloyd iterations of the winning restart
  std::vector<double> wcss_trace;  ///< objective after each Lloyd step of the winning restart
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` by
/// within-cluster sum of squares. Restart r draws from stream r of `seed`,
/// so the result is a pure function of (points, k, seed, options).
/// Throws InputError for k < 1 and DegenerateInputError when there are
/// fewer distinct points than k.
KMeansResult kmeans(const kernels::RowMatrix& points, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

}  // namespace netclust
