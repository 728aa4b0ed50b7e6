#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP version in
// `netclust::kernels` and a plain loop in `netclust::kernels::serial` with
// the identical contract; tests hold the two to bit-identical output and the
// benchmark target times them against each other.
//
// Parallel versions only write per-item slots and reduce serially, so results
// never depend on the thread count.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "netclust/graph.hpp"

namespace netclust::kernels {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// |N(i, s)| for every node i.
std::vector<std::size_t> neighborhood_sizes(const Graph& g, std::size_t s);

/// Row i is the sum of rows j of `centered` over all j within `bandwidth`
/// hops of i (including i itself).
RowMatrix neighborhood_row_sums(const Graph& g, const RowMatrix& centered, std::size_t bandwidth);

/// Wald statistic for every sign vector. Bit l of the index set means
/// cluster l is flipped, so index 0 is the identity. `deviations` is L x d;
/// `middle_inverse` is the inverse of the (sign-invariant) middle matrix.
std::vector<double> sign_flip_statistics(const RowMatrix& deviations,
                                         const Eigen::MatrixXd& middle_inverse);

/// Nearest-centroid assignment. Writes labels and squared distances; returns
/// the number of labels that changed.
std::size_t assign_nearest(const RowMatrix& points, const RowMatrix& centroids,
                           std::span<std::uint32_t> labels, std::span<double> sq_dist);

namespace serial {

std::vector<std::size_t> neighborhood_sizes(const Graph& g, std::size_t s);
RowMatrix neighborhood_row_sums(const Graph& g, const RowMatrix& centered, std::size_t bandwidth);
std::vector<double> sign_flip_statistics(const RowMatrix& deviations,
                                         const Eigen::MatrixXd& middle_inverse);
std::size_t assign_nearest(const RowMatrix& points, const RowMatrix& centroids,
                           std::span<std::uint32_t> labels, std::span<double> sq_dist);

}  // namespace serial

/// Worker count used by the parallel kernels and the Monte Carlo driver.
/// Resolution order: NETCLUST_THREADS, then the explicit request, then the
/// OpenMP default.
int resolve_threads(int requested);

}  // namespace netclust::kernels
