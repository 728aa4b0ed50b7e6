#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>
#include <vector>

#include "netclust/graph.hpp"
#include "netclust/kernels.hpp"
#include "netclust/kmeans.hpp"

namespace netclust {

/// Smallest eigenpairs of the normalized Laplacian, eigenvalues ascending.
/// Column l of `eigenvectors` is the unit eigenvector of `eigenvalues[l]`.
/// Within a degenerate eigenspace the basis is arbitrary.
struct SpectrumReport {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  std::size_t n = 0;  ///< matrix dimension (graph node count)

  std::size_t count() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
  /// 1-based, as in lambda_1 <= lambda_2 <= ...
  double lambda(std::size_t k) const { return eigenvalues(static_cast<Eigen::Index>(k - 1)); }
};

/// Unit-norm spectral coordinates, one row per node.
struct Embedding {
  kernels::RowMatrix positions;
  /// Nodes whose first-L eigenvector entries are all (numerically) zero; their
  /// rows are left at the origin.
  std::vector<NodeId> zero_rows;
};

struct SpectrumOptions {
  /// Dense symmetric eigensolver up to this many nodes, Lanczos above.
  std::size_t dense_threshold = 2000;
  int lanczos_max_restarts = 60;
  double lanczos_tolerance = 1e-10;
};

/// Eigenvalues below this count as zero when counting components.
inline constexpr double kZeroEigenvalue = 1e-8;

/// I - D^{-1/2} A D^{-1/2}. Throws DomainError naming the first zero-degree node.
Eigen::MatrixXd normalized_laplacian(const Graph& g);
Eigen::SparseMatrix<double> normalized_laplacian_sparse(const Graph& g);

/// Smallest `k` eigenpairs (all of them when `k` is empty). Dense path for
/// n <= dense_threshold; above it `k` is required and a shift-invert Lanczos
/// solver is used, throwing NumericError with the iteration count when it
/// fails to converge.
SpectrumReport spectrum(const Graph& g, std::optional<std::size_t> k = std::nullopt,
                        const SpectrumOptions& options = {});

/// Shift-invert Lanczos with locking for the `k` smallest eigenpairs of the
/// sparse symmetric positive semidefinite matrix `laplacian`.
SpectrumReport lanczos_smallest(const Eigen::SparseMatrix<double>& laplacian, std::size_t k,
                                const SpectrumOptions& options = {});

/// Row i is (V_1i..V_Li) divided by its Euclidean norm.
Embedding spectral_embedding(const SpectrumReport& report, std::size_t L);

struct SpectralClustering {
  Partition partition;  ///< canonical: cluster 0 largest
  std::vector<NodeId> zero_rows;
  double wcss = 0.0;
};

/// Spectrum -> embedding -> k-means on a connected graph. Zero-norm rows are
/// left out of the k-means fit and attached to the nearest centroid after.
SpectralClustering spectral_cluster(const Graph& g, std::size_t L, std::uint64_t seed,
                                    const KMeansOptions& kmeans_options = {},
                                    const SpectrumOptions& spectrum_options = {});

/// Same, reusing an already computed spectrum holding at least L pairs.
SpectralClustering spectral_cluster(const SpectrumReport& report, std::size_t L, std::uint64_t seed,
                                    const KMeansOptions& kmeans_options = {});

}  // namespace netclust
