#include "netclust/spectral.hpp"

#include <fmt/format.h>
#include <lapacke.h>

#include <cmath>
#include <limits>

#include "netclust/error.hpp"

namespace netclust {

namespace {

std::vector<double> inv_sqrt_degrees(const Graph& g) {
  std::vector<double> out(g.num_nodes());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    const double d = g.degrees()[i];
    if (!(d > 0.0)) {
      throw DomainError(fmt::format("normalized Laplacian undefined: node {} has zero degree", i));
    }
    out[i] = 1.0 / std::sqrt(d);
  }
  return out;
}

SpectrumReport dense_spectrum(const Graph& g, std::size_t k) {
  const auto n = static_cast<lapack_int>(g.num_nodes());
  Eigen::MatrixXd lap = normalized_laplacian(g);
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(k));
  std::vector<lapack_int> support(2 * k);
  lapack_int found = 0;
  const bool all = static_cast<lapack_int>(k) == n;
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', all ? 'A' : 'I', 'L', n, lap.data(), n, 0.0, 0.0, 1,
                                         static_cast<lapack_int>(k), 0.0, &found, w.data(), z.data(), n,
                                         support.data());
  if (info != 0 || found != static_cast<lapack_int>(k)) {
    throw NumericError(fmt::format("dense symmetric eigensolver failed (info={}, found {} of {})", info, found, k));
  }
  SpectrumReport report;
  report.n = g.num_nodes();
  report.eigenvalues = w.head(static_cast<Eigen::Index>(k));
  report.eigenvectors = std::move(z);
  return report;
}

}  // namespace

Eigen::MatrixXd normalized_laplacian(const Graph& g) {
  const auto s = inv_sqrt_degrees(g);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    auto nb = g.neighbors(i);
    auto wt = g.weights(i);
    for (std::size_t e = 0; e < nb.size(); ++e) lap(i, nb[e]) = -wt[e] * s[i] * s[nb[e]];
  }
  return lap;
}

Eigen::SparseMatrix<double> normalized_laplacian_sparse(const Graph& g) {
  const auto s = inv_sqrt_degrees(g);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.num_nodes() + 2 * g.num_edges());
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    trips.emplace_back(i, i, 1.0);
    auto nb = g.neighbors(i);
    auto wt = g.weights(i);
    for (std::size_t e = 0; e < nb.size(); ++e) trips.emplace_back(i, nb[e], -wt[e] * s[i] * s[nb[e]]);
  }
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(trips.begin(), trips.end());
  return lap;
}

SpectrumReport spectrum(const Graph& g, std::optional<std::size_t> k, const SpectrumOptions& options) {
  const std::size_t n = g.num_nodes();
  if (n == 0) throw InputError("spectrum of an empty graph");
  if (k && (*k < 1 || *k > n)) throw InputError(fmt::format("spectrum: k={} outside 1..{}", *k, n));
  if (n <= options.dense_threshold) return dense_spectrum(g, k.value_or(n));
  if (!k) throw InputError(fmt::format("spectrum: n={} exceeds the dense threshold; pass k", n));
  return lanczos_smallest(normalized_laplacian_sparse(g), *k, options);
}

Embedding spectral_embedding(const SpectrumReport& report, std::size_t L) {
  if (L < 1 || L > report.count()) {
    throw InputError(fmt::format("embedding dimension {} outside 1..{}", L, report.count()));
  }
  Embedding out;
  const auto n = report.eigenvectors.rows();
  const auto dim = static_cast<Eigen::Index>(L);
  out.positions = report.eigenvectors.leftCols(dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = out.positions.row(i).norm();
    if (norm <= 1e-12) {
      out.positions.row(i).setZero();
      out.zero_rows.push_back(static_cast<NodeId>(i));
    } else {
      out.positions.row(i) /= norm;
    }
  }
  return out;
}

SpectralClustering spectral_cluster(const SpectrumReport& report, std::size_t L, std::uint64_t seed,
                                    const KMeansOptions& kmeans_options) {
  const Embedding emb = spectral_embedding(report, L);
  const auto n = static_cast<std::size_t>(emb.positions.rows());
  SpectralClustering out;
  out.zero_rows = emb.zero_rows;

  std::vector<char> is_zero(n, 0);
  for (NodeId i : emb.zero_rows) is_zero[i] = 1;
  kernels::RowMatrix fit_points(static_cast<Eigen::Index>(n - emb.zero_rows.size()), emb.positions.cols());
  std::vector<NodeId> fit_nodes;
  fit_nodes.reserve(n - emb.zero_rows.size());
  for (NodeId i = 0; i < n; ++i) {
    if (is_zero[i]) continue;
    fit_points.row(static_cast<Eigen::Index>(fit_nodes.size())) = emb.positions.row(i);
    fit_nodes.push_back(i);
  }

  const KMeansResult km = kmeans(fit_points, L, seed, kmeans_options);
  std::vector<std::uint32_t> labels(n, 0);
  for (std::size_t k = 0; k < fit_nodes.size(); ++k) labels[fit_nodes[k]] = km.partition.label(static_cast<NodeId>(k));
  for (NodeId i : emb.zero_rows) {
    Eigen::Index best = 0;
    km.centroids.rowwise().squaredNorm().minCoeff(&best);
    labels[i] = static_cast<std::uint32_t>(best);
  }
  out.partition = Partition::canonical(labels);
  out.wcss = km.wcss;
  return out;
}

SpectralClustering spectral_cluster(const Graph& g, std::size_t L, std::uint64_t seed,
                                    const KMeansOptions& kmeans_options, const SpectrumOptions& spectrum_options) {
  if (L < 1) throw InputError("spectral clustering needs L >= 1");
  if (L > g.num_nodes()) throw InputError("spectral clustering: L exceeds node count");
  return spectral_cluster(spectrum(g, L, spectrum_options), L, seed, kmeans_options);
}

}  // namespace netclust
