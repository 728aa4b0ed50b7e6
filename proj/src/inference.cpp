#include "netclust/inference.hpp"

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "netclust/error.hpp"
#include "netclust/kernels.hpp"

namespace netclust {

namespace {

constexpr double kSingularTolerance = 1e-12;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
}

kernels::RowMatrix deviations(const ClusterEstimates& est, const Eigen::VectorXd& theta_null) {
  if (static_cast<std::size_t>(theta_null.size()) != est.dim()) {
    throw InputError(fmt::format("null value has dimension {}, estimates have {}", theta_null.size(), est.dim()));
  }
  kernels::RowMatrix dev = est.estimates.rowwise() - theta_null.transpose();
  dev *= est.scale;
  return dev;
}

/// Inverse of (1/L) sum_l S_l S_l'; empty when singular. The middle matrix
/// does not change under sign flips.
std::optional<Eigen::MatrixXd> middle_inverse(const kernels::RowMatrix& dev) {
  const auto L = static_cast<double>(dev.rows());
  const Eigen::MatrixXd middle = dev.transpose() * dev / L;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(middle);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(top > 0.0) || eig.eigenvalues().minCoeff() <= kSingularTolerance * top) return std::nullopt;
  return eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

double scalar_mean(const MomentSample& values) {
  if (values.dim() != 1) throw InputError(fmt::format("t-test needs a scalar moment, got dimension {}", values.dim()));
  if (values.n() < 2) throw InputError("t-test needs at least two observations");
  return values.values.col(0).mean();
}

}  // namespace

MomentSample::MomentSample(Eigen::MatrixXd v) : values(std::move(v)) {
  if (!values.allFinite()) throw InputError("moment values must be finite");
}

MomentSample MomentSample::scalar(std::span<const double> v) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return MomentSample(std::move(m));
}

ClusterEstimates cluster_means(const MomentSample& values, const Partition& p, const std::vector<bool>& discarded,
                               const std::vector<bool>& include) {
  if (values.n() != p.num_nodes()) {
    throw InputError(fmt::format("{} moment rows for a partition of {} nodes", values.n(), p.num_nodes()));
  }
  if (!discarded.empty() && discarded.size() != p.num_clusters()) {
    throw InputError("discard flags do not match the cluster count");
  }
  if (!include.empty() && include.size() != values.n()) throw InputError("include mask does not match the node count");

  const auto d = static_cast<Eigen::Index>(values.dim());
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.num_clusters()), d);
  std::vector<std::size_t> counts(p.num_clusters(), 0);
  std::size_t used = 0;
  for (NodeId i = 0; i < p.num_nodes(); ++i) {
    if (!include.empty() && !include[i]) continue;
    const auto l = p.label(i);
    if (!discarded.empty() && discarded[l]) continue;
    sums.row(l) += values.values.row(i);
    ++counts[l];
    ++used;
  }

  ClusterEstimates out;
  for (std::uint32_t l = 0; l < p.num_clusters(); ++l) {
    if (!discarded.empty() && discarded[l]) continue;
    if (counts[l] == 0) throw DomainError(fmt::format("retained cluster {} has no usable observations", l));
    out.cluster.push_back(l);
    out.sizes.push_back(counts[l]);
  }
  out.estimates.resize(static_cast<Eigen::Index>(out.cluster.size()), d);
  for (std::size_t r = 0; r < out.cluster.size(); ++r) {
    out.estimates.row(static_cast<Eigen::Index>(r)) =
        sums.row(out.cluster[r]) / static_cast<double>(counts[out.cluster[r]]);
  }
  out.scale = std::sqrt(static_cast<double>(used));
  return out;
}

double wald_statistic(const ClusterEstimates& est, const Eigen::VectorXd& theta_null, std::span<const int> signs) {
  if (est.L() < 2) throw InputError("Wald statistic needs at least two clusters");
  if (signs.size() != est.L()) throw InputError("sign vector length differs from the cluster count");
  kernels::RowMatrix dev = deviations(est, theta_null);
  for (std::size_t l = 0; l < signs.size(); ++l) {
    if (signs[l] != 1 && signs[l] != -1) throw InputError("signs must be +1 or -1");
    dev.row(static_cast<Eigen::Index>(l)) *= signs[l];
  }
  const auto minv = middle_inverse(dev);
  if (!minv) throw NumericError("Wald middle matrix is singular");
  const Eigen::VectorXd sum = dev.colwise().sum().transpose();
  return sum.dot(*minv * sum) / static_cast<double>(est.L());
}

std::size_t randomization_rank(std::size_t L, double alpha) {
  check_alpha(alpha);
  const double total = std::ldexp(1.0, static_cast<int>(L));
  // Guard against 2^L (1 - alpha) landing a hair above an integer.
  const auto k = static_cast<std::size_t>(std::ceil(total * (1.0 - alpha) - 1e-9));
  return std::clamp<std::size_t>(k, 1, static_cast<std::size_t>(total));
}

TestResult randomization_test(const ClusterEstimates& est, const Eigen::VectorXd& theta_null, double alpha,
                              bool parallel) {
  check_alpha(alpha);
  const std::size_t L = est.L();
  if (L < 2) throw InputError(fmt::format("randomization test needs at least 2 clusters, got {}", L));
  if (L > kMaxRandomizationClusters) {
    throw CapacityError(fmt::format("randomization test enumerates 2^L sign vectors; L={} exceeds the cap of {}, "
                                    "use fewer clusters",
                                    L, kMaxRandomizationClusters));
  }
  TestResult out;
  out.alpha = alpha;
  out.method = "rand";
  const std::size_t k = randomization_rank(L, alpha);
  out.details = {{"L", static_cast<double>(L)}, {"k", static_cast<double>(k)}};

  const kernels::RowMatrix dev = deviations(est, theta_null);
  const auto minv = middle_inverse(dev);
  if (!minv) {
    out.statistic = out.critical_value = std::numeric_limits<double>::infinity();
    out.reject = false;
    out.details["singular_middle"] = 1.0;
    return out;
  }
  std::vector<double> stats =
      parallel ? kernels::sign_flip_statistics(dev, *minv) : kernels::serial::sign_flip_statistics(dev, *minv);
  out.statistic = stats[0];
  // T^(k) is the k-th order statistic in ascending order, so k = 2^L is the
  // maximum and the test can never reject there.
  std::nth_element(stats.begin(), stats.begin() + static_cast<std::ptrdiff_t>(k - 1), stats.end());
  out.critical_value = stats[k - 1];
  out.reject = out.statistic > out.critical_value;
  return out;
}

HacVariance hac_variance(const MomentSample& values, const Graph& g, std::size_t bandwidth, bool parallel) {
  if (values.n() != g.num_nodes()) {
    throw InputError(fmt::format("{} moment rows for a graph of {} nodes", values.n(), g.num_nodes()));
  }
  if (values.n() == 0) throw InputError("HAC variance of an empty sample");
  const Eigen::Index n = values.values.rows(), d = values.values.cols();
  // Plain node-order sums: at bandwidth 0 the result is bit-identical to the
  // textbook outer-product average.
  kernels::RowMatrix centered(n, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += values.values(i, a);
    const double mean = s / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) centered(i, a) = values.values(i, a) - mean;
  }
  const kernels::RowMatrix sums = parallel ? kernels::neighborhood_row_sums(g, centered, bandwidth)
                                           : kernels::serial::neighborhood_row_sums(g, centered, bandwidth);
  HacVariance out;
  out.matrix = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) out.matrix(a, b) += centered(i, a) * sums(i, b);
    }
  }
  out.matrix /= static_cast<double>(n);
  // Symmetric in exact arithmetic; remove rounding asymmetry before the PSD check.
  out.matrix = (0.5 * (out.matrix + out.matrix.transpose())).eval();
  if (bandwidth == 0) return out;  // Gram matrix, PSD up to rounding
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.matrix);
  if (eig.eigenvalues().minCoeff() < 0.0) {
    out.repaired = true;
    out.matrix = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).asDiagonal() * eig.eigenvectors().transpose();
  }
  return out;
}

std::size_t default_bandwidth(const Graph& g) {
  if (g.num_nodes() < 2) return 1;
  const double ratio = std::log(static_cast<double>(g.num_nodes())) / std::log(std::max(2.0, average_degree(g)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(ratio)));
}

double normal_critical_value(double alpha) {
  check_alpha(alpha);
  return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
}

TestResult hac_ttest(const MomentSample& values, const Graph& g, double theta_null, double alpha,
                     std::optional<std::size_t> bandwidth) {
  const double mean = scalar_mean(values);
  const std::size_t b = bandwidth.value_or(default_bandwidth(g));
  const HacVariance v = hac_variance(values, g, b);
  const double var = v.matrix(0, 0);
  if (!(var > 0.0)) throw NumericError("HAC variance is not positive");
  TestResult out;
  out.alpha = alpha;
  out.method = "hac";
  out.statistic = std::sqrt(static_cast<double>(values.n())) * (mean - theta_null) / std::sqrt(var);
  out.critical_value = normal_critical_value(alpha);
  out.reject = std::abs(out.statistic) > out.critical_value;
  out.details = {{"bandwidth", static_cast<double>(b)}, {"psd_repaired", v.repaired ? 1.0 : 0.0}};
  return out;
}

TestResult iid_ttest(const MomentSample& values, double theta_null, double alpha) {
  const double mean = scalar_mean(values);
  const auto n = static_cast<double>(values.n());
  const double var = (values.values.col(0).array() - mean).square().sum() / (n - 1.0);
  if (!(var > 0.0)) throw NumericError("sample variance is zero");
  TestResult out;
  out.alpha = alpha;
  out.method = "iid";
  out.statistic = std::sqrt(n) * (mean - theta_null) / std::sqrt(var);
  out.critical_value = normal_critical_value(alpha);
  out.reject = std::abs(out.statistic) > out.critical_value;
  out.details = {{"n", n}};
  return out;
}

}  // namespace netclust
