#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netclust/graph.hpp"

namespace netclust {

/// Per-node moment values g(W_i, theta), one row per node.
struct MomentSample {
  Eigen::MatrixXd values;  ///< n x d

  MomentSample() = default;
  explicit MomentSample(Eigen::MatrixXd v);
  static MomentSample scalar(std::span<const double> v);

  std::size_t n() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
};

/// Within-cluster estimates for the retained clusters.
struct ClusterEstimates {
  Eigen::MatrixXd estimates;           ///< L x d
  std::vector<std::size_t> sizes;      ///< observations behind each row
  std::vector<std::uint32_t> cluster;  ///< partition label of each row
  double scale = 1.0;                  ///< sqrt(n), n = observations used overall

  std::size_t L() const { return static_cast<std::size_t>(estimates.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(estimates.cols()); }
};

struct TestResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  bool reject = false;
  double alpha = 0.05;
  std::string method;
  std::map<std::string, double> details;
};

constexpr std::size_t kMaxRandomizationClusters = 20;

/// Sample mean of each retained cluster. `discarded` flags clusters to skip
/// (empty = keep all); `include` masks nodes out (empty = all nodes), e.g.
/// isolates under the IPW estimator.
ClusterEstimates cluster_means(const MomentSample& values, const Partition& p, const std::vector<bool>& discarded = {},
                               const std::vector<bool>& include = {});

/// Wald statistic of the sign-flipped deviations S_l = scale * pi_l * (theta_l - theta_null).
/// Throws NumericError when the middle matrix is singular.
double wald_statistic(const ClusterEstimates& est, const Eigen::VectorXd& theta_null, std::span<const int> signs);

/// k = ceil(2^L (1 - alpha)).
std::size_t randomization_rank(std::size_t L, double alpha);

/// Sign-flip randomization test over all 2^L sign vectors: rejects when the
/// observed statistic strictly exceeds the k-th smallest of the 2^L flipped
/// statistics. A singular middle matrix makes every statistic +inf and the
/// test does not reject.
TestResult randomization_test(const ClusterEstimates& est, const Eigen::VectorXd& theta_null, double alpha,
                              bool parallel = true);

struct HacVariance {
  Eigen::MatrixXd matrix;  ///< d x d
  bool repaired = false;   ///< negative eigenvalues were clipped to zero
};

/// Network HAC variance with a uniform kernel over path distance <= bandwidth,
/// demeaned at the full-sample mean.
HacVariance hac_variance(const MomentSample& values, const Graph& g, std::size_t bandwidth, bool parallel = true);

/// max(1, floor(log n / log(max(2, average degree)))).
std::size_t default_bandwidth(const Graph& g);

/// Two-sided t-test of a scalar mean with the network HAC variance.
TestResult hac_ttest(const MomentSample& values, const Graph& g, double theta_null, double alpha,
                     std::optional<std::size_t> bandwidth = std::nullopt);

/// Two-sided t-test of a scalar mean with i.i.d. standard errors.
TestResult iid_ttest(const MomentSample& values, double theta_null, double alpha);

/// Two-sided standard normal critical value z_{1 - alpha/2}.
double normal_critical_value(double alpha);

}  // namespace netclust
