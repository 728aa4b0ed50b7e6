#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "netclust/error.hpp"
#include "netclust/spectral.hpp"

namespace netclust {

namespace {

// Shift keeping L + shift*I positive definite for a singular Laplacian.
constexpr double kShift = 1e-3;

struct RitzPair {
  double lambda;
  Eigen::VectorXd vector;
  double residual;
};

class ShiftInvertLanczos {
 public:
  ShiftInvertLanczos(const Eigen::SparseMatrix<double>& lap, const SpectrumOptions& opt) : lap_(lap), opt_(opt) {
    Eigen::SparseMatrix<double> shifted = lap;
    for (Eigen::Index i = 0; i < lap.rows(); ++i) shifted.coeffRef(i, i) += kShift;
    solver_.compute(shifted);
    if (solver_.info() != Eigen::Success) throw NumericError("Lanczos: factorization of shifted Laplacian failed");
  }

  SpectrumReport solve(std::size_t k) {
    const auto n = static_cast<std::size_t>(lap_.rows());
    int restarts = 0;
    while (locked_.size() < k) {
      if (restarts++ >= opt_.lanczos_max_restarts) fail(k);
      const std::size_t want = k - locked_.size();
      auto ritz = krylov_pass(std::min(n - locked_.size(), std::max<std::size_t>(2 * want + 20, 40)), restarts);
      std::size_t added = 0;
      for (auto& r : ritz) {
        if (r.residual > opt_.lanczos_tolerance) break;
        locked_.push_back(std::move(r));
        if (++added == want) break;
      }
    }
    // A single start vector can miss part of a degenerate eigenspace; keep
    // searching the complement until nothing below the locked set remains.
    while (locked_.size() < n) {
      if (restarts++ >= opt_.lanczos_max_restarts) fail(k);
      auto ritz = krylov_pass(std::min(n - locked_.size(), std::size_t{40}), restarts);
      if (ritz.empty() || ritz.front().residual > opt_.lanczos_tolerance) continue;
      std::vector<double> values;
      for (const auto& r : locked_) values.push_back(r.lambda);
      std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
      if (ritz.front().lambda >= values[k - 1] - opt_.lanczos_tolerance) break;
      locked_.push_back(std::move(ritz.front()));
    }

    std::sort(locked_.begin(), locked_.end(), [](auto& a, auto& b) { return a.lambda < b.lambda; });
    SpectrumReport report;
    report.n = n;
    report.eigenvalues.resize(static_cast<Eigen::Index>(k));
    report.eigenvectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
      report.eigenvalues(static_cast<Eigen::Index>(j)) = locked_[j].lambda;
      report.eigenvectors.col(static_cast<Eigen::Index>(j)) = locked_[j].vector;
    }
    return report;
  }

 private:
  [[noreturn]] void fail(std::size_t k) const {
    throw NumericError(fmt::format("Lanczos did not converge: {} of {} eigenpairs after {} iterations", locked_.size(),
                                   k, iterations_));
  }

  void deflate(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) const {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& r : locked_) v -= r.vector.dot(v) * r.vector;
      for (const auto& b : basis) v -= b.dot(v) * b;
    }
  }

  /// One Lanczos run of at most `m` steps on (L + shift I)^{-1}, restricted to
  /// the complement of the locked vectors. Returns Ritz pairs sorted by
  /// ascending Laplacian eigenvalue.
  std::vector<RitzPair> krylov_pass(std::size_t m, int pass) {
    const auto n = lap_.rows();
    std::mt19937_64 rng(0x5eedULL + static_cast<std::uint64_t>(pass));
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    std::vector<Eigen::VectorXd> basis;
    deflate(v, basis);
    if (v.norm() == 0.0) return {};
    v.normalize();

    std::vector<double> alpha, beta;
    basis.push_back(v);
    for (std::size_t j = 0; j < m; ++j) {
      ++iterations_;
      Eigen::VectorXd w = solver_.solve(basis.back());
      alpha.push_back(basis.back().dot(w));
      deflate(w, basis);
      const double b = w.norm();
      if (j + 1 == m || b < 1e-12) break;
      beta.push_back(b);
      basis.push_back(w / b);
    }

    const auto steps = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(steps, steps);
    for (Eigen::Index j = 0; j < steps; ++j) {
      t(j, j) = alpha[static_cast<std::size_t>(j)];
      if (j + 1 < steps) t(j, j + 1) = t(j + 1, j) = beta[static_cast<std::size_t>(j)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    std::vector<RitzPair> out;
    // Largest eigenvalues of the inverse first = smallest Laplacian eigenvalues.
    for (Eigen::Index c = steps - 1; c >= 0; --c) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
      for (Eigen::Index j = 0; j < steps; ++j) x += eig.eigenvectors()(j, c) * basis[static_cast<std::size_t>(j)];
      deflate(x, {});
      x.normalize();
      Eigen::VectorXd lx = lap_ * x;
      const double lambda = x.dot(lx);
      out.push_back({lambda, x, (lx - lambda * x).norm()});
    }
    std::stable_sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.lambda < b.lambda; });
    return out;
  }

  const Eigen::SparseMatrix<double>& lap_;
  SpectrumOptions opt_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  std::vector<RitzPair> locked_;
  std::size_t iterations_ = 0;
};

}  // namespace

SpectrumReport lanczos_smallest(const Eigen::SparseMatrix<double>& laplacian, std::size_t k,
                                const SpectrumOptions& options) {
  if (k < 1 || k > static_cast<std::size_t>(laplacian.rows())) {
    throw InputError(fmt::format("Lanczos: k={} outside 1..{}", k, laplacian.rows()));
  }
  ShiftInvertLanczos solver(laplacian, options);
  return solver.solve(k);
}

}  // namespace netclust
