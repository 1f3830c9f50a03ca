#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stkr/transform.hpp"

namespace stkr {

/// Finite input space of size N with uniform P_X and a fully known spectrum:
/// K(x, x') = sum_i lambda_i psi_i(x) psi_i(x'), columns of psi orthonormal
/// under <a, b> = (1/N) sum_x a(x) b(x).
struct SyntheticKernel {
  Eigen::MatrixXd psi;       // N x k
  Eigen::VectorXd lambda;    // k, descending, >= 0
  std::int64_t N = 0;

  /// Random orthonormal eigenfunctions: QR of a seeded Gaussian matrix,
  /// scaled by sqrt(N) so columns are P_X-orthonormal.
  static SyntheticKernel random(std::int64_t N, Eigen::VectorXd lambda, std::uint64_t seed);

  /// Exact K^p(x, x') = sum_i lambda_i^p psi_i(x) psi_i(x'), full N x N table.
  Eigen::MatrixXd kernel_power(int p) const;

  double kernel_entry(std::int64_t x, std::int64_t y) const;
  double kappa_sq() const;  // max_x K(x, x)
};

/// Ground truth for the iterative solvers: dense eigendecomposition of
/// G/(n+m), transformed spectrum, and the closed-form ridge solution.
struct OracleFit {
  Eigen::MatrixXd Gs;      // (n+m) x (n+m) transformed Gram, (n+m) U diag(s) U^T
  Eigen::MatrixXd alpha;   // n x C
  Eigen::MatrixXd scores;  // (n+m) x C, Gs[:, 0:n] alpha
};

/// pre: G.rows() <= 2000. s is applied to the empirical eigenvalues exactly
/// as a polynomial / rational function, including any negative ones.
OracleFit dense_stkr_oracle(const Eigen::MatrixXd& G, std::int64_t n,
                            const SpectralTransform& t, double beta_n,
                            const Eigen::MatrixXd& Y);

/// For each sample size: draws i.i.d. samples from uniform P_X, forms the
/// empirical p-th kernel power per its Gram-product estimator, and reports
/// max_{x, j} |Khat^p(x, x_j) - K^p(x, x_j)| over held-out queries, averaged
/// over trials. Returns (size, mean max deviation) rows.
std::vector<std::pair<std::int64_t, double>> approximation_decay(
    const SyntheticKernel& sk, const std::vector<std::int64_t>& sample_sizes, int p,
    int trials, std::uint64_t seed);

/// Fraction of trials where the top empirical eigenvalue of G/(n+m) stays
/// below lambda_1 + (kappa^2/sqrt(n+m)) (2 sqrt 2 + sqrt(19 log(2(n+m+1)/delta))).
double eigenvalue_concentration(const SyntheticKernel& sk, std::int64_t sample_size,
                                int trials, double delta, std::uint64_t seed);

/// Checks y^T L y = ||f||^2_HK - eta ||f||^2_PX on a weighted graph with
/// p.s.d. W and positive degrees, for `trials` random vectors u. Returns the
/// max relative discrepancy between the two sides.
double laplacian_identity_check(const Eigen::MatrixXd& W, double eta, int trials,
                                std::uint64_t seed);

}  // namespace stkr
