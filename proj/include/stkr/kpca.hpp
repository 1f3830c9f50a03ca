#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "stkr/kernel.hpp"

namespace stkr {

/// Top-d kernel PCA of the unlabeled Gram block G_{K,m}. Column i of V holds
/// v_i with <v_i, v_j> = delta_ij / (m lambda_i), so the encoder features
/// psi_i(x) = sum_j V(j,i) K(x_{n+j}, x) are orthonormal in the RKHS.
struct KpcaModel {
  Eigen::MatrixXd V;             // m x d
  Eigen::VectorXd eigenvalues;   // lambda_i of G_{K,m}/m, descending
  std::int64_t n = 0;
  std::int64_t m = 0;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
};

/// Pretrains on the unlabeled block only. Eigenpairs whose eigenvalue falls
/// below 1e-10 * lambda_1 are inadmissible; when strict (the default),
/// requesting more components than are admissible (or d > m) is a rank
/// error, otherwise the model is truncated to what the spectrum supports.
/// Uses a dense eigensolver for m <= 4000 and Lanczos with full
/// reorthogonalization above.
KpcaModel fit_kpca(const SparseGram& gram, int d, bool strict = true);

/// Features of a query given its base-kernel row v_K(x) of length n+m.
Eigen::VectorXd kpca_features(const KpcaModel& model, const Eigen::VectorXd& row);

/// Features of every visible sample, one row per sample ((n+m) x d).
Eigen::MatrixXd kpca_features_visible(const KpcaModel& model, const SparseGram& gram);

/// Ridge probe on top of the encoder: W = (Psi Psi^T + n beta I_d)^{-1} Psi Y
/// with Psi = features of the labeled samples (d x n). No bias term.
/// psi_train: n x d feature rows; returns W (d x C); scores = features * W.
Eigen::MatrixXd fit_probe(const Eigen::MatrixXd& psi_train, const Eigen::MatrixXd& Y,
                          double beta_n);

}  // namespace stkr
