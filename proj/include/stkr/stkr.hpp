#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "stkr/kernel.hpp"
#include "stkr/transform.hpp"

namespace stkr {

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct StkrOptions {
  double tol = 1e-6;             // relative residual ||u - y|| / ||y||
  std::int64_t max_iters = 10000;
  /// When >= 0, run exactly this many Richardson steps and skip the
  /// tolerance check (early stopping as a regularizer).
  std::int64_t fixed_iters = -1;
  double step = 0.0;             // <= 0 selects the automatic step size
};

/// Fitted STKR state. Polynomial / direct path stores alpha (n x C) plus the
/// inference vector v; the inverse path stores theta ((n+m) x C) plus
/// w = (G/(n+m))^{r-1} theta. Predictions need only the cached vectors and a
/// base-kernel row, so each query costs O(n+m).
struct StkrModel {
  SpectralTransform transform = PolyTransform::monomial(1);
  double beta_n = 0.0;
  bool inverse_path = false;
  std::int64_t n = 0;
  std::int64_t size = 0;          // n + m
  Eigen::MatrixXd alpha;          // n x C (polynomial / direct path)
  Eigen::MatrixXd theta;          // (n+m) x C (inverse path)
  Eigen::MatrixXd cache;          // v or w, (n+m) x C
  double residual = 0.0;          // final max per-class relative residual
  std::int64_t iterations = 0;
};

/// Direct solve: assembles A = n beta I + pi_1 G_n + sum_{p>=2} pi_p/(n+m)
/// G_{n+m,n}^T (G/(n+m))^{p-2} G_{n+m,n} by the running-product recursion,
/// then factorizes once for all class columns.
StkrModel fit_direct(const SparseGram& gram, const PolyTransform& t, double beta_n,
                     const Eigen::MatrixXd& Y);

/// Richardson iteration on the implicit operator; never materializes the
/// transformed Gram matrix.
StkrModel fit_richardson_poly(const SparseGram& gram, const PolyTransform& t, double beta_n,
                              const Eigen::MatrixXd& Y, const StkrOptions& opts = {});

/// Richardson iteration for transforms given through their reciprocal form.
StkrModel fit_richardson_inverse(const SparseGram& gram, const InverseTransform& t,
                                 double beta_n, const Eigen::MatrixXd& Y,
                                 const StkrOptions& opts = {});

/// Scores for one query given its base-kernel row v_K(x) of length n+m.
Eigen::VectorXd predict(const StkrModel& model, const Eigen::VectorXd& row);

/// Scores for every visible sample (rows of the result); batches the
/// Gram-vector products instead of materializing kernel rows one by one.
Eigen::MatrixXd predict_visible(const StkrModel& model, const SparseGram& gram);

/// Step size. Inverse path: 1 / (n lambda^r + n beta_n rho_max) with
/// lambda = ||G_{K,n}||_2 / n, the quantity the convergence analysis actually
/// bounds; the extra regularization term keeps the iteration contractive for
/// large beta_n too. Polynomial path: 1 / ||A||_2 with the norm estimated by
/// 50 power-iteration steps on the implicit operator.
double auto_step(const SparseGram& gram, const SpectralTransform& t, double beta_n);

}  // namespace stkr
