#include "stkr/stkr.hpp"

#include <cmath>

#include <Eigen/LU>

#include "stkr/rng.hpp"

namespace stkr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// u = (G_{Ks_hat,n} + n beta I_n) alpha, evaluated implicitly (Algorithm 1
// body). Also returns the line-4 vector v, which doubles as the polynomial
// path's inference cache.
struct PolyOperator {
  const SparseGram& gram;
  const PolyTransform& t;
  double beta_n;

  void apply(const MatrixXd& alpha, MatrixXd& u, MatrixXd& v) const {
    const auto n = gram.n;
    const auto size = gram.size();
    const double inv_size = 1.0 / static_cast<double>(size);
    const int q = t.degree();

    MatrixXd alpha_pad = MatrixXd::Zero(size, alpha.cols());
    alpha_pad.topRows(n) = alpha;
    const MatrixXd g_alpha = gram.G * alpha_pad;       // G_{n+m,n} alpha
    const MatrixXd alpha_tilde = g_alpha * inv_size;

    v = MatrixXd::Zero(size, alpha.cols());
    for (int p = q; p >= 2; --p) {
      if (p < q) v = (gram.G * v) * inv_size;
      v += t.coeffs[p - 1] * alpha_tilde;
    }
    u = t.coeffs[0] * g_alpha.topRows(n) +
        static_cast<double>(n) * beta_n * alpha;
    if (q >= 2) u += (gram.G * v).topRows(n);
  }
};

// u = M theta for M = (n+m) I~_n (G/(n+m))^r + n beta Q (Algorithm 2 body).
struct InverseOperator {
  const SparseGram& gram;
  const InverseTransform& t;
  double beta_n;

  void apply(const MatrixXd& theta, MatrixXd& u, MatrixXd& v) const {
    const auto n = gram.n;
    const auto size = gram.size();
    const double inv_size = 1.0 / static_cast<double>(size);
    const int q = t.degree();

    v = MatrixXd::Zero(size, theta.cols());
    for (int p = q - 1; p >= 0; --p) {
      if (p < q - 1) v = (gram.G * v) * inv_size;
      v += t.xi[p] * theta;
    }
    MatrixXd power = theta;
    for (int k = 0; k < t.r; ++k) power = (gram.G * power) * inv_size;
    u = static_cast<double>(n) * beta_n * v;
    u.topRows(n) += static_cast<double>(size) * power.topRows(n);
  }
};

// Per-class relative residuals; a zero-norm label column counts as converged
// when its residual is (absolutely) tiny.
bool all_converged(const MatrixXd& resid, const VectorXd& y_norms, double tol, double& worst) {
  worst = 0.0;
  bool ok = true;
  for (Eigen::Index c = 0; c < resid.cols(); ++c) {
    const double r = resid.col(c).norm();
    const double rel = y_norms[c] > 0.0 ? r / y_norms[c] : r;
    worst = std::max(worst, rel);
    if (y_norms[c] > 0.0 ? r >= tol * y_norms[c] : r >= 1e-300) ok = false;
  }
  return ok;
}

template <typename Op>
double power_iteration_norm(const Op& op, std::int64_t dim, int steps) {
  Rng rng(0x517cc1b727220a95ULL);
  MatrixXd x(dim, 1);
  for (std::int64_t i = 0; i < dim; ++i) x(i, 0) = rng.next_gaussian();
  x /= x.norm();
  MatrixXd u, v;
  double estimate = 0.0;
  for (int i = 0; i < steps; ++i) {
    op.apply(x, u, v);
    estimate = u.norm();
    if (estimate == 0.0) return 0.0;
    x = u / estimate;
  }
  return estimate;
}

void check_inputs(const SparseGram& gram, double beta_n, const MatrixXd& Y) {
  if (gram.n < 1) throw ValidationError("at least one labeled sample is required");
  if (beta_n <= 0.0) throw ValidationError("beta_n must be positive");
  if (Y.rows() != gram.n) throw ValidationError("label matrix rows must equal labeled count");
}

}  // namespace

StkrModel fit_direct(const SparseGram& gram, const PolyTransform& t, double beta_n,
                     const MatrixXd& Y) {
  check_inputs(gram, beta_n, Y);
  const auto n = gram.n;
  const auto size = gram.size();
  const double inv_size = 1.0 / static_cast<double>(size);
  const int q = t.degree();

  // Running product M = (G/(n+m))^{p-2} G_{n+m,n}.
  MatrixXd M(size, n);
  M.setZero();
  for (std::int64_t j = 0; j < n; ++j) M(j, j) = 1.0;
  M = gram.G * M;  // G_{n+m,n}

  MatrixXd A = static_cast<double>(n) * beta_n * MatrixXd::Identity(n, n) +
               t.coeffs[0] * M.topRows(n);
  for (int p = 2; p <= q; ++p) {
    const MatrixXd GM = gram.G * M;
    A += (t.coeffs[p - 1] * inv_size) * GM.topRows(n);
    M = GM * inv_size;
  }

  // The base Gram can be indefinite (normalized adjacency), so A is not
  // guaranteed s.p.d.; use a pivoted LU solve.
  StkrModel model;
  model.alpha = Eigen::PartialPivLU<MatrixXd>(A).solve(Y);

  // Inference cache v, identical to Algorithm 1 line 4 at convergence.
  MatrixXd alpha_pad = MatrixXd::Zero(size, Y.cols());
  alpha_pad.topRows(n) = model.alpha;
  const MatrixXd alpha_tilde = (gram.G * alpha_pad) * inv_size;
  MatrixXd v = MatrixXd::Zero(size, Y.cols());
  for (int p = q; p >= 2; --p) {
    if (p < q) v = (gram.G * v) * inv_size;
    v += t.coeffs[p - 1] * alpha_tilde;
  }

  model.transform = t;
  model.beta_n = beta_n;
  model.inverse_path = false;
  model.n = n;
  model.size = size;
  model.cache = std::move(v);
  model.iterations = 0;
  MatrixXd u, vv;
  PolyOperator op{gram, t, beta_n};
  op.apply(model.alpha, u, vv);
  VectorXd y_norms = Y.colwise().norm();
  all_converged(u - Y, y_norms, 0.0, model.residual);
  return model;
}

StkrModel fit_richardson_poly(const SparseGram& gram, const PolyTransform& t, double beta_n,
                              const MatrixXd& Y, const StkrOptions& opts) {
  check_inputs(gram, beta_n, Y);
  const PolyOperator op{gram, t, beta_n};
  const double gamma = opts.step > 0.0 ? opts.step : auto_step(gram, t, beta_n);
  const VectorXd y_norms = Y.colwise().norm();

  MatrixXd alpha = MatrixXd::Zero(gram.n, Y.cols());
  MatrixXd u, v;
  StkrModel model;
  model.transform = t;
  model.beta_n = beta_n;
  model.inverse_path = false;
  model.n = gram.n;
  model.size = gram.size();

  if (opts.fixed_iters >= 0) {
    for (std::int64_t it = 0; it < opts.fixed_iters; ++it) {
      op.apply(alpha, u, v);
      alpha -= gamma * (u - Y);
    }
    op.apply(alpha, u, v);  // refresh the cache so it matches alpha
    all_converged(u - Y, y_norms, 0.0, model.residual);
    model.iterations = opts.fixed_iters;
  } else {
    std::int64_t it = 0;
    for (;; ++it) {
      op.apply(alpha, u, v);
      if (all_converged(u - Y, y_norms, opts.tol, model.residual)) break;
      if (it >= opts.max_iters)
        throw ConvergenceError("Richardson (polynomial) did not converge in " +
                                   std::to_string(opts.max_iters) + " iterations",
                               model.residual);
      alpha -= gamma * (u - Y);
    }
    model.iterations = it;
  }
  model.alpha = std::move(alpha);
  model.cache = std::move(v);
  return model;
}

StkrModel fit_richardson_inverse(const SparseGram& gram, const InverseTransform& t,
                                 double beta_n, const MatrixXd& Y, const StkrOptions& opts) {
  check_inputs(gram, beta_n, Y);
  const InverseOperator op{gram, t, beta_n};
  const double gamma = opts.step > 0.0 ? opts.step : auto_step(gram, t, beta_n);
  const auto size = gram.size();
  const double inv_size = 1.0 / static_cast<double>(size);

  MatrixXd y_tilde = MatrixXd::Zero(size, Y.cols());
  y_tilde.topRows(gram.n) = Y;
  const VectorXd y_norms = Y.colwise().norm();

  MatrixXd theta = MatrixXd::Zero(size, Y.cols());
  MatrixXd u, v;
  StkrModel model;
  model.transform = t;
  model.beta_n = beta_n;
  model.inverse_path = true;
  model.n = gram.n;
  model.size = size;

  if (opts.fixed_iters >= 0) {
    for (std::int64_t it = 0; it < opts.fixed_iters; ++it) {
      op.apply(theta, u, v);
      theta -= gamma * (u - y_tilde);
    }
    op.apply(theta, u, v);
    all_converged(u - y_tilde, y_norms, 0.0, model.residual);
    model.iterations = opts.fixed_iters;
  } else {
    std::int64_t it = 0;
    for (;; ++it) {
      op.apply(theta, u, v);
      const MatrixXd a = u - y_tilde;
      theta -= gamma * a;  // the update precedes the check, as specified
      if (all_converged(a, y_norms, opts.tol, model.residual)) break;
      if (it >= opts.max_iters)
        throw ConvergenceError("Richardson (inverse) did not converge in " +
                                   std::to_string(opts.max_iters) + " iterations",
                               model.residual);
    }
    model.iterations = it + 1;
  }

  // w = (G/(n+m))^{r-1} theta, the O(n+m)-per-query inference cache.
  MatrixXd w = theta;
  for (int k = 0; k < t.r - 1; ++k) w = (gram.G * w) * inv_size;
  model.theta = std::move(theta);
  model.cache = std::move(w);
  return model;
}

VectorXd predict(const StkrModel& model, const VectorXd& row) {
  if (row.size() != model.size)
    throw ValidationError("kernel row length does not match the fitted sample count");
  if (model.inverse_path) return model.cache.transpose() * row;
  const double pi1 = std::get<PolyTransform>(model.transform).coeffs[0];
  VectorXd scores = model.cache.transpose() * row;
  scores += pi1 * (model.alpha.transpose() * row.head(model.n));
  return scores;
}

MatrixXd predict_visible(const StkrModel& model, const SparseGram& gram) {
  if (gram.size() != model.size || gram.n != model.n)
    throw ValidationError("Gram matrix does not match the fitted model");
  if (model.inverse_path) return gram.G * model.cache;
  const double pi1 = std::get<PolyTransform>(model.transform).coeffs[0];
  MatrixXd alpha_pad = MatrixXd::Zero(model.size, model.alpha.cols());
  alpha_pad.topRows(model.n) = model.alpha;
  return gram.G * (model.cache + pi1 * alpha_pad);
}

double auto_step(const SparseGram& gram, const SpectralTransform& t, double beta_n) {
  if (const auto* inv = std::get_if<InverseTransform>(&t)) {
    // The convergence analysis takes lambda with ||G_{K,n}||_2 <= n lambda and
    // needs gamma below 2 / (lambda_tilde_max + lambda_tilde_min) with
    // lambda_tilde_max <= n lambda^r + n beta rho_max; use the realized block
    // norm and fold in the regularization term so the step is safe for any
    // beta, not just beta = o(1).
    const double n = static_cast<double>(gram.n);
    struct BlockOp {
      SparseMat Gn;
      void apply(const MatrixXd& x, MatrixXd& u, MatrixXd&) const { u = Gn * x; }
    };
    const BlockOp block{gram.G.block(0, 0, gram.n, gram.n)};
    const double lambda = power_iteration_norm(block, gram.n, 50) / n;
    double rho_max = 0.0;
    for (int i = 0; i <= 1000; ++i)
      rho_max = std::max(rho_max, inv->rho(inv->lambda_max * i / 1000.0));
    const double denom = n * std::pow(lambda, inv->r) + n * beta_n * rho_max;
    return 1.0 / denom;
  }
  const auto& poly = std::get<PolyTransform>(t);
  const PolyOperator op{gram, poly, beta_n};
  const double norm = power_iteration_norm(op, gram.n, 50);
  if (norm <= 0.0) return 1.0 / (static_cast<double>(gram.n) * beta_n);
  return 1.0 / norm;
}

}  // namespace stkr
