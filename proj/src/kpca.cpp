#include "stkr/kpca.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "stkr/rng.hpp"

namespace stkr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Largest eigenpairs of the symmetric operator x -> A x via Lanczos with full
// reorthogonalization and thick restarts. Returns (values desc, vectors).
template <typename MatVec>
std::pair<VectorXd, MatrixXd> lanczos_topk(const MatVec& matvec, std::int64_t dim, int k,
                                           double rel_tol) {
  const int ncv = static_cast<int>(std::min<std::int64_t>(dim, std::max(2 * k + 20, 60)));
  MatrixXd basis(dim, ncv + 1);
  VectorXd alpha(ncv), beta(ncv);

  Rng rng(0x9e3779b97f4a7c15ULL);
  VectorXd q(dim);
  for (std::int64_t i = 0; i < dim; ++i) q[i] = rng.next_gaussian();
  q /= q.norm();

  int locked = 0;  // columns [0, locked) hold converged Ritz vectors
  MatrixXd locked_vecs(dim, k);
  VectorXd locked_vals(k);

  const int max_restarts = 400;
  for (int restart = 0; restart < max_restarts; ++restart) {
    // Lanczos sweep in the complement of the locked subspace.
    basis.col(0) = q;
    int steps = 0;
    for (int j = 0; j < ncv; ++j) {
      VectorXd w = matvec(basis.col(j));
      alpha[j] = basis.col(j).dot(w);
      w -= alpha[j] * basis.col(j);
      if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {  // full reorthogonalization
        for (int i = 0; i < locked; ++i) w -= locked_vecs.col(i).dot(w) * locked_vecs.col(i);
        for (int i = 0; i <= j; ++i) w -= basis.col(i).dot(w) * basis.col(i);
      }
      beta[j] = w.norm();
      steps = j + 1;
      if (beta[j] < 1e-14) break;  // invariant subspace exhausted
      basis.col(j + 1) = w / beta[j];
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
    MatrixXd T = MatrixXd::Zero(steps, steps);
    for (int i = 0; i < steps; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < steps) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    tri.compute(T);
    const VectorXd& ritz_vals = tri.eigenvalues();   // ascending
    const MatrixXd& ritz_vecs = tri.eigenvectors();

    const double scale = std::max(std::abs(ritz_vals[steps - 1]),
                                  locked > 0 ? std::abs(locked_vals[0]) : 0.0);
    const double last_beta = beta[steps - 1];

    // Lock converged Ritz pairs, largest first.
    int next_col = -1;  // largest unconverged Ritz pair, the restart direction
    for (int j = steps - 1; j >= 0 && locked < k; --j) {
      const double resid = std::abs(last_beta * ritz_vecs(steps - 1, j));
      if (resid <= rel_tol * std::max(scale, 1e-300) || last_beta < 1e-14) {
        VectorXd y = basis.leftCols(steps) * ritz_vecs.col(j);
        for (int i = 0; i < locked; ++i) y -= locked_vecs.col(i).dot(y) * locked_vecs.col(i);
        const double ynorm = y.norm();
        if (ynorm < 1e-10) continue;
        locked_vecs.col(locked) = y / ynorm;
        locked_vals[locked] = ritz_vals[j];
        ++locked;
      } else {
        next_col = j;
        break;  // everything below is less converged
      }
    }
    if (locked >= k || locked >= dim) break;

    // Restart from the best unconverged Ritz vector so progress carries over
    // between sweeps; fall back to fresh noise only if it degenerates.
    bool restarted = false;
    if (next_col >= 0) {
      VectorXd y = basis.leftCols(steps) * ritz_vecs.col(next_col);
      for (int i = 0; i < locked; ++i) y -= locked_vecs.col(i).dot(y) * locked_vecs.col(i);
      if (y.norm() > 1e-10) {
        q = y / y.norm();
        restarted = true;
      }
    }
    if (!restarted) {
      for (std::int64_t i = 0; i < dim; ++i) q[i] = rng.next_gaussian();
      for (int i = 0; i < locked; ++i) q -= locked_vecs.col(i).dot(q) * locked_vecs.col(i);
      q /= q.norm();
    }
  }

  // Sort locked pairs descending.
  std::vector<int> order(locked);
  for (int i = 0; i < locked; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return locked_vals[a] > locked_vals[b]; });
  VectorXd vals(locked);
  MatrixXd vecs(dim, locked);
  for (int i = 0; i < locked; ++i) {
    vals[i] = locked_vals[order[i]];
    vecs.col(i) = locked_vecs.col(order[i]);
  }
  return {vals, vecs};
}

}  // namespace

KpcaModel fit_kpca(const SparseGram& gram, int d, bool strict) {
  if (d < 1) throw ValidationError("kernel PCA needs d >= 1");
  const std::int64_t m = gram.m;
  if (m < 1) throw ValidationError("kernel PCA needs at least one unlabeled sample");
  if (strict && d > m)
    throw ValidationError("kernel PCA rank error: d exceeds the unlabeled count");
  const int want = static_cast<int>(std::min<std::int64_t>(d, m));

  SparseMat Gm = gram.G.block(gram.n, gram.n, m, m);
  const double inv_m = 1.0 / static_cast<double>(m);

  VectorXd vals;
  MatrixXd vecs;
  if (m <= 4000) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> solver(MatrixXd(Gm) * inv_m);
    if (solver.info() != Eigen::Success)
      throw ValidationError("kernel PCA eigendecomposition failed");
    vals.resize(want);
    vecs.resize(m, want);
    for (int i = 0; i < want; ++i) {  // ascending -> descending
      vals[i] = solver.eigenvalues()[m - 1 - i];
      vecs.col(i) = solver.eigenvectors().col(m - 1 - i);
    }
  } else {
    auto matvec = [&](const VectorXd& x) -> VectorXd { return (Gm * x) * inv_m; };
    std::tie(vals, vecs) = lanczos_topk(matvec, m, want, 1e-8);
  }

  // Keep strictly positive directions; tiny eigenvalues would blow up the
  // 1/sqrt(m lambda) scaling.
  int kept = 0;
  const double floor = vals.size() > 0 ? 1e-10 * std::max(vals[0], 0.0) : 0.0;
  while (kept < vals.size() && vals[kept] > floor && vals[kept] > 0.0) ++kept;
  if (kept == 0) throw ValidationError("unlabeled Gram block has no positive spectrum");
  if (strict && kept < want)
    throw ValidationError("kernel PCA rank error: only " + std::to_string(kept) +
                          " admissible eigenvalues for d = " + std::to_string(d));

  KpcaModel model;
  model.n = gram.n;
  model.m = m;
  model.eigenvalues = vals.head(kept);
  model.V.resize(m, kept);
  for (int i = 0; i < kept; ++i)
    model.V.col(i) = vecs.col(i) / std::sqrt(static_cast<double>(m) * vals[i]);
  return model;
}

Eigen::VectorXd kpca_features(const KpcaModel& model, const Eigen::VectorXd& row) {
  if (row.size() != model.n + model.m)
    throw ValidationError("kernel row length does not match the fitted sample count");
  return model.V.transpose() * row.tail(model.m);
}

Eigen::MatrixXd kpca_features_visible(const KpcaModel& model, const SparseGram& gram) {
  if (gram.size() != model.n + model.m)
    throw ValidationError("Gram matrix does not match the fitted encoder");
  // Row i of the result is psi(x_i); K columns for the unlabeled block.
  return (gram.G.middleCols(model.n, model.m) * model.V).eval();
}

Eigen::MatrixXd fit_probe(const Eigen::MatrixXd& psi_train, const Eigen::MatrixXd& Y,
                          double beta_n) {
  if (psi_train.rows() != Y.rows())
    throw ValidationError("feature rows must match label rows");
  if (beta_n <= 0.0) throw ValidationError("beta_n must be positive");
  const auto n = psi_train.rows();
  const auto d = psi_train.cols();
  const MatrixXd A = psi_train.transpose() * psi_train +
                     static_cast<double>(n) * beta_n * MatrixXd::Identity(d, d);
  return Eigen::LDLT<MatrixXd>(A).solve(psi_train.transpose() * Y);
}

}  // namespace stkr
