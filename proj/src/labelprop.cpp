#include "stkr/labelprop.hpp"

#include <Eigen/IterativeLinearSolvers>

namespace stkr {

using Eigen::MatrixXd;

namespace {

MatrixXd padded_labels(const SparseGram& gram, const MatrixXd& Y) {
  if (Y.rows() != gram.n) throw ValidationError("label matrix rows must equal labeled count");
  MatrixXd y0 = MatrixXd::Zero(gram.size(), Y.cols());
  y0.topRows(gram.n) = Y;
  return y0;
}

}  // namespace

MatrixXd label_prop_iterative(const SparseGram& gram, const MatrixXd& Y, double eta,
                              std::int64_t steps) {
  if (eta < 0.0 || eta >= 1.0) throw ValidationError("label propagation requires eta in [0, 1)");
  if (steps < 0) throw ValidationError("step count must be nonnegative");
  const MatrixXd y0 = padded_labels(gram, Y);
  const double c = eta / static_cast<double>(gram.size());
  MatrixXd y = y0;
  for (std::int64_t t = 0; t < steps; ++t) y = c * (gram.G * y) + y0;
  return y;
}

MatrixXd label_prop_exact(const SparseGram& gram, const MatrixXd& Y, double eta) {
  if (eta < 0.0 || eta >= 1.0) throw ValidationError("label propagation requires eta in [0, 1)");
  const MatrixXd y0 = padded_labels(gram, Y);
  const auto size = gram.size();

  SparseMat A = (-eta / static_cast<double>(size)) * gram.G;
  SparseMat identity(size, size);
  identity.setIdentity();
  A += identity;

  Eigen::ConjugateGradient<SparseMat, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-10);
  cg.setMaxIterations(100000);
  cg.compute(A);
  MatrixXd y = cg.solve(y0);
  if (cg.info() != Eigen::Success)
    throw ValidationError("label propagation linear solve did not converge");
  return y;
}

}  // namespace stkr
