#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "stkr/kernel.hpp"

namespace stkr {

/// T steps of label propagation on S = G/(n+m): y_0 = [Y; 0],
/// y_{t+1} = eta S y_t + y_0. Returns scores for every visible node.
Eigen::MatrixXd label_prop_iterative(const SparseGram& gram, const Eigen::MatrixXd& Y,
                                     double eta, std::int64_t steps);

/// Exact fixed point (I - eta S) y = [Y; 0], solved by conjugate gradients to
/// relative tolerance 1e-10. Requires eta in [0, 1).
Eigen::MatrixXd label_prop_exact(const SparseGram& gram, const Eigen::MatrixXd& Y, double eta);

}  // namespace stkr
