#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "stkr/graph.hpp"

namespace stkr {

/// Sparse symmetric Gram matrix of the base kernel over the visible samples.
/// G[i,j] = K(x_i, x_j); G / (n+m) equals the symmetric normalized adjacency.
struct SparseGram {
  SparseMat G;          // (n+m) x (n+m)
  std::int64_t n = 0;   // labeled count
  std::int64_t m = 0;   // unlabeled-visible count

  std::int64_t size() const { return n + m; }
};

/// Evaluates base-kernel rows v_K(x) for out-of-sample queries, given the
/// query's edges into the visible sample set.
class KernelRowEvaluator {
 public:
  KernelRowEvaluator() = default;
  KernelRowEvaluator(Eigen::VectorXd degree, std::int64_t scale)
      : degree_(std::move(degree)), scale_(scale) {}

  /// query_edges: (visible index, weight) pairs. The query's own degree is
  /// the sum of these weights; nodes with zero degree yield zero entries.
  Eigen::VectorXd row(const std::vector<std::pair<std::int64_t, double>>& query_edges) const;

  std::int64_t size() const { return static_cast<std::int64_t>(degree_.size()); }

 private:
  Eigen::VectorXd degree_;
  std::int64_t scale_ = 0;  // n + m
};

/// K(x_i, x_j) = (n+m) W(x_i, x_j) / sqrt(D(x_i) D(x_j)), with 1/sqrt(0) := 0.
std::pair<SparseGram, KernelRowEvaluator> build_normalized_kernel(const VisibleGraph& vg);

/// Empirical double-centering: G - rowmean - colmean + totalmean.
Eigen::MatrixXd center_gram(const Eigen::MatrixXd& G);
Eigen::MatrixXd center_gram(const SparseGram& G);

}  // namespace stkr
