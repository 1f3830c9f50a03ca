#include "stkr/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace stkr {

std::pair<SparseGram, KernelRowEvaluator> build_normalized_kernel(const VisibleGraph& vg) {
  const std::int64_t size = vg.n + vg.m;
  if (size < 1) throw ValidationError("visible graph is empty");

  SparseGram gram;
  gram.n = vg.n;
  gram.m = vg.m;
  gram.G = vg.adjacency;
  const double scale = static_cast<double>(size);
  for (std::int64_t i = 0; i < gram.G.outerSize(); ++i) {
    for (SparseMat::InnerIterator it(gram.G, i); it; ++it) {
      const double di = vg.degree[it.row()];
      const double dj = vg.degree[it.col()];
      // Degree-0 rows cannot appear here (a node with an edge has degree >= 1)
      // but guard anyway per the 1/sqrt(0) := 0 convention.
      it.valueRef() = (di == 0.0 || dj == 0.0)
                          ? 0.0
                          : it.value() * scale / std::sqrt(di * dj);
    }
  }
  return {std::move(gram), KernelRowEvaluator(vg.degree, size)};
}

Eigen::VectorXd KernelRowEvaluator::row(
    const std::vector<std::pair<std::int64_t, double>>& query_edges) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(degree_.size());
  double dq = 0.0;
  for (const auto& [id, w] : query_edges) {
    if (id < 0 || id >= size()) throw ValidationError("unknown visible id in kernel row query");
    dq += w;
  }
  if (dq == 0.0) return v;
  const double scale = static_cast<double>(scale_);
  for (const auto& [id, w] : query_edges) {
    const double di = degree_[id];
    // Same expression as the Gram construction so visible-node rows
    // reproduce Gram columns bit-exactly.
    v[id] = (dq == 0.0 || di == 0.0) ? 0.0 : w * scale / std::sqrt(dq * di);
  }
  return v;
}

Eigen::MatrixXd center_gram(const Eigen::MatrixXd& G) {
  const Eigen::VectorXd row_mean = G.rowwise().mean();
  const Eigen::VectorXd col_mean = G.colwise().mean();
  const double total_mean = G.mean();
  Eigen::MatrixXd out = G;
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean.transpose();
  out.array() += total_mean;
  return out;
}

Eigen::MatrixXd center_gram(const SparseGram& G) {
  return center_gram(Eigen::MatrixXd(G.G));
}

}  // namespace stkr
