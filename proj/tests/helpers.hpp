#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stkr/graph.hpp"
#include "stkr/kernel.hpp"
#include "stkr/rng.hpp"

namespace testutil {

inline std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

/// Random undirected graph as edge list; every pair kept with probability p.
inline std::vector<std::pair<std::int32_t, std::int32_t>> random_edges(std::int64_t n,
                                                                       double p,
                                                                       std::uint64_t seed) {
  stkr::Rng rng(seed);
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  for (std::int32_t i = 0; i < n; ++i)
    for (std::int32_t j = i + 1; j < n; ++j)
      if (rng.next_double() < p) edges.emplace_back(i, j);
  return edges;
}

inline stkr::GraphDataset random_dataset(std::int64_t n, int classes, double p,
                                         std::uint64_t seed) {
  stkr::Rng rng(seed ^ 0xabcdef);
  std::vector<std::int32_t> labels(n);
  for (auto& l : labels) l = static_cast<std::int32_t>(rng.next_below(classes));
  // make sure every class appears so one-hot targets are well defined
  for (int c = 0; c < classes && c < n; ++c) labels[c] = c;
  return stkr::make_dataset(n, random_edges(n, p, seed), labels);
}

/// VisibleGraph over all n nodes in id order, the first n_labeled labeled.
inline stkr::VisibleGraph full_visible(
    std::int64_t n, const std::vector<std::pair<std::int32_t, std::int32_t>>& edges,
    std::int64_t n_labeled) {
  stkr::VisibleGraph vg;
  vg.n = n_labeled;
  vg.m = n - n_labeled;
  vg.visible_ids.resize(n);
  vg.position_of.assign(n, -1);
  for (std::int64_t i = 0; i < n; ++i) {
    vg.visible_ids[i] = static_cast<std::int32_t>(i);
    vg.position_of[i] = i;
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& [a, b] : edges) {
    trip.emplace_back(a, b, 1.0);
    trip.emplace_back(b, a, 1.0);
  }
  vg.adjacency.resize(n, n);
  vg.adjacency.setFromTriplets(trip.begin(), trip.end());
  vg.degree = vg.adjacency * Eigen::VectorXd::Ones(n);
  return vg;
}

/// Base-kernel Gram from a lazy (self-loop augmented) random graph:
/// W = A + diag(deg) is p.s.d. by construction, so every solver path is a
/// contraction and iterative/direct results are comparable to full precision.
inline stkr::SparseGram random_psd_gram(std::int64_t N, std::int64_t n_labeled, double p,
                                        std::uint64_t seed) {
  const auto edges = random_edges(N, p, seed);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(N, N);
  for (const auto& [a, b] : edges) W(a, b) = W(b, a) = 1.0;
  const Eigen::VectorXd deg = W.rowwise().sum();
  W += Eigen::MatrixXd(deg.asDiagonal());
  const Eigen::VectorXd dd = W.rowwise().sum();

  stkr::SparseGram gram;
  gram.n = n_labeled;
  gram.m = N - n_labeled;
  gram.G.resize(N, N);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::int64_t i = 0; i < N; ++i)
    for (std::int64_t j = 0; j < N; ++j)
      if (W(i, j) != 0.0 && dd[i] > 0.0 && dd[j] > 0.0)
        trip.emplace_back(i, j, static_cast<double>(N) * W(i, j) / std::sqrt(dd[i] * dd[j]));
  gram.G.setFromTriplets(trip.begin(), trip.end());
  return gram;
}

inline Eigen::MatrixXd random_labels(std::int64_t n, int cols, std::uint64_t seed) {
  stkr::Rng rng(seed);
  Eigen::MatrixXd Y(n, cols);
  for (std::int64_t i = 0; i < n; ++i)
    for (int c = 0; c < cols; ++c) Y(i, c) = rng.next_gaussian();
  return Y;
}

}  // namespace testutil
