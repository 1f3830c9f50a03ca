#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace stkr {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Raised on malformed input files; carries the offending line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::int64_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::int64_t line() const { return line_; }

 private:
  std::int64_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected, unweighted graph with one class label per node.
struct GraphDataset {
  std::int64_t num_nodes = 0;
  int num_classes = 0;
  /// Undirected pairs with first < second, sorted, no duplicates, no self-loops.
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;
  std::vector<std::int32_t> labels;  // size num_nodes, values in [0, num_classes)

  std::int64_t num_edges() const { return static_cast<std::int64_t>(edges.size()); }
};

enum class Mode { transductive, inductive };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

/// Seeded partition of [0, num_nodes) into train / val / test / other.
struct SplitSpec {
  std::uint64_t seed = 0;
  Mode mode = Mode::transductive;
  double p_test = 0.0;
  std::vector<std::int32_t> train_ids;
  std::vector<std::int32_t> val_ids;
  std::vector<std::int32_t> test_ids;
  std::vector<std::int32_t> other_ids;
};

/// Visible portion of the graph under a split: train nodes first (the n
/// labeled anchors), then unlabeled-visible nodes, each sorted by node id.
struct VisibleGraph {
  std::int64_t n = 0;  // labeled (train) count
  std::int64_t m = 0;  // unlabeled-visible count
  std::vector<std::int32_t> visible_ids;           // size n + m
  std::vector<std::int64_t> position_of;           // node id -> visible index, -1 if hidden
  SparseMat adjacency;                             // (n+m) x (n+m), 0/1 weights
  Eigen::VectorXd degree;                          // per-visible-node visible-edge weight sum
};

/// Reads "i j" edge rows and "i c" label rows ('#' starts a comment).
/// Duplicate undirected edges are collapsed; the symmetric closure is applied.
GraphDataset load_dataset(const std::string& edge_path, const std::string& label_path);

/// Builds a GraphDataset from in-memory rows, applying the same validation
/// and normalization as load_dataset.
GraphDataset make_dataset(std::int64_t num_nodes,
                          const std::vector<std::pair<std::int32_t, std::int32_t>>& edges,
                          const std::vector<std::int32_t>& labels);

/// Default split sizes: Planetoid-style (train 20 per class, val 500) for
/// datasets recognized by node count, otherwise 20 x classes for both.
std::pair<std::int64_t, std::int64_t> default_split_sizes(const GraphDataset& ds);

/// Seeded uniform sampling without replacement, drawn in the order
/// test -> train -> val; the remainder is "other".
SplitSpec make_split(const GraphDataset& ds, std::uint64_t seed, double p_test,
                     std::int64_t train_size, std::int64_t val_size,
                     Mode mode = Mode::transductive);

/// Applies visibility rules. Transductive: every node is visible. Inductive:
/// test nodes and all their incident edges are removed; when hide_val is set
/// the val nodes are hidden the same way (used while selecting
/// hyperparameters, so val mimics the unseen test set).
VisibleGraph mask_visible(const GraphDataset& ds, const SplitSpec& split,
                          bool hide_val = false);

std::string serialize_split(const SplitSpec& split);
SplitSpec deserialize_split(const std::string& text);
void save_split(const SplitSpec& split, const std::string& path);
SplitSpec load_split(const std::string& path);

}  // namespace stkr
