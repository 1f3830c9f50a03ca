#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stkr/graph.hpp"
#include "stkr/kernel.hpp"

namespace stkr {

enum class Method { lp, stkr_lap, stkr_poly, stkr_topd, krr };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

/// Hyperparameter value lists. Each method reads only the axes it uses:
/// lp: T x eta; stkr-lap: eta x beta; stkr-poly: p x beta; krr: beta;
/// stkr-topd: d x beta.
struct Grid {
  std::vector<std::int64_t> T;
  std::vector<double> eta;
  std::vector<int> p;
  std::vector<double> beta;
  std::vector<int> d;
};

/// The experiment-protocol defaults: T in {1..32} doublings, the eta ladder
/// up to 0.999999, p in {1,2,4,6,8}, beta decades 1e3..1e-8, d in {32..512}.
Grid default_grid();

/// Key-value text, one axis per line: "eta = 0.9 0.99", "p = 1 2 4 6 8", ...
/// Unlisted axes keep the defaults.
Grid parse_grid(const std::string& text);
Grid load_grid(const std::string& path);

/// One flattened grid point; only the axes relevant to the method are set.
struct GridPoint {
  std::int64_t T = 0;
  double eta = 0.0;
  int p = 0;
  double beta = 0.0;
  int d = 0;

  std::string describe(Method m) const;
};

std::vector<GridPoint> enumerate_grid(Method m, const Grid& grid);

struct ExperimentConfig {
  std::string dataset_name;
  Method method = Method::lp;
  Mode mode = Mode::transductive;
  double p_test = 0.01;
  std::vector<std::uint64_t> seeds;
  Grid grid;
  double tol = 1e-6;
  std::string out_dir;  // empty = do not write files
};

struct ResultRow {
  std::string dataset;
  Method method = Method::lp;
  Mode mode = Mode::transductive;
  std::uint64_t seed = 0;
  std::string hyperparams;
  double val_acc = 0.0;
  double test_acc = 0.0;
  double fit_seconds = 0.0;       // written to timings.csv only
  std::int64_t iterations = 0;
  std::string error;              // non-fatal per-seed failure, if any
};

struct Summary {
  int seeds = 0;
  double val_mean = 0.0, val_std = 0.0;
  double test_mean = 0.0, test_std = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // ordered by seed position in the config
  Summary summary;
};

/// Per seed: split, mask, build the kernel, score every grid point on the
/// validation set (fitting on train labels only), pick the argmax-val point
/// (ties -> first), refit, and report test accuracy. Inductive mode hides the
/// val set during selection fits and scores hidden nodes through kernel rows
/// built from their edges into the visible graph. STKR_THREADS caps the
/// worker pool (1 = fully sequential); row order is deterministic either way.
ExperimentResult run_experiment(const GraphDataset& ds, const ExperimentConfig& cfg);

struct SweepRow {
  double x = 0.0;
  double mean = 0.0;
  double stdev = 0.0;
};

/// Best-validated test accuracy per polynomial power (method forced to
/// stkr-poly, grid restricted to one p at a time).
std::vector<SweepRow> sweep_p(const GraphDataset& ds, ExperimentConfig cfg,
                              const std::vector<int>& p_list);

/// Best-validated test accuracy per eta (method forced to stkr-lap).
std::vector<SweepRow> sweep_eta(const GraphDataset& ds, ExperimentConfig cfg,
                                const std::vector<double>& eta_list);

/// Scores for the given node ids from one grid point, fitting on the labels
/// of the first vg.n visible nodes only. Hidden nodes are scored via kernel
/// rows over their edges into the visible graph.
struct FitOutcome {
  Eigen::MatrixXd scores;  // |eval_ids| x C
  double seconds = 0.0;
  std::int64_t iterations = 0;
};

FitOutcome fit_and_score(const GraphDataset& ds, const VisibleGraph& vg,
                         const SparseGram& gram, const KernelRowEvaluator& ker, Method method,
                         const GridPoint& gp, double tol,
                         const std::vector<std::int32_t>& eval_ids);

std::string results_csv(const std::vector<ResultRow>& rows);
std::string summary_csv(const ExperimentConfig& cfg, const Summary& s);
std::string timings_csv(const std::vector<ResultRow>& rows);
std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows);

/// One-hot label matrix for the listed node ids.
Eigen::MatrixXd one_hot(const GraphDataset& ds, const std::vector<std::int32_t>& ids);

}  // namespace stkr
