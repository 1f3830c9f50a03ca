#include "stkr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "stkr/kpca.hpp"
#include "stkr/labelprop.hpp"
#include "stkr/stkr.hpp"
#include "stkr/transform.hpp"

namespace stkr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string fmt(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::vector<std::vector<std::int32_t>> neighbor_lists(const GraphDataset& ds) {
  std::vector<std::vector<std::int32_t>> adj(ds.num_nodes);
  for (const auto& [a, b] : ds.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

std::vector<std::pair<std::int64_t, double>> visible_edges(
    const std::vector<std::vector<std::int32_t>>& adj, const VisibleGraph& vg,
    std::int32_t node) {
  std::vector<std::pair<std::int64_t, double>> out;
  for (const auto nb : adj[node])
    if (vg.position_of[nb] >= 0) out.emplace_back(vg.position_of[nb], 1.0);
  return out;
}

std::int32_t argmax_class(const Eigen::RowVectorXd& scores) {
  std::int32_t best = 0;
  for (int c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

double accuracy(const MatrixXd& scores, const GraphDataset& ds,
                const std::vector<std::int32_t>& ids) {
  if (ids.empty()) return 0.0;
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (argmax_class(scores.row(i)) == ds.labels[ids[i]]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(ids.size());
}

KpcaModel slice_kpca(const KpcaModel& full, int d) {
  if (d >= full.dim()) return full;
  KpcaModel out;
  out.n = full.n;
  out.m = full.m;
  out.V = full.V.leftCols(d);
  out.eigenvalues = full.eigenvalues.head(d);
  return out;
}

// Scores (|eval_ids| x C) for a fitted model; visible nodes batched through
// the Gram matrix, hidden nodes through kernel rows built from their edges.
template <typename ScoreVisible, typename ScoreHidden>
MatrixXd gather_scores(const VisibleGraph& vg, const std::vector<std::int32_t>& eval_ids,
                       int classes, const ScoreVisible& score_visible,
                       const ScoreHidden& score_hidden) {
  MatrixXd out(eval_ids.size(), classes);
  for (std::size_t i = 0; i < eval_ids.size(); ++i) {
    const auto pos = vg.position_of[eval_ids[i]];
    if (pos >= 0)
      out.row(i) = score_visible(pos);
    else
      out.row(i) = score_hidden(eval_ids[i]);
  }
  return out;
}

struct MethodRunner {
  const GraphDataset& ds;
  const std::vector<std::vector<std::int32_t>>& adj;
  const VisibleGraph& vg;
  const SparseGram& gram;
  const KernelRowEvaluator& ker;
  Method method;
  double tol;
  MatrixXd Y;  // one-hot train labels, n x C

  // Populated lazily for stkr-topd so one eigendecomposition serves every d
  // in the grid (kpca_budget = largest d that will be requested).
  int kpca_budget = 0;
  KpcaModel kpca_full;
  bool kpca_ready = false;

  void ensure_kpca() {
    if (kpca_ready) return;
    const auto budget = std::min<std::int64_t>(std::max(kpca_budget, 1), gram.m);
    kpca_full = fit_kpca(gram, static_cast<int>(budget), /*strict=*/false);
    kpca_ready = true;
  }

  FitOutcome run(const GridPoint& gp, const std::vector<std::int32_t>& eval_ids) {
    FitOutcome out;
    const auto start = std::chrono::steady_clock::now();
    const int C = ds.num_classes;

    switch (method) {
      case Method::lp: {
        const MatrixXd scores = label_prop_iterative(gram, Y, gp.eta, gp.T);
        out.iterations = gp.T;
        out.scores = gather_scores(
            vg, eval_ids, C, [&](std::int64_t pos) { return scores.row(pos); },
            [&](std::int32_t) -> Eigen::RowVectorXd {
              throw ValidationError("label propagation cannot score hidden nodes");
            });
        break;
      }
      case Method::krr:
      case Method::stkr_poly: {
        const auto t = PolyTransform::monomial(method == Method::krr ? 1 : gp.p);
        StkrModel model;
        if (method == Method::stkr_poly && gp.T > 0) {
          // T propagation steps, a grid hyperparameter: early-stopped
          // Richardson doubles as a regularizer.
          StkrOptions opts;
          opts.tol = tol;
          opts.fixed_iters = gp.T;
          model = fit_richardson_poly(gram, t, gp.beta, Y, opts);
        } else {
          model = fit_direct(gram, t, gp.beta, Y);
        }
        out.iterations = model.iterations;
        const MatrixXd scores = predict_visible(model, gram);
        out.scores = gather_scores(
            vg, eval_ids, C, [&](std::int64_t pos) { return scores.row(pos); },
            [&](std::int32_t node) -> Eigen::RowVectorXd {
              return predict(model, ker.row(visible_edges(adj, vg, node))).transpose();
            });
        break;
      }
      case Method::stkr_lap: {
        StkrOptions opts;
        opts.tol = tol;
        if (gp.T > 0) opts.fixed_iters = gp.T;
        const auto t = inverse_laplacian(gp.eta);
        const StkrModel model = fit_richardson_inverse(gram, t, gp.beta, Y, opts);
        out.iterations = model.iterations;
        const MatrixXd scores = predict_visible(model, gram);
        out.scores = gather_scores(
            vg, eval_ids, C, [&](std::int64_t pos) { return scores.row(pos); },
            [&](std::int32_t node) -> Eigen::RowVectorXd {
              return predict(model, ker.row(visible_edges(adj, vg, node))).transpose();
            });
        break;
      }
      case Method::stkr_topd: {
        ensure_kpca();
        if (gp.d > kpca_full.dim())
          throw ValidationError("kernel PCA rank error: only " +
                                std::to_string(kpca_full.dim()) +
                                " admissible eigenvalues for d = " + std::to_string(gp.d));
        const KpcaModel enc = slice_kpca(kpca_full, gp.d);
        const MatrixXd feats = kpca_features_visible(enc, gram);
        const MatrixXd W = fit_probe(feats.topRows(gram.n), Y, gp.beta);
        const MatrixXd scores = feats * W;
        out.scores = gather_scores(
            vg, eval_ids, C, [&](std::int64_t pos) { return scores.row(pos); },
            [&](std::int32_t node) -> Eigen::RowVectorXd {
              const VectorXd f = kpca_features(enc, ker.row(visible_edges(adj, vg, node)));
              return (W.transpose() * f).transpose();
            });
        break;
      }
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }
};

int thread_budget(std::size_t tasks) {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("STKR_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) cap = v;
  }
  return static_cast<int>(std::min<std::size_t>(cap, tasks));
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

void validate_config(const ExperimentConfig& cfg, const std::vector<GridPoint>& points) {
  if (cfg.seeds.empty()) throw ValidationError("at least one seed is required");
  if (points.empty()) throw ValidationError("hyperparameter grid is empty for this method");
  if (cfg.method == Method::lp && cfg.mode == Mode::inductive)
    throw ValidationError("label propagation is transductive-only");
  if (cfg.tol <= 0.0) throw ValidationError("tol must be positive");
}

ResultRow run_seed(const GraphDataset& ds, const ExperimentConfig& cfg,
                   const std::vector<std::vector<std::int32_t>>& adj,
                   const std::vector<GridPoint>& points, std::uint64_t seed) {
  ResultRow row;
  row.dataset = cfg.dataset_name;
  row.method = cfg.method;
  row.mode = cfg.mode;
  row.seed = seed;
  try {
    const auto sizes = default_split_sizes(ds);
    const SplitSpec split =
        make_split(ds, seed, cfg.p_test, sizes.first, sizes.second, cfg.mode);

    // Selection phase: in inductive mode the val set is hidden exactly like
    // the test set will be, so validation mimics deployment.
    int max_d = 0;
    for (const auto& gp : points) max_d = std::max(max_d, gp.d);

    const VisibleGraph vg_sel =
        mask_visible(ds, split, /*hide_val=*/cfg.mode == Mode::inductive);
    auto [gram_sel, ker_sel] = build_normalized_kernel(vg_sel);
    MethodRunner sel{ds,        adj,      vg_sel, gram_sel,
                     ker_sel,   cfg.method, cfg.tol,
                     one_hot(ds, std::vector<std::int32_t>(
                                     vg_sel.visible_ids.begin(),
                                     vg_sel.visible_ids.begin() + vg_sel.n))};
    sel.kpca_budget = max_d;

    int best = -1;
    double best_val = -1.0;
    for (std::size_t g = 0; g < points.size(); ++g) {
      try {
        const FitOutcome fo = sel.run(points[g], split.val_ids);
        const double val = accuracy(fo.scores, ds, split.val_ids);
        if (val > best_val) {
          best_val = val;
          best = static_cast<int>(g);
        }
      } catch (const ConvergenceError&) {
        // a diverging grid point is simply never selected
      } catch (const ValidationError&) {
        // e.g. a d beyond the admissible rank; skip the point
      }
    }
    if (best < 0) throw ValidationError("no grid point was usable during selection");

    // Final phase: refit with the full visible graph (val hidden only while
    // it was standing in for the test set). Transductively nothing was
    // hidden, so the selection context is reused as-is.
    FitOutcome fo;
    if (cfg.mode == Mode::transductive) {
      fo = sel.run(points[best], split.test_ids);
    } else {
      const VisibleGraph vg_fin = mask_visible(ds, split, /*hide_val=*/false);
      auto [gram_fin, ker_fin] = build_normalized_kernel(vg_fin);
      MethodRunner fin{ds,        adj,      vg_fin, gram_fin,
                       ker_fin,   cfg.method, cfg.tol,
                       one_hot(ds, std::vector<std::int32_t>(
                                       vg_fin.visible_ids.begin(),
                                       vg_fin.visible_ids.begin() + vg_fin.n))};
      fin.kpca_budget = max_d;
      fo = fin.run(points[best], split.test_ids);
    }

    row.hyperparams = points[best].describe(cfg.method);
    row.val_acc = best_val;
    row.test_acc = accuracy(fo.scores, ds, split.test_ids);
    row.fit_seconds = fo.seconds;
    row.iterations = fo.iterations;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::lp: return "lp";
    case Method::stkr_lap: return "stkr-lap";
    case Method::stkr_poly: return "stkr-poly";
    case Method::stkr_topd: return "stkr-topd";
    case Method::krr: return "krr";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "lp") return Method::lp;
  if (s == "stkr-lap") return Method::stkr_lap;
  if (s == "stkr-poly") return Method::stkr_poly;
  if (s == "stkr-topd") return Method::stkr_topd;
  if (s == "krr") return Method::krr;
  throw ValidationError("unknown method: " + s);
}

Grid default_grid() {
  Grid g;
  g.T = {1, 2, 4, 8, 16, 32};
  g.eta = {0.7, 0.8, 0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999};
  g.p = {1, 2, 4, 6, 8};
  for (int e = 3; e >= -8; --e) g.beta.push_back(std::pow(10.0, e));
  g.d = {32, 64, 128, 256, 512};
  return g;
}

Grid parse_grid(const std::string& text) {
  Grid g = default_grid();
  std::istringstream in(text);
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key, eq;
    if (!(ls >> key)) continue;
    if (!(ls >> eq) || eq != "=") throw ParseError("expected '" + key + " = ...'", lineno);
    if (key == "T") {
      g.T.clear();
      for (std::int64_t v; ls >> v;) g.T.push_back(v);
    } else if (key == "eta") {
      g.eta.clear();
      for (double v; ls >> v;) g.eta.push_back(v);
    } else if (key == "p") {
      g.p.clear();
      for (int v; ls >> v;) g.p.push_back(v);
    } else if (key == "beta") {
      g.beta.clear();
      for (double v; ls >> v;) g.beta.push_back(v);
    } else if (key == "d") {
      g.d.clear();
      for (int v; ls >> v;) g.d.push_back(v);
    } else {
      throw ParseError("unknown grid axis: " + key, lineno);
    }
  }
  return g;
}

Grid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open grid file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_grid(ss.str());
}

std::string GridPoint::describe(Method m) const {
  switch (m) {
    case Method::lp: return fmt("T=%lld eta=%g", static_cast<long long>(T), eta);
    case Method::stkr_lap:
      return fmt("eta=%g beta=%g T=%lld", eta, beta, static_cast<long long>(T));
    case Method::stkr_poly:
      return fmt("p=%d beta=%g T=%lld", p, beta, static_cast<long long>(T));
    case Method::stkr_topd: return fmt("d=%d beta=%g", d, beta);
    case Method::krr: return fmt("beta=%g", beta);
  }
  return "";
}

std::vector<GridPoint> enumerate_grid(Method m, const Grid& grid) {
  std::vector<GridPoint> out;
  GridPoint gp;
  switch (m) {
    case Method::lp:
      for (const auto T : grid.T)
        for (const auto eta : grid.eta) {
          gp.T = T;
          gp.eta = eta;
          out.push_back(gp);
        }
      break;
    case Method::stkr_lap:
      for (const auto eta : grid.eta)
        for (const auto beta : grid.beta)
          for (const auto T : grid.T) {
            gp.eta = eta;
            gp.beta = beta;
            gp.T = T;
            out.push_back(gp);
          }
      break;
    case Method::stkr_poly:
      for (const auto p : grid.p)
        for (const auto beta : grid.beta)
          for (const auto T : grid.T) {
            gp.p = p;
            gp.beta = beta;
            gp.T = T;
            out.push_back(gp);
          }
      break;
    case Method::stkr_topd:
      for (const auto d : grid.d)
        for (const auto beta : grid.beta) {
          gp.d = d;
          gp.beta = beta;
          out.push_back(gp);
        }
      break;
    case Method::krr:
      for (const auto beta : grid.beta) {
        gp.beta = beta;
        out.push_back(gp);
      }
      break;
  }
  return out;
}

Eigen::MatrixXd one_hot(const GraphDataset& ds, const std::vector<std::int32_t>& ids) {
  MatrixXd Y = MatrixXd::Zero(ids.size(), ds.num_classes);
  for (std::size_t i = 0; i < ids.size(); ++i) Y(i, ds.labels[ids[i]]) = 1.0;
  return Y;
}

FitOutcome fit_and_score(const GraphDataset& ds, const VisibleGraph& vg,
                         const SparseGram& gram, const KernelRowEvaluator& ker, Method method,
                         const GridPoint& gp, double tol,
                         const std::vector<std::int32_t>& eval_ids) {
  const auto adj = neighbor_lists(ds);
  MethodRunner runner{ds,  adj, vg,
                      gram, ker, method,
                      tol, one_hot(ds, std::vector<std::int32_t>(
                                           vg.visible_ids.begin(),
                                           vg.visible_ids.begin() + vg.n))};
  runner.kpca_budget = gp.d;
  return runner.run(gp, eval_ids);
}

ExperimentResult run_experiment(const GraphDataset& ds, const ExperimentConfig& cfg) {
  const auto points = enumerate_grid(cfg.method, cfg.grid);
  validate_config(cfg, points);
  const auto adj = neighbor_lists(ds);

  ExperimentResult result;
  result.rows.resize(cfg.seeds.size());

  const int workers = thread_budget(cfg.seeds.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
      result.rows[i] = run_seed(ds, cfg, adj, points, cfg.seeds[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cfg.seeds.size(); i = next.fetch_add(1))
          result.rows[i] = run_seed(ds, cfg, adj, points, cfg.seeds[i]);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<double> vals, tests;
  for (const auto& row : result.rows) {
    if (!row.error.empty()) continue;
    vals.push_back(row.val_acc);
    tests.push_back(row.test_acc);
  }
  result.summary.seeds = static_cast<int>(vals.size());
  result.summary.val_mean = mean_of(vals);
  result.summary.val_std = sample_std(vals, result.summary.val_mean);
  result.summary.test_mean = mean_of(tests);
  result.summary.test_std = sample_std(tests, result.summary.test_mean);

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto write = [&](const std::string& name, const std::string& body) {
      std::ofstream out(cfg.out_dir + "/" + name, std::ios::binary);
      if (!out) throw ValidationError("cannot write " + cfg.out_dir + "/" + name);
      out << body;
    };
    write("results.csv", results_csv(result.rows));
    write("summary.csv", summary_csv(cfg, result.summary));
    write("timings.csv", timings_csv(result.rows));
  }
  return result;
}

std::vector<SweepRow> sweep_p(const GraphDataset& ds, ExperimentConfig cfg,
                              const std::vector<int>& p_list) {
  for (const auto p : p_list)
    if (p < 1) throw ValidationError("polynomial powers must be positive");
  cfg.method = Method::stkr_poly;
  const std::string out_dir = cfg.out_dir;
  cfg.out_dir.clear();
  std::vector<SweepRow> rows;
  for (const auto p : p_list) {
    cfg.grid.p = {p};
    const auto res = run_experiment(ds, cfg);
    rows.push_back({static_cast<double>(p), res.summary.test_mean, res.summary.test_std});
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/plot_p.csv", std::ios::binary);
    out << sweep_csv("p", rows);
  }
  return rows;
}

std::vector<SweepRow> sweep_eta(const GraphDataset& ds, ExperimentConfig cfg,
                                const std::vector<double>& eta_list) {
  for (const auto eta : eta_list)
    if (eta <= 0.0 || eta >= 1.0) throw ValidationError("eta values must lie in (0, 1)");
  cfg.method = Method::stkr_lap;
  const std::string out_dir = cfg.out_dir;
  cfg.out_dir.clear();
  std::vector<SweepRow> rows;
  for (const auto eta : eta_list) {
    cfg.grid.eta = {eta};
    const auto res = run_experiment(ds, cfg);
    rows.push_back({eta, res.summary.test_mean, res.summary.test_std});
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/plot_eta.csv", std::ios::binary);
    out << sweep_csv("eta", rows);
  }
  return rows;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string out = "dataset,method,mode,seed,hyperparams,val_acc,test_acc,iterations,error\n";
  for (const auto& r : rows)
    out += fmt("%s,%s,%s,%llu,%s,%.6f,%.6f,%lld,%s\n", r.dataset.c_str(),
               to_string(r.method).c_str(), to_string(r.mode).c_str(),
               static_cast<unsigned long long>(r.seed), r.hyperparams.c_str(), r.val_acc,
               r.test_acc, static_cast<long long>(r.iterations), r.error.c_str());
  return out;
}

std::string summary_csv(const ExperimentConfig& cfg, const Summary& s) {
  std::string out =
      "dataset,method,mode,p_test,seeds,val_mean,val_std,test_mean,test_std\n";
  out += fmt("%s,%s,%s,%.17g,%d,%.6f,%.6f,%.6f,%.6f\n", cfg.dataset_name.c_str(),
             to_string(cfg.method).c_str(), to_string(cfg.mode).c_str(), cfg.p_test, s.seeds,
             s.val_mean, s.val_std, s.test_mean, s.test_std);
  return out;
}

std::string timings_csv(const std::vector<ResultRow>& rows) {
  std::string out = "dataset,method,mode,seed,fit_seconds\n";
  for (const auto& r : rows)
    out += fmt("%s,%s,%s,%llu,%.6f\n", r.dataset.c_str(), to_string(r.method).c_str(),
               to_string(r.mode).c_str(), static_cast<unsigned long long>(r.seed),
               r.fit_seconds);
  return out;
}

std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows) {
  std::string out = axis + ",test_mean,test_std\n";
  for (const auto& r : rows) out += fmt("%.17g,%.6f,%.6f\n", r.x, r.mean, r.stdev);
  return out;
}

}  // namespace stkr
