// Command-line front end; talks to the core exclusively through the C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stkr/capi.h"

namespace {

struct DatasetArgs {
  std::string dataset;  // path prefix: <prefix>.edges + <prefix>.labels
  std::string edges, labels;

  void attach(CLI::App* cmd) {
    cmd->add_option("--dataset", dataset, "dataset path prefix (<prefix>.edges, <prefix>.labels)");
    cmd->add_option("--edges", edges, "edge file (overrides --dataset)");
    cmd->add_option("--labels", labels, "label file (overrides --dataset)");
  }

  stkr_dataset* load() const {
    const std::string edge_path = edges.empty() ? dataset + ".edges" : edges;
    const std::string label_path = labels.empty() ? dataset + ".labels" : labels;
    if (dataset.empty() && (edges.empty() || labels.empty())) {
      std::fprintf(stderr, "error: provide --dataset or both --edges and --labels\n");
      return nullptr;
    }
    stkr_dataset* ds = nullptr;
    if (stkr_dataset_load(edge_path.c_str(), label_path.c_str(), &ds) != STKR_OK) {
      std::fprintf(stderr, "error: %s\n", stkr_last_error());
      return nullptr;
    }
    return ds;
  }
};

struct RunArgs {
  DatasetArgs data;
  std::string name = "dataset";
  std::string method = "stkr-lap";
  std::string mode = "t";
  double p_test = 0.01;
  std::string seeds = "0 1 2 3 4 5 6 7 8 9";
  std::string grid_file;
  std::string out_dir;
  double tol = 1e-6;

  void attach(CLI::App* cmd) {
    data.attach(cmd);
    cmd->add_option("--name", name, "dataset name used in result rows");
    cmd->add_option("--method", method, "lp | stkr-lap | stkr-poly | stkr-topd | krr");
    cmd->add_option("--mode", mode, "t (transductive) | i (inductive)");
    cmd->add_option("--p-test", p_test, "test fraction");
    cmd->add_option("--seeds", seeds, "seed list, e.g. \"0,1,2\"");
    cmd->add_option("--grid", grid_file, "hyperparameter grid file");
    cmd->add_option("--out", out_dir, "output directory for CSV files");
    cmd->add_option("--tol", tol, "iterative-solver relative tolerance");
  }

  std::string config(const std::string& extra = "") const {
    std::string s = seeds;
    for (auto& c : s)
      if (c == ',') c = ' ';
    const std::string mode_name =
        mode == "i" || mode == "inductive" ? "inductive" : "transductive";
    std::string cfg = "name = " + name + "\nmethod = " + method + "\nmode = " + mode_name +
                      "\np_test = " + std::to_string(p_test) + "\nseeds = " + s +
                      "\ntol = " + std::to_string(tol) + "\n";
    if (!grid_file.empty()) cfg += "grid_file = " + grid_file + "\n";
    if (!out_dir.empty()) cfg += "out_dir = " + out_dir + "\n";
    return cfg + extra;
  }
};

int run_command(const RunArgs& args, int (*fn)(const stkr_dataset*, const char*, char**),
                const std::string& extra) {
  stkr_dataset* ds = args.data.load();
  if (!ds) return 1;
  char* out = nullptr;
  const int rc = fn(ds, args.config(extra).c_str(), &out);
  stkr_dataset_free(ds);
  if (rc != STKR_OK) {
    std::fprintf(stderr, "error: %s\n", stkr_last_error());
    return 1;
  }
  if (out) {
    std::fputs(out, stdout);
    stkr_string_free(out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrally transformed kernel regression on graphs"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "full protocol: grid selection on val, report test");
  run_args.attach(run);

  RunArgs sp_args;
  std::string p_list = "1 2 4 6 8";
  auto* sweep_p = app.add_subcommand("sweep-p", "test accuracy per polynomial power");
  sp_args.attach(sweep_p);
  sweep_p->add_option("--p-list", p_list, "powers to sweep, e.g. \"1,2,4,6,8\"");

  RunArgs se_args;
  std::string eta_list;
  auto* sweep_eta = app.add_subcommand("sweep-eta", "test accuracy per eta");
  se_args.attach(sweep_eta);
  sweep_eta->add_option("--eta-list", eta_list, "eta values to sweep");

  unsigned long long verify_seed = 0;
  auto* verify = app.add_subcommand("verify", "statistical checks of the spectral machinery");
  verify->add_option("--seed", verify_seed, "master seed for the checks");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return run_command(run_args, stkr_run_experiment, "");

  if (sweep_p->parsed()) {
    for (auto& c : p_list)
      if (c == ',') c = ' ';
    return run_command(sp_args, stkr_sweep_p, "p_list = " + p_list + "\n");
  }

  if (sweep_eta->parsed()) {
    for (auto& c : eta_list)
      if (c == ',') c = ' ';
    const std::string extra = eta_list.empty() ? "" : "eta_list = " + eta_list + "\n";
    return run_command(se_args, stkr_sweep_eta, extra);
  }

  char* report = nullptr;
  const int rc = stkr_verify(verify_seed, &report);
  if (report) {
    std::fputs(report, stdout);
    stkr_string_free(report);
  }
  if (rc != STKR_OK) {
    std::fprintf(stderr, "error: %s\n", stkr_last_error());
    return 1;
  }
  return 0;
}
