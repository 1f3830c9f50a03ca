#include "stkr/capi.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "stkr/experiment.hpp"
#include "stkr/graph.hpp"
#include "stkr/oracle.hpp"
#include "stkr/rng.hpp"
#include "stkr/stkr.hpp"

struct stkr_dataset {
  stkr::GraphDataset ds;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const stkr::ParseError& e) {
    return fail(STKR_ERR_PARSE, e.what());
  } catch (const stkr::ConvergenceError& e) {
    return fail(STKR_ERR_CONVERGENCE, e.what());
  } catch (const stkr::ValidationError& e) {
    return fail(STKR_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(STKR_ERR_INTERNAL, e.what());
  }
}

struct ParsedConfig {
  stkr::ExperimentConfig cfg;
  std::vector<int> p_list;
  std::vector<double> eta_list;
};

ParsedConfig parse_config(const char* text) {
  if (!text) throw stkr::ValidationError("config text is null");
  ParsedConfig pc;
  pc.cfg.grid = stkr::default_grid();

  std::istringstream in(text);
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key, eq;
    if (!(ls >> key)) continue;
    if (!(ls >> eq) || eq != "=") throw stkr::ParseError("expected '" + key + " = ...'", lineno);

    if (key == "name") {
      ls >> pc.cfg.dataset_name;
    } else if (key == "method") {
      std::string v;
      ls >> v;
      pc.cfg.method = stkr::method_from_string(v);
    } else if (key == "mode") {
      std::string v;
      ls >> v;
      pc.cfg.mode = stkr::mode_from_string(v);
    } else if (key == "p_test") {
      ls >> pc.cfg.p_test;
    } else if (key == "tol") {
      ls >> pc.cfg.tol;
    } else if (key == "out_dir") {
      ls >> pc.cfg.out_dir;
    } else if (key == "seeds") {
      pc.cfg.seeds.clear();
      for (std::uint64_t v; ls >> v;) pc.cfg.seeds.push_back(v);
    } else if (key == "grid_file") {
      std::string path;
      ls >> path;
      pc.cfg.grid = stkr::load_grid(path);
    } else if (key == "T") {
      pc.cfg.grid.T.clear();
      for (std::int64_t v; ls >> v;) pc.cfg.grid.T.push_back(v);
    } else if (key == "eta") {
      pc.cfg.grid.eta.clear();
      for (double v; ls >> v;) pc.cfg.grid.eta.push_back(v);
    } else if (key == "p") {
      pc.cfg.grid.p.clear();
      for (int v; ls >> v;) pc.cfg.grid.p.push_back(v);
    } else if (key == "beta") {
      pc.cfg.grid.beta.clear();
      for (double v; ls >> v;) pc.cfg.grid.beta.push_back(v);
    } else if (key == "d") {
      pc.cfg.grid.d.clear();
      for (int v; ls >> v;) pc.cfg.grid.d.push_back(v);
    } else if (key == "p_list") {
      for (int v; ls >> v;) pc.p_list.push_back(v);
    } else if (key == "eta_list") {
      for (double v; ls >> v;) pc.eta_list.push_back(v);
    } else {
      throw stkr::ParseError("unknown config key: " + key, lineno);
    }
  }
  return pc;
}

struct CheckReport {
  std::string text;
  bool all_passed = true;

  void add(const std::string& name, bool passed, const std::string& detail) {
    text += (passed ? "PASS " : "FAIL ") + name + ": " + detail + "\n";
    all_passed &= passed;
  }
};

}  // namespace

extern "C" {

const char* stkr_last_error(void) { return g_last_error.c_str(); }

void stkr_string_free(char* s) { std::free(s); }

int stkr_dataset_load(const char* edge_path, const char* label_path, stkr_dataset** out) {
  return guarded([&] {
    if (!edge_path || !label_path || !out)
      return fail(STKR_ERR_INVALID_ARGUMENT, "null argument");
    auto ds = stkr::load_dataset(edge_path, label_path);
    *out = new stkr_dataset{std::move(ds)};
    return STKR_OK;
  });
}

void stkr_dataset_free(stkr_dataset* ds) { delete ds; }

long long stkr_dataset_num_nodes(const stkr_dataset* ds) {
  return ds ? ds->ds.num_nodes : -1;
}

long long stkr_dataset_num_edges(const stkr_dataset* ds) {
  return ds ? ds->ds.num_edges() : -1;
}

int stkr_dataset_num_classes(const stkr_dataset* ds) {
  return ds ? ds->ds.num_classes : -1;
}

int stkr_run_experiment(const stkr_dataset* ds, const char* config_text, char** summary_out) {
  return guarded([&] {
    if (!ds) return fail(STKR_ERR_INVALID_ARGUMENT, "dataset is null");
    const ParsedConfig pc = parse_config(config_text);
    const auto result = stkr::run_experiment(ds->ds, pc.cfg);
    if (summary_out) *summary_out = dup_string(stkr::summary_csv(pc.cfg, result.summary));
    return STKR_OK;
  });
}

int stkr_sweep_p(const stkr_dataset* ds, const char* config_text, char** csv_out) {
  return guarded([&] {
    if (!ds) return fail(STKR_ERR_INVALID_ARGUMENT, "dataset is null");
    ParsedConfig pc = parse_config(config_text);
    if (pc.p_list.empty()) pc.p_list = {1, 2, 4, 6, 8};
    const auto rows = stkr::sweep_p(ds->ds, pc.cfg, pc.p_list);
    if (csv_out) *csv_out = dup_string(stkr::sweep_csv("p", rows));
    return STKR_OK;
  });
}

int stkr_sweep_eta(const stkr_dataset* ds, const char* config_text, char** csv_out) {
  return guarded([&] {
    if (!ds) return fail(STKR_ERR_INVALID_ARGUMENT, "dataset is null");
    ParsedConfig pc = parse_config(config_text);
    if (pc.eta_list.empty()) pc.eta_list = stkr::default_grid().eta;
    const auto rows = stkr::sweep_eta(ds->ds, pc.cfg, pc.eta_list);
    if (csv_out) *csv_out = dup_string(stkr::sweep_csv("eta", rows));
    return STKR_OK;
  });
}

int stkr_verify(unsigned long long seed, char** report_out) {
  return guarded([&] {
    CheckReport report;

    Eigen::VectorXd spectrum(30);
    for (int i = 0; i < 30; ++i) spectrum[i] = 1.0 / (i + 1);
    const auto sk = stkr::SyntheticKernel::random(1000, spectrum, seed);

    // Kernel-power approximation error should decay roughly like 1/sqrt(n+m).
    const std::vector<std::int64_t> sizes = {50, 100, 200, 400, 800};
    const auto decay = stkr::approximation_decay(sk, sizes, 2, 20, seed + 1);
    bool monotone = true;
    for (std::size_t i = 1; i < decay.size(); ++i)
      monotone &= decay[i].second < decay[i - 1].second;
    {
      std::string detail;
      for (const auto& [s, dev] : decay)
        detail += "(" + std::to_string(s) + ", " + std::to_string(dev) + ") ";
      report.add("approximation-decay-monotone", monotone, detail);
    }
    {
      // Least-squares slope of log(dev) against log(size).
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const auto k = static_cast<double>(decay.size());
      for (const auto& [s, dev] : decay) {
        const double x = std::log(static_cast<double>(s)), y = std::log(dev);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
      report.add("approximation-decay-slope", slope >= -0.9 && slope <= -0.1,
                 "slope = " + std::to_string(slope) + ", band [-0.9, -0.1]");
    }
    {
      const double rate = stkr::eigenvalue_concentration(sk, 200, 100, 0.05, seed + 2);
      report.add("eigenvalue-concentration", rate >= 0.93,
                 "pass-rate = " + std::to_string(rate) + ", need >= 0.93");
    }
    {
      // Complete graph on 4 nodes plus self-loops (all-ones W is p.s.d.).
      const Eigen::MatrixXd W4 = Eigen::MatrixXd::Ones(4, 4);
      const double err4 = stkr::laplacian_identity_check(W4, 0.5, 20, seed + 3);
      report.add("laplacian-identity-k4", err4 <= 1e-8,
                 "max rel err = " + std::to_string(err4));

      stkr::Rng rng(seed + 4);
      Eigen::MatrixXd B(10, 10);
      for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) B(i, j) = rng.next_double();
      const Eigen::MatrixXd W10 = B.transpose() * B;
      const double err10 = stkr::laplacian_identity_check(W10, 0.9, 20, seed + 5);
      report.add("laplacian-identity-random10", err10 <= 1e-8,
                 "max rel err = " + std::to_string(err10));
    }

    if (report_out) *report_out = dup_string(report.text);
    if (!report.all_passed) return fail(STKR_ERR_CHECK_FAILED, "verification checks failed");
    return STKR_OK;
  });
}

}  // extern "C"
