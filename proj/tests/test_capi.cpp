#include <doctest.h>

#include <cstring>
#include <string>

#include "helpers.hpp"
#include "stkr/capi.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  stkr_string_free(s);
  return out;
}

/* Ring of 100 nodes plus chords within each half; labels split 50/50. */
stkr_dataset* load_toy() {
  std::string edge_body, label_body;
  for (int i = 0; i < 100; ++i) {
    edge_body += std::to_string(i) + " " + std::to_string((i + 1) % 100) + "\n";
    if (i + 5 < 100 && (i / 50) == ((i + 5) / 50))
      edge_body += std::to_string(i) + " " + std::to_string(i + 5) + "\n";
    label_body += std::to_string(i) + " " + std::to_string(i < 50 ? 0 : 1) + "\n";
  }
  const auto edges = testutil::write_temp("capi_edges.txt", edge_body);
  const auto labels = testutil::write_temp("capi_labels.txt", label_body);
  stkr_dataset* ds = nullptr;
  REQUIRE(stkr_dataset_load(edges.c_str(), labels.c_str(), &ds) == STKR_OK);
  return ds;
}

}  // namespace

TEST_SUITE_BEGIN("capi");

TEST_CASE("dataset loading and accessors") {
  stkr_dataset* ds = load_toy();
  CHECK(stkr_dataset_num_nodes(ds) == 100);
  CHECK(stkr_dataset_num_edges(ds) == 190);
  CHECK(stkr_dataset_num_classes(ds) == 2);
  stkr_dataset_free(ds);
}

TEST_CASE("null and missing-file errors") {
  stkr_dataset* ds = nullptr;
  CHECK(stkr_dataset_load(nullptr, nullptr, &ds) == STKR_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(stkr_last_error()) > 0);
  CHECK(stkr_dataset_load("/nonexistent.edges", "/nonexistent.labels", &ds) != STKR_OK);
  CHECK(ds == nullptr);

  char* out = nullptr;
  CHECK(stkr_run_experiment(nullptr, "method = lp\n", &out) == STKR_ERR_INVALID_ARGUMENT);
}

TEST_CASE("malformed inputs map to parse errors") {
  const auto edges = testutil::write_temp("capi_bad_edges.txt", "0 1\noops\n");
  const auto labels = testutil::write_temp("capi_bad_labels.txt", "0 0\n1 1\n");
  stkr_dataset* ds = nullptr;
  CHECK(stkr_dataset_load(edges.c_str(), labels.c_str(), &ds) == STKR_ERR_PARSE);
}

TEST_CASE("experiments through the C surface") {
  stkr_dataset* ds = load_toy();
  const char* config =
      "name = toy\n"
      "method = stkr-poly\n"
      "mode = transductive\n"
      "p_test = 0.125\n"
      "seeds = 1 2\n"
      "T = 2\n"
      "p = 1 2\n"
      "beta = 0.1\n";
  char* summary = nullptr;
  REQUIRE(stkr_run_experiment(ds, config, &summary) == STKR_OK);
  const std::string text = take(summary);
  CHECK(text.find("toy,stkr-poly,transductive") != std::string::npos);

  char* bad = nullptr;
  CHECK(stkr_run_experiment(ds, "method = bogus\n", &bad) == STKR_ERR_INVALID_ARGUMENT);
  CHECK(std::string(stkr_last_error()).find("bogus") != std::string::npos);
  stkr_dataset_free(ds);
}

TEST_CASE("sweeps through the C surface") {
  stkr_dataset* ds = load_toy();
  const char* config =
      "name = toy\n"
      "method = stkr-poly\n"
      "p_test = 0.125\n"
      "seeds = 1\n"
      "T = 2\n"
      "beta = 0.1\n"
      "p_list = 1 2\n";
  char* csv = nullptr;
  REQUIRE(stkr_sweep_p(ds, config, &csv) == STKR_OK);
  const std::string sweep = take(csv);
  CHECK(sweep.rfind("p,test_mean,test_std", 0) == 0);

  const char* eta_config =
      "name = toy\n"
      "p_test = 0.125\n"
      "seeds = 1\n"
      "T = 2\n"
      "beta = 0.1\n"
      "eta_list = 0.9\n";
  char* eta_csv = nullptr;
  REQUIRE(stkr_sweep_eta(ds, eta_config, &eta_csv) == STKR_OK);
  CHECK(take(eta_csv).rfind("eta,test_mean,test_std", 0) == 0);
  stkr_dataset_free(ds);
}

TEST_CASE("built-in verification suite") {
  char* report = nullptr;
  CHECK(stkr_verify(7, &report) == STKR_OK);
  const std::string text = take(report);
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("FAIL") == std::string::npos);
}

TEST_SUITE_END();
