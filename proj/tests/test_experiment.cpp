#include <doctest.h>

#include <filesystem>

#include "helpers.hpp"
#include "stkr/experiment.hpp"

using namespace stkr;

namespace {

ExperimentConfig small_config(Method method) {
  ExperimentConfig cfg;
  cfg.dataset_name = "toy";
  cfg.method = method;
  cfg.p_test = 0.1;
  cfg.seeds = {1, 2};
  cfg.grid.T = {2, 4};
  cfg.grid.eta = {0.8, 0.9};
  cfg.grid.p = {1, 2};
  cfg.grid.beta = {0.1, 0.01};
  cfg.grid.d = {2, 4};
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("method names round-trip") {
  for (Method m : {Method::lp, Method::stkr_lap, Method::stkr_poly, Method::stkr_topd,
                   Method::krr})
    CHECK(method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(method_from_string("bogus"), ValidationError);
}

TEST_CASE("grid parsing") {
  const auto g = parse_grid("eta = 0.5 0.9\np = 3\n# comment\n");
  CHECK(g.eta == std::vector<double>{0.5, 0.9});
  CHECK(g.p == std::vector<int>{3});
  CHECK(g.T == default_grid().T);  // unlisted axes keep defaults
  CHECK_THROWS_AS(parse_grid("q = 1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_grid("eta 0.5\n"), ParseError);
}

TEST_CASE("grid enumeration per method") {
  Grid g;
  g.T = {1, 2, 4};
  g.eta = {0.8, 0.9};
  g.p = {1, 2};
  g.beta = {0.1, 0.01};
  g.d = {2};
  CHECK(enumerate_grid(Method::lp, g).size() == 6);         // T x eta
  CHECK(enumerate_grid(Method::stkr_lap, g).size() == 12);  // eta x beta x T
  CHECK(enumerate_grid(Method::stkr_poly, g).size() == 12); // p x beta x T
  CHECK(enumerate_grid(Method::stkr_topd, g).size() == 2);  // d x beta
  CHECK(enumerate_grid(Method::krr, g).size() == 2);        // beta

  const auto lp = enumerate_grid(Method::lp, g);
  CHECK(lp.front().describe(Method::lp) == "T=1 eta=0.8");
}

TEST_CASE("one-hot targets") {
  const auto ds = make_dataset(4, {{0, 1}}, {0, 2, 1, 2});
  const auto Y = one_hot(ds, {1, 3, 0});
  CHECK(Y.rows() == 3);
  CHECK(Y.cols() == 3);
  CHECK(Y(0, 2) == 1.0);
  CHECK(Y(1, 2) == 1.0);
  CHECK(Y(2, 0) == 1.0);
  CHECK(Y.sum() == 3.0);
}

TEST_CASE("single-point grids run end to end") {
  const auto ds = testutil::random_dataset(100, 2, 0.06, 71);
  for (Method m : {Method::lp, Method::stkr_lap, Method::stkr_poly, Method::stkr_topd,
                   Method::krr}) {
    auto cfg = small_config(m);
    cfg.grid.T = {2};
    cfg.grid.eta = {0.9};
    cfg.grid.p = {2};
    cfg.grid.beta = {0.01};
    cfg.grid.d = {3};
    const auto res = run_experiment(ds, cfg);
    REQUIRE(res.rows.size() == 2);
    for (const auto& row : res.rows) {
      REQUIRE(row.error.empty());
      CHECK(row.val_acc >= 0.0);
      CHECK(row.val_acc <= 1.0);
      CHECK(row.test_acc >= 0.0);
      CHECK(row.test_acc <= 1.0);
      CHECK(!row.hyperparams.empty());
    }
    CHECK(res.summary.seeds == 2);
  }
}

TEST_CASE("label propagation refuses inductive mode") {
  const auto ds = testutil::random_dataset(100, 2, 0.06, 71);
  auto cfg = small_config(Method::lp);
  cfg.mode = Mode::inductive;
  CHECK_THROWS_AS(run_experiment(ds, cfg), ValidationError);
}

TEST_CASE("empty configs are rejected") {
  const auto ds = testutil::random_dataset(100, 2, 0.06, 71);
  auto cfg = small_config(Method::krr);
  cfg.seeds.clear();
  CHECK_THROWS_AS(run_experiment(ds, cfg), ValidationError);
  cfg = small_config(Method::krr);
  cfg.grid.beta.clear();
  CHECK_THROWS_AS(run_experiment(ds, cfg), ValidationError);
}

TEST_CASE("repeated runs are byte-identical") {
  const auto ds = testutil::random_dataset(100, 2, 0.06, 72);
  for (Method m : {Method::stkr_lap, Method::stkr_poly, Method::stkr_topd}) {
    const auto cfg = small_config(m);
    const auto a = run_experiment(ds, cfg);
    const auto b = run_experiment(ds, cfg);
    REQUIRE(results_csv(a.rows) == results_csv(b.rows));
  }
}

TEST_CASE("inductive runs work for kernel methods") {
  // large enough that the unlabeled pool survives hiding both val and test
  const auto ds = testutil::random_dataset(300, 2, 0.03, 73);
  for (Method m : {Method::stkr_lap, Method::stkr_poly, Method::stkr_topd, Method::krr}) {
    CAPTURE(to_string(m));
    auto cfg = small_config(m);
    cfg.mode = Mode::inductive;
    cfg.p_test = 0.15;
    const auto res = run_experiment(ds, cfg);
    for (const auto& row : res.rows) REQUIRE_MESSAGE(row.error.empty(), row.error);
  }
}

TEST_CASE("unusable grids surface as per-seed errors") {
  const auto ds = testutil::random_dataset(90, 2, 0.06, 74);
  auto cfg = small_config(Method::stkr_topd);
  cfg.grid.d = {5000};  // beyond any admissible rank
  const auto res = run_experiment(ds, cfg);
  for (const auto& row : res.rows) CHECK(!row.error.empty());
  CHECK(res.summary.seeds == 0);
}

TEST_CASE("fits never read non-train labels") {
  const auto ds = testutil::random_dataset(80, 3, 0.08, 75);
  const auto split = make_split(ds, 4, 0.1, 12, 12);
  const auto vg = mask_visible(ds, split);
  const auto [gram, ker] = build_normalized_kernel(vg);

  // flip the label of every node outside the train set
  GraphDataset poisoned = ds;
  std::vector<bool> is_train(ds.num_nodes, false);
  for (const auto id : split.train_ids) is_train[id] = true;
  for (std::int64_t i = 0; i < ds.num_nodes; ++i)
    if (!is_train[i]) poisoned.labels[i] = (poisoned.labels[i] + 1) % ds.num_classes;

  std::vector<std::int32_t> eval_ids = split.test_ids;
  eval_ids.insert(eval_ids.end(), split.val_ids.begin(), split.val_ids.end());

  const struct {
    Method method;
    GridPoint gp;
  } cases[] = {
      {Method::lp, {3, 0.8, 0, 0.0, 0}},
      {Method::stkr_lap, {4, 0.9, 0, 0.1, 0}},
      {Method::stkr_poly, {0, 0.0, 2, 0.1, 0}},
      {Method::stkr_topd, {0, 0.0, 0, 0.1, 3}},
      {Method::krr, {0, 0.0, 0, 0.1, 0}},
  };
  for (const auto& c : cases) {
    const auto clean = fit_and_score(ds, vg, gram, ker, c.method, c.gp, 1e-6, eval_ids);
    const auto dirty = fit_and_score(poisoned, vg, gram, ker, c.method, c.gp, 1e-6, eval_ids);
    REQUIRE((clean.scores - dirty.scores).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("result files are written") {
  const auto ds = testutil::random_dataset(100, 2, 0.06, 76);
  auto cfg = small_config(Method::krr);
  cfg.out_dir = (std::filesystem::temp_directory_path() / "stkr_exp_out").string();
  std::filesystem::remove_all(cfg.out_dir);
  run_experiment(ds, cfg);
  CHECK(std::filesystem::exists(cfg.out_dir + "/results.csv"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/summary.csv"));
  CHECK(std::filesystem::exists(cfg.out_dir + "/timings.csv"));
}

TEST_CASE("sweeps") {
  const auto ds = testutil::random_dataset(100, 2, 0.06, 77);
  auto cfg = small_config(Method::stkr_poly);
  cfg.seeds = {1};
  const auto rows = sweep_p(ds, cfg, {1, 2, 4});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].x == 1.0);
  CHECK(rows[2].x == 4.0);

  const auto eta_rows = sweep_eta(ds, cfg, {0.9});
  REQUIRE(eta_rows.size() == 1);
  CHECK(eta_rows[0].x == 0.9);
  CHECK_THROWS_AS(sweep_eta(ds, cfg, {1.0}), ValidationError);
  CHECK_THROWS_AS(sweep_p(ds, cfg, {0}), ValidationError);
}

TEST_CASE("edgeless graphs give label-independent flat sweeps") {
  const auto ds = make_dataset(200, {}, [] {
    std::vector<std::int32_t> l(200);
    for (int i = 0; i < 200; ++i) l[i] = i % 2;
    return l;
  }());
  auto cfg = small_config(Method::stkr_poly);
  cfg.seeds = {3};
  const auto rows = sweep_p(ds, cfg, {1, 2, 4});
  REQUIRE(rows.size() == 3);
  // with no edges every method predicts from ridge-shrunk zeros identically
  CHECK(rows[1].mean == doctest::Approx(rows[0].mean));
  CHECK(rows[2].mean == doctest::Approx(rows[0].mean));
}

TEST_SUITE_END();
