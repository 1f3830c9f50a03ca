#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "stkr/graph.hpp"

using namespace stkr;

TEST_SUITE_BEGIN("graph");

TEST_CASE("smallest valid graph") {
  const auto ds = make_dataset(2, {{0, 1}}, {0, 1});
  CHECK(ds.num_nodes == 2);
  CHECK(ds.num_classes == 2);
  CHECK(ds.num_edges() == 1);
}

TEST_CASE("out-of-range endpoint rejected") {
  CHECK_THROWS_AS(make_dataset(6, {{5, 9}}, {0, 0, 0, 0, 0, 1}), ValidationError);
}

TEST_CASE("self-loops rejected, duplicates collapsed") {
  CHECK_THROWS_AS(make_dataset(2, {{1, 1}}, {0, 1}), ValidationError);
  const auto ds = make_dataset(3, {{0, 1}, {1, 0}, {0, 1}}, {0, 1, 1});
  CHECK(ds.num_edges() == 1);
}

TEST_CASE("file loading with comments and parse errors") {
  const auto edges = testutil::write_temp("g_edges.txt",
                                          "# a comment\n0 1\n1 2\n2 0\n");
  const auto labels = testutil::write_temp("g_labels.txt", "0 0\n1 1\n2 0\n");
  const auto ds = load_dataset(edges, labels);
  CHECK(ds.num_nodes == 3);
  CHECK(ds.num_classes == 2);
  CHECK(ds.num_edges() == 3);

  const auto bad = testutil::write_temp("g_bad.txt", "0 1\nnot an edge\n");
  try {
    load_dataset(bad, labels);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("split size arithmetic") {
  const auto ds = testutil::random_dataset(100, 2, 0.05, 3);
  const auto split = make_split(ds, 0, 0.01, 20, 20);
  CHECK(split.test_ids.size() == 1);
  CHECK(split.train_ids.size() == 20);
  CHECK(split.val_ids.size() == 20);
  CHECK(split.other_ids.size() == 59);
}

TEST_CASE("oversized split rejected") {
  const auto ds = testutil::random_dataset(30, 2, 0.05, 3);
  CHECK_THROWS_AS(make_split(ds, 0, 0.5, 20, 20), ValidationError);
  CHECK_THROWS_AS(make_split(ds, 0, 0.0, 5, 5), ValidationError);
  CHECK_THROWS_AS(make_split(ds, 0, 0.6, 5, 5), ValidationError);
}

TEST_CASE("seed sensitivity and determinism") {
  const auto ds = testutil::random_dataset(100, 2, 0.05, 3);
  const auto a = make_split(ds, 7, 0.1, 20, 20);
  const auto b = make_split(ds, 8, 0.1, 20, 20);
  CHECK(a.train_ids != b.train_ids);
  const auto a2 = make_split(ds, 7, 0.1, 20, 20);
  CHECK(serialize_split(a) == serialize_split(a2));
}

TEST_CASE("split serialization round-trip") {
  const auto ds = testutil::random_dataset(50, 3, 0.05, 9);
  const auto split = make_split(ds, 11, 0.2, 10, 10, Mode::inductive);
  const auto back = deserialize_split(serialize_split(split));
  CHECK(back.seed == split.seed);
  CHECK(back.mode == split.mode);
  CHECK(back.p_test == split.p_test);
  CHECK(back.train_ids == split.train_ids);
  CHECK(back.val_ids == split.val_ids);
  CHECK(back.test_ids == split.test_ids);
  CHECK(back.other_ids == split.other_ids);
}

TEST_CASE("default split sizes") {
  const auto planetoid = testutil::random_dataset(2708, 7, 0.001, 5);
  CHECK(default_split_sizes(planetoid) == std::pair<std::int64_t, std::int64_t>{140, 500});
  const auto physics_like = testutil::random_dataset(300, 5, 0.02, 5);
  CHECK(default_split_sizes(physics_like) ==
        std::pair<std::int64_t, std::int64_t>{100, 100});
}

TEST_CASE("partition property over many draws") {
  const auto ds = testutil::random_dataset(80, 2, 0.05, 21);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto train = 5 + static_cast<std::int64_t>(seed % 13);
    const auto split = make_split(ds, seed, 0.1 + 0.3 * ((seed % 7) / 7.0), train, 10);
    std::set<std::int32_t> all;
    all.insert(split.train_ids.begin(), split.train_ids.end());
    all.insert(split.val_ids.begin(), split.val_ids.end());
    all.insert(split.test_ids.begin(), split.test_ids.end());
    all.insert(split.other_ids.begin(), split.other_ids.end());
    REQUIRE(all.size() == split.train_ids.size() + split.val_ids.size() +
                              split.test_ids.size() + split.other_ids.size());
    REQUIRE(all.size() == 80);
  }
}

TEST_CASE("masking: 2-node graph") {
  const auto ds = make_dataset(2, {{0, 1}}, {0, 1});
  SplitSpec split;
  split.mode = Mode::inductive;
  split.p_test = 0.5;
  split.train_ids = {0};
  split.test_ids = {1};

  const auto vg_i = mask_visible(ds, split);
  CHECK(vg_i.n + vg_i.m == 1);
  CHECK(vg_i.degree[0] == 0.0);

  split.mode = Mode::transductive;
  const auto vg_t = mask_visible(ds, split);
  CHECK(vg_t.n + vg_t.m == 2);
  CHECK(vg_t.degree[0] == 1.0);
  CHECK(vg_t.degree[1] == 1.0);
}

TEST_CASE("six-node example degrees") {
  // edges (1-based): 1-4, 2-4, 5-4, 2-6, 5-6, 6-3
  const auto ds = make_dataset(6, {{0, 3}, {1, 3}, {4, 3}, {1, 5}, {4, 5}, {5, 2}},
                               {0, 0, 0, 1, 1, 1});
  SplitSpec split;
  split.train_ids = {0, 1, 2, 3, 4, 5};
  const auto vg = mask_visible(ds, split);
  const std::vector<double> want = {1, 2, 1, 3, 2, 3};
  for (int i = 0; i < 6; ++i) CHECK(vg.degree[i] == want[i]);
}

TEST_CASE("inductive masking removes every test-incident edge") {
  const auto ds = testutil::random_dataset(60, 2, 0.1, 33);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto split = make_split(ds, seed, 0.3, 10, 10, Mode::inductive);
    const auto vg = mask_visible(ds, split);
    const std::set<std::int32_t> test(split.test_ids.begin(), split.test_ids.end());
    for (const auto id : vg.visible_ids) CHECK(test.count(id) == 0);
    for (const auto id : test) CHECK(vg.position_of[id] == -1);
    // degrees must count only visible-to-visible edges
    for (std::int64_t i = 0; i < vg.n + vg.m; ++i) {
      double expect = 0.0;
      for (const auto& [a, b] : ds.edges) {
        if (a == vg.visible_ids[i] && vg.position_of[b] >= 0) expect += 1.0;
        if (b == vg.visible_ids[i] && vg.position_of[a] >= 0) expect += 1.0;
      }
      CHECK(vg.degree[i] == expect);
    }
  }
}

TEST_CASE("hide_val removes val nodes too") {
  const auto ds = testutil::random_dataset(40, 2, 0.1, 13);
  const auto split = make_split(ds, 5, 0.2, 8, 8, Mode::inductive);
  const auto vg = mask_visible(ds, split, /*hide_val=*/true);
  for (const auto id : split.val_ids) CHECK(vg.position_of[id] == -1);
  CHECK(vg.n == 8);
  CHECK(vg.m == 40 - 8 - split.test_ids.size() - split.val_ids.size());
}

TEST_CASE("labeled nodes come first in visible order") {
  const auto ds = testutil::random_dataset(40, 2, 0.1, 14);
  const auto split = make_split(ds, 2, 0.2, 8, 8);
  const auto vg = mask_visible(ds, split);
  std::vector<std::int32_t> head(vg.visible_ids.begin(), vg.visible_ids.begin() + vg.n);
  auto train_sorted = split.train_ids;
  std::sort(train_sorted.begin(), train_sorted.end());
  CHECK(head == train_sorted);
}

TEST_SUITE_END();
