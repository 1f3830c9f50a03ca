#include <doctest.h>

#include "helpers.hpp"
#include "stkr/labelprop.hpp"

using namespace stkr;

TEST_SUITE_BEGIN("labelprop");

TEST_CASE("eta zero returns the seed labels") {
  const auto gram = testutil::random_psd_gram(12, 4, 0.3, 5);
  const Eigen::MatrixXd Y = testutil::random_labels(4, 2, 6);
  Eigen::MatrixXd seed = Eigen::MatrixXd::Zero(12, 2);
  seed.topRows(4) = Y;
  CHECK((label_prop_exact(gram, Y, 0.0) - seed).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((label_prop_iterative(gram, Y, 0.0, 10) - seed).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("two-node closed form") {
  // single edge, one labeled node with y = 1: S = [[0,1],[1,0]],
  // (I - eta S)^{-1} [1; 0] = [1, eta] / (1 - eta^2)
  const auto vg = testutil::full_visible(2, {{0, 1}}, 1);
  const auto [gram, ker] = build_normalized_kernel(vg);
  Eigen::MatrixXd Y(1, 1);
  Y << 1.0;
  const double eta = 0.5;
  const auto out = label_prop_exact(gram, Y, eta);
  CHECK(out(0, 0) == doctest::Approx(1.0 / (1.0 - 0.25)).epsilon(1e-9));
  CHECK(out(1, 0) == doctest::Approx(0.5 / (1.0 - 0.25)).epsilon(1e-9));
}

TEST_CASE("iterates converge to the exact fixed point") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::int64_t N = 15 + static_cast<std::int64_t>(seed);
    const auto edges = testutil::random_edges(N, 0.2, seed + 700);
    const auto vg = testutil::full_visible(N, edges, 4);
    const auto [gram, ker] = build_normalized_kernel(vg);
    const Eigen::MatrixXd Y = testutil::random_labels(4, 2, seed + 701);
    for (double eta : {0.3, 0.9, 0.99}) {
      const auto exact = label_prop_exact(gram, Y, eta);
      // geometric contraction: enough steps drive the gap below 1e-6
      const std::int64_t steps =
          static_cast<std::int64_t>(std::ceil(std::log(1e-9) / std::log(eta))) + 1;
      const auto iter = label_prop_iterative(gram, Y, eta, steps);
      REQUIRE((iter - exact).cwiseAbs().maxCoeff() <=
              1e-6 * std::max(1.0, exact.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("more steps mean more mass spread") {
  const auto vg = testutil::full_visible(10, testutil::random_edges(10, 0.4, 31), 3);
  const auto [gram, ker] = build_normalized_kernel(vg);
  Eigen::MatrixXd Y = Eigen::MatrixXd::Ones(3, 1);
  const auto one = label_prop_iterative(gram, Y, 0.9, 1);
  const auto zero = label_prop_iterative(gram, Y, 0.9, 0);
  CHECK(zero.bottomRows(7).cwiseAbs().maxCoeff() == 0.0);
  CHECK(one.topRows(3).minCoeff() >= zero.topRows(3).minCoeff() - 1e-12);
}

TEST_CASE("eta outside [0, 1) is rejected") {
  const auto gram = testutil::random_psd_gram(10, 3, 0.3, 41);
  const Eigen::MatrixXd Y = testutil::random_labels(3, 1, 42);
  CHECK_THROWS_AS(label_prop_exact(gram, Y, 1.0), ValidationError);
  CHECK_THROWS_AS(label_prop_exact(gram, Y, -0.2), ValidationError);
  CHECK_THROWS_AS(label_prop_iterative(gram, Y, 1.5, 3), ValidationError);
}

TEST_SUITE_END();
