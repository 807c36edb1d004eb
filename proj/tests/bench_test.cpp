#include "infomenu/bench.hpp"

#include "infomenu/menu_lp.hpp"
#include "test_instances.hpp"

#include <gtest/gtest.h>

using namespace infomenu;

TEST(SinglePrice, PostedPriceExamples) {
  EXPECT_EQ(single_price_revenue({3.0}, {1.0}), 3.0);
  EXPECT_EQ(single_price_revenue({2.0, 2.0}, {0.3, 0.7}), 2.0);
  EXPECT_NEAR(single_price_revenue({1.0, 4.0}, {0.5, 0.5}), 2.0, 1e-15);
  EXPECT_NEAR(single_price_revenue({1.0, 3.0}, {0.5, 0.5}), 1.5, 1e-15);
  EXPECT_THROW(single_price_revenue({1.0}, {0.5, 0.5}), std::invalid_argument);
}

TEST(DiffValues, InstanceShape) {
  const auto g = build_diff_value_instance(3, 0.5);
  ASSERT_EQ(g.dim(), 3u);
  const double total = 0.5 + 0.25 + 0.125;
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(g.type_dist()[i], std::pow(0.5, static_cast<double>(i + 1)) / total, 1e-15);
    EXPECT_NEAR(g.theta(i).squaredNorm(), std::pow(2.0, static_cast<double>(i + 1)), 1e-12);
    EXPECT_NEAR(g.theta(i).norm(), std::abs(g.theta(i)(static_cast<Eigen::Index>(i))), 1e-15);
  }
  EXPECT_THROW(build_diff_value_instance(0, 0.5), std::invalid_argument);
  EXPECT_THROW(build_diff_value_instance(2, 1.5), std::invalid_argument);
  EXPECT_THROW(build_diff_value_instance(2, 0.0), std::invalid_argument);
}

TEST(DiffValues, TwoTypeRatio) {
  // f = (10/11, 1/11), surpluses (10, 100): one price earns 10, a menu 200/11.
  const auto g = build_diff_value_instance(2, 0.1);
  const double single = single_item_full_revelation_revenue(g);
  const double menu = full_surplus_revenue(g);
  EXPECT_NEAR(single, 10.0, 1e-9);
  EXPECT_NEAR(menu, 200.0 / 11.0, 1e-9);
  EXPECT_NEAR(single / menu, 0.55, 1e-12);
  EXPECT_LT(single / menu, 0.5556);
  EXPECT_TRUE(check_full_surplus(g).holds);
}

TEST(DiffValues, RatioShrinksWithMoreTypes) {
  double previous = 1.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto g = build_diff_value_instance(n, 0.1);
    const double ratio = single_item_full_revelation_revenue(g) / full_surplus_revenue(g);
    EXPECT_LE(ratio, previous + 1e-12);
    previous = ratio;
  }
  EXPECT_LT(previous, 0.3);
}

TEST(SingleItem, FiniteBaselines) {
  const auto one = testing_support::matching_instance();
  EXPECT_NEAR(single_item_full_revelation_revenue(one), 0.5, 1e-12);
  const auto same = testing_support::matching_instance(3);
  EXPECT_NEAR(single_item_full_revelation_revenue(same), 0.5, 1e-12);
}

TEST(RandomInstances, ReproducibleAndWellFormed) {
  const auto a = random_instance(3, 4, 5, 42);
  const auto b = random_instance(3, 4, 5, 42);
  const auto c = random_instance(3, 4, 5, 43);
  EXPECT_EQ(a.utilities(), b.utilities());
  EXPECT_EQ(a.prior(), b.prior());
  EXPECT_NE(a.utilities(), c.utilities());
  double total = 0.0;
  for (double p : a.prior()) {
    EXPECT_GT(p, 0.0);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (const auto& t : a.utilities())
    for (const auto& row : t)
      for (double x : row) {
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
      }

  const auto g1 = random_gaussian_instance(3, 2, 7);
  const auto g2 = random_gaussian_instance(3, 2, 7);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(g1.theta(i), g2.theta(i));
}

TEST(RevenueOrdering, SingleItemMenuAndFullSurplus) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto inst = random_instance(2 + seed % 3, 2 + seed % 2, 3, seed);
    const auto lp = solve_exact(inst);
    ASSERT_EQ(lp.status, conic::Status::optimal);
    EXPECT_LE(single_item_full_revelation_revenue(inst), lp.objective + 1e-7);
    EXPECT_LE(lp.objective, full_info_revenue(inst) + 1e-7);

    const auto g = random_gaussian_instance(2 + seed % 2, 2, seed);
    const auto sdp = solve_menu_sdp(g);
    ASSERT_EQ(sdp.status, conic::Status::optimal);
    EXPECT_LE(single_item_full_revelation_revenue(g), sdp.objective + 1e-6);
    EXPECT_LE(sdp.objective, full_surplus_revenue(g) + 1e-6);
  }
}

TEST(GridOracle, NeverBeatsTheSdp) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto g = random_gaussian_instance(2, 2, seed);
    const auto grid = gaussian_grid_oracle(g, 0.05);
    const auto sdp = solve_menu_sdp(g);
    ASSERT_EQ(sdp.status, conic::Status::optimal);
    EXPECT_LE(grid.revenue, sdp.objective + 1e-6);
    EXPECT_GE(grid.revenue, sdp.objective - grid.gap);
    EXPECT_TRUE(evaluate_gaussian_menu(grid.menu, g, 1e-9).pass);
  }
  EXPECT_THROW(gaussian_grid_oracle(build_diff_value_instance(4, 0.5), 0.1), std::invalid_argument);
  EXPECT_THROW(gaussian_grid_oracle(build_diff_value_instance(2, 0.5), 0.3), std::invalid_argument);
}
