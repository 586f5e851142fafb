#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "bayesdoe/acqopt.hpp"
#include "bayesdoe/errors.hpp"

using namespace bayesdoe;

TEST(MaximizeAcquisition, OneDimensionalPeak) {
  const DesignSpace space({{"x", 0.0, 1.0, ""}});
  const auto r = maximize_acquisition([](const Eigen::VectorXd& x) { return -(x(0) - 0.3) * (x(0) - 0.3); },
                                      space, {});
  EXPECT_NEAR(r.point(0), 0.3, 1e-3);
}

TEST(MaximizeAcquisition, MonotoneReachesUpperCorner) {
  const DesignSpace space({{"a", -2.0, 5.0, ""}, {"b", 10.0, 20.0, ""}, {"c", 0.0, 1.0, ""}});
  const auto r = maximize_acquisition([](const Eigen::VectorXd& x) { return x.sum(); }, space, {});
  EXPECT_NEAR(r.point(0), 5.0, 1e-6);
  EXPECT_NEAR(r.point(1), 20.0, 1e-6);
  EXPECT_NEAR(r.point(2), 1.0, 1e-6);
}

TEST(MaximizeAcquisition, AtLeastDenseGridOptimum) {
  const DesignSpace space({{"x", 0.0, 1.0, ""}, {"y", 0.0, 1.0, ""}});
  // Two bumps; the taller one is narrow.
  const AcquisitionFn f = [](const Eigen::VectorXd& x) {
    const double a = std::exp(-((x(0) - 0.2) * (x(0) - 0.2) + (x(1) - 0.7) * (x(1) - 0.7)) / 0.02);
    const double b = 1.3 * std::exp(-((x(0) - 0.8) * (x(0) - 0.8) + (x(1) - 0.25) * (x(1) - 0.25)) / 0.002);
    return a + b;
  };
  double grid_best = -INFINITY;
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 200; ++j) grid_best = std::max(grid_best, f(Eigen::Vector2d(i / 199.0, j / 199.0)));
  }
  const auto r = maximize_acquisition(f, space, {});
  EXPECT_GE(r.value, grid_best - 1e-6 * std::abs(grid_best));
  EXPECT_EQ(r.value, f(r.point));
}

TEST(MaximizeAcquisition, StaysInBoundsAndIsDeterministic) {
  const DesignSpace space({{"x", -1.0, 1.0, ""}, {"y", 3.0, 4.0, ""}});
  const AcquisitionFn f = [](const Eigen::VectorXd& x) { return std::sin(7.0 * x(0)) * std::cos(5.0 * x(1)); };
  OptBudget budget;
  budget.seed = 11;
  const auto a = maximize_acquisition(f, space, budget);
  const auto b = maximize_acquisition(f, space, budget);
  EXPECT_EQ(a.point, b.point);
  EXPECT_TRUE(space.contains(a.point));
}

TEST(PolishUnit, NeverWorseThanStart) {
  const AcquisitionFn f = [](const Eigen::VectorXd& u) { return std::cos(9.0 * u(0)) + std::sin(4.0 * u(1)); };
  for (double s : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    const Eigen::Vector2d start(s, 1.0 - s);
    const double v = f(start);
    const auto r = polish_unit(f, start, v, 60);
    EXPECT_GE(r.value, v);
    EXPECT_GE(r.point.minCoeff(), 0.0);
    EXPECT_LE(r.point.maxCoeff(), 1.0);
  }
}

TEST(MaximizeUnitRanked, SortedAndHonorsExtraStarts) {
  const AcquisitionFn f = [](const Eigen::VectorXd& u) { return -(u - Eigen::Vector2d(0.9, 0.1)).squaredNorm(); };
  OptBudget budget;
  budget.candidates = 64;
  budget.refinements = 1;
  Eigen::MatrixXd extra(1, 2);
  extra << 0.9, 0.1;
  const auto ranked = maximize_unit_ranked(f, 2, budget, extra);
  ASSERT_EQ(ranked.size(), 65u);
  EXPECT_EQ(ranked.front().value, 0.0);
  for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_LE(ranked[i].value, ranked[i - 1].value);
}

TEST(MaximizeAcquisition, RejectsDegenerateInput) {
  const DesignSpace space({{"x", 0.0, 1.0, ""}});
  EXPECT_THROW(maximize_acquisition([](const Eigen::VectorXd&) { return std::numeric_limits<double>::quiet_NaN(); },
                                    space, {}),
               OptimizationError);
  OptBudget bad;
  bad.candidates = 0;
  EXPECT_THROW(maximize_acquisition([](const Eigen::VectorXd& x) { return x(0); }, space, bad), ArgumentError);
}
