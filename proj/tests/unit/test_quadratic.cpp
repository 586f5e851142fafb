#include <random>

#include <gtest/gtest.h>

#include "bayesdoe/errors.hpp"
#include "bayesdoe/quadratic.hpp"
#include "golden.hpp"

using namespace bayesdoe;

TEST(Quadratic, TermLayout) {
  EXPECT_EQ(QuadraticModel::num_terms(4), 15u);
  EXPECT_EQ(QuadraticModel::term_names(2), (std::vector<std::string>{"1", "x1", "x2", "x1*x1", "x1*x2", "x2*x2"}));
  const Eigen::VectorXd f = QuadraticModel::features(Eigen::Vector2d(2.0, 3.0));
  EXPECT_EQ(f, (Eigen::VectorXd(6) << 1, 2, 3, 4, 6, 9).finished());
}

TEST(Quadratic, RecoversExactPolynomial) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const std::size_t d = 4;
  Eigen::VectorXd beta(static_cast<Eigen::Index>(QuadraticModel::num_terms(d)));
  for (auto& b : beta) b = u(rng);
  Eigen::MatrixXd x(40, 4);
  for (auto& v : x.reshaped()) v = u(rng);
  Eigen::VectorXd y(40);
  for (Eigen::Index i = 0; i < 40; ++i) y(i) = QuadraticModel::features(x.row(i).transpose()).dot(beta);
  const QuadraticModel m = fit_quadratic(x, y);
  EXPECT_LE((m.coefficients - beta).norm(), 1e-6 * beta.norm());
}

TEST(Quadratic, ConstantOutputs) {
  const auto g = testing_support::load_golden("BatchObj");
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(g.data.points().rows(), 4.5);
  const QuadraticModel m = fit_quadratic(g.data.points(), y);
  EXPECT_NEAR(m.coefficients(0), 4.5, 1e-9);
  EXPECT_LE(m.coefficients.tail(14).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Quadratic, BatchObjOracleHasFifteenTerms) {
  const auto g = testing_support::load_golden("BatchObj");
  const QuadraticModel m = fit_quadratic_oracle(g.data, 0);
  EXPECT_EQ(m.coefficients.size(), 15);
  EXPECT_TRUE(m.coefficients.allFinite());
}

TEST(Quadratic, RankDeficientDesignNamesTerms) {
  // Two levels per variable cannot identify the squared terms.
  Eigen::MatrixXd x(8, 2);
  x << 0, 0, 0, 1, 1, 0, 1, 1, 0, 0, 0, 1, 1, 0, 1, 1;
  const Eigen::VectorXd y = x.col(0) + x.col(1);
  try {
    fit_quadratic(x, y);
    FAIL() << "expected a rank error";
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("rank 4 of 6"), std::string::npos) << msg;
    EXPECT_NE(msg.find("not identifiable: x"), std::string::npos) << msg;
  }
  EXPECT_THROW(fit_quadratic(x.topRows(3), y.head(3)), InsufficientDataError);
}
