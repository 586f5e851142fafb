#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bayesdoe/dataset.hpp"

namespace bayesdoe {

/// Full degree-2 polynomial in d variables. Coefficient order:
///   1, x1..xd, then x_i * x_j for i <= j in row-major order
///   (x1^2, x1 x2, ..., x1 xd, x2^2, ..., xd^2).
struct QuadraticModel {
  Eigen::VectorXd coefficients;
  std::size_t dim = 0;

  static std::size_t num_terms(std::size_t dim) { return 1 + dim + dim * (dim + 1) / 2; }
  /// Monomial names in coefficient order, e.g. "1", "x1", "x1*x2".
  static std::vector<std::string> term_names(std::size_t dim);
  static Eigen::VectorXd features(const Eigen::Ref<const Eigen::VectorXd>& x);

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Least-squares fit of the full quadratic to `output_index` of `data`.
QuadraticModel fit_quadratic_oracle(const Dataset& data, std::size_t output_index);
QuadraticModel fit_quadratic(const Eigen::Ref<const Eigen::MatrixXd>& points,
                             const Eigen::Ref<const Eigen::VectorXd>& targets);

}  // namespace bayesdoe
