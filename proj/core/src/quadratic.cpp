#include "bayesdoe/quadratic.hpp"

#include <Eigen/QR>

#include "bayesdoe/errors.hpp"

namespace bayesdoe {

std::vector<std::string> QuadraticModel::term_names(std::size_t dim) {
  std::vector<std::string> names{"1"};
  for (std::size_t i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i + 1));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      names.push_back("x" + std::to_string(i + 1) + "*x" + std::to_string(j + 1));
    }
  }
  return names;
}

Eigen::VectorXd QuadraticModel::features(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto d = static_cast<std::size_t>(x.size());
  Eigen::VectorXd phi(static_cast<Eigen::Index>(num_terms(d)));
  Eigen::Index k = 0;
  phi(k++) = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) phi(k++) = x(i);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    for (Eigen::Index j = i; j < x.size(); ++j) phi(k++) = x(i) * x(j);
  }
  return phi;
}

double QuadraticModel::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != dim) throw ArgumentError("quadratic input has the wrong dimension");
  return features(x).dot(coefficients);
}

QuadraticModel fit_quadratic(const Eigen::Ref<const Eigen::MatrixXd>& points,
                             const Eigen::Ref<const Eigen::VectorXd>& targets) {
  const auto d = static_cast<std::size_t>(points.cols());
  const auto p = static_cast<Eigen::Index>(QuadraticModel::num_terms(d));
  if (points.rows() != targets.size()) throw ArgumentError("points and targets differ in length");
  if (points.rows() < p) {
    throw InsufficientDataError("a degree-2 fit in " + std::to_string(d) + " variables needs at least " +
                                std::to_string(p) + " rows, got " + std::to_string(points.rows()));
  }
  Eigen::MatrixXd design(points.rows(), p);
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    design.row(r) = QuadraticModel::features(points.row(r).transpose()).transpose();
  }
  // Column scaling keeps the rank decision independent of variable units.
  const Eigen::VectorXd norms = design.colwise().norm().transpose().cwiseMax(1e-300);
  const Eigen::MatrixXd scaled = design * norms.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    const auto names = QuadraticModel::term_names(d);
    std::string deficient;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < p; ++k) {
      if (!deficient.empty()) deficient += ", ";
      deficient += names[static_cast<std::size_t>(perm(k))];
    }
    throw NumericalError("rank-deficient quadratic design (rank " + std::to_string(qr.rank()) + " of " +
                         std::to_string(p) + "); not identifiable: " + deficient);
  }
  QuadraticModel model;
  model.dim = d;
  model.coefficients = norms.cwiseInverse().asDiagonal() * qr.solve(targets);
  return model;
}

QuadraticModel fit_quadratic_oracle(const Dataset& data, std::size_t output_index) {
  if (output_index >= data.num_outputs()) throw ArgumentError("output index out of range");
  return fit_quadratic(data.points(), data.outputs().col(static_cast<Eigen::Index>(output_index)));
}

}  // namespace bayesdoe
