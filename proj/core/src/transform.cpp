#include "bayesdoe/transform.hpp"

#include <cmath>

#include "bayesdoe/errors.hpp"

namespace bayesdoe {

Eigen::VectorXd AffineMap::apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != offset.size()) throw ArgumentError("affine map dimension mismatch");
  return ((v - offset).array() / scale.array()).matrix();
}

Eigen::VectorXd AffineMap::invert(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != offset.size()) throw ArgumentError("affine map dimension mismatch");
  return (v.array() * scale.array() + offset.array()).matrix();
}

Eigen::MatrixXd AffineMap::apply_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) out.row(r) = apply(rows.row(r).transpose());
  return out;
}

Eigen::MatrixXd AffineMap::invert_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) out.row(r) = invert(rows.row(r).transpose());
  return out;
}

Transform Transform::fit(const DesignSpace& space, const Eigen::Ref<const Eigen::MatrixXd>& outputs) {
  Transform t;
  t.input.offset = space.lower();
  t.input.scale = space.upper() - space.lower();

  const Eigen::Index m = outputs.cols();
  const Eigen::Index n = outputs.rows();
  t.output.offset = Eigen::VectorXd::Zero(m);
  t.output.scale = Eigen::VectorXd::Ones(m);
  if (n == 0) return t;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mean = outputs.col(j).mean();
    t.output.offset(j) = mean;
    if (n >= 2) {
      const double ss = (outputs.col(j).array() - mean).square().sum();
      const double sd = std::sqrt(ss / static_cast<double>(n - 1));
      // Relative cutoff so tiny round-off spread in a constant column is not amplified.
      if (sd > 1e-12 * std::max(1.0, std::abs(mean)) && std::isfinite(sd)) t.output.scale(j) = sd;
    }
  }
  return t;
}

}  // namespace bayesdoe
