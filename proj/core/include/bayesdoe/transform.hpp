#pragma once

#include <Eigen/Core>

#include "bayesdoe/design_space.hpp"

namespace bayesdoe {

/// Per-coordinate affine map v -> (v - offset) / scale.
struct AffineMap {
  Eigen::VectorXd offset;
  Eigen::VectorXd scale;

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  Eigen::VectorXd invert(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  Eigen::MatrixXd apply_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;
  Eigen::MatrixXd invert_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;

  bool operator==(const AffineMap& o) const { return offset == o.offset && scale == o.scale; }
};

/// Inputs go to the unit cube via the space bounds; outputs are
/// standardized to zero mean and unit sample standard deviation. A constant
/// (or single-row) output column keeps unit scale.
struct Transform {
  AffineMap input;
  AffineMap output;

  static Transform fit(const DesignSpace& space, const Eigen::Ref<const Eigen::MatrixXd>& outputs);

  bool operator==(const Transform&) const = default;
};

}  // namespace bayesdoe
