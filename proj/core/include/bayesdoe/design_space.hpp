#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bayesdoe {

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  std::string unit;  // informational only

  bool operator==(const Variable&) const = default;
};

/// Box of named continuous design variables. Validated on construction.
class DesignSpace {
 public:
  DesignSpace() = default;
  explicit DesignSpace(std::vector<Variable> variables);

  std::size_t dim() const noexcept { return variables_.size(); }
  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const Variable& operator[](std::size_t i) const { return variables_.at(i); }

  /// Index of the variable called `name`, or dim() if absent.
  std::size_t index_of(const std::string& name) const;

  Eigen::VectorXd lower() const;
  Eigen::VectorXd upper() const;

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd clamp(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Affine maps between original units and the unit cube.
  Eigen::VectorXd to_unit(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd from_unit(const Eigen::Ref<const Eigen::VectorXd>& u) const;
  Eigen::MatrixXd to_unit_rows(const Eigen::Ref<const Eigen::MatrixXd>& points) const;
  Eigen::MatrixXd from_unit_rows(const Eigen::Ref<const Eigen::MatrixXd>& units) const;

  bool operator==(const DesignSpace&) const = default;

 private:
  std::vector<Variable> variables_;
};

}  // namespace bayesdoe
