#include "bayesdoe/design_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bayesdoe/errors.hpp"

namespace bayesdoe {

DesignSpace::DesignSpace(std::vector<Variable> variables) : variables_(std::move(variables)) {
  if (variables_.empty()) {
    throw ArgumentError("design space needs at least one variable");
  }
  std::set<std::string> seen;
  for (const auto& v : variables_) {
    if (v.name.empty()) {
      throw ArgumentError("design variable names must be non-empty");
    }
    if (!seen.insert(v.name).second) {
      throw ArgumentError("duplicate design variable name '" + v.name + "'");
    }
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper) || !(v.lower < v.upper)) {
      throw ArgumentError("variable '" + v.name + "' needs finite bounds with lower < upper");
    }
  }
}

std::size_t DesignSpace::index_of(const std::string& name) const {
  auto it = std::find_if(variables_.begin(), variables_.end(),
                         [&](const Variable& v) { return v.name == name; });
  return static_cast<std::size_t>(it - variables_.begin());
}

Eigen::VectorXd DesignSpace::lower() const {
  Eigen::VectorXd lo(dim());
  for (std::size_t i = 0; i < dim(); ++i) lo(i) = variables_[i].lower;
  return lo;
}

Eigen::VectorXd DesignSpace::upper() const {
  Eigen::VectorXd hi(dim());
  for (std::size_t i = 0; i < dim(); ++i) hi(i) = variables_[i].upper;
  return hi;
}

bool DesignSpace::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(x(i) >= variables_[i].lower && x(i) <= variables_[i].upper)) return false;
  }
  return true;
}

Eigen::VectorXd DesignSpace::clamp(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd out = x;
  for (std::size_t i = 0; i < dim(); ++i) {
    out(i) = std::clamp(out(i), variables_[i].lower, variables_[i].upper);
  }
  return out;
}

Eigen::VectorXd DesignSpace::to_unit(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw ArgumentError("point dimension does not match design space");
  }
  Eigen::VectorXd u(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto& v = variables_[i];
    u(i) = (x(i) - v.lower) / (v.upper - v.lower);
  }
  return u;
}

Eigen::VectorXd DesignSpace::from_unit(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (static_cast<std::size_t>(u.size()) != dim()) {
    throw ArgumentError("point dimension does not match design space");
  }
  Eigen::VectorXd x(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto& v = variables_[i];
    x(i) = v.lower + u(i) * (v.upper - v.lower);
  }
  return x;
}

Eigen::MatrixXd DesignSpace::to_unit_rows(const Eigen::Ref<const Eigen::MatrixXd>& points) const {
  Eigen::MatrixXd out(points.rows(), points.cols());
  for (Eigen::Index r = 0; r < points.rows(); ++r) out.row(r) = to_unit(points.row(r).transpose());
  return out;
}

Eigen::MatrixXd DesignSpace::from_unit_rows(const Eigen::Ref<const Eigen::MatrixXd>& units) const {
  Eigen::MatrixXd out(units.rows(), units.cols());
  for (Eigen::Index r = 0; r < units.rows(); ++r) out.row(r) = from_unit(units.row(r).transpose());
  return out;
}

}  // namespace bayesdoe
