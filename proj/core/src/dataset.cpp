#include "bayesdoe/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bayesdoe/errors.hpp"

namespace bayesdoe {

OutputColumn OutputColumn::objective(std::string name, Sense sense) {
  OutputColumn c;
  c.name = std::move(name);
  c.role = OutputRole::objective;
  c.sense = sense;
  return c;
}

OutputColumn OutputColumn::constraint(std::string name, double threshold,
                                      ConstraintDirection direction) {
  OutputColumn c;
  c.name = std::move(name);
  c.role = OutputRole::constraint;
  c.threshold = threshold;
  c.direction = direction;
  return c;
}

Dataset::Dataset(std::size_t dim, std::vector<OutputColumn> columns)
    : points_(0, static_cast<Eigen::Index>(dim)),
      outputs_(0, static_cast<Eigen::Index>(columns.size())),
      columns_(std::move(columns)) {}

Dataset::Dataset(Eigen::MatrixXd points, Eigen::MatrixXd outputs, std::vector<OutputColumn> columns)
    : points_(std::move(points)), outputs_(std::move(outputs)), columns_(std::move(columns)) {
  if (points_.rows() != outputs_.rows()) {
    throw ArgumentError("points and outputs must have the same number of rows");
  }
  if (static_cast<std::size_t>(outputs_.cols()) != columns_.size()) {
    throw ArgumentError("output matrix width does not match the column roles");
  }
  if (!points_.allFinite() || !outputs_.allFinite()) {
    throw ValidationError("dataset contains missing or non-finite values");
  }
}

std::vector<std::size_t> Dataset::objective_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].role == OutputRole::objective) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Dataset::constraint_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].role == OutputRole::constraint) out.push_back(i);
  }
  return out;
}

std::size_t Dataset::output_index(const std::string& name) const {
  auto it = std::find_if(columns_.begin(), columns_.end(),
                         [&](const OutputColumn& c) { return c.name == name; });
  return static_cast<std::size_t>(it - columns_.begin());
}

void Dataset::append(const Eigen::Ref<const Eigen::VectorXd>& point,
                     const Eigen::Ref<const Eigen::VectorXd>& outputs) {
  if (point.size() != points_.cols() || outputs.size() != outputs_.cols()) {
    throw ArgumentError("appended row has the wrong shape");
  }
  if (!point.allFinite() || !outputs.allFinite()) {
    throw ValidationError("appended row contains missing or non-finite values");
  }
  const Eigen::Index n = points_.rows();
  points_.conservativeResize(n + 1, Eigen::NoChange);
  outputs_.conservativeResize(n + 1, Eigen::NoChange);
  points_.row(n) = point.transpose();
  outputs_.row(n) = outputs.transpose();
}

Eigen::VectorXd Dataset::canonical_output(std::size_t index) const {
  if (index >= columns_.size()) throw ArgumentError("output index out of range");
  Eigen::VectorXd y = outputs_.col(static_cast<Eigen::Index>(index));
  const auto& c = columns_[index];
  if (c.role == OutputRole::objective && c.sense == Sense::minimize) y = -y;
  return y;
}

bool Dataset::observed_feasible(std::size_t row) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto& c = columns_[j];
    if (c.role != OutputRole::constraint) continue;
    const double y = outputs_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j));
    const bool ok = c.direction == ConstraintDirection::le ? y <= c.threshold : y >= c.threshold;
    if (!ok) return false;
  }
  return true;
}

Dataset Dataset::canonically_sorted() const {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(points_.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto key_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < points_.cols(); ++c) {
      if (points_(a, c) != points_(b, c)) return points_(a, c) < points_(b, c);
    }
    for (Eigen::Index c = 0; c < outputs_.cols(); ++c) {
      if (outputs_(a, c) != outputs_(b, c)) return outputs_(a, c) < outputs_(b, c);
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), key_less);
  Dataset out(dim(), columns_);
  out.points_.resize(points_.rows(), points_.cols());
  out.outputs_.resize(outputs_.rows(), outputs_.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.points_.row(static_cast<Eigen::Index>(i)) = points_.row(order[i]);
    out.outputs_.row(static_cast<Eigen::Index>(i)) = outputs_.row(order[i]);
  }
  return out;
}

bool Dataset::operator==(const Dataset& other) const {
  return columns_ == other.columns_ && points_.rows() == other.points_.rows() &&
         points_.cols() == other.points_.cols() && outputs_.cols() == other.outputs_.cols() &&
         points_ == other.points_ && outputs_ == other.outputs_;
}

std::vector<std::size_t> out_of_bounds_rows(const DesignSpace& space,
                                            const Eigen::Ref<const Eigen::MatrixXd>& points) {
  std::vector<std::size_t> bad;
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    if (!space.contains(points.row(r).transpose())) bad.push_back(static_cast<std::size_t>(r));
  }
  return bad;
}

std::string to_string(Sense sense) { return sense == Sense::maximize ? "maximize" : "minimize"; }

std::string to_string(OutputRole role) {
  return role == OutputRole::objective ? "objective" : "constraint";
}

std::string to_string(ConstraintDirection direction) {
  return direction == ConstraintDirection::le ? "le" : "ge";
}

Sense parse_sense(const std::string& text) {
  if (text == "maximize" || text == "max") return Sense::maximize;
  if (text == "minimize" || text == "min") return Sense::minimize;
  throw ArgumentError("unknown objective sense '" + text + "'");
}

OutputRole parse_role(const std::string& text) {
  if (text == "objective") return OutputRole::objective;
  if (text == "constraint") return OutputRole::constraint;
  throw ArgumentError("unknown output role '" + text + "'");
}

ConstraintDirection parse_direction(const std::string& text) {
  if (text == "le" || text == "<=") return ConstraintDirection::le;
  if (text == "ge" || text == ">=") return ConstraintDirection::ge;
  throw ArgumentError("unknown constraint direction '" + text + "'");
}

}  // namespace bayesdoe
