#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bayesdoe/design_space.hpp"

namespace bayesdoe {

enum class Sense { maximize, minimize };
enum class OutputRole { objective, constraint };
enum class ConstraintDirection { le, ge };

/// Role of one output column. `sense` applies to objectives; `threshold`
/// and `direction` apply to constraints (feasible when y <= threshold for le).
struct OutputColumn {
  std::string name;
  OutputRole role = OutputRole::objective;
  Sense sense = Sense::maximize;
  double threshold = 0.0;
  ConstraintDirection direction = ConstraintDirection::le;
  std::string unit;

  static OutputColumn objective(std::string name, Sense sense = Sense::maximize);
  static OutputColumn constraint(std::string name, double threshold,
                                 ConstraintDirection direction = ConstraintDirection::le);

  bool operator==(const OutputColumn&) const = default;
};

/// Observed designs (original units) and their measured outputs.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t dim, std::vector<OutputColumn> columns);
  Dataset(Eigen::MatrixXd points, Eigen::MatrixXd outputs, std::vector<OutputColumn> columns);

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  std::size_t num_outputs() const noexcept { return columns_.size(); }

  const Eigen::MatrixXd& points() const noexcept { return points_; }
  const Eigen::MatrixXd& outputs() const noexcept { return outputs_; }
  const std::vector<OutputColumn>& columns() const noexcept { return columns_; }

  std::vector<std::size_t> objective_indices() const;
  std::vector<std::size_t> constraint_indices() const;
  /// Column index by name, or num_outputs() if absent.
  std::size_t output_index(const std::string& name) const;

  void append(const Eigen::Ref<const Eigen::VectorXd>& point,
              const Eigen::Ref<const Eigen::VectorXd>& outputs);

  /// Column `index` in maximization-canonical form (minimized objectives negated).
  Eigen::VectorXd canonical_output(std::size_t index) const;

  /// Whether row `row` satisfies every constraint column as observed.
  bool observed_feasible(std::size_t row) const;

  /// Copy with rows sorted lexicographically by (point, outputs).
  Dataset canonically_sorted() const;

  bool operator==(const Dataset& other) const;

 private:
  Eigen::MatrixXd points_;
  Eigen::MatrixXd outputs_;
  std::vector<OutputColumn> columns_;
};

/// Indices of rows of `points` outside `space` (or non-finite).
std::vector<std::size_t> out_of_bounds_rows(const DesignSpace& space,
                                            const Eigen::Ref<const Eigen::MatrixXd>& points);

std::string to_string(Sense sense);
std::string to_string(OutputRole role);
std::string to_string(ConstraintDirection direction);
Sense parse_sense(const std::string& text);
OutputRole parse_role(const std::string& text);
ConstraintDirection parse_direction(const std::string& text);

}  // namespace bayesdoe
