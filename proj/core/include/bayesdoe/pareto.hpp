#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "bayesdoe/dataset.hpp"

namespace bayesdoe {

/// Ascending indices of the non-dominated rows of `outputs` (n x m) under the
/// per-column senses. Duplicated rows do not dominate each other.
std::vector<std::size_t> pareto_front(const Eigen::Ref<const Eigen::MatrixXd>& outputs,
                                      const std::vector<Sense>& senses);

}  // namespace bayesdoe
