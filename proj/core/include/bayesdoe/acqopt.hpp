#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "bayesdoe/design_space.hpp"

namespace bayesdoe {

struct OptBudget {
  std::size_t candidates = 512;
  std::size_t refinements = 10;
  std::size_t max_local_steps = 60;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const OptBudget&) const = default;
};

struct OptResult {
  Eigen::VectorXd point;  // original units (unit cube for the *_unit variants)
  double value = 0.0;
};

using AcquisitionFn = std::function<double(const Eigen::VectorXd&)>;

/// Global quasi-random probing followed by coordinate pattern-search polish of
/// the best `refinements` probes. Returns the best point found, inside bounds.
OptResult maximize_acquisition(const AcquisitionFn& acq, const DesignSpace& space,
                               const OptBudget& budget);

/// Unit-cube variant. Returns every polished start, best first, followed by
/// the remaining probes in decreasing value; ties break by probe index.
/// `extra_starts` (unit rows) are probed ahead of the quasi-random set.
std::vector<OptResult> maximize_unit_ranked(const AcquisitionFn& acq, std::size_t dim,
                                            const OptBudget& budget,
                                            const Eigen::MatrixXd& extra_starts = {});

/// Pattern search from `start` in the unit cube. Never returns a lower value
/// than acq(start).
OptResult polish_unit(const AcquisitionFn& acq, const Eigen::VectorXd& start, double start_value,
                      std::size_t max_steps);

}  // namespace bayesdoe
