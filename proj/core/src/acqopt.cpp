#include "bayesdoe/acqopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bayesdoe/errors.hpp"
#include "bayesdoe/low_discrepancy.hpp"

namespace bayesdoe {

namespace {
constexpr double kInitialStep = 0.05;
constexpr double kMinStep = 1e-7;
}  // namespace

void OptBudget::validate() const {
  if (candidates < 1 || refinements < 1 || max_local_steps < 1) {
    throw ArgumentError("optimizer budget entries must all be positive");
  }
}

OptResult polish_unit(const AcquisitionFn& acq, const Eigen::VectorXd& start, double start_value,
                      std::size_t max_steps) {
  OptResult best{start, start_value};
  double step = kInitialStep;
  for (std::size_t it = 0; it < max_steps && step >= kMinStep; ++it) {
    bool improved = false;
    for (Eigen::Index c = 0; c < best.point.size(); ++c) {
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd trial = best.point;
        trial(c) = std::clamp(trial(c) + sign * step, 0.0, 1.0);
        if (trial(c) == best.point(c)) continue;
        const double v = acq(trial);
        if (std::isfinite(v) && v > best.value) {
          best = {std::move(trial), v};
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

std::vector<OptResult> maximize_unit_ranked(const AcquisitionFn& acq, std::size_t dim,
                                            const OptBudget& budget,
                                            const Eigen::MatrixXd& extra_starts) {
  budget.validate();
  if (dim == 0) throw ArgumentError("cannot optimize over a zero-dimensional space");
  const HaltonSequence seq(dim, budget.seed);
  const std::size_t n_extra = static_cast<std::size_t>(extra_starts.rows());
  const std::size_t total = n_extra + budget.candidates;

  std::vector<Eigen::VectorXd> probes;
  probes.reserve(total);
  for (std::size_t i = 0; i < n_extra; ++i) {
    probes.push_back(extra_starts.row(static_cast<Eigen::Index>(i)).transpose().cwiseMax(0.0).cwiseMin(1.0));
  }
  for (std::size_t i = 0; i < budget.candidates; ++i) probes.push_back(seq.point(i));

  std::vector<double> values(total);
  std::size_t finite = 0;
  for (std::size_t i = 0; i < total; ++i) {
    values[i] = acq(probes[i]);
    if (std::isfinite(values[i])) ++finite;
  }
  if (finite == 0) {
    throw OptimizationError("acquisition was non-finite on every candidate");
  }

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rank_value = [&](std::size_t i) {
    return std::isfinite(values[i]) ? values[i] : -std::numeric_limits<double>::infinity();
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rank_value(a) > rank_value(b); });

  const std::size_t n_polish = std::min(budget.refinements, finite);
  std::vector<OptResult> polished;
  polished.reserve(n_polish);
  for (std::size_t k = 0; k < n_polish; ++k) {
    const std::size_t i = order[k];
    polished.push_back(polish_unit(acq, probes[i], values[i], budget.max_local_steps));
  }
  std::stable_sort(polished.begin(), polished.end(),
                   [](const OptResult& a, const OptResult& b) { return a.value > b.value; });
  for (std::size_t k = n_polish; k < total; ++k) {
    const std::size_t i = order[k];
    if (!std::isfinite(values[i])) break;
    polished.push_back({probes[i], values[i]});
  }
  return polished;
}

OptResult maximize_acquisition(const AcquisitionFn& acq, const DesignSpace& space,
                               const OptBudget& budget) {
  if (space.dim() == 0) throw ArgumentError("design space is empty");
  const AcquisitionFn unit_acq = [&](const Eigen::VectorXd& u) { return acq(space.from_unit(u)); };
  const auto ranked = maximize_unit_ranked(unit_acq, space.dim(), budget);
  OptResult best = ranked.front();
  best.point = space.clamp(space.from_unit(best.point));
  return best;
}

}  // namespace bayesdoe
