#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bayesdoe/acqopt.hpp"
#include "bayesdoe/acquisition.hpp"
#include "bayesdoe/design_space.hpp"
#include "bayesdoe/gp.hpp"

namespace bayesdoe {

enum class BatchStrategy { joint_qei, constant_liar, local_penalization };

std::string to_string(BatchStrategy strategy);
/// Accepts "joint_qei" (alias "qei"), "constant_liar", "local_penalization".
BatchStrategy parse_batch_strategy(const std::string& text);

inline constexpr std::size_t kDefaultMaxBatch = 16;
/// Minimum normalized distance between any two batch rows (and pending points).
inline constexpr double kDuplicateTolerance = 1e-6;

/// Everything batch construction needs from a campaign. Models are fitted on
/// maximization-canonical outputs.
struct BatchContext {
  DesignSpace space;
  GpModel objective;
  /// Absent only when constraints exist and nothing observed is feasible.
  std::optional<Incumbent> incumbent;
  std::vector<GpModel> constraints;
  std::vector<ConstraintSpec> constraint_specs;
  AcquisitionSpec acquisition;
  OptBudget budget;
  Eigen::MatrixXd pending;  // original units, rows
  std::size_t max_batch = kDefaultMaxBatch;
};

struct BatchResult {
  Eigen::MatrixXd points;     // q x d, original units
  std::vector<double> values;  // acquisition value at selection time, per row
  std::optional<double> joint_value;  // qEI of the whole batch (joint_qei only)
  bool feasibility_only = false;
  BatchStrategy strategy = BatchStrategy::constant_liar;
};

/// Single-point acquisition under the context's models: EFI when constraints
/// are present, UCB when the spec asks for it, EI otherwise. Unit-cube input.
double point_acquisition(const BatchContext& ctx, const GpModel& objective,
                         const std::vector<GpModel>& constraints, const Eigen::VectorXd& unit);

/// Builds a q-point batch with the given strategy.
BatchResult suggest_batch(const BatchContext& ctx, std::size_t q, BatchStrategy strategy);

/// Lipschitz estimate of the objective posterior mean (unit-cube inputs,
/// standardized outputs) from central differences over a quasi-random set.
double estimate_lipschitz(const GpModel& model, std::size_t probes, std::uint64_t seed);

}  // namespace bayesdoe
