#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bayesdoe/dataset.hpp"
#include "bayesdoe/gp.hpp"

namespace bayesdoe {

enum class AcquisitionKind { ei, ucb, qei, efi, scalarized_ei };
enum class IncumbentSource { best_observed, best_posterior_mean };

std::string to_string(AcquisitionKind kind);
std::string to_string(IncumbentSource source);
AcquisitionKind parse_acquisition_kind(const std::string& text);
IncumbentSource parse_incumbent_source(const std::string& text);

/// Best value so far, in standardized objective units.
struct Incumbent {
  double value = 0.0;
  IncumbentSource source = IncumbentSource::best_posterior_mean;
};

struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::ei;
  double beta = 2.0;
  std::size_t mc_samples = 1024;
  std::uint64_t seed = 0;
  std::vector<double> weights;  // scalarization weights; drawn per candidate when empty
  double rho = 0.05;
  IncumbentSource incumbent = IncumbentSource::best_posterior_mean;

  void validate() const;
  bool operator==(const AcquisitionSpec&) const = default;
};

struct ConstraintSpec {
  std::size_t output_index = 0;
  double threshold = 0.0;
  ConstraintDirection direction = ConstraintDirection::le;
  bool operator==(const ConstraintSpec&) const = default;
};

/// Constraint specs for every constraint-role column of `data`.
std::vector<ConstraintSpec> constraint_specs(const Dataset& data);

/// Closed-form EI for maximization; `post` and `incumbent` share units.
double expected_improvement(const Posterior& post, const Incumbent& incumbent);

double ucb(const Posterior& post, double beta);

struct McConfig {
  std::size_t samples = 1024;
  std::uint64_t seed = 0;
};

struct McEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Monte-Carlo batch EI, E[max(0, max_j f(x_j) - incumbent)], over `batch`
/// rows in original units. Exact duplicate rows are collapsed first. Column j
/// of the normal draws depends only on (seed, j), so nested batches share
/// random numbers.
McEstimate q_expected_improvement(const GpModel& model,
                                  const Eigen::Ref<const Eigen::MatrixXd>& batch,
                                  const Incumbent& incumbent, const McConfig& mc);

/// Same estimator on unit-cube rows with caller-supplied standard normal
/// draws (samples x at least q columns).
McEstimate q_expected_improvement_normalized(const GpModel& model,
                                             const Eigen::Ref<const Eigen::MatrixXd>& unit_batch,
                                             const Incumbent& incumbent,
                                             const Eigen::Ref<const Eigen::MatrixXd>& draws);

/// P(constraint satisfied) from a posterior in the same units as `threshold`.
double probability_of_feasibility(const Posterior& post, double threshold,
                                  ConstraintDirection direction);

/// PoF at `query` (original units); the threshold is mapped through the
/// constraint model's output transform.
double probability_of_feasibility(const GpModel& constraint_model,
                                  const Eigen::Ref<const Eigen::VectorXd>& query,
                                  const ConstraintSpec& spec);

struct EfiResult {
  double value = 0.0;
  /// No feasible incumbent exists: the value is the product of PoFs alone.
  bool feasibility_only = false;
};

/// EI(query) * prod_j PoF_j(query). Without an incumbent, falls back to the
/// pure feasibility search.
EfiResult expected_feasible_improvement(const GpModel& objective_model,
                                        std::span<const GpModel> constraint_models,
                                        const Eigen::Ref<const Eigen::VectorXd>& query,
                                        const std::optional<Incumbent>& incumbent,
                                        std::span<const ConstraintSpec> specs);

/// Incumbent over the training rows of `model`, restricted to rows with
/// mask[i] true when a mask is given. Empty when no row qualifies.
std::optional<Incumbent> find_incumbent(const GpModel& model, IncumbentSource source,
                                        const std::vector<bool>* mask = nullptr);

/// min_i(w_i * y_i) + rho * sum_i(w_i * y_i), maximization form.
double augmented_chebyshev(const Eigen::Ref<const Eigen::VectorXd>& outputs,
                           const Eigen::Ref<const Eigen::VectorXd>& weights, double rho);

/// Uniform draw from the probability simplex of dimension m.
Eigen::VectorXd sample_simplex(std::size_t m, std::mt19937_64& rng);

}  // namespace bayesdoe
