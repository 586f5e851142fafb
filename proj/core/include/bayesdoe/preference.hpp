#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bayesdoe/acqopt.hpp"
#include "bayesdoe/dataset.hpp"
#include "bayesdoe/design_space.hpp"
#include "bayesdoe/gp.hpp"
#include "bayesdoe/kernel.hpp"

namespace bayesdoe {

/// Pairwise preferences over n designs. (winner, loser) means winner is
/// preferred. validity[i] == false marks a failed design with no preferences.
struct PreferenceSet {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<bool> validity;

  std::size_t num_designs() const noexcept { return validity.size(); }
  /// Throws ArgumentError on self-pairs, contradictions, or bad indices.
  void validate() const;
  /// Antisymmetric matrix form: +1 where i beats j, -1 where j beats i, 0 otherwise.
  Eigen::MatrixXi matrix() const;
};

/// Preferences from interval-valued measurements y_i +/- error_bound. A pair
/// is emitted only when the two intervals are disjoint.
PreferenceSet build_preferences(const Eigen::Ref<const Eigen::VectorXd>& outputs, double error_bound,
                                Sense sense, const std::vector<bool>& validity = {});

struct PreferenceConfig {
  double noise = 0.1;  // probit noise on latent differences
  Smoothness smoothness = Smoothness::five_halves;
  /// Fixed unit-cube length scale; when empty one is picked from the grid
  /// by Laplace evidence.
  std::optional<double> length_scale;
  std::vector<double> length_scale_grid{0.05, 0.1, 0.2, 0.35, 0.5, 1.0};
  int max_newton_iterations = 200;
  double gradient_tolerance = 1e-8;
};

/// Laplace approximation of a GP over a latent utility conditioned on
/// probit pairwise likelihoods.
class LatentUtilityModel {
 public:
  const KernelParams& kernel() const noexcept { return kernel_; }
  double noise() const noexcept { return noise_; }
  /// Unit-cube inputs of the valid designs, in ascending design order.
  const Eigen::MatrixXd& inputs() const noexcept { return inputs_; }
  /// design_indices()[k] is the original design index of latent row k.
  const std::vector<std::size_t>& design_indices() const noexcept { return design_indices_; }
  const Eigen::VectorXd& latent_mode() const noexcept { return mode_; }
  /// Cholesky factor of I + L^T W L, with K = L L^T and W the likelihood curvature.
  const Eigen::MatrixXd& mode_covariance_factor() const noexcept { return b_factor_; }
  double log_evidence() const noexcept { return log_evidence_; }
  int iterations() const noexcept { return iterations_; }

  /// Latent value at the mode for original design `design`; throws if invalid.
  double latent_at(std::size_t design) const;
  /// Gradient of the penalized log-likelihood at the mode.
  Eigen::VectorXd mode_gradient() const;
  /// Laplace-approximate latent posterior at a unit-cube point.
  Posterior predict_unit(const Eigen::Ref<const Eigen::VectorXd>& unit) const;

 private:
  friend LatentUtilityModel fit_preference_gp(const DesignSpace&, const Eigen::Ref<const Eigen::MatrixXd>&,
                                              const PreferenceSet&, const PreferenceConfig&);
  KernelParams kernel_;
  double noise_ = 0.1;
  Eigen::MatrixXd inputs_;
  std::vector<std::size_t> design_indices_;
  std::vector<std::pair<std::size_t, std::size_t>> latent_pairs_;
  Eigen::VectorXd mode_;
  Eigen::MatrixXd prior_factor_;
  Eigen::VectorXd prior_alpha_;  // K^{-1} mode
  Eigen::MatrixXd b_factor_;
  double log_evidence_ = 0.0;
  int iterations_ = 0;
};

/// Finds the Laplace mode by damped Newton iteration.
LatentUtilityModel fit_preference_gp(const DesignSpace& space,
                                     const Eigen::Ref<const Eigen::MatrixXd>& points,
                                     const PreferenceSet& prefs, const PreferenceConfig& config = {});

/// Maximizes EI over the latent posterior, incumbent = best latent mode value.
Eigen::VectorXd suggest_preferential(const LatentUtilityModel& model, const DesignSpace& space,
                                     const OptBudget& budget);

}  // namespace bayesdoe
