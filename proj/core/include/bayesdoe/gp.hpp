#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "bayesdoe/dataset.hpp"
#include "bayesdoe/design_space.hpp"
#include "bayesdoe/kernel.hpp"
#include "bayesdoe/transform.hpp"

namespace bayesdoe {

struct Interval {
  double lower;
  double upper;
  bool operator==(const Interval&) const = default;
};

/// Hyperparameter box, in normalized (unit-cube input, standardized output) space.
struct HyperBounds {
  Interval length_scale{1e-3, 10.0};
  Interval amplitude_sq{1e-3, 1e3};
  Interval noise_var{1e-8, 1.0};
  bool operator==(const HyperBounds&) const = default;
};

struct FitConfig {
  int restarts = 10;
  HyperBounds bounds;
  std::uint64_t seed = 0;
  Smoothness smoothness = Smoothness::five_halves;
  bool ard = true;
  int max_iterations = 200;
  bool operator==(const FitConfig&) const = default;
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
  bool extrapolated = false;  // query outside the training input box
};

struct JointPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Relative diagonal jitter policy: start at 1e-8 * amplitude_sq, escalate x10
/// until the factorization succeeds, give up past 1e-4 * amplitude_sq.
inline constexpr double kJitterStart = 1e-8;
inline constexpr double kJitterMax = 1e-4;

/// Cholesky of `matrix + jitter * scale * I` under the jitter policy.
/// Returns the relative jitter used. Throws NumericalError on failure.
double jittered_cholesky(const Eigen::Ref<const Eigen::MatrixXd>& matrix, double scale,
                         Eigen::LLT<Eigen::MatrixXd>& llt);

/// A conditioned Gaussian process with zero prior mean in transformed space.
/// Immutable after construction; queries are thread-safe.
class GpModel {
 public:
  GpModel() = default;

  /// Conditions on `points` (original units, rows) and `targets` (original
  /// output units) with fixed hyperparameters.
  GpModel(KernelParams kernel, double noise_var, Transform transform,
          const Eigen::Ref<const Eigen::MatrixXd>& points,
          const Eigen::Ref<const Eigen::VectorXd>& targets);

  const KernelParams& kernel() const noexcept { return kernel_; }
  double noise_var() const noexcept { return noise_var_; }
  double prior_mean() const noexcept { return 0.0; }
  const Transform& transform() const noexcept { return transform_; }
  double jitter() const noexcept { return jitter_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(inputs_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(inputs_.cols()); }

  /// Training inputs in the unit cube, targets in standardized units.
  const Eigen::MatrixXd& train_inputs() const noexcept { return inputs_; }
  const Eigen::VectorXd& train_targets() const noexcept { return targets_; }
  const Eigen::MatrixXd& factor() const noexcept { return factor_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }

  /// Posterior of the latent function at `query` (original units).
  Posterior posterior(const Eigen::Ref<const Eigen::VectorXd>& query) const;
  /// Posterior at a unit-cube point, in standardized output units.
  Posterior posterior_normalized(const Eigen::Ref<const Eigen::VectorXd>& unit_query) const;
  /// Joint posterior over unit-cube rows, in standardized output units.
  JointPosterior joint_posterior_normalized(const Eigen::Ref<const Eigen::MatrixXd>& unit_rows) const;

  /// Same hyperparameters and transform, one more (unit-cube, standardized) observation.
  GpModel with_observation(const Eigen::Ref<const Eigen::VectorXd>& unit_point,
                           double normalized_target) const;

  /// Log marginal likelihood of the training targets in standardized units.
  double log_marginal_likelihood() const;

  double to_normalized_output(double y) const;
  double from_normalized_output(double y) const;

 private:
  void factorize();

  KernelParams kernel_;
  double noise_var_ = 0.0;
  Transform transform_;
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd targets_;
  Eigen::MatrixXd factor_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
};

struct LmlResult {
  double value = 0.0;
  /// d/d log(length_scale_d) for each d, then d/d log(amplitude_sq), d/d log(noise_var).
  Eigen::VectorXd gradient;
};

/// Log marginal likelihood of standardized targets under the given hyperparameters.
LmlResult lml_with_gradient(const Eigen::Ref<const Eigen::MatrixXd>& unit_points,
                            const Eigen::Ref<const Eigen::VectorXd>& normalized_targets,
                            const KernelParams& kernel, double noise_var);

/// Fits kernel and noise hyperparameters by multi-restart maximization of the
/// log marginal likelihood over the log-space box of `config.bounds`.
GpModel fit_gp(const DesignSpace& space, const Eigen::Ref<const Eigen::MatrixXd>& points,
               const Eigen::Ref<const Eigen::VectorXd>& targets, const FitConfig& config = {});
GpModel fit_gp(const DesignSpace& space, const Dataset& data, std::size_t output_index,
               const FitConfig& config = {});

/// LML of `data`'s output column under `model`'s hyperparameters and transform.
double log_marginal_likelihood(const GpModel& model, const Dataset& data, std::size_t output_index);

}  // namespace bayesdoe
