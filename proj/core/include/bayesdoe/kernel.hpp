#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace bayesdoe {

enum class Smoothness { half, three_halves, five_halves };

std::string to_string(Smoothness nu);
Smoothness parse_smoothness(const std::string& text);

/// ARD Matern hyperparameters. Length scales are per input dimension.
struct KernelParams {
  double amplitude_sq = 1.0;
  Eigen::VectorXd length_scales;
  Smoothness smoothness = Smoothness::five_halves;

  /// Throws ArgumentError unless every entry is positive and finite.
  void validate() const;

  bool operator==(const KernelParams& o) const {
    return amplitude_sq == o.amplitude_sq && smoothness == o.smoothness &&
           length_scales.size() == o.length_scales.size() && length_scales == o.length_scales;
  }
};

/// Normalized Matern correlation g(r), with g(0) = 1.
double matern_correlation(Smoothness nu, double r);

/// amplitude_sq * g(r), r = sqrt(sum_d ((a_d - b_d) / l_d)^2).
double matern_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b, const KernelParams& params);

/// Symmetric n x n Gram matrix over the rows of `points`.
Eigen::MatrixXd kernel_matrix(const Eigen::Ref<const Eigen::MatrixXd>& points,
                              const KernelParams& params);

/// n_a x n_b cross-covariance between the rows of `a` and `b`.
Eigen::MatrixXd cross_kernel(const Eigen::Ref<const Eigen::MatrixXd>& a,
                             const Eigen::Ref<const Eigen::MatrixXd>& b,
                             const KernelParams& params);

/// Derivatives of kernel_matrix with respect to log(length_scale_d), d = 0..D-1,
/// followed by the derivative with respect to log(amplitude_sq).
std::vector<Eigen::MatrixXd> kernel_matrix_log_gradients(
    const Eigen::Ref<const Eigen::MatrixXd>& points, const KernelParams& params);

}  // namespace bayesdoe
