#include "bayesdoe/kernel.hpp"

#include <cmath>

#include "bayesdoe/errors.hpp"

namespace bayesdoe {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt5 = 2.23606797749979;

void check_dims(Eigen::Index got, const KernelParams& params) {
  if (got != params.length_scales.size()) {
    throw ArgumentError("input dimension " + std::to_string(got) +
                        " does not match kernel dimension " +
                        std::to_string(params.length_scales.size()));
  }
}

// d k / d (r^2 contribution), expressed so that d k / d log l_d = dk_dsq(r) * (delta_d / l_d)^2.
double dk_dscaled_sq(Smoothness nu, double amplitude_sq, double r) {
  switch (nu) {
    case Smoothness::half:
      return r > 0.0 ? amplitude_sq * std::exp(-r) / r : 0.0;
    case Smoothness::three_halves:
      return amplitude_sq * 3.0 * std::exp(-kSqrt3 * r);
    case Smoothness::five_halves:
      return amplitude_sq * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * std::exp(-kSqrt5 * r);
  }
  return 0.0;
}

}  // namespace

std::string to_string(Smoothness nu) {
  switch (nu) {
    case Smoothness::half: return "half";
    case Smoothness::three_halves: return "three_halves";
    case Smoothness::five_halves: return "five_halves";
  }
  return "five_halves";
}

Smoothness parse_smoothness(const std::string& text) {
  if (text == "half" || text == "0.5" || text == "1/2") return Smoothness::half;
  if (text == "three_halves" || text == "1.5" || text == "3/2") return Smoothness::three_halves;
  if (text == "five_halves" || text == "2.5" || text == "5/2") return Smoothness::five_halves;
  throw ArgumentError("unknown Matern smoothness '" + text + "'");
}

void KernelParams::validate() const {
  if (!(std::isfinite(amplitude_sq) && amplitude_sq > 0.0)) {
    throw ArgumentError("kernel amplitude must be positive and finite");
  }
  if (length_scales.size() == 0) throw ArgumentError("kernel needs at least one length scale");
  for (Eigen::Index i = 0; i < length_scales.size(); ++i) {
    if (!(std::isfinite(length_scales(i)) && length_scales(i) > 0.0)) {
      throw ArgumentError("kernel length scales must be positive and finite");
    }
  }
}

double matern_correlation(Smoothness nu, double r) {
  switch (nu) {
    case Smoothness::half:
      return std::exp(-r);
    case Smoothness::three_halves:
      return (1.0 + kSqrt3 * r) * std::exp(-kSqrt3 * r);
    case Smoothness::five_halves:
      return (1.0 + kSqrt5 * r + (5.0 / 3.0) * r * r) * std::exp(-kSqrt5 * r);
  }
  return 0.0;
}

double matern_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b, const KernelParams& params) {
  check_dims(a.size(), params);
  check_dims(b.size(), params);
  if (!a.allFinite() || !b.allFinite()) throw ArgumentError("kernel inputs must be finite");
  const double r = ((a - b).array() / params.length_scales.array()).matrix().norm();
  return params.amplitude_sq * matern_correlation(params.smoothness, r);
}

Eigen::MatrixXd kernel_matrix(const Eigen::Ref<const Eigen::MatrixXd>& points,
                              const KernelParams& params) {
  const Eigen::Index n = points.rows();
  if (n < 1) throw ArgumentError("kernel matrix needs at least one point");
  check_dims(points.cols(), params);
  if (!points.allFinite()) throw ArgumentError("kernel inputs must be finite");
  const Eigen::MatrixXd scaled =
      points.array().rowwise() / params.length_scales.transpose().array();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = params.amplitude_sq;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = (scaled.row(i) - scaled.row(j)).norm();
      k(i, j) = params.amplitude_sq * matern_correlation(params.smoothness, r);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

Eigen::MatrixXd cross_kernel(const Eigen::Ref<const Eigen::MatrixXd>& a,
                             const Eigen::Ref<const Eigen::MatrixXd>& b,
                             const KernelParams& params) {
  check_dims(a.cols(), params);
  check_dims(b.cols(), params);
  if (!a.allFinite() || !b.allFinite()) throw ArgumentError("kernel inputs must be finite");
  const Eigen::RowVectorXd inv = params.length_scales.transpose().cwiseInverse();
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const double r = ((a.row(i) - b.row(j)).array() * inv.array()).matrix().norm();
      k(i, j) = params.amplitude_sq * matern_correlation(params.smoothness, r);
    }
  }
  return k;
}

std::vector<Eigen::MatrixXd> kernel_matrix_log_gradients(
    const Eigen::Ref<const Eigen::MatrixXd>& points, const KernelParams& params) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  check_dims(d, params);
  std::vector<Eigen::MatrixXd> grads(static_cast<std::size_t>(d) + 1, Eigen::MatrixXd::Zero(n, n));
  const Eigen::MatrixXd scaled =
      points.array().rowwise() / params.length_scales.transpose().array();
  for (Eigen::Index i = 0; i < n; ++i) {
    grads.back()(i, i) = params.amplitude_sq;
    for (Eigen::Index j = 0; j < i; ++j) {
      const Eigen::RowVectorXd delta = scaled.row(i) - scaled.row(j);
      const double r = delta.norm();
      const double kij = params.amplitude_sq * matern_correlation(params.smoothness, r);
      grads.back()(i, j) = grads.back()(j, i) = kij;
      const double factor = dk_dscaled_sq(params.smoothness, params.amplitude_sq, r);
      for (Eigen::Index c = 0; c < d; ++c) {
        const double g = factor * delta(c) * delta(c);
        grads[static_cast<std::size_t>(c)](i, j) = g;
        grads[static_cast<std::size_t>(c)](j, i) = g;
      }
    }
  }
  return grads;
}

}  // namespace bayesdoe
