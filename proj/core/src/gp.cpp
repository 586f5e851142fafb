#include "bayesdoe/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bayesdoe/errors.hpp"
#include "bayesdoe/low_discrepancy.hpp"
#include "bounded_lbfgs.hpp"

namespace bayesdoe {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

Eigen::MatrixXd lower_factor(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return llt.matrixL();
}

}  // namespace

double jittered_cholesky(const Eigen::Ref<const Eigen::MatrixXd>& matrix, double scale,
                         Eigen::LLT<Eigen::MatrixXd>& llt) {
  const Eigen::Index n = matrix.rows();
  for (double jitter = kJitterStart; jitter <= kJitterMax * (1.0 + 1e-9); jitter *= 10.0) {
    Eigen::MatrixXd a = matrix;
    a.diagonal().array() += jitter * scale;
    llt.compute(a);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > 0.0 &&
        llt.matrixLLT().allFinite()) {
      return jitter;
    }
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed for a " << n << "x" << n
      << " covariance even with relative jitter " << kJitterMax;
  throw NumericalError(msg.str());
}

GpModel::GpModel(KernelParams kernel, double noise_var, Transform transform,
                 const Eigen::Ref<const Eigen::MatrixXd>& points,
                 const Eigen::Ref<const Eigen::VectorXd>& targets)
    : kernel_(std::move(kernel)), noise_var_(noise_var), transform_(std::move(transform)) {
  kernel_.validate();
  if (!(noise_var_ >= 0.0) || !std::isfinite(noise_var_)) {
    throw ArgumentError("noise variance must be finite and non-negative");
  }
  if (points.rows() < 1) throw InsufficientDataError("a GP model needs at least one observation");
  if (points.rows() != targets.size()) throw ArgumentError("points and targets differ in length");
  if (transform_.output.offset.size() != 1) {
    throw ArgumentError("GP transform must map exactly one output");
  }
  inputs_ = transform_.input.apply_rows(points);
  targets_.resize(targets.size());
  for (Eigen::Index i = 0; i < targets.size(); ++i) targets_(i) = to_normalized_output(targets(i));
  if (!inputs_.allFinite() || !targets_.allFinite()) {
    throw ArgumentError("training data must be finite");
  }
  factorize();
}

void GpModel::factorize() {
  Eigen::MatrixXd k = kernel_matrix(inputs_, kernel_);
  k.diagonal().array() += noise_var_;
  Eigen::LLT<Eigen::MatrixXd> llt;
  jitter_ = jittered_cholesky(k, kernel_.amplitude_sq, llt);
  factor_ = lower_factor(llt);
  alpha_ = llt.solve(targets_);
}

double GpModel::to_normalized_output(double y) const {
  return (y - transform_.output.offset(0)) / transform_.output.scale(0);
}

double GpModel::from_normalized_output(double y) const {
  return y * transform_.output.scale(0) + transform_.output.offset(0);
}

Posterior GpModel::posterior_normalized(const Eigen::Ref<const Eigen::VectorXd>& unit_query) const {
  if (!unit_query.allFinite()) throw ArgumentError("posterior query must be finite");
  if (static_cast<std::size_t>(unit_query.size()) != dim()) {
    throw ArgumentError("posterior query has the wrong dimension");
  }
  const Eigen::VectorXd kstar = cross_kernel(inputs_, unit_query.transpose(), kernel_).col(0);
  const Eigen::VectorXd v = factor_.triangularView<Eigen::Lower>().solve(kstar);
  Posterior p;
  p.mean = kstar.dot(alpha_);
  p.variance = std::max(0.0, kernel_.amplitude_sq - v.squaredNorm());
  p.extrapolated = (unit_query.array() < 0.0).any() || (unit_query.array() > 1.0).any();
  return p;
}

Posterior GpModel::posterior(const Eigen::Ref<const Eigen::VectorXd>& query) const {
  if (!query.allFinite()) throw ArgumentError("posterior query must be finite");
  Posterior p = posterior_normalized(transform_.input.apply(query));
  const double s = transform_.output.scale(0);
  p.mean = from_normalized_output(p.mean);
  p.variance *= s * s;
  return p;
}

JointPosterior GpModel::joint_posterior_normalized(
    const Eigen::Ref<const Eigen::MatrixXd>& unit_rows) const {
  if (!unit_rows.allFinite()) throw ArgumentError("posterior query must be finite");
  const Eigen::MatrixXd kstar = cross_kernel(inputs_, unit_rows, kernel_);
  const Eigen::MatrixXd v = factor_.triangularView<Eigen::Lower>().solve(kstar);
  JointPosterior jp;
  jp.mean = kstar.transpose() * alpha_;
  jp.covariance = kernel_matrix(unit_rows, kernel_) - v.transpose() * v;
  jp.covariance = 0.5 * (jp.covariance + jp.covariance.transpose());
  return jp;
}

GpModel GpModel::with_observation(const Eigen::Ref<const Eigen::VectorXd>& unit_point,
                                  double normalized_target) const {
  GpModel out = *this;
  const Eigen::Index n = inputs_.rows();
  out.inputs_.conservativeResize(n + 1, Eigen::NoChange);
  out.inputs_.row(n) = unit_point.transpose();
  out.targets_.conservativeResize(n + 1);
  out.targets_(n) = normalized_target;
  out.factorize();
  return out;
}

double GpModel::log_marginal_likelihood() const {
  const double n = static_cast<double>(targets_.size());
  return -0.5 * targets_.dot(alpha_) - factor_.diagonal().array().log().sum() - 0.5 * n * kLog2Pi;
}

LmlResult lml_with_gradient(const Eigen::Ref<const Eigen::MatrixXd>& unit_points,
                            const Eigen::Ref<const Eigen::VectorXd>& normalized_targets,
                            const KernelParams& kernel, double noise_var) {
  kernel.validate();
  const Eigen::Index n = unit_points.rows();
  if (n != normalized_targets.size()) throw ArgumentError("points and targets differ in length");
  Eigen::MatrixXd k = kernel_matrix(unit_points, kernel);
  k.diagonal().array() += noise_var;
  Eigen::LLT<Eigen::MatrixXd> llt;
  const double jitter = jittered_cholesky(k, kernel.amplitude_sq, llt);
  const Eigen::VectorXd alpha = llt.solve(normalized_targets);
  const Eigen::MatrixXd l = llt.matrixL();

  LmlResult out;
  out.value = -0.5 * normalized_targets.dot(alpha) - l.diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * kLog2Pi;

  const Eigen::MatrixXd kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::MatrixXd w = alpha * alpha.transpose() - kinv;
  std::vector<Eigen::MatrixXd> dk = kernel_matrix_log_gradients(unit_points, kernel);
  // Jitter scales with the amplitude, so it belongs to the amplitude derivative.
  dk.back().diagonal().array() += jitter * kernel.amplitude_sq;
  const Eigen::Index d = unit_points.cols();
  out.gradient.resize(d + 2);
  for (Eigen::Index i = 0; i <= d; ++i) {
    out.gradient(i) = 0.5 * w.cwiseProduct(dk[static_cast<std::size_t>(i)]).sum();
  }
  out.gradient(d + 1) = 0.5 * noise_var * w.trace();
  return out;
}

GpModel fit_gp(const DesignSpace& space, const Eigen::Ref<const Eigen::MatrixXd>& points,
               const Eigen::Ref<const Eigen::VectorXd>& targets, const FitConfig& config) {
  const Eigen::Index n = points.rows();
  if (n < 2) {
    throw InsufficientDataError("fitting a GP needs at least 2 observations, got " +
                                std::to_string(n));
  }
  if (static_cast<std::size_t>(points.cols()) != space.dim()) {
    throw ArgumentError("point dimension does not match design space");
  }
  if (targets.size() != n) throw ArgumentError("points and targets differ in length");
  if (!targets.allFinite() || !points.allFinite()) throw ArgumentError("training data must be finite");
  if (config.restarts < 1) throw ArgumentError("FitConfig.restarts must be >= 1");

  const Transform transform = Transform::fit(space, targets);
  const std::size_t d = space.dim();
  const auto& b = config.bounds;

  const double spread = (targets.array() - targets.mean()).abs().maxCoeff();
  const bool constant = spread <= 1e-12 * std::max(1.0, std::abs(targets.mean()));
  if (constant) {
    KernelParams kp;
    kp.amplitude_sq = std::clamp(1.0, b.amplitude_sq.lower, b.amplitude_sq.upper);
    kp.length_scales = Eigen::VectorXd::Constant(
        static_cast<Eigen::Index>(d), std::clamp(0.5, b.length_scale.lower, b.length_scale.upper));
    kp.smoothness = config.smoothness;
    return GpModel(kp, b.noise_var.lower, transform, points, targets);
  }

  const Eigen::MatrixXd unit = transform.input.apply_rows(points);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = (targets(i) - transform.output.offset(0)) / transform.output.scale(0);
  }

  const Eigen::Index n_ls = config.ard ? static_cast<Eigen::Index>(d) : 1;
  const Eigen::Index n_par = n_ls + 2;
  Eigen::VectorXd lo(n_par), hi(n_par);
  lo.head(n_ls).setConstant(std::log(b.length_scale.lower));
  hi.head(n_ls).setConstant(std::log(b.length_scale.upper));
  lo(n_ls) = std::log(b.amplitude_sq.lower);
  hi(n_ls) = std::log(b.amplitude_sq.upper);
  lo(n_ls + 1) = std::log(b.noise_var.lower);
  hi(n_ls + 1) = std::log(b.noise_var.upper);

  auto unpack = [&](const Eigen::VectorXd& theta) {
    KernelParams kp;
    kp.smoothness = config.smoothness;
    kp.amplitude_sq = std::exp(theta(n_ls));
    kp.length_scales = config.ard ? Eigen::VectorXd(theta.head(n_ls).array().exp())
                                  : Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d),
                                                              std::exp(theta(0)));
    return std::pair{kp, std::exp(theta(n_ls + 1))};
  };

  auto negative_lml = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    const auto [kp, noise] = unpack(theta);
    try {
      const LmlResult r = lml_with_gradient(unit, y, kp, noise);
      if (!std::isfinite(r.value)) return std::numeric_limits<double>::infinity();
      grad.resize(n_par);
      if (config.ard) {
        grad.head(n_ls) = -r.gradient.head(n_ls);
      } else {
        grad(0) = -r.gradient.head(static_cast<Eigen::Index>(d)).sum();
      }
      grad(n_ls) = -r.gradient(static_cast<Eigen::Index>(d));
      grad(n_ls + 1) = -r.gradient(static_cast<Eigen::Index>(d) + 1);
      return -r.value;
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  const HaltonSequence starts(static_cast<std::size_t>(n_par), config.seed);
  double best_value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_theta;
  int failures = 0;
  for (int r = 0; r < config.restarts; ++r) {
    const Eigen::VectorXd u = starts.point(static_cast<std::uint64_t>(r));
    const Eigen::VectorXd theta0 = (lo.array() + u.array() * (hi - lo).array()).matrix();
    const detail::BoxResult res =
        detail::minimize_box(negative_lml, theta0, lo, hi, config.max_iterations);
    if (!std::isfinite(res.value)) {
      ++failures;
      continue;
    }
    // Strict comparison keeps the lowest restart index on ties.
    if (res.value < best_value) {
      best_value = res.value;
      best_theta = res.x;
    }
  }
  if (best_theta.size() == 0) {
    std::ostringstream msg;
    msg << "GP hyperparameter fit failed: all " << failures << " restarts hit factorization "
        << "failures (n=" << n << ", d=" << d << ")";
    throw NumericalError(msg.str());
  }
  const auto [kp, noise] = unpack(best_theta);
  return GpModel(kp, noise, transform, points, targets);
}

GpModel fit_gp(const DesignSpace& space, const Dataset& data, std::size_t output_index,
               const FitConfig& config) {
  if (output_index >= data.num_outputs()) throw ArgumentError("output index out of range");
  return fit_gp(space, data.points(), data.outputs().col(static_cast<Eigen::Index>(output_index)),
                config);
}

double log_marginal_likelihood(const GpModel& model, const Dataset& data, std::size_t output_index) {
  if (output_index >= data.num_outputs()) throw ArgumentError("output index out of range");
  if (static_cast<std::size_t>(data.points().cols()) != model.dim()) {
    throw ArgumentError("dataset dimension does not match the model");
  }
  const Eigen::MatrixXd unit = model.transform().input.apply_rows(data.points());
  Eigen::VectorXd y = data.outputs().col(static_cast<Eigen::Index>(output_index));
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = model.to_normalized_output(y(i));
  return lml_with_gradient(unit, y, model.kernel(), model.noise_var()).value;
}

}  // namespace bayesdoe
