#include "bayesdoe/preference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <Eigen/Cholesky>

#include "bayesdoe/acquisition.hpp"
#include "bayesdoe/errors.hpp"
#include "bayesdoe/normal.hpp"

namespace bayesdoe {

namespace {

// Fixed nugget on the latent prior; the latent GP has no observation noise.
constexpr double kPriorNugget = 1e-6;

struct LaplaceState {
  Eigen::VectorXd f;
  Eigen::VectorXd grad_loglik;
  Eigen::MatrixXd w;
  double loglik = 0.0;
};

LaplaceState evaluate_likelihood(const Eigen::VectorXd& f,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                 double noise) {
  const Eigen::Index n = f.size();
  const double scale = std::numbers::sqrt2 * noise;
  LaplaceState s;
  s.f = f;
  s.grad_loglik = Eigen::VectorXd::Zero(n);
  s.w = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [wi, li] : pairs) {
    const auto a = static_cast<Eigen::Index>(wi);
    const auto b = static_cast<Eigen::Index>(li);
    const double z = (f(a) - f(b)) / scale;
    const double lambda = normal_hazard_ratio(z);
    s.loglik += log_normal_cdf(z);
    s.grad_loglik(a) += lambda / scale;
    s.grad_loglik(b) -= lambda / scale;
    const double curv = lambda * (z + lambda) / (scale * scale);
    s.w(a, a) += curv;
    s.w(b, b) += curv;
    s.w(a, b) -= curv;
    s.w(b, a) -= curv;
  }
  return s;
}

struct LaplaceFit {
  Eigen::VectorXd mode;
  Eigen::VectorXd prior_alpha;
  Eigen::MatrixXd b_factor;
  double log_evidence = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
};

LaplaceFit laplace_mode(const Eigen::MatrixXd& l, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                        double noise, int max_iterations, double tolerance) {
  const Eigen::Index n = l.rows();
  const auto tri = l.triangularView<Eigen::Lower>();
  auto kinv_times = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return tri.transpose().solve(tri.solve(v));
  };
  auto objective = [&](const LaplaceState& s, const Eigen::VectorXd& kinv_f) {
    return s.loglik - 0.5 * s.f.dot(kinv_f);
  };

  LaplaceFit fit;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  LaplaceState state = evaluate_likelihood(f, pairs, noise);
  Eigen::VectorXd kinv_f = kinv_times(f);
  double psi = objective(state, kinv_f);
  for (int it = 0; it < max_iterations; ++it) {
    fit.iterations = it + 1;
    const Eigen::VectorXd grad = state.grad_loglik - kinv_f;
    fit.grad_norm = grad.norm();
    if (fit.grad_norm < tolerance) {
      fit.converged = true;
      break;
    }
    // Newton target: (K^{-1} + W)^{-1} (W f + grad) = L B^{-1} L^T (W f + grad).
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n) + l.transpose() * state.w * l;
    Eigen::LLT<Eigen::MatrixXd> bllt(b);
    const Eigen::VectorXd rhs = state.w * f + state.grad_loglik;
    const Eigen::VectorXd target = l * bllt.solve(l.transpose() * rhs);
    const Eigen::VectorXd step = target - f;

    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      const Eigen::VectorXd cand = f + t * step;
      LaplaceState cs = evaluate_likelihood(cand, pairs, noise);
      const Eigen::VectorXd kc = kinv_times(cand);
      const double pc = objective(cs, kc);
      if (std::isfinite(pc) && pc >= psi - 1e-12 * std::abs(psi)) {
        f = cand;
        state = std::move(cs);
        kinv_f = kc;
        psi = pc;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  if (!fit.converged) {
    const Eigen::VectorXd grad = state.grad_loglik - kinv_f;
    fit.grad_norm = grad.norm();
    fit.converged = fit.grad_norm < tolerance;
  }
  fit.mode = f;
  fit.prior_alpha = kinv_f;
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n) + l.transpose() * state.w * l;
  Eigen::LLT<Eigen::MatrixXd> bllt(b);
  fit.b_factor = bllt.matrixL();
  fit.log_evidence = psi - fit.b_factor.diagonal().array().log().sum();
  return fit;
}

}  // namespace

void PreferenceSet::validate() const {
  const std::size_t n = validity.size();
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [w, l] : pairs) {
    if (w >= n || l >= n) throw ArgumentError("preference pair references a missing design");
    if (w == l) throw ArgumentError("preference pair compares a design with itself");
    if (seen.count({l, w})) {
      throw ArgumentError("contradictory preference pairs (" + std::to_string(w) + "," +
                          std::to_string(l) + ") and (" + std::to_string(l) + "," +
                          std::to_string(w) + ")");
    }
    seen.insert({w, l});
  }
}

Eigen::MatrixXi PreferenceSet::matrix() const {
  const auto n = static_cast<Eigen::Index>(validity.size());
  Eigen::MatrixXi p = Eigen::MatrixXi::Zero(n, n);
  for (const auto& [w, l] : pairs) {
    p(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(l)) = 1;
    p(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(w)) = -1;
  }
  return p;
}

PreferenceSet build_preferences(const Eigen::Ref<const Eigen::VectorXd>& outputs, double error_bound,
                                Sense sense, const std::vector<bool>& validity) {
  if (!(error_bound >= 0.0) || !std::isfinite(error_bound)) {
    throw ArgumentError("error bound must be finite and non-negative");
  }
  if (!outputs.allFinite()) throw ArgumentError("preference outputs must be finite");
  const auto n = static_cast<std::size_t>(outputs.size());
  if (!validity.empty() && validity.size() != n) {
    throw ArgumentError("validity flags must match the number of designs");
  }
  PreferenceSet set;
  set.validity = validity.empty() ? std::vector<bool>(n, true) : validity;
  for (std::size_t i = 0; i < n; ++i) {
    if (!set.validity[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!set.validity[j]) continue;
      const double yi = outputs(static_cast<Eigen::Index>(i));
      const double yj = outputs(static_cast<Eigen::Index>(j));
      const bool i_lower = yi + error_bound < yj - error_bound;
      const bool j_lower = yj + error_bound < yi - error_bound;
      if (!i_lower && !j_lower) continue;
      const bool i_wins = (sense == Sense::minimize) == i_lower;
      set.pairs.emplace_back(i_wins ? i : j, i_wins ? j : i);
    }
  }
  return set;
}

double LatentUtilityModel::latent_at(std::size_t design) const {
  const auto it = std::lower_bound(design_indices_.begin(), design_indices_.end(), design);
  if (it == design_indices_.end() || *it != design) {
    throw ArgumentError("design " + std::to_string(design) + " is not part of the latent model");
  }
  return mode_(it - design_indices_.begin());
}

Eigen::VectorXd LatentUtilityModel::mode_gradient() const {
  const LaplaceState s = evaluate_likelihood(mode_, latent_pairs_, noise_);
  const auto tri = prior_factor_.triangularView<Eigen::Lower>();
  return s.grad_loglik - tri.transpose().solve(tri.solve(mode_));
}

Posterior LatentUtilityModel::predict_unit(const Eigen::Ref<const Eigen::VectorXd>& unit) const {
  if (!unit.allFinite()) throw ArgumentError("preference query must be finite");
  const Eigen::VectorXd kstar = cross_kernel(inputs_, unit.transpose(), kernel_).col(0);
  const Eigen::VectorXd u = prior_factor_.triangularView<Eigen::Lower>().solve(kstar);
  const auto btri = b_factor_.triangularView<Eigen::Lower>();
  const Eigen::VectorXd bu = btri.solve(u);
  Posterior p;
  p.mean = kstar.dot(prior_alpha_);
  p.variance = std::max(0.0, kernel_.amplitude_sq - u.squaredNorm() + bu.squaredNorm());
  p.extrapolated = (unit.array() < 0.0).any() || (unit.array() > 1.0).any();
  return p;
}

LatentUtilityModel fit_preference_gp(const DesignSpace& space,
                                     const Eigen::Ref<const Eigen::MatrixXd>& points,
                                     const PreferenceSet& prefs, const PreferenceConfig& config) {
  if (prefs.pairs.empty()) throw ArgumentError("fitting a preference model needs at least one pair");
  if (static_cast<std::size_t>(points.rows()) != prefs.num_designs()) {
    throw ArgumentError("preference set and design matrix disagree on the number of designs");
  }
  if (static_cast<std::size_t>(points.cols()) != space.dim()) {
    throw ArgumentError("design dimension does not match the space");
  }
  if (!(config.noise > 0.0)) throw ArgumentError("preference noise must be positive");
  prefs.validate();

  LatentUtilityModel model;
  model.noise_ = config.noise;
  std::vector<Eigen::Index> latent_of(prefs.num_designs(), -1);
  for (std::size_t i = 0; i < prefs.num_designs(); ++i) {
    if (!prefs.validity[i]) continue;
    latent_of[i] = static_cast<Eigen::Index>(model.design_indices_.size());
    model.design_indices_.push_back(i);
  }
  for (const auto& [w, l] : prefs.pairs) {
    if (latent_of[w] < 0 || latent_of[l] < 0) continue;
    model.latent_pairs_.emplace_back(static_cast<std::size_t>(latent_of[w]),
                                     static_cast<std::size_t>(latent_of[l]));
  }
  if (model.latent_pairs_.empty()) {
    throw ArgumentError("no preference pair connects two valid designs");
  }
  const auto n = static_cast<Eigen::Index>(model.design_indices_.size());
  model.inputs_.resize(n, points.cols());
  for (Eigen::Index k = 0; k < n; ++k) {
    model.inputs_.row(k) =
        space.to_unit(points.row(static_cast<Eigen::Index>(model.design_indices_[static_cast<std::size_t>(k)])).transpose())
            .transpose();
  }

  std::vector<double> grid = config.length_scale ? std::vector<double>{*config.length_scale}
                                                 : config.length_scale_grid;
  if (grid.empty()) throw ArgumentError("length-scale grid is empty");

  bool have = false;
  LaplaceFit best_fit;
  double last_grad = 0.0;
  for (double ls : grid) {
    KernelParams kp;
    kp.amplitude_sq = 1.0;
    kp.smoothness = config.smoothness;
    kp.length_scales = Eigen::VectorXd::Constant(points.cols(), ls);
    kp.validate();
    Eigen::MatrixXd k = kernel_matrix(model.inputs_, kp);
    k.diagonal().array() += kPriorNugget;
    Eigen::LLT<Eigen::MatrixXd> llt;
    jittered_cholesky(k, kp.amplitude_sq, llt);
    const Eigen::MatrixXd l = llt.matrixL();
    LaplaceFit fit = laplace_mode(l, model.latent_pairs_, config.noise, config.max_newton_iterations,
                                  config.gradient_tolerance);
    last_grad = fit.grad_norm;
    if (!fit.converged) continue;
    if (!have || fit.log_evidence > best_fit.log_evidence) {
      have = true;
      best_fit = std::move(fit);
      model.kernel_ = kp;
      model.prior_factor_ = l;
    }
  }
  if (!have) {
    throw ConvergenceError("Laplace mode search did not converge in " +
                           std::to_string(config.max_newton_iterations) +
                           " Newton iterations (final gradient norm " + std::to_string(last_grad) + ")");
  }
  model.mode_ = best_fit.mode;
  model.prior_alpha_ = best_fit.prior_alpha;
  model.b_factor_ = best_fit.b_factor;
  model.log_evidence_ = best_fit.log_evidence;
  model.iterations_ = best_fit.iterations;
  return model;
}

Eigen::VectorXd suggest_preferential(const LatentUtilityModel& model, const DesignSpace& space,
                                     const OptBudget& budget) {
  if (model.latent_mode().size() == 0) throw ArgumentError("preference model is not fitted");
  const Incumbent inc{model.latent_mode().maxCoeff(), IncumbentSource::best_posterior_mean};
  const AcquisitionFn acq = [&](const Eigen::VectorXd& u) {
    return expected_improvement(model.predict_unit(u), inc);
  };
  const auto ranked = maximize_unit_ranked(acq, space.dim(), budget);
  return space.clamp(space.from_unit(ranked.front().point));
}

}  // namespace bayesdoe
