#include "bayesdoe/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "bayesdoe/errors.hpp"
#include "bayesdoe/low_discrepancy.hpp"
#include "bayesdoe/normal.hpp"

namespace bayesdoe {

std::string to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::ei: return "ei";
    case AcquisitionKind::ucb: return "ucb";
    case AcquisitionKind::qei: return "qei";
    case AcquisitionKind::efi: return "efi";
    case AcquisitionKind::scalarized_ei: return "scalarized_ei";
  }
  return "ei";
}

std::string to_string(IncumbentSource source) {
  return source == IncumbentSource::best_observed ? "best_observed" : "best_posterior_mean";
}

AcquisitionKind parse_acquisition_kind(const std::string& text) {
  if (text == "ei") return AcquisitionKind::ei;
  if (text == "ucb") return AcquisitionKind::ucb;
  if (text == "qei") return AcquisitionKind::qei;
  if (text == "efi") return AcquisitionKind::efi;
  if (text == "scalarized_ei") return AcquisitionKind::scalarized_ei;
  throw ArgumentError("unknown acquisition kind '" + text + "'");
}

IncumbentSource parse_incumbent_source(const std::string& text) {
  if (text == "best_observed") return IncumbentSource::best_observed;
  if (text == "best_posterior_mean") return IncumbentSource::best_posterior_mean;
  throw ArgumentError("unknown incumbent source '" + text + "'");
}

void AcquisitionSpec::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ArgumentError("beta must be finite and >= 0");
  if (mc_samples < 1) throw ArgumentError("mc_samples must be >= 1");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ArgumentError("rho must be finite and >= 0");
  if (!weights.empty()) {
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ArgumentError("weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ArgumentError("scalarization weights must sum to 1");
  }
}

std::vector<ConstraintSpec> constraint_specs(const Dataset& data) {
  std::vector<ConstraintSpec> out;
  for (std::size_t j : data.constraint_indices()) {
    const auto& c = data.columns()[j];
    out.push_back({j, c.threshold, c.direction});
  }
  return out;
}

double expected_improvement(const Posterior& post, const Incumbent& incumbent) {
  if (!std::isfinite(post.mean) || !std::isfinite(post.variance) || !std::isfinite(incumbent.value)) {
    throw ArgumentError("expected improvement needs a finite posterior and incumbent");
  }
  if (post.variance < 0.0) throw ArgumentError("posterior variance must be >= 0");
  const double delta = post.mean - incumbent.value;
  const double sigma = std::sqrt(post.variance);
  if (sigma <= 0.0) return std::max(0.0, delta);
  const double z = delta / sigma;
  return std::max(0.0, delta * normal_cdf(z) + sigma * normal_pdf(z));
}

double ucb(const Posterior& post, double beta) {
  if (!std::isfinite(post.mean) || !std::isfinite(post.variance) || post.variance < 0.0) {
    throw ArgumentError("UCB needs a finite posterior with non-negative variance");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ArgumentError("beta must be finite and >= 0");
  return post.mean + beta * std::sqrt(post.variance);
}

McEstimate q_expected_improvement_normalized(const GpModel& model,
                                             const Eigen::Ref<const Eigen::MatrixXd>& unit_batch,
                                             const Incumbent& incumbent,
                                             const Eigen::Ref<const Eigen::MatrixXd>& draws) {
  if (unit_batch.rows() < 1) throw ArgumentError("qEI needs at least one batch point");
  // Collapse exact duplicates: a repeated point adds no information.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < unit_batch.rows(); ++i) {
    bool dup = false;
    for (Eigen::Index k : keep) {
      if (unit_batch.row(k) == unit_batch.row(i)) {
        dup = true;
        break;
      }
    }
    if (!dup) keep.push_back(i);
  }
  const Eigen::Index q = static_cast<Eigen::Index>(keep.size());
  if (draws.cols() < q) throw ArgumentError("not enough normal draw columns for the batch");
  Eigen::MatrixXd rows(q, unit_batch.cols());
  for (Eigen::Index i = 0; i < q; ++i) rows.row(i) = unit_batch.row(keep[static_cast<std::size_t>(i)]);

  const JointPosterior jp = model.joint_posterior_normalized(rows);
  Eigen::LLT<Eigen::MatrixXd> llt;
  jittered_cholesky(jp.covariance, model.kernel().amplitude_sq, llt);
  const Eigen::MatrixXd l = llt.matrixL();

  const Eigen::Index s = draws.rows();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index k = 0; k < s; ++k) {
    const Eigen::VectorXd z = draws.row(k).head(q).transpose();
    const Eigen::VectorXd f = jp.mean + l * z;
    const double imp = std::max(0.0, f.maxCoeff() - incumbent.value);
    sum += imp;
    sum_sq += imp * imp;
  }
  McEstimate est;
  const double ns = static_cast<double>(s);
  est.value = sum / ns;
  const double var = s > 1 ? std::max(0.0, (sum_sq - ns * est.value * est.value) / (ns - 1.0)) : 0.0;
  est.standard_error = std::sqrt(var / ns);
  return est;
}

McEstimate q_expected_improvement(const GpModel& model,
                                  const Eigen::Ref<const Eigen::MatrixXd>& batch,
                                  const Incumbent& incumbent, const McConfig& mc) {
  if (mc.samples < 1) throw ArgumentError("qEI needs at least one Monte-Carlo sample");
  if (!std::isfinite(incumbent.value)) throw ArgumentError("incumbent must be finite");
  const Eigen::MatrixXd unit = model.transform().input.apply_rows(batch);
  const Eigen::MatrixXd draws =
      qmc_normal_draws(mc.samples, static_cast<std::size_t>(batch.rows()), mc.seed);
  return q_expected_improvement_normalized(model, unit, incumbent, draws);
}

double probability_of_feasibility(const Posterior& post, double threshold,
                                  ConstraintDirection direction) {
  if (!std::isfinite(post.mean) || !std::isfinite(post.variance) || post.variance < 0.0 ||
      !std::isfinite(threshold)) {
    throw ArgumentError("probability of feasibility needs finite inputs");
  }
  const double sigma = std::sqrt(post.variance);
  const double margin = direction == ConstraintDirection::le ? threshold - post.mean
                                                              : post.mean - threshold;
  if (sigma <= 0.0) return margin >= 0.0 ? 1.0 : 0.0;
  return normal_cdf(margin / sigma);
}

double probability_of_feasibility(const GpModel& constraint_model,
                                  const Eigen::Ref<const Eigen::VectorXd>& query,
                                  const ConstraintSpec& spec) {
  const Posterior post =
      constraint_model.posterior_normalized(constraint_model.transform().input.apply(query));
  return probability_of_feasibility(post, constraint_model.to_normalized_output(spec.threshold),
                                    spec.direction);
}

EfiResult expected_feasible_improvement(const GpModel& objective_model,
                                        std::span<const GpModel> constraint_models,
                                        const Eigen::Ref<const Eigen::VectorXd>& query,
                                        const std::optional<Incumbent>& incumbent,
                                        std::span<const ConstraintSpec> specs) {
  if (specs.empty()) throw ArgumentError("EFI needs at least one constraint");
  if (specs.size() != constraint_models.size()) {
    throw ArgumentError("one constraint model per constraint spec is required");
  }
  double pof = 1.0;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    pof *= probability_of_feasibility(constraint_models[j], query, specs[j]);
  }
  EfiResult out;
  if (!incumbent) {
    out.value = pof;
    out.feasibility_only = true;
    return out;
  }
  const Posterior post =
      objective_model.posterior_normalized(objective_model.transform().input.apply(query));
  out.value = expected_improvement(post, *incumbent) * pof;
  return out;
}

std::optional<Incumbent> find_incumbent(const GpModel& model, IncumbentSource source,
                                        const std::vector<bool>* mask) {
  if (mask && mask->size() != model.size()) throw ArgumentError("incumbent mask has the wrong size");
  std::optional<Incumbent> best;
  Eigen::VectorXd values;
  if (source == IncumbentSource::best_observed) {
    values = model.train_targets();
  } else {
    const Eigen::MatrixXd& x = model.train_inputs();
    values.resize(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      values(i) = model.posterior_normalized(x.row(i).transpose()).mean;
    }
  }
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (mask && !(*mask)[static_cast<std::size_t>(i)]) continue;
    if (!best || values(i) > best->value) best = Incumbent{values(i), source};
  }
  return best;
}

double augmented_chebyshev(const Eigen::Ref<const Eigen::VectorXd>& outputs,
                           const Eigen::Ref<const Eigen::VectorXd>& weights, double rho) {
  if (outputs.size() != weights.size() || outputs.size() == 0) {
    throw ArgumentError("scalarization needs matching non-empty outputs and weights");
  }
  if (!outputs.allFinite() || !weights.allFinite() || !(rho >= 0.0)) {
    throw ArgumentError("scalarization inputs must be finite with rho >= 0");
  }
  if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-9) {
    throw ArgumentError("scalarization weights must lie on the simplex");
  }
  const Eigen::ArrayXd weighted = weights.array() * outputs.array();
  return weighted.minCoeff() + rho * weighted.sum();
}

Eigen::VectorXd sample_simplex(std::size_t m, std::mt19937_64& rng) {
  if (m == 0) throw ArgumentError("simplex dimension must be positive");
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd w(static_cast<Eigen::Index>(m));
  for (auto& v : w) v = expo(rng);
  return w / w.sum();
}

}  // namespace bayesdoe
