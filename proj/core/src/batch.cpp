#include "bayesdoe/batch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bayesdoe/errors.hpp"
#include "bayesdoe/low_discrepancy.hpp"
#include "bayesdoe/normal.hpp"

namespace bayesdoe {

namespace {

constexpr double kDefaultLipschitz = 10.0;

bool near_any(const Eigen::VectorXd& u, const std::vector<Eigen::VectorXd>& taken) {
  return std::any_of(taken.begin(), taken.end(), [&](const Eigen::VectorXd& t) {
    return (t - u).norm() < kDuplicateTolerance;
  });
}

// First ranked candidate that is not a duplicate; if every ranked entry
// collides, walk further along the quasi-random sequence.
OptResult pick_distinct(const std::vector<OptResult>& ranked, const std::vector<Eigen::VectorXd>& taken,
                        const AcquisitionFn& acq, std::size_t dim, const OptBudget& budget) {
  for (const auto& r : ranked) {
    if (!near_any(r.point, taken)) return r;
  }
  const HaltonSequence seq(dim, mix_seed(budget.seed, 0xba7c4ULL));
  for (std::uint64_t i = 0;; ++i) {
    Eigen::VectorXd u = seq.point(i);
    if (!near_any(u, taken)) return {u, acq(u)};
  }
}

Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& rows, Eigen::Index cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

struct LiarModels {
  GpModel objective;
  std::vector<GpModel> constraints;
};

// Refit-free update: the objective gets a lie equal to the incumbent, each
// constraint its own posterior mean.
void insert_lie(LiarModels& models, const Eigen::VectorXd& unit, double lie) {
  models.objective = models.objective.with_observation(unit, lie);
  for (auto& c : models.constraints) {
    c = c.with_observation(unit, c.posterior_normalized(unit).mean);
  }
}

double liar_value(const BatchContext& ctx) {
  if (ctx.incumbent) return ctx.incumbent->value;
  return ctx.objective.train_targets().maxCoeff();
}

double softplus(double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); }

void check_request(const BatchContext& ctx, std::size_t q) {
  if (q < 1) throw ArgumentError("batch size must be at least 1");
  if (q > ctx.max_batch) {
    throw ArgumentError("batch size " + std::to_string(q) + " exceeds the configured maximum " +
                        std::to_string(ctx.max_batch));
  }
  if (ctx.objective.size() == 0) throw InsufficientDataError("batch suggestion needs a fitted model");
  if (ctx.constraints.size() != ctx.constraint_specs.size()) {
    throw ArgumentError("one constraint model per constraint spec is required");
  }
  if (!ctx.constraints.empty() || ctx.incumbent) return;
  throw ArgumentError("an incumbent is required without constraints");
}

std::vector<Eigen::VectorXd> pending_units(const BatchContext& ctx) {
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index i = 0; i < ctx.pending.rows(); ++i) {
    out.push_back(ctx.space.to_unit(ctx.pending.row(i).transpose()));
  }
  return out;
}

BatchResult finish(const BatchContext& ctx, const std::vector<Eigen::VectorXd>& chosen,
                   std::vector<double> values, BatchStrategy strategy) {
  BatchResult out;
  out.points.resize(static_cast<Eigen::Index>(chosen.size()), static_cast<Eigen::Index>(ctx.space.dim()));
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    out.points.row(static_cast<Eigen::Index>(i)) = ctx.space.clamp(ctx.space.from_unit(chosen[i])).transpose();
  }
  out.values = std::move(values);
  out.strategy = strategy;
  out.feasibility_only = !ctx.constraints.empty() && !ctx.incumbent;
  return out;
}

BatchResult constant_liar(const BatchContext& ctx, std::size_t q) {
  const std::size_t d = ctx.space.dim();
  LiarModels models{ctx.objective, ctx.constraints};
  std::vector<Eigen::VectorXd> taken = pending_units(ctx);
  const double lie = liar_value(ctx);
  for (const auto& u : taken) insert_lie(models, u, lie);

  std::vector<Eigen::VectorXd> chosen;
  std::vector<double> values;
  for (std::size_t j = 0; j < q; ++j) {
    const AcquisitionFn acq = [&](const Eigen::VectorXd& u) {
      return point_acquisition(ctx, models.objective, models.constraints, u);
    };
    const auto ranked = maximize_unit_ranked(acq, d, ctx.budget);
    const OptResult pick = pick_distinct(ranked, taken, acq, d, ctx.budget);
    chosen.push_back(pick.point);
    taken.push_back(pick.point);
    values.push_back(pick.value);
    if (j + 1 < q) insert_lie(models, pick.point, lie);
  }
  return finish(ctx, chosen, std::move(values), BatchStrategy::constant_liar);
}

BatchResult local_penalization(const BatchContext& ctx, std::size_t q) {
  const std::size_t d = ctx.space.dim();
  double lipschitz = estimate_lipschitz(ctx.objective, 256, mix_seed(ctx.budget.seed, 0x11bULL));
  if (!(lipschitz > 1e-7)) lipschitz = kDefaultLipschitz;
  const double best = ctx.objective.train_targets().maxCoeff();

  struct Center {
    Eigen::VectorXd unit;
    double mean;
    double sd;
  };
  std::vector<Center> centers;
  std::vector<Eigen::VectorXd> taken = pending_units(ctx);
  for (const auto& u : taken) {
    const Posterior p = ctx.objective.posterior_normalized(u);
    centers.push_back({u, p.mean, std::sqrt(p.variance)});
  }

  const bool use_ucb = ctx.acquisition.kind == AcquisitionKind::ucb && ctx.constraints.empty();
  std::vector<Eigen::VectorXd> chosen;
  std::vector<double> values;
  for (std::size_t j = 0; j < q; ++j) {
    const AcquisitionFn acq = [&](const Eigen::VectorXd& u) {
      double base = point_acquisition(ctx, ctx.objective, ctx.constraints, u);
      if (use_ucb) base = softplus(base);
      double penalty = 1.0;
      for (const auto& c : centers) {
        const double z = lipschitz * (u - c.unit).norm() - best + c.mean;
        penalty *= c.sd > 1e-12 ? normal_cdf(z / c.sd) : (z >= 0.0 ? 1.0 : 0.0);
      }
      return base * penalty;
    };
    const auto ranked = maximize_unit_ranked(acq, d, ctx.budget);
    const OptResult pick = pick_distinct(ranked, taken, acq, d, ctx.budget);
    chosen.push_back(pick.point);
    taken.push_back(pick.point);
    values.push_back(pick.value);
    const Posterior p = ctx.objective.posterior_normalized(pick.point);
    centers.push_back({pick.point, p.mean, std::sqrt(p.variance)});
  }
  return finish(ctx, chosen, std::move(values), BatchStrategy::local_penalization);
}

BatchResult joint_qei(const BatchContext& ctx, std::size_t q) {
  const std::size_t d = ctx.space.dim();
  std::vector<Eigen::VectorXd> taken = pending_units(ctx);
  const std::size_t n_pending = taken.size();
  const Eigen::MatrixXd draws =
      qmc_normal_draws(ctx.acquisition.mc_samples, n_pending + q, ctx.acquisition.seed);
  const Incumbent inc = *ctx.incumbent;

  std::vector<Eigen::VectorXd> chosen;
  std::vector<double> values;
  for (std::size_t j = 0; j < q; ++j) {
    AcquisitionFn acq;
    if (taken.empty()) {
      // A one-point batch: closed-form EI is the exact qEI.
      acq = [&](const Eigen::VectorXd& u) {
        return expected_improvement(ctx.objective.posterior_normalized(u), inc);
      };
    } else {
      Eigen::MatrixXd rows(static_cast<Eigen::Index>(taken.size()) + 1, static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < taken.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = taken[i].transpose();
      acq = [&ctx, &draws, &inc, rows](const Eigen::VectorXd& u) mutable {
        rows.row(rows.rows() - 1) = u.transpose();
        return q_expected_improvement_normalized(ctx.objective, rows, inc, draws).value;
      };
    }
    const auto ranked = maximize_unit_ranked(acq, d, ctx.budget);
    OptResult pick = pick_distinct(ranked, taken, acq, d, ctx.budget);
    if (!taken.empty()) {
      const double base =
          q_expected_improvement_normalized(ctx.objective, stack_rows(taken, static_cast<Eigen::Index>(d)), inc, draws)
              .value;
      // The draws resolve no marginal gain anywhere: every candidate ties and
      // the ranking degenerates to probe order. Use the liar's closed-form EI.
      if (!(pick.value > base)) {
        GpModel lied = ctx.objective;
        for (const auto& u : taken) lied = lied.with_observation(u, inc.value);
        const AcquisitionFn liar = [&](const Eigen::VectorXd& u) {
          return expected_improvement(lied.posterior_normalized(u), inc);
        };
        pick = pick_distinct(maximize_unit_ranked(liar, d, ctx.budget), taken, liar, d, ctx.budget);
        pick.value = acq(pick.point);
      }
    }
    chosen.push_back(pick.point);
    taken.push_back(pick.point);
    values.push_back(pick.value);
  }
  BatchResult out = finish(ctx, chosen, std::move(values), BatchStrategy::joint_qei);
  out.joint_value =
      q_expected_improvement_normalized(ctx.objective, stack_rows(chosen, static_cast<Eigen::Index>(d)),
                                        inc, draws)
          .value;
  return out;
}

}  // namespace

std::string to_string(BatchStrategy strategy) {
  switch (strategy) {
    case BatchStrategy::joint_qei: return "joint_qei";
    case BatchStrategy::constant_liar: return "constant_liar";
    case BatchStrategy::local_penalization: return "local_penalization";
  }
  return "constant_liar";
}

BatchStrategy parse_batch_strategy(const std::string& text) {
  if (text == "joint_qei" || text == "qei") return BatchStrategy::joint_qei;
  if (text == "constant_liar" || text == "cl") return BatchStrategy::constant_liar;
  if (text == "local_penalization" || text == "lp") return BatchStrategy::local_penalization;
  throw ArgumentError("unknown batch strategy '" + text + "'");
}

double point_acquisition(const BatchContext& ctx, const GpModel& objective,
                         const std::vector<GpModel>& constraints, const Eigen::VectorXd& unit) {
  const Posterior post = objective.posterior_normalized(unit);
  if (!constraints.empty()) {
    double pof = 1.0;
    for (std::size_t j = 0; j < constraints.size(); ++j) {
      const auto& model = constraints[j];
      const auto& spec = ctx.constraint_specs[j];
      pof *= probability_of_feasibility(model.posterior_normalized(unit),
                                        model.to_normalized_output(spec.threshold), spec.direction);
    }
    if (!ctx.incumbent) return pof;
    return expected_improvement(post, *ctx.incumbent) * pof;
  }
  if (ctx.acquisition.kind == AcquisitionKind::ucb) return ucb(post, ctx.acquisition.beta);
  return expected_improvement(post, *ctx.incumbent);
}

double estimate_lipschitz(const GpModel& model, std::size_t probes, std::uint64_t seed) {
  const std::size_t d = model.dim();
  const HaltonSequence seq(d, seed);
  constexpr double h = 1e-4;
  double best = 0.0;
  for (std::size_t i = 0; i < probes; ++i) {
    const Eigen::VectorXd u = seq.point(i);
    Eigen::VectorXd grad(static_cast<Eigen::Index>(d));
    for (std::size_t c = 0; c < d; ++c) {
      Eigen::VectorXd up = u, dn = u;
      up(static_cast<Eigen::Index>(c)) += h;
      dn(static_cast<Eigen::Index>(c)) -= h;
      grad(static_cast<Eigen::Index>(c)) =
          (model.posterior_normalized(up).mean - model.posterior_normalized(dn).mean) / (2.0 * h);
    }
    best = std::max(best, grad.norm());
  }
  return best;
}

BatchResult suggest_batch(const BatchContext& ctx, std::size_t q, BatchStrategy strategy) {
  check_request(ctx, q);
  ctx.acquisition.validate();
  ctx.budget.validate();
  if (ctx.pending.rows() > 0 && static_cast<std::size_t>(ctx.pending.cols()) != ctx.space.dim()) {
    throw ArgumentError("pending points have the wrong dimension");
  }
  switch (strategy) {
    case BatchStrategy::joint_qei:
      // Joint MC scoring covers the unconstrained EI case; constrained
      // batches go through the liar so each point carries its PoF weight.
      if (!ctx.constraints.empty() || ctx.acquisition.kind == AcquisitionKind::ucb) {
        return constant_liar(ctx, q);
      }
      return joint_qei(ctx, q);
    case BatchStrategy::constant_liar:
      return constant_liar(ctx, q);
    case BatchStrategy::local_penalization:
      return local_penalization(ctx, q);
  }
  return constant_liar(ctx, q);
}

}  // namespace bayesdoe
