#include "bayesdoe/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <random>
#include <sstream>

#include "bayesdoe/errors.hpp"
#include "bayesdoe/low_discrepancy.hpp"
#include "bayesdoe/pareto.hpp"

namespace bayesdoe {

namespace {

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

Eigen::MatrixXd append_rows(const Eigen::MatrixXd& base, const Eigen::MatrixXd& extra) {
  if (base.rows() == 0) return extra;
  if (extra.rows() == 0) return base;
  Eigen::MatrixXd out(base.rows() + extra.rows(), base.cols());
  out << base, extra;
  return out;
}

// Removes pending rows within the duplicate tolerance (normalized) of `point`.
Eigen::MatrixXd clear_pending(const DesignSpace& space, const Eigen::MatrixXd& pending,
                              const Eigen::VectorXd& point) {
  if (pending.rows() == 0) return pending;
  const Eigen::VectorXd u = space.to_unit(point);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < pending.rows(); ++i) {
    if ((space.to_unit(pending.row(i).transpose()) - u).norm() >= kDuplicateTolerance) keep.push_back(i);
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(keep.size()), pending.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = pending.row(keep[k]);
  return out;
}

ModelSummary summarize(const std::string& name, const GpModel& m) {
  return {name, m.kernel(), m.noise_var(), m.log_marginal_likelihood()};
}

FitConfig fit_config_for(const CampaignState& s, std::uint64_t seed, std::size_t column) {
  FitConfig cfg = s.settings.fit;
  cfg.seed = mix_seed(seed, 0xf17ULL + column);
  return cfg;
}

struct FittedModels {
  Dataset data;  // canonically sorted
  std::vector<GpModel> constraints;
  std::vector<ConstraintSpec> specs;
  std::vector<bool> feasible;
};

FittedModels fit_constraints(const CampaignState& s, const Dataset& sorted, std::uint64_t seed,
                             AskDiagnostics* diag) {
  FittedModels fm{sorted, {}, {}, {}};
  for (std::size_t j : sorted.constraint_indices()) {
    const auto& col = sorted.columns()[j];
    GpModel m = fit_gp(s.space, sorted, j, fit_config_for(s, seed, j));
    if (diag) diag->models.push_back(summarize(col.name, m));
    fm.constraints.push_back(std::move(m));
    fm.specs.push_back({j, col.threshold, col.direction});
  }
  for (std::size_t i = 0; i < sorted.size(); ++i) fm.feasible.push_back(sorted.observed_feasible(i));
  return fm;
}

BatchStrategy default_strategy(const CampaignState& s) {
  if (s.settings.strategy) return *s.settings.strategy;
  return s.acquisition.kind == AcquisitionKind::qei ? BatchStrategy::joint_qei
                                                     : BatchStrategy::constant_liar;
}

Eigen::MatrixXd cold_start_batch(const CampaignState& s, std::size_t q) {
  const HaltonSequence seq(s.space.dim(), s.seed);
  std::vector<Eigen::VectorXd> taken;
  for (Eigen::Index i = 0; i < s.data.points().rows(); ++i) taken.push_back(s.space.to_unit(s.data.points().row(i).transpose()));
  for (Eigen::Index i = 0; i < s.pending.rows(); ++i) taken.push_back(s.space.to_unit(s.pending.row(i).transpose()));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(s.space.dim()));
  std::uint64_t index = s.data.size() + static_cast<std::uint64_t>(s.pending.rows());
  for (std::size_t k = 0; k < q; ++index) {
    const Eigen::VectorXd u = seq.point(index);
    const bool dup = std::any_of(taken.begin(), taken.end(), [&](const Eigen::VectorXd& t) {
      return (t - u).norm() < kDuplicateTolerance;
    });
    if (dup) continue;
    taken.push_back(u);
    out.row(static_cast<Eigen::Index>(k++)) = s.space.clamp(s.space.from_unit(u)).transpose();
  }
  return out;
}

BatchContext base_context(const CampaignState& s, std::uint64_t seed) {
  BatchContext ctx;
  ctx.space = s.space;
  ctx.acquisition = s.acquisition;
  ctx.acquisition.seed = mix_seed(seed, 0xac9ULL);
  ctx.budget = s.settings.budget;
  ctx.budget.seed = mix_seed(seed, 0x0b7ULL);
  ctx.max_batch = s.settings.max_batch;
  return ctx;
}

Eigen::MatrixXd ask_single(const CampaignState& s, const Dataset& sorted, std::size_t q,
                           std::uint64_t seed, BatchStrategy strategy, AskDiagnostics& diag) {
  const std::size_t obj = sorted.objective_indices().front();
  BatchContext ctx = base_context(s, seed);
  ctx.objective = fit_gp(s.space, sorted.points(), sorted.canonical_output(obj), fit_config_for(s, seed, obj));
  diag.models.push_back(summarize(sorted.columns()[obj].name, ctx.objective));
  FittedModels fm = fit_constraints(s, sorted, seed, &diag);
  ctx.constraints = fm.constraints;
  ctx.constraint_specs = fm.specs;
  ctx.incumbent = find_incumbent(ctx.objective, s.acquisition.incumbent,
                                 fm.specs.empty() ? nullptr : &fm.feasible);
  ctx.pending = s.pending;
  diag.mode = fm.specs.empty() ? "single_objective" : "constrained";
  if (ctx.incumbent) diag.incumbent = ctx.incumbent->value;

  const BatchResult r = suggest_batch(ctx, q, strategy);
  diag.strategy = r.strategy;
  diag.acquisition_values = r.values;
  diag.joint_value = r.joint_value;
  diag.feasibility_only = r.feasibility_only;
  return r.points;
}

Eigen::MatrixXd ask_multi(const CampaignState& s, const Dataset& sorted, std::size_t q,
                          std::uint64_t seed, AskDiagnostics& diag) {
  const auto objectives = sorted.objective_indices();
  const auto m = static_cast<Eigen::Index>(objectives.size());
  const auto n = static_cast<Eigen::Index>(sorted.size());
  Eigen::MatrixXd canon(n, m);
  for (Eigen::Index j = 0; j < m; ++j) canon.col(j) = sorted.canonical_output(objectives[static_cast<std::size_t>(j)]);
  // Standardize each objective so the scalarization sees comparable scales.
  const Transform standard = Transform::fit(s.space, canon);
  const Eigen::MatrixXd ystd = standard.output.apply_rows(canon);

  FittedModels fm = fit_constraints(s, sorted, seed, &diag);
  std::mt19937_64 rng(mix_seed(seed, 0x5ca1ULL));
  Eigen::MatrixXd chosen(0, static_cast<Eigen::Index>(s.space.dim()));
  diag.mode = "multi_objective";
  diag.strategy = BatchStrategy::constant_liar;

  for (std::size_t k = 0; k < q; ++k) {
    Eigen::VectorXd w;
    if (!s.acquisition.weights.empty()) {
      if (static_cast<Eigen::Index>(s.acquisition.weights.size()) != m) {
        throw ArgumentError("scalarization weights must have one entry per objective");
      }
      w = Eigen::Map<const Eigen::VectorXd>(s.acquisition.weights.data(), m);
    } else {
      w = sample_simplex(static_cast<std::size_t>(m), rng);
    }
    diag.weights.emplace_back(w.data(), w.data() + w.size());
    Eigen::VectorXd scalar(n);
    for (Eigen::Index i = 0; i < n; ++i) scalar(i) = augmented_chebyshev(ystd.row(i).transpose(), w, s.acquisition.rho);

    BatchContext ctx = base_context(s, mix_seed(seed, k));
    FitConfig cfg = fit_config_for(s, seed, 0x5c0ULL + k);
    ctx.objective = fit_gp(s.space, sorted.points(), scalar, cfg);
    ctx.constraints = fm.constraints;
    ctx.constraint_specs = fm.specs;
    ctx.incumbent = find_incumbent(ctx.objective, s.acquisition.incumbent,
                                   fm.specs.empty() ? nullptr : &fm.feasible);
    ctx.pending = append_rows(s.pending, chosen);
    const BatchResult r = suggest_batch(ctx, 1, BatchStrategy::constant_liar);
    chosen = append_rows(chosen, r.points);
    diag.acquisition_values.push_back(r.values.front());
    diag.feasibility_only = diag.feasibility_only || r.feasibility_only;
    diag.models.push_back(summarize("scalarized_" + std::to_string(k), ctx.objective));
  }
  return chosen;
}

}  // namespace

bool HistoryEvent::operator==(const HistoryEvent& o) const {
  return kind == o.kind && revision == o.revision && timestamp == o.timestamp &&
         request_id == o.request_id && same_matrix(points, o.points) && same_matrix(outputs, o.outputs);
}

bool CampaignState::operator==(const CampaignState& o) const {
  return space == o.space && data == o.data && acquisition == o.acquisition && settings == o.settings &&
         same_matrix(pending, o.pending) && history == o.history && seed == o.seed &&
         revision == o.revision;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string to_string(Rationale r) {
  return r == Rationale::best_feasible_observed ? "best_feasible_observed" : "best_posterior";
}

CampaignState init_campaign(DesignSpace space, std::vector<OutputColumn> outputs,
                            AcquisitionSpec acquisition, std::uint64_t seed, CampaignSettings settings,
                            const Clock& clock) {
  if (space.dim() == 0) throw ArgumentError("design space needs at least one variable");
  acquisition.validate();
  settings.budget.validate();
  if (settings.fit.restarts < 1) throw ArgumentError("fit restarts must be >= 1");
  if (settings.max_batch < 1) throw ArgumentError("max_batch must be >= 1");
  std::size_t n_obj = 0;
  std::vector<std::string> names;
  for (const auto& c : outputs) {
    if (c.name.empty()) throw ArgumentError("output names must be non-empty");
    if (std::find(names.begin(), names.end(), c.name) != names.end()) {
      throw ArgumentError("duplicate output name '" + c.name + "'");
    }
    if (space.index_of(c.name) != space.dim()) {
      throw ArgumentError("output '" + c.name + "' clashes with a design variable name");
    }
    names.push_back(c.name);
    if (c.role == OutputRole::objective) ++n_obj;
    if (c.role == OutputRole::constraint && !std::isfinite(c.threshold)) {
      throw ArgumentError("constraint '" + c.name + "' needs a finite threshold");
    }
  }
  if (n_obj == 0) throw ArgumentError("a campaign needs at least one objective");
  if (n_obj > settings.max_objectives) {
    throw UnsupportedError(std::to_string(n_obj) + " objectives exceed the supported maximum of " +
                           std::to_string(settings.max_objectives));
  }
  if (!acquisition.weights.empty() && acquisition.weights.size() != n_obj) {
    throw ArgumentError("scalarization weights must have one entry per objective");
  }

  CampaignState s;
  s.data = Dataset(space.dim(), std::move(outputs));
  s.space = std::move(space);
  s.acquisition = std::move(acquisition);
  s.settings = settings;
  s.pending = Eigen::MatrixXd(0, static_cast<Eigen::Index>(s.space.dim()));
  s.seed = seed;
  s.revision = 0;
  HistoryEvent ev;
  ev.kind = "init";
  ev.revision = 0;
  ev.timestamp = clock();
  s.history.push_back(std::move(ev));
  return s;
}

CampaignState tell(const CampaignState& state, const std::vector<Observation>& rows,
                   const std::string& request_id, const Clock& clock) {
  std::ostringstream problems;
  bool bad = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (static_cast<std::size_t>(row.point.size()) != state.space.dim()) {
      problems << (bad ? "; " : "") << "row " << r << ": expected " << state.space.dim() << " coordinates";
      bad = true;
      continue;
    }
    if (static_cast<std::size_t>(row.outputs.size()) != state.data.num_outputs()) {
      problems << (bad ? "; " : "") << "row " << r << ": expected " << state.data.num_outputs() << " outputs";
      bad = true;
      continue;
    }
    if (!row.outputs.allFinite()) {
      problems << (bad ? "; " : "") << "row " << r << ": outputs must be finite";
      bad = true;
      continue;
    }
    if (!state.space.contains(row.point)) {
      problems << (bad ? "; " : "") << "row " << r << ": point out of bounds (";
      const char* sep = "";
      for (std::size_t d = 0; d < state.space.dim(); ++d) {
        const auto& v = state.space[d];
        const double x = row.point(static_cast<Eigen::Index>(d));
        if (!(x >= v.lower && x <= v.upper)) {
          problems << sep << v.name << "=" << x << " not in [" << v.lower << ", " << v.upper << "]";
          sep = ", ";
        }
      }
      problems << ")";
      bad = true;
    }
  }
  if (bad) throw ValidationError("rejected rows: " + problems.str());

  CampaignState next = state;
  HistoryEvent ev;
  ev.kind = "tell";
  ev.request_id = request_id;
  ev.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(state.space.dim()));
  ev.outputs.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(state.data.num_outputs()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    next.data.append(rows[r].point, rows[r].outputs);
    next.pending = clear_pending(next.space, next.pending, rows[r].point);
    ev.points.row(static_cast<Eigen::Index>(r)) = rows[r].point.transpose();
    ev.outputs.row(static_cast<Eigen::Index>(r)) = rows[r].outputs.transpose();
  }
  next.revision = state.revision + 1;
  ev.revision = next.revision;
  ev.timestamp = clock();
  next.history.push_back(std::move(ev));
  return next;
}

AskResult ask(const CampaignState& state, std::size_t q, const AskOptions& options, const Clock& clock) {
  if (q < 1) throw ArgumentError("batch size must be at least 1");
  if (q > state.settings.max_batch) {
    throw ArgumentError("batch size " + std::to_string(q) + " exceeds the configured maximum " +
                        std::to_string(state.settings.max_batch));
  }
  const std::uint64_t seed =
      mix_seed(options.seed.value_or(state.seed), static_cast<std::uint64_t>(state.revision));
  AskResult result;
  AskDiagnostics& diag = result.diagnostics;
  Eigen::MatrixXd batch;

  if (state.data.size() < 2) {
    if (!state.settings.cold_start_fallback) {
      throw InsufficientDataError("model-based suggestions need at least 2 observations, have " +
                                  std::to_string(state.data.size()));
    }
    diag.mode = "cold_start";
    batch = cold_start_batch(state, q);
  } else {
    const Dataset sorted = state.data.canonically_sorted();
    if (sorted.objective_indices().size() > 1) {
      batch = ask_multi(state, sorted, q, seed, diag);
    } else {
      batch = ask_single(state, sorted, q, seed, options.strategy.value_or(default_strategy(state)), diag);
    }
  }

  CampaignState next = state;
  next.pending = append_rows(state.pending, batch);
  next.revision = state.revision + 1;
  HistoryEvent ev;
  ev.kind = "ask";
  ev.revision = next.revision;
  ev.timestamp = clock();
  ev.request_id = options.request_id;
  ev.points = batch;
  next.history.push_back(std::move(ev));
  result.state = std::move(next);
  result.batch = std::move(batch);
  return result;
}

Recommendation recommend(const CampaignState& state) {
  const Dataset& data = state.data;
  const std::size_t n = data.size();
  if (n == 0) throw InsufficientDataError("recommend needs at least one observation");
  const auto objectives = data.objective_indices();
  const auto specs = constraint_specs(data);
  Recommendation rec;

  if (objectives.size() > 1) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (data.observed_feasible(i)) rows.push_back(i);
    }
    if (rows.empty()) {
      rows.resize(n);
      for (std::size_t i = 0; i < n; ++i) rows[i] = i;
      rec.rationale = Rationale::best_posterior;
    }
    Eigen::MatrixXd y(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(objectives.size()));
    std::vector<Sense> senses;
    for (std::size_t j = 0; j < objectives.size(); ++j) {
      senses.push_back(data.columns()[objectives[j]].sense);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
            data.outputs()(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(objectives[j]));
      }
    }
    for (std::size_t k : pareto_front(y, senses)) rec.pareto.push_back(rows[k]);
    rec.row = rec.pareto.front();
    rec.point = data.points().row(static_cast<Eigen::Index>(rec.row)).transpose();
    for (std::size_t j = 0; j < data.num_outputs(); ++j) {
      rec.predicted.push_back({data.outputs()(static_cast<Eigen::Index>(rec.row), static_cast<Eigen::Index>(j)), 0.0, false});
    }
    rec.feasibility = data.observed_feasible(rec.row) ? 1.0 : 0.0;
    return rec;
  }

  const std::size_t obj = objectives.front();
  if (n == 1) {
    rec.row = 0;
    rec.point = data.points().row(0).transpose();
    for (std::size_t j = 0; j < data.num_outputs(); ++j) {
      rec.predicted.push_back({data.outputs()(0, static_cast<Eigen::Index>(j)), 0.0, false});
    }
    rec.feasibility = specs.empty() || data.observed_feasible(0) ? 1.0 : 0.0;
    rec.rationale = rec.feasibility >= state.settings.feasibility_bar ? Rationale::best_feasible_observed
                                                                      : Rationale::best_posterior;
    return rec;
  }

  // Models are fitted on the canonical row order so the result does not
  // depend on tell order.
  const Dataset sorted = data.canonically_sorted();
  const std::uint64_t seed = mix_seed(state.seed, static_cast<std::uint64_t>(state.revision));
  std::vector<GpModel> models;
  for (std::size_t j = 0; j < data.num_outputs(); ++j) {
    models.push_back(fit_gp(state.space, sorted, j, fit_config_for(state, seed, j)));
  }
  const double sign = data.columns()[obj].sense == Sense::minimize ? -1.0 : 1.0;

  std::optional<std::size_t> best_feasible;
  double best_mean = 0.0;
  std::size_t best_pof_row = 0;
  double best_pof = -1.0;
  double best_pof_mean = 0.0;
  std::vector<double> pofs(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd x = data.points().row(static_cast<Eigen::Index>(i)).transpose();
    double pof = 1.0;
    for (const auto& spec : specs) pof *= probability_of_feasibility(models[spec.output_index], x, spec);
    pofs[i] = pof;
    const double mean = sign * models[obj].posterior(x).mean;
    if (pof >= state.settings.feasibility_bar && (!best_feasible || mean > best_mean)) {
      best_feasible = i;
      best_mean = mean;
    }
    if (pof > best_pof || (pof == best_pof && mean > best_pof_mean)) {
      best_pof = pof;
      best_pof_row = i;
      best_pof_mean = mean;
    }
  }
  rec.row = best_feasible.value_or(best_pof_row);
  rec.rationale = best_feasible ? Rationale::best_feasible_observed : Rationale::best_posterior;
  rec.point = data.points().row(static_cast<Eigen::Index>(rec.row)).transpose();
  rec.feasibility = specs.empty() ? 1.0 : pofs[rec.row];
  for (const auto& m : models) rec.predicted.push_back(m.posterior(rec.point));
  return rec;
}

CampaignState replay(const CampaignState& state) {
  if (state.history.empty() || state.history.front().kind != "init") {
    throw ArgumentError("history must start with an init event");
  }
  CampaignState s;
  s.space = state.space;
  s.data = Dataset(state.space.dim(), state.data.columns());
  s.acquisition = state.acquisition;
  s.settings = state.settings;
  s.pending = Eigen::MatrixXd(0, static_cast<Eigen::Index>(state.space.dim()));
  s.seed = state.seed;
  s.history.push_back(state.history.front());
  for (std::size_t k = 1; k < state.history.size(); ++k) {
    const HistoryEvent& ev = state.history[k];
    if (ev.kind == "tell") {
      std::vector<Observation> rows;
      for (Eigen::Index r = 0; r < ev.points.rows(); ++r) {
        rows.push_back({ev.points.row(r).transpose(), ev.outputs.row(r).transpose()});
      }
      s = tell(s, rows, ev.request_id, [&] { return ev.timestamp; });
    } else if (ev.kind == "ask") {
      s.pending = append_rows(s.pending, ev.points);
      s.revision += 1;
      s.history.push_back(ev);
    } else {
      throw ArgumentError("unknown history event kind '" + ev.kind + "'");
    }
    if (s.revision != ev.revision) throw ArgumentError("history revisions are not consecutive");
  }
  return s;
}

namespace {

std::optional<double> improve_best(const CampaignState& s, std::optional<double> best,
                                   const Eigen::VectorXd& outputs) {
  const auto objectives = s.data.objective_indices();
  const auto& cols = s.data.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].role != OutputRole::constraint) continue;
    const double y = outputs(static_cast<Eigen::Index>(j));
    const bool ok = cols[j].direction == ConstraintDirection::le ? y <= cols[j].threshold : y >= cols[j].threshold;
    if (!ok) return best;
  }
  const std::size_t obj = objectives.front();
  const double y = outputs(static_cast<Eigen::Index>(obj));
  if (!best) return y;
  return cols[obj].sense == Sense::minimize ? std::min(*best, y) : std::max(*best, y);
}

}  // namespace

SimulationResult simulate_loop(const CampaignState& state, const Oracle& oracle, std::size_t iterations,
                               std::size_t q, const AskOptions& options, const Clock& clock) {
  SimulationResult out;
  out.state = state;
  std::optional<double> best;
  for (std::size_t it = 0; it < iterations; ++it) {
    AskResult asked = ask(out.state, q, options, clock);
    std::vector<Observation> rows;
    for (Eigen::Index r = 0; r < asked.batch.rows(); ++r) {
      const Eigen::VectorXd x = asked.batch.row(r).transpose();
      Eigen::VectorXd y = oracle(x);
      if (static_cast<std::size_t>(y.size()) != out.state.data.num_outputs() || !y.allFinite()) {
        out.aborted = true;
        out.message = "oracle returned a non-finite or malformed result at iteration " + std::to_string(it);
        out.state = asked.state;
        return out;
      }
      rows.push_back({x, y});
    }
    out.state = tell(asked.state, rows, {}, clock);
    for (const auto& row : rows) {
      best = improve_best(out.state, best, row.outputs);
      out.trace.push_back({it, row.point, row.outputs, best});
    }
  }
  return out;
}

std::vector<TraceEntry> observation_trace(const CampaignState& state) {
  std::vector<TraceEntry> trace;
  std::optional<double> best;
  std::size_t index = 0;
  for (const auto& ev : state.history) {
    if (ev.kind != "tell") continue;
    for (Eigen::Index r = 0; r < ev.points.rows(); ++r) {
      const Eigen::VectorXd y = ev.outputs.row(r).transpose();
      best = improve_best(state, best, y);
      trace.push_back({index++, ev.points.row(r).transpose(), y, best});
    }
  }
  return trace;
}

}  // namespace bayesdoe
