#include "bayesdoe/api.hpp"

#include <cmath>

#include "api_payloads.hpp"
#include "bayesdoe/errors.hpp"
#include "bayesdoe/low_discrepancy.hpp"
#include "bayesdoe/pareto.hpp"

namespace bayesdoe {

namespace detail {

namespace {

json names(const CampaignState& s) {
  json out = json::array();
  for (const auto& v : s.space.variables()) out.push_back(v.name);
  return out;
}

json output_names(const CampaignState& s) {
  json out = json::array();
  for (const auto& c : s.data.columns()) out.push_back(c.name);
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json summary_payload(const CampaignState& s) {
  const auto trace = observation_trace(s);
  json outputs = json::array();
  for (const auto& c : s.data.columns()) outputs.push_back(column_to_json(c));
  return {{"n", s.data.size()},
          {"revision", s.revision},
          {"seed", s.seed},
          {"incumbent", trace.empty() ? json(nullptr) : optional_number(trace.back().best_so_far)},
          {"space", space_to_json(s.space)},
          {"outputs", outputs},
          {"acquisition", acquisition_to_json(s.acquisition)},
          {"columns", names(s)},
          {"output_columns", output_names(s)},
          {"points", matrix_to_json(s.data.points())},
          {"observations", matrix_to_json(s.data.outputs())},
          {"pending", matrix_to_json(s.pending)}};
}

json ask_payload(const AskResult& r) {
  const AskDiagnostics& d = r.diagnostics;
  json models = json::array();
  for (const auto& m : d.models) {
    models.push_back({{"output", m.output},
                      {"kernel", kernel_to_json(m.kernel)},
                      {"noise_var", m.noise_var},
                      {"log_marginal_likelihood", m.log_marginal_likelihood}});
  }
  json diagnostics{{"mode", d.mode},
                   {"strategy", d.strategy ? json(to_string(*d.strategy)) : json(nullptr)},
                   {"acquisition_values", d.acquisition_values},
                   {"joint_value", optional_number(d.joint_value)},
                   {"feasibility_only", d.feasibility_only},
                   {"incumbent", optional_number(d.incumbent)},
                   {"weights", d.weights},
                   {"models", models}};
  return {{"columns", names(r.state)},
          {"batch", matrix_to_json(r.batch)},
          {"revision", r.state.revision},
          {"diagnostics", diagnostics}};
}

json tell_payload(const CampaignState& s, std::size_t appended) {
  return {{"appended", appended}, {"n", s.data.size()}, {"revision", s.revision},
          {"pending", matrix_to_json(s.pending)}};
}

json recommend_payload(const CampaignState& s, const Recommendation& rec) {
  json predicted = json::array();
  for (std::size_t j = 0; j < rec.predicted.size(); ++j) {
    const Posterior& p = rec.predicted[j];
    predicted.push_back({{"output", s.data.columns()[j].name},
                         {"mean", p.mean},
                         {"sd", std::sqrt(std::max(p.variance, 0.0))}});
  }
  return {{"columns", names(s)},
          {"point", vector_to_json(rec.point)},
          {"row", rec.row},
          {"predicted", predicted},
          {"feasibility", rec.feasibility},
          {"rationale", to_string(rec.rationale)},
          {"pareto", rec.pareto}};
}

json pareto_payload(const CampaignState& s) {
  const auto objectives = s.data.objective_indices();
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    if (s.data.observed_feasible(i)) rows.push_back(i);
  }
  std::vector<std::size_t> front;
  if (!rows.empty()) {
    Eigen::MatrixXd y(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(objectives.size()));
    std::vector<Sense> senses;
    for (std::size_t j = 0; j < objectives.size(); ++j) {
      senses.push_back(s.data.columns()[objectives[j]].sense);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
            s.data.outputs()(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(objectives[j]));
      }
    }
    for (std::size_t k : pareto_front(y, senses)) front.push_back(rows[k]);
  }
  Eigen::MatrixXd points(static_cast<Eigen::Index>(front.size()), static_cast<Eigen::Index>(s.space.dim()));
  Eigen::MatrixXd outputs(static_cast<Eigen::Index>(front.size()), static_cast<Eigen::Index>(s.data.num_outputs()));
  for (std::size_t k = 0; k < front.size(); ++k) {
    points.row(static_cast<Eigen::Index>(k)) = s.data.points().row(static_cast<Eigen::Index>(front[k]));
    outputs.row(static_cast<Eigen::Index>(k)) = s.data.outputs().row(static_cast<Eigen::Index>(front[k]));
  }
  return {{"rows", front},
          {"columns", names(s)},
          {"output_columns", output_names(s)},
          {"points", matrix_to_json(points)},
          {"outputs", matrix_to_json(outputs)}};
}

json trace_payload(const CampaignState& s) {
  json entries = json::array();
  for (const auto& t : observation_trace(s)) {
    entries.push_back({{"index", t.iteration},
                       {"point", vector_to_json(t.point)},
                       {"outputs", vector_to_json(t.outputs)},
                       {"best_so_far", optional_number(t.best_so_far)}});
  }
  return {{"columns", names(s)}, {"output_columns", output_names(s)}, {"trace", entries}};
}

json slice_payload(const CampaignState& s, std::size_t dim, std::size_t points,
                   const Eigen::VectorXd& anchor, std::size_t output_index) {
  if (dim >= s.space.dim()) {
    throw ValidationError("dim must be below " + std::to_string(s.space.dim()));
  }
  if (points < 2) throw ValidationError("points must be at least 2");
  if (output_index >= s.data.num_outputs()) throw ValidationError("unknown output column");
  FitConfig cfg = s.settings.fit;
  cfg.seed = mix_seed(s.seed, static_cast<std::uint64_t>(s.revision));
  const GpModel model = fit_gp(s.space, s.data.canonically_sorted(), output_index, cfg);
  const Variable& v = s.space[dim];
  std::vector<double> xs, mean, lower, upper;
  Eigen::VectorXd q = anchor;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = v.lower + (v.upper - v.lower) * static_cast<double>(i) / static_cast<double>(points - 1);
    q(static_cast<Eigen::Index>(dim)) = x;
    const Posterior p = model.posterior(q);
    const double sd = std::sqrt(std::max(p.variance, 0.0));
    xs.push_back(x);
    mean.push_back(p.mean);
    lower.push_back(p.mean - 2.0 * sd);
    upper.push_back(p.mean + 2.0 * sd);
  }
  return {{"dim", dim},
          {"variable", v.name},
          {"output", s.data.columns()[output_index].name},
          {"anchor", vector_to_json(anchor)},
          {"x", xs},
          {"mean", mean},
          {"lower", lower},
          {"upper", upper}};
}

}  // namespace detail

namespace api {

std::string summary(const CampaignState& state) { return detail::summary_payload(state).dump(); }
std::string ask(const AskResult& result) { return detail::ask_payload(result).dump(); }
std::string tell(const CampaignState& state, std::size_t appended) {
  return detail::tell_payload(state, appended).dump();
}
std::string recommend(const CampaignState& state, const Recommendation& rec) {
  return detail::recommend_payload(state, rec).dump();
}
std::string pareto(const CampaignState& state) { return detail::pareto_payload(state).dump(); }
std::string trace(const CampaignState& state) { return detail::trace_payload(state).dump(); }
std::string slice(const CampaignState& state, std::size_t dim, std::size_t points,
                  const Eigen::VectorXd& anchor, std::size_t output_index) {
  return detail::slice_payload(state, dim, points, anchor, output_index).dump();
}

}  // namespace api

}  // namespace bayesdoe
