#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bayesdoe/api.hpp"
#include "bayesdoe/campaign.hpp"
#include "bayesdoe/csv.hpp"
#include "bayesdoe/errors.hpp"
#include "bayesdoe/pareto.hpp"
#include "bayesdoe/persistence.hpp"
#include "bayesdoe/quadratic.hpp"

namespace bayesdoe::cli {

namespace {

struct Options {
  std::string campaign;
  std::string space;
  std::string out;
  std::string data;
  std::string trace;
  std::string oracle = "quadratic";
  std::string strategy;
  std::string acquisition;
  std::string request_id;
  std::vector<std::string> minimize;
  std::optional<std::uint64_t> seed;
  std::size_t q = 1;
  std::size_t iters = 15;
  bool clamp = false;
  bool json = false;
};

std::string resolve(const std::string& path) {
  if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("BAYESDOE_CAMPAIGN_DIR"); dir && *dir) {
    return (std::filesystem::path(dir) / path).string();
  }
  return path;
}

std::vector<std::string> variable_names(const CampaignState& s) {
  std::vector<std::string> names;
  for (const auto& v : s.space.variables()) names.push_back(v.name);
  return names;
}

std::vector<std::string> output_names(const CampaignState& s) {
  std::vector<std::string> names;
  for (const auto& c : s.data.columns()) names.push_back(c.name);
  return names;
}

std::string rows_csv(const CampaignState& s, const std::vector<std::size_t>& rows) {
  std::vector<std::string> header = variable_names(s);
  for (const auto& n : output_names(s)) header.push_back(n);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(rows[k]);
    m.row(static_cast<Eigen::Index>(k)) << s.data.points().row(r), s.data.outputs().row(r);
  }
  return to_csv(m, header);
}

std::string trace_csv(const CampaignState& s, const std::vector<TraceEntry>& trace) {
  std::string text = "index";
  for (const auto& n : variable_names(s)) text += "," + n;
  for (const auto& n : output_names(s)) text += "," + n;
  text += ",best_so_far\n";
  for (const auto& t : trace) {
    text += std::to_string(t.iteration);
    for (Eigen::Index i = 0; i < t.point.size(); ++i) text += "," + format_number(t.point(i));
    for (Eigen::Index i = 0; i < t.outputs.size(); ++i) text += "," + format_number(t.outputs(i));
    text += "," + (t.best_so_far ? format_number(*t.best_so_far) : std::string());
    text += "\n";
  }
  return text;
}

void require_campaign(const Options& o) {
  if (o.campaign.empty()) throw ArgumentError("--campaign is required");
}

int cmd_init(const Options& o, std::ostream& out) {
  if (o.space.empty()) throw ArgumentError("--space is required");
  if (o.out.empty()) throw ArgumentError("--out is required");
  SpaceDocument doc = parse_space_document(read_file(o.space));
  if (doc.outputs.empty()) doc.outputs.push_back(OutputColumn::objective("y"));
  for (const auto& name : o.minimize) {
    auto it = std::find_if(doc.outputs.begin(), doc.outputs.end(),
                           [&](const OutputColumn& c) { return c.name == name; });
    if (it == doc.outputs.end() || it->role != OutputRole::objective) {
      throw ArgumentError("--minimize names unknown objective '" + name + "'");
    }
    it->sense = Sense::minimize;
  }
  AcquisitionSpec acq = doc.acquisition.value_or(AcquisitionSpec{});
  if (!o.acquisition.empty()) acq.kind = parse_acquisition_kind(o.acquisition);
  CampaignSettings settings;
  if (!o.strategy.empty()) settings.strategy = parse_batch_strategy(o.strategy);
  const CampaignState s = init_campaign(doc.space, doc.outputs, acq, o.seed.value_or(0), settings);
  write_campaign(resolve(o.out), s, kNoCampaign);
  if (o.json) {
    out << api::summary(s) << "\n";
  } else {
    out << "initialized " << resolve(o.out) << ": " << s.space.dim() << " variables, "
        << s.data.num_outputs() << " outputs, revision " << s.revision << "\n";
  }
  return 0;
}

int cmd_ask(const Options& o, std::ostream& out) {
  require_campaign(o);
  const std::string path = resolve(o.campaign);
  const CampaignState s = read_campaign(path);
  AskOptions opts;
  if (!o.strategy.empty()) opts.strategy = parse_batch_strategy(o.strategy);
  opts.seed = o.seed;
  opts.request_id = o.request_id;
  const AskResult r = ask(s, o.q, opts);
  write_campaign(path, r.state, s.revision);
  if (o.json) {
    out << api::ask(r) << "\n";
  } else {
    out << to_csv(r.batch, variable_names(s));
  }
  return 0;
}

int cmd_tell(const Options& o, std::ostream& out) {
  require_campaign(o);
  if (o.data.empty()) throw ArgumentError("--data is required");
  const std::string path = resolve(o.campaign);
  const CampaignState s = read_campaign(path);
  CsvOptions csv;
  csv.clamp_out_of_bounds = o.clamp;
  std::ostringstream warnings;
  csv.warn = [&](const std::string& w) { warnings << "warning: " << w << "\n"; };
  const Dataset rows = load_csv(o.data, CsvSchema::for_space(s.space, s.data.columns()), s.space, csv);
  std::vector<Observation> obs;
  for (Eigen::Index r = 0; r < rows.points().rows(); ++r) {
    obs.push_back({rows.points().row(r).transpose(), rows.outputs().row(r).transpose()});
  }
  const CampaignState next = tell(s, obs, o.request_id);
  write_campaign(path, next, s.revision);
  if (o.json) {
    out << api::tell(next, obs.size()) << "\n";
  } else {
    out << warnings.str() << "appended " << obs.size() << " rows; n=" << next.data.size()
        << " revision=" << next.revision << "\n";
  }
  return 0;
}

int cmd_status(const Options& o, std::ostream& out) {
  require_campaign(o);
  const CampaignState s = read_campaign(resolve(o.campaign));
  if (o.json) {
    out << api::summary(s) << "\n";
    return 0;
  }
  const auto trace = observation_trace(s);
  std::optional<double> best;
  if (!trace.empty()) best = trace.back().best_so_far;
  out << "n=" << s.data.size() << "\n"
      << "revision=" << s.revision << "\n"
      << "pending=" << s.pending.rows() << "\n"
      << "incumbent=" << (best ? format_number(*best) : std::string("none")) << "\n";
  return 0;
}

int cmd_recommend(const Options& o, std::ostream& out) {
  require_campaign(o);
  const CampaignState s = read_campaign(resolve(o.campaign));
  const Recommendation rec = recommend(s);
  if (o.json) {
    out << api::recommend(s, rec) << "\n";
    return 0;
  }
  if (!rec.pareto.empty()) {
    out << rows_csv(s, rec.pareto);
    return 0;
  }
  std::vector<std::string> header = variable_names(s);
  for (const auto& n : output_names(s)) {
    header.push_back(n + "_mean");
    header.push_back(n + "_sd");
  }
  header.push_back("feasibility");
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(header.size()));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rec.point.size(); ++i) row(k++) = rec.point(i);
  for (const auto& p : rec.predicted) {
    row(k++) = p.mean;
    row(k++) = std::sqrt(std::max(p.variance, 0.0));
  }
  row(k++) = rec.feasibility;
  header.push_back("rationale");
  std::string text = to_csv(Eigen::MatrixXd(0, 0), header);
  for (Eigen::Index i = 0; i < row.size(); ++i) text += (i ? "," : "") + format_number(row(i));
  out << text << "," << to_string(rec.rationale) << "\n";
  return 0;
}

int cmd_pareto(const Options& o, std::ostream& out) {
  require_campaign(o);
  const CampaignState s = read_campaign(resolve(o.campaign));
  if (o.json) {
    out << api::pareto(s) << "\n";
    return 0;
  }
  std::vector<std::size_t> rows;
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    if (s.data.observed_feasible(i)) feasible.push_back(i);
  }
  if (!feasible.empty()) {
    const auto objectives = s.data.objective_indices();
    Eigen::MatrixXd y(static_cast<Eigen::Index>(feasible.size()), static_cast<Eigen::Index>(objectives.size()));
    std::vector<Sense> senses;
    for (std::size_t j = 0; j < objectives.size(); ++j) {
      senses.push_back(s.data.columns()[objectives[j]].sense);
      for (std::size_t r = 0; r < feasible.size(); ++r) {
        y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
            s.data.outputs()(static_cast<Eigen::Index>(feasible[r]), static_cast<Eigen::Index>(objectives[j]));
      }
    }
    for (std::size_t k : pareto_front(y, senses)) rows.push_back(feasible[k]);
  }
  out << rows_csv(s, rows);
  return 0;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  require_campaign(o);
  if (o.oracle != "quadratic") throw ArgumentError("unknown oracle '" + o.oracle + "' (supported: quadratic)");
  const std::string path = resolve(o.campaign);
  const CampaignState s = read_campaign(path);
  std::vector<QuadraticModel> surfaces;
  for (std::size_t j = 0; j < s.data.num_outputs(); ++j) surfaces.push_back(fit_quadratic_oracle(s.data, j));
  const Oracle oracle = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(surfaces.size()));
    for (std::size_t j = 0; j < surfaces.size(); ++j) y(static_cast<Eigen::Index>(j)) = surfaces[j](x);
    return y;
  };
  AskOptions opts;
  if (!o.strategy.empty()) opts.strategy = parse_batch_strategy(o.strategy);
  opts.seed = o.seed;
  const SimulationResult r = simulate_loop(s, oracle, o.iters, o.q, opts);
  write_campaign(o.out.empty() ? path : resolve(o.out), r.state, o.out.empty() ? std::optional<long long>(s.revision) : std::nullopt);
  const std::string text = trace_csv(r.state, r.trace);
  if (!o.trace.empty()) write_file_atomic(o.trace, text);
  if (o.json) {
    out << api::trace(r.state) << "\n";
  } else if (o.trace.empty()) {
    out << text;
  } else {
    out << "simulated " << r.trace.size() << " evaluations; trace written to " << o.trace << "\n";
  }
  if (r.aborted) throw NumericalError(r.message);
  return 0;
}

int cmd_export_trace(const Options& o, std::ostream& out) {
  require_campaign(o);
  const CampaignState s = read_campaign(resolve(o.campaign));
  if (o.json) {
    out << api::trace(s) << "\n";
    return 0;
  }
  const std::string text = trace_csv(s, observation_trace(s));
  if (o.out.empty()) {
    out << text;
  } else {
    write_file_atomic(o.out, text);
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian optimization for experiment design", "bayesdoe"};
  app.require_subcommand(1);
  Options o;
  auto seed_opt = [&](CLI::App* sub) {
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { o.seed = v; },
                                            "Random seed");
  };
  auto common = [&](CLI::App* sub, bool needs_campaign) {
    if (needs_campaign) sub->add_option("--campaign,-c", o.campaign, "Campaign file")->required();
    sub->add_flag("--json", o.json, "Machine-readable JSON output");
  };

  auto* init = app.add_subcommand("init", "Create a campaign from a space definition");
  init->add_option("--space", o.space, "Space definition (JSON)")->required();
  init->add_option("--out,-o", o.out, "Campaign file to create")->required();
  init->add_option("--minimize", o.minimize, "Objective to minimize (repeatable)");
  init->add_option("--acquisition", o.acquisition, "ei, ucb, qei, efi or scalarized_ei");
  init->add_option("--strategy", o.strategy, "Default batch strategy");
  seed_opt(init);
  common(init, false);

  auto* ask_cmd = app.add_subcommand("ask", "Suggest the next batch of experiments");
  ask_cmd->add_option("-q,--batch", o.q, "Batch size")->check(CLI::PositiveNumber);
  ask_cmd->add_option("--strategy", o.strategy, "joint_qei, constant_liar or local_penalization");
  ask_cmd->add_option("--request-id", o.request_id, "Client request id");
  seed_opt(ask_cmd);
  common(ask_cmd, true);

  auto* tell_cmd = app.add_subcommand("tell", "Append measured results");
  tell_cmd->add_option("--data,-d", o.data, "CSV of observed rows")->required();
  tell_cmd->add_flag("--clamp", o.clamp, "Clamp out-of-bounds inputs instead of rejecting");
  tell_cmd->add_option("--request-id", o.request_id, "Client request id");
  common(tell_cmd, true);

  auto* status = app.add_subcommand("status", "Show campaign size, revision and incumbent");
  common(status, true);
  auto* rec = app.add_subcommand("recommend", "Recommend the best design so far");
  common(rec, true);
  auto* par = app.add_subcommand("pareto", "Print non-dominated observed rows");
  common(par, true);

  auto* sim = app.add_subcommand("simulate", "Run the ask-tell loop against a synthetic oracle");
  sim->add_option("--oracle", o.oracle, "Oracle fitted to the campaign data (quadratic)");
  sim->add_option("--iters", o.iters, "Iterations")->check(CLI::NonNegativeNumber);
  sim->add_option("-q,--batch", o.q, "Batch size")->check(CLI::PositiveNumber);
  sim->add_option("--strategy", o.strategy, "Batch strategy");
  sim->add_option("--trace", o.trace, "Write the simulation trace CSV here");
  sim->add_option("--out,-o", o.out, "Write the resulting campaign here instead of in place");
  seed_opt(sim);
  common(sim, true);

  auto* exp = app.add_subcommand("export-trace", "Write the best-so-far trace as CSV");
  exp->add_option("--out,-o", o.out, "Output file (standard output when omitted)");
  common(exp, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const std::string verb = sub->get_name();
    if (verb == "init") return cmd_init(o, out);
    if (verb == "ask") return cmd_ask(o, out);
    if (verb == "tell") return cmd_tell(o, out);
    if (verb == "status") return cmd_status(o, out);
    if (verb == "recommend") return cmd_recommend(o, out);
    if (verb == "pareto") return cmd_pareto(o, out);
    if (verb == "simulate") return cmd_simulate(o, out);
    return cmd_export_trace(o, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConflictError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bayesdoe::cli
