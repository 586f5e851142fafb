#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bayesdoe/acqopt.hpp"
#include "bayesdoe/acquisition.hpp"
#include "bayesdoe/batch.hpp"
#include "bayesdoe/dataset.hpp"
#include "bayesdoe/design_space.hpp"
#include "bayesdoe/gp.hpp"

namespace bayesdoe {

inline constexpr std::size_t kDefaultMaxObjectives = 4;

/// Knobs that are not part of the acquisition itself.
struct CampaignSettings {
  FitConfig fit;
  OptBudget budget;
  std::optional<BatchStrategy> strategy;  // default batch strategy; derived from the kind when empty
  std::size_t max_batch = kDefaultMaxBatch;
  std::size_t max_objectives = kDefaultMaxObjectives;
  bool cold_start_fallback = true;
  double feasibility_bar = 0.95;

  bool operator==(const CampaignSettings&) const = default;
};

/// One entry of the append-only campaign log.
struct HistoryEvent {
  std::string kind;  // "init", "tell", "ask"
  long long revision = 0;
  std::string timestamp;
  std::string request_id;
  Eigen::MatrixXd points;   // tell: observed rows; ask: suggested rows
  Eigen::MatrixXd outputs;  // tell only

  bool operator==(const HistoryEvent& o) const;
};

struct CampaignState {
  DesignSpace space;
  Dataset data;
  AcquisitionSpec acquisition;
  CampaignSettings settings;
  Eigen::MatrixXd pending;  // suggested but not yet observed, original units
  std::vector<HistoryEvent> history;
  std::uint64_t seed = 0;
  long long revision = 0;

  std::vector<std::size_t> objective_indices() const { return data.objective_indices(); }
  std::vector<ConstraintSpec> constraints() const { return constraint_specs(data); }

  bool operator==(const CampaignState& o) const;
};

using Clock = std::function<std::string()>;
/// Current UTC time as ISO-8601 with a trailing Z.
std::string utc_timestamp();

struct Observation {
  Eigen::VectorXd point;
  Eigen::VectorXd outputs;
};

CampaignState init_campaign(DesignSpace space, std::vector<OutputColumn> outputs,
                            AcquisitionSpec acquisition, std::uint64_t seed,
                            CampaignSettings settings = {}, const Clock& clock = utc_timestamp);

/// Appends observations. Rejects the whole call (ValidationError naming each
/// offending row) if any point is out of bounds or any row is malformed.
CampaignState tell(const CampaignState& state, const std::vector<Observation>& rows,
                   const std::string& request_id = {}, const Clock& clock = utc_timestamp);

struct AskOptions {
  std::optional<BatchStrategy> strategy;
  std::optional<std::uint64_t> seed;  // overrides the campaign seed for this call
  std::string request_id;
};

struct ModelSummary {
  std::string output;
  KernelParams kernel;
  double noise_var = 0.0;
  double log_marginal_likelihood = 0.0;
};

struct AskDiagnostics {
  std::string mode;  // cold_start | single_objective | constrained | multi_objective
  std::optional<BatchStrategy> strategy;
  std::vector<double> acquisition_values;
  std::optional<double> joint_value;
  bool feasibility_only = false;
  std::optional<double> incumbent;  // standardized canonical units
  std::vector<ModelSummary> models;
  std::vector<std::vector<double>> weights;  // per-row scalarization weights
};

struct AskResult {
  CampaignState state;
  Eigen::MatrixXd batch;
  AskDiagnostics diagnostics;
};

AskResult ask(const CampaignState& state, std::size_t q, const AskOptions& options = {},
              const Clock& clock = utc_timestamp);

enum class Rationale { best_feasible_observed, best_posterior };
std::string to_string(Rationale r);

struct Recommendation {
  Eigen::VectorXd point;
  std::size_t row = 0;  // index into the campaign data
  std::vector<Posterior> predicted;  // per output column, original units
  double feasibility = 1.0;
  Rationale rationale = Rationale::best_feasible_observed;
  std::vector<std::size_t> pareto;  // non-empty for multi-objective campaigns
};

Recommendation recommend(const CampaignState& state);

/// Rebuilds a campaign from its configuration and history log.
CampaignState replay(const CampaignState& state);

struct TraceEntry {
  std::size_t iteration = 0;
  Eigen::VectorXd point;
  Eigen::VectorXd outputs;
  std::optional<double> best_so_far;  // best feasible first-objective value in original units
};

struct SimulationResult {
  CampaignState state;
  std::vector<TraceEntry> trace;
  bool aborted = false;
  std::string message;
};

using Oracle = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Runs `iterations` rounds of ask(q) -> oracle -> tell.
SimulationResult simulate_loop(const CampaignState& state, const Oracle& oracle, std::size_t iterations,
                               std::size_t q, const AskOptions& options = {},
                               const Clock& clock = utc_timestamp);

/// Per-observation trace of a campaign: best feasible first-objective value
/// so far, in original units, in tell order.
std::vector<TraceEntry> observation_trace(const CampaignState& state);

}  // namespace bayesdoe
