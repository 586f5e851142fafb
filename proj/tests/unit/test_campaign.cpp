#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "bayesdoe/campaign.hpp"
#include "bayesdoe/errors.hpp"
#include "bayesdoe/low_discrepancy.hpp"
#include "scenarios.hpp"

using namespace bayesdoe;

namespace {

const Clock kFixedClock = [] { return std::string("2024-01-01T00:00:00Z"); };

std::vector<Observation> rows_of(const Dataset& d) {
  std::vector<Observation> rows;
  for (Eigen::Index i = 0; i < d.points().rows(); ++i) {
    rows.push_back({d.points().row(i).transpose(), d.outputs().row(i).transpose()});
  }
  return rows;
}

CampaignState golden_campaign(const std::string& name, std::uint64_t seed = 3) {
  const auto g = testing_support::load_golden(name);
  const CampaignState s = init_campaign(g.doc.space, g.doc.outputs, g.doc.acquisition.value_or(AcquisitionSpec{}),
                                        seed, {}, kFixedClock);
  return tell(s, rows_of(g.data), {}, kFixedClock);
}

void expect_in_bounds(const DesignSpace& space, const Eigen::MatrixXd& batch) {
  for (Eigen::Index i = 0; i < batch.rows(); ++i) EXPECT_TRUE(space.contains(batch.row(i).transpose())) << i;
}

double min_unit_distance(const DesignSpace& space, const Eigen::MatrixXd& rows) {
  double best = INFINITY;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < rows.rows(); ++j) {
      best = std::min(best, (space.to_unit(rows.row(i).transpose()) - space.to_unit(rows.row(j).transpose())).norm());
    }
  }
  return best;
}

}  // namespace

TEST(InitCampaign, GoldenSpaces) {
  const auto b = testing_support::load_golden("BatchObj");
  const CampaignState s = init_campaign(b.doc.space, b.doc.outputs, {}, 1);
  EXPECT_EQ(s.space.dim(), 4u);
  EXPECT_EQ(s.revision, 0);
  EXPECT_EQ(s.data.size(), 0u);
  ASSERT_EQ(s.history.size(), 1u);
  EXPECT_EQ(s.history[0].kind, "init");

  const auto m = testing_support::load_golden("MultiObj");
  AcquisitionSpec acq;
  acq.kind = AcquisitionKind::scalarized_ei;
  EXPECT_EQ(init_campaign(m.doc.space, m.doc.outputs, acq, 1).objective_indices().size(), 4u);
}

TEST(InitCampaign, Rejections) {
  const DesignSpace space({{"x", 0, 1, ""}});
  EXPECT_THROW(init_campaign(DesignSpace(), {OutputColumn::objective("y")}, {}, 0), ArgumentError);
  EXPECT_THROW(init_campaign(space, {OutputColumn::constraint("c", 1.0)}, {}, 0), ArgumentError);
  EXPECT_THROW(init_campaign(space, {OutputColumn::objective("y"), OutputColumn::objective("y")}, {}, 0),
               ArgumentError);
  EXPECT_THROW(init_campaign(space, {OutputColumn::objective("x")}, {}, 0), ArgumentError);
  std::vector<OutputColumn> five;
  for (int i = 0; i < 5; ++i) five.push_back(OutputColumn::objective("y" + std::to_string(i)));
  EXPECT_THROW(init_campaign(space, five, {}, 0), UnsupportedError);
  CampaignSettings wide;
  wide.max_objectives = 5;
  EXPECT_NO_THROW(init_campaign(space, five, {}, 0, wide));
}

TEST(Tell, AppendsAndCountsRevisions) {
  const CampaignState s = golden_campaign("BatchObj");
  EXPECT_EQ(s.data.size(), 27u);
  EXPECT_EQ(s.revision, 1);
  const CampaignState empty = tell(s, {});
  EXPECT_EQ(empty.revision, 2);
  EXPECT_EQ(empty.data.points(), s.data.points());
  const Observation dup{s.data.points().row(0).transpose(), Eigen::VectorXd::Constant(1, 5.0)};
  const CampaignState twice = tell(s, {dup, dup});
  EXPECT_EQ(twice.data.size(), 29u);
}

TEST(Tell, RejectsWholeCallNamingRows) {
  const CampaignState s = golden_campaign("BatchObj");
  Observation ok{s.data.points().row(0).transpose(), Eigen::VectorXd::Constant(1, 5.0)};
  Observation out = ok;
  out.point(1) = 200.0;
  Observation nan = ok;
  nan.outputs(0) = NAN;
  try {
    tell(s, {ok, out, ok, nan});
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("Layer_thickness=200"), std::string::npos) << msg;
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_EQ(msg.find("row 0"), std::string::npos) << msg;
  }
}

TEST(Tell, ClearsMatchingPending) {
  const AskResult a = ask(golden_campaign("BatchObj"), 2, {}, kFixedClock);
  ASSERT_EQ(a.state.pending.rows(), 2);
  const Observation obs{a.batch.row(1).transpose(), Eigen::VectorXd::Constant(1, 6.0)};
  const CampaignState after = tell(a.state, {obs});
  ASSERT_EQ(after.pending.rows(), 1);
  EXPECT_EQ(after.pending.row(0), a.batch.row(0));
}

TEST(Tell, RowOrderDoesNotChangeNextAsk) {
  const auto g = testing_support::load_golden("BatchObj");
  const CampaignState base = init_campaign(g.doc.space, g.doc.outputs, {}, 9, {}, kFixedClock);
  auto rows = rows_of(g.data);
  const CampaignState a = tell(base, rows, {}, kFixedClock);
  std::mt19937_64 rng(1);
  std::shuffle(rows.begin(), rows.end(), rng);
  const CampaignState b = tell(base, rows, {}, kFixedClock);
  EXPECT_EQ(ask(a, 2).batch, ask(b, 2).batch);
}

TEST(Ask, ColdStartIsSpaceFilling) {
  const DesignSpace space({{"a", 0, 10, ""}, {"b", -1, 1, ""}});
  const CampaignState s = init_campaign(space, {OutputColumn::objective("y")}, {}, 4);
  const AskResult r = ask(s, 5);
  EXPECT_EQ(r.diagnostics.mode, "cold_start");
  ASSERT_EQ(r.batch.rows(), 5);
  expect_in_bounds(space, r.batch);
  EXPECT_GT(min_unit_distance(space, r.batch), 0.05);
  EXPECT_TRUE(r.diagnostics.models.empty());
  EXPECT_EQ(r.state.pending.rows(), 5);
  EXPECT_EQ(r.state.revision, s.revision + 1);

  CampaignSettings strict;
  strict.cold_start_fallback = false;
  const CampaignState t = init_campaign(space, {OutputColumn::objective("y")}, {}, 4, strict);
  EXPECT_THROW(ask(t, 1), InsufficientDataError);
}

TEST(Ask, GoldenSuggestionsInBounds) {
  for (const char* name : {"BatchObj", "MultiObj", "BBcon"}) {
    const CampaignState s = golden_campaign(name);
    const AskResult r = ask(s, 2);
    ASSERT_EQ(r.batch.rows(), 2) << name;
    expect_in_bounds(s.space, r.batch);
    EXPECT_GE(min_unit_distance(s.space, r.batch), kDuplicateTolerance) << name;
    EXPECT_EQ(r.diagnostics.acquisition_values.size(), 2u);
    EXPECT_EQ(r.state.pending.rows(), 2);
  }
}

TEST(Ask, ModesFollowTheCampaign) {
  EXPECT_EQ(ask(golden_campaign("BatchObj"), 1).diagnostics.mode, "single_objective");
  const AskResult m = ask(golden_campaign("MultiObj"), 2);
  EXPECT_EQ(m.diagnostics.mode, "multi_objective");
  ASSERT_EQ(m.diagnostics.weights.size(), 2u);
  for (const auto& w : m.diagnostics.weights) EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
  EXPECT_NE(m.diagnostics.weights[0], m.diagnostics.weights[1]);
  const AskResult c = ask(golden_campaign("BBcon"), 1);
  EXPECT_EQ(c.diagnostics.mode, "constrained");
  EXPECT_EQ(c.diagnostics.models.size(), 2u);
}

TEST(Ask, DeterministicAndSeedSensitive) {
  const CampaignState s = golden_campaign("BatchObj");
  EXPECT_EQ(ask(s, 2).batch, ask(s, 2).batch);
  AskOptions other;
  other.seed = 12345;
  EXPECT_NE(ask(s, 2).batch, ask(s, 2, other).batch);
}

TEST(Ask, AvoidsPendingAcrossCalls) {
  const AskResult first = ask(golden_campaign("BatchObj"), 2);
  const AskResult second = ask(first.state, 2);
  Eigen::MatrixXd all(4, 4);
  all << first.batch, second.batch;
  EXPECT_GE(min_unit_distance(first.state.space, all), kDuplicateTolerance);
  EXPECT_EQ(second.state.pending.rows(), 4);
}

TEST(Recommend, SingleObservation) {
  const DesignSpace space({{"x", 0, 1, ""}});
  CampaignState s = init_campaign(space, {OutputColumn::objective("y")}, {}, 0);
  s = tell(s, {{Eigen::VectorXd::Constant(1, 0.4), Eigen::VectorXd::Constant(1, 2.0)}});
  const Recommendation r = recommend(s);
  EXPECT_EQ(r.point(0), 0.4);
  EXPECT_EQ(r.feasibility, 1.0);
  EXPECT_EQ(r.rationale, Rationale::best_feasible_observed);
  EXPECT_THROW(recommend(init_campaign(space, {OutputColumn::objective("y")}, {}, 0)), InsufficientDataError);
}

TEST(Recommend, BatchObjPicksObservedMaximizerOfMean) {
  const CampaignState s = golden_campaign("BatchObj");
  const Recommendation r = recommend(s);
  EXPECT_EQ(r.feasibility, 1.0);
  EXPECT_EQ(r.point, s.data.points().row(static_cast<Eigen::Index>(r.row)).transpose());
  ASSERT_EQ(r.predicted.size(), 1u);
  EXPECT_TRUE(r.pareto.empty());
}

TEST(Recommend, BBconRespectsTheConstraintOrFlags) {
  const CampaignState s = golden_campaign("BBcon");
  const Recommendation r = recommend(s);
  const std::size_t af = s.data.output_index("Austenite_finish");
  ASSERT_LT(af, s.data.num_outputs());
  if (r.rationale == Rationale::best_feasible_observed) {
    EXPECT_LE(r.predicted[af].mean, 10.0);
    EXPECT_GE(r.feasibility, 0.95);
  } else {
    EXPECT_LT(r.feasibility, 0.95);
  }
}

TEST(Recommend, MultiObjectiveReturnsParetoRows) {
  const CampaignState s = golden_campaign("MultiObj");
  const Recommendation r = recommend(s);
  ASSERT_FALSE(r.pareto.empty());
  EXPECT_NE(std::find(r.pareto.begin(), r.pareto.end(), r.row), r.pareto.end());
}

TEST(Replay, ReconstructsState) {
  AskResult a = ask(golden_campaign("BBcon"), 2, {}, kFixedClock);
  const CampaignState s = tell(a.state, {{a.batch.row(0).transpose(), Eigen::Vector2d(80.0, 5.0)}}, "r1", kFixedClock);
  const CampaignState rebuilt = replay(s);
  EXPECT_TRUE(rebuilt == s);
  EXPECT_EQ(rebuilt.revision, s.revision);
  EXPECT_EQ(ask(rebuilt, 2).batch, ask(s, 2).batch);

  CampaignState broken = s;
  broken.history.back().revision += 5;
  EXPECT_THROW(replay(broken), ArgumentError);
}

TEST(Simulate, ZeroIterationsAndAbort) {
  const CampaignState s = golden_campaign("BatchObj");
  EXPECT_TRUE(simulate_loop(s, [](const Eigen::VectorXd&) { return Eigen::VectorXd::Constant(1, 1.0); }, 0, 2)
                  .trace.empty());
  int calls = 0;
  const SimulationResult r = simulate_loop(
      s,
      [&](const Eigen::VectorXd&) { return Eigen::VectorXd::Constant(1, ++calls > 3 ? NAN : 1.0); }, 5, 2);
  EXPECT_TRUE(r.aborted);
  EXPECT_FALSE(r.message.empty());
  EXPECT_LT(r.trace.size(), 10u);
}

TEST(Simulate, ConcaveQuadraticReachesMaximum) {
  const DesignSpace space({{"a", -2, 2, ""}, {"b", 0, 5, ""}});
  // Maximum 3 at (0.7, 3.2).
  const Oracle f = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, 3.0 - (x(0) - 0.7) * (x(0) - 0.7) - 0.5 * (x(1) - 3.2) * (x(1) - 3.2));
  };
  CampaignState s = init_campaign(space, {OutputColumn::objective("y")}, {}, 21);
  const SimulationResult warm = simulate_loop(s, f, 1, 3);
  const SimulationResult r = simulate_loop(warm.state, f, 20, 1);
  ASSERT_EQ(r.trace.size(), 20u);
  double prev = -INFINITY;
  for (const auto& t : r.trace) {
    ASSERT_TRUE(t.best_so_far.has_value());
    EXPECT_GE(*t.best_so_far, prev);
    prev = *t.best_so_far;
    EXPECT_TRUE(space.contains(t.point));
  }
  EXPECT_LE(std::abs(prev - 3.0), 0.02 * 3.0);
}

TEST(Simulate, BatchObjLoopTraceIsMonotone) {
  const auto r = testing_support::batchobj_loop(4, 2, 0);
  ASSERT_EQ(r.sim.trace.size(), 8u);
  for (std::size_t i = 1; i < r.sim.trace.size(); ++i) {
    EXPECT_GE(*r.sim.trace[i].best_so_far, *r.sim.trace[i - 1].best_so_far);
  }
  const auto full = observation_trace(r.sim.state);
  EXPECT_EQ(full.size(), 35u);
}

TEST(Simulate, ConstrainedLoopEndsFeasible) {
  const auto r = testing_support::constrained_loop(1, 6, 25);
  EXPECT_LE(r.constraint_value, 0.8);
  EXPECT_EQ(r.evaluations, 25u);
}
