#include <random>

#include <benchmark/benchmark.h>

#include "bayesdoe/acqopt.hpp"
#include "bayesdoe/acquisition.hpp"
#include "bayesdoe/gp.hpp"
#include "bayesdoe/pareto.hpp"

using namespace bayesdoe;

namespace {

DesignSpace unit_space(std::size_t d) {
  std::vector<Variable> vars;
  for (std::size_t k = 0; k < d; ++k) vars.push_back({"x" + std::to_string(k + 1), 0.0, 1.0, ""});
  return DesignSpace(std::move(vars));
}

struct Problem {
  DesignSpace space;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Problem problem(std::size_t n, std::size_t d) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Problem p{unit_space(d), Eigen::MatrixXd(n, d), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < p.x.rows(); ++i) {
    for (Eigen::Index k = 0; k < p.x.cols(); ++k) p.x(i, k) = u(rng);
    p.y(i) = std::sin(6.0 * p.x(i, 0)) - (p.x.row(i).array() - 0.5).square().sum();
  }
  return p;
}

GpModel fitted(std::size_t n, std::size_t d) {
  const Problem p = problem(n, d);
  return fit_gp(p.space, p.x, p.y);
}

void BM_FitGp(benchmark::State& state) {
  const Problem p = problem(static_cast<std::size_t>(state.range(0)), 4);
  FitConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit_gp(p.space, p.x, p.y, cfg));
}
BENCHMARK(BM_FitGp)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Posterior(benchmark::State& state) {
  const Problem p = problem(static_cast<std::size_t>(state.range(0)), 4);
  const KernelParams kernel{1.0, Eigen::VectorXd::Constant(4, 0.3), Smoothness::five_halves};
  const GpModel m(kernel, 1e-4, Transform::fit(p.space, p.y), p.x, p.y);
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(4, 0.37);
  for (auto _ : state) benchmark::DoNotOptimize(m.posterior(q));
}
BENCHMARK(BM_Posterior)->Arg(20)->Arg(100)->Arg(400);

void BM_ExpectedImprovement(benchmark::State& state) {
  const GpModel m = fitted(50, 4);
  const Incumbent inc{m.to_normalized_output(0.5)};
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(4, 0.37);
  for (auto _ : state) benchmark::DoNotOptimize(expected_improvement(m.posterior_normalized(q), inc));
}
BENCHMARK(BM_ExpectedImprovement);

void BM_QExpectedImprovement(benchmark::State& state) {
  const GpModel m = fitted(50, 4);
  const auto q = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd batch(q, 4);
  for (Eigen::Index i = 0; i < batch.size(); ++i) batch(i) = u(rng);
  const Incumbent inc{0.5};
  const McConfig mc{1024, 11};
  for (auto _ : state) benchmark::DoNotOptimize(q_expected_improvement(m, batch, inc, mc));
}
BENCHMARK(BM_QExpectedImprovement)->Arg(1)->Arg(4)->Arg(16);

void BM_ParetoFront(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  Eigen::MatrixXd y(state.range(0), 3);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = z(rng);
  const std::vector<Sense> senses(3, Sense::maximize);
  for (auto _ : state) benchmark::DoNotOptimize(pareto_front(y, senses));
}
BENCHMARK(BM_ParetoFront)->Arg(100)->Arg(1000);

void BM_MaximizeAcquisition(benchmark::State& state) {
  const GpModel m = fitted(30, 4);
  const Incumbent inc{m.to_normalized_output(0.5)};
  const AcquisitionFn acq = [&](const Eigen::VectorXd& x) {
    return expected_improvement(m.posterior_normalized(x), inc);
  };
  const DesignSpace space = unit_space(4);
  OptBudget budget;
  for (auto _ : state) benchmark::DoNotOptimize(maximize_acquisition(acq, space, budget));
}
BENCHMARK(BM_MaximizeAcquisition)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
