#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bayesdoe/design_space.hpp"
#include "bayesdoe/gp.hpp"
#include "bayesdoe/transform.hpp"

namespace testing_support {

struct GpInstance {
  bayesdoe::DesignSpace space;
  Eigen::MatrixXd points;   // original units
  Eigen::VectorXd targets;  // original units
  bayesdoe::GpModel model;
  double nu = 2.5;
};

inline double nu_value(bayesdoe::Smoothness s) {
  switch (s) {
    case bayesdoe::Smoothness::half: return 0.5;
    case bayesdoe::Smoothness::three_halves: return 1.5;
    default: return 2.5;
  }
}

inline bayesdoe::DesignSpace random_space(std::size_t d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lo(-50.0, 50.0), span(0.5, 200.0);
  std::vector<bayesdoe::Variable> vars;
  for (std::size_t i = 0; i < d; ++i) {
    const double l = lo(rng);
    vars.push_back({"x" + std::to_string(i + 1), l, l + span(rng), ""});
  }
  return bayesdoe::DesignSpace(vars);
}

/// Random conditioned GP with fixed (not fitted) hyperparameters.
inline GpInstance random_gp(std::size_t n, std::size_t d, bayesdoe::Smoothness nu, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GpInstance inst;
  inst.space = random_space(d, rng);
  inst.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  inst.targets.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < inst.points.rows(); ++i) {
    Eigen::VectorXd unit(static_cast<Eigen::Index>(d));
    for (auto& v : unit) v = u(rng);
    inst.points.row(i) = inst.space.from_unit(unit).transpose();
    inst.targets(i) = 100.0 * std::sin(3.0 * unit.sum()) + 40.0 * u(rng) + 7.0;
  }
  bayesdoe::KernelParams k;
  k.smoothness = nu;
  k.amplitude_sq = std::exp(std::log(0.1) + u(rng) * std::log(100.0));
  k.length_scales.resize(static_cast<Eigen::Index>(d));
  for (auto& l : k.length_scales) l = 0.1 + 0.9 * u(rng);
  const double noise = std::exp(std::log(1e-6) + u(rng) * std::log(1e5));
  inst.nu = nu_value(nu);
  inst.model = bayesdoe::GpModel(k, noise, bayesdoe::Transform::fit(inst.space, inst.targets), inst.points,
                                 inst.targets);
  return inst;
}

}  // namespace testing_support
