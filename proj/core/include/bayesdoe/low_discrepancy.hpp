#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

namespace bayesdoe {

/// Halton sequence with a seeded Cranley-Patterson rotation. Coordinate j of
/// point i depends only on (seed, j, i), so prefixes of the dimension list
/// reproduce exactly when more dimensions are requested.
class HaltonSequence {
 public:
  static constexpr std::size_t kMaxDim = 64;

  HaltonSequence(std::size_t dim, std::uint64_t seed);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(shift_.size()); }
  /// Point `index` (0-based), strictly inside (0, 1)^dim.
  Eigen::VectorXd point(std::uint64_t index) const;
  /// Rows `first .. first + count - 1`.
  Eigen::MatrixXd points(std::uint64_t first, std::size_t count) const;

 private:
  Eigen::VectorXd shift_;
};

/// samples x cols matrix of quasi-random standard normal draws.
Eigen::MatrixXd qmc_normal_draws(std::size_t samples, std::size_t cols, std::uint64_t seed);

/// Mixes two 64-bit values into a well-spread seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace bayesdoe
