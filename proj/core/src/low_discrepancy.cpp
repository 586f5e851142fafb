#include "bayesdoe/low_discrepancy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "bayesdoe/errors.hpp"
#include "bayesdoe/normal.hpp"

namespace bayesdoe {

namespace {

constexpr std::array<std::uint32_t, HaltonSequence::kMaxDim> kPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  const double inv_base = 1.0 / base;
  double result = 0.0;
  double factor = inv_base;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return result;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

HaltonSequence::HaltonSequence(std::size_t dim, std::uint64_t seed) : shift_(dim) {
  if (dim == 0 || dim > kMaxDim) {
    throw ArgumentError("Halton sequence supports 1.." + std::to_string(kMaxDim) + " dimensions");
  }
  for (std::size_t j = 0; j < dim; ++j) {
    std::mt19937_64 rng(mix_seed(seed, j));
    shift_(static_cast<Eigen::Index>(j)) = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  }
}

Eigen::VectorXd HaltonSequence::point(std::uint64_t index) const {
  Eigen::VectorXd u(shift_.size());
  for (Eigen::Index j = 0; j < shift_.size(); ++j) {
    double v = radical_inverse(index + 1, kPrimes[static_cast<std::size_t>(j)]) + shift_(j);
    v -= std::floor(v);
    u(j) = std::clamp(v, 1e-12, 1.0 - 1e-12);
  }
  return u;
}

Eigen::MatrixXd HaltonSequence::points(std::uint64_t first, std::size_t count) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), shift_.size());
  for (std::size_t i = 0; i < count; ++i) out.row(static_cast<Eigen::Index>(i)) = point(first + i).transpose();
  return out;
}

Eigen::MatrixXd qmc_normal_draws(std::size_t samples, std::size_t cols, std::uint64_t seed) {
  const HaltonSequence seq(cols, seed);
  Eigen::MatrixXd z = seq.points(0, samples);
  return z.unaryExpr([](double u) { return normal_quantile(u); });
}

}  // namespace bayesdoe
