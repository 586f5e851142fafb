#include "bayesdoe/normal.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "bayesdoe/errors.hpp"

namespace bayesdoe {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr double kTailCutoff = -30.0;
}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("normal quantile needs p in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double log_normal_cdf(double z) {
  if (z > kTailCutoff) return std::log(normal_cdf(z));
  // Asymptotic series for the Mills ratio.
  const double z2 = z * z;
  return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(1.0 - 1.0 / z2 + 3.0 / (z2 * z2));
}

double normal_hazard_ratio(double z) {
  if (z > kTailCutoff) return normal_pdf(z) / normal_cdf(z);
  const double z2 = z * z;
  return -z / (1.0 - 1.0 / z2 + 3.0 / (z2 * z2));
}

}  // namespace bayesdoe
