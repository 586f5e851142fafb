#pragma once

namespace bayesdoe {

double normal_pdf(double z);
double normal_cdf(double z);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);
/// log(normal_cdf(z)), accurate far into the lower tail.
double log_normal_cdf(double z);
/// Inverse Mills ratio pdf(z) / cdf(z), accurate far into the lower tail.
double normal_hazard_ratio(double z);

}  // namespace bayesdoe
