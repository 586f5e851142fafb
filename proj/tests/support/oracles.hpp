#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

/// General Matern correlation through the modified Bessel function of the
/// second kind: 2^(1-nu)/Gamma(nu) * (sqrt(2 nu) r)^nu * K_nu(sqrt(2 nu) r).
inline double matern_bessel(double nu, double r) {
  if (r == 0.0) return 1.0;
  const double s = std::sqrt(2.0 * nu) * r;
  return std::pow(2.0, 1.0 - nu) / boost::math::tgamma(nu) * std::pow(s, nu) *
         boost::math::cyl_bessel_k(nu, s);
}

/// Closed forms written out longhand, one smoothness at a time.
inline double matern_closed(double nu, double r) {
  if (nu == 0.5) return std::exp(-r);
  if (nu == 1.5) return (1.0 + std::sqrt(3.0) * r) * std::exp(-std::sqrt(3.0) * r);
  return (1.0 + std::sqrt(5.0) * r + 5.0 * r * r / 3.0) * std::exp(-std::sqrt(5.0) * r);
}

inline double scaled_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& ls) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double t = (a(i) - b(i)) / ls(i);
    s += t * t;
  }
  return std::sqrt(s);
}

inline Eigen::MatrixXd gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double nu, double amp,
                            const Eigen::VectorXd& ls) {
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      k(i, j) = amp * matern_closed(nu, scaled_distance(a.row(i).transpose(), b.row(j).transpose(), ls));
    }
  }
  return k;
}

struct DensePosterior {
  double mean;
  double variance;
};

/// Textbook conditional Gaussian with an explicit inverse of the
/// regularized Gram matrix. Inputs already in the unit cube, targets
/// already standardized.
inline DensePosterior dense_posterior(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& q, double nu, double amp,
                                      const Eigen::VectorXd& ls, double diag) {
  Eigen::MatrixXd k = gram(x, x, nu, amp, ls);
  k.diagonal().array() += diag;
  const Eigen::MatrixXd kinv = k.fullPivLu().inverse();
  const Eigen::VectorXd ks = gram(x, q.transpose(), nu, amp, ls).col(0);
  return {ks.dot(kinv * y), amp - ks.dot(kinv * ks)};
}

/// Log density of y under N(0, K) computed through eigenvalues.
inline double gaussian_log_density(const Eigen::MatrixXd& k, const Eigen::VectorXd& y) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
  const Eigen::VectorXd ev = es.eigenvalues();
  const Eigen::VectorXd proj = es.eigenvectors().transpose() * y;
  double quad = 0.0, logdet = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    quad += proj(i) * proj(i) / ev(i);
    logdet += std::log(ev(i));
  }
  return -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

/// O(n^2 m) non-dominated filter; all objectives maximized.
inline std::vector<std::size_t> brute_pareto(const Eigen::MatrixXd& y) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    bool dominated = false;
    for (Eigen::Index j = 0; j < y.rows() && !dominated; ++j) {
      if (i == j) continue;
      bool ge = true, gt = false;
      for (Eigen::Index k = 0; k < y.cols(); ++k) {
        if (y(j, k) < y(i, k)) ge = false;
        if (y(j, k) > y(i, k)) gt = true;
      }
      dominated = ge && gt;
    }
    if (!dominated) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

struct McResult {
  double mean;
  double standard_error;
};

/// Plain pseudo-random Monte Carlo of E[max(0, f - best)], f ~ N(m, s^2).
inline McResult mc_expected_improvement(double m, double s, double best, std::size_t samples,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = std::max(0.0, m + s * z(rng) - best);
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum2 / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

inline double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace oracle
