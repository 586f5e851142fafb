#pragma once

// Projected limited-memory BFGS for smooth objectives on a box. Used for
// hyperparameter fitting, where the dimension is small (d + 2).

#include <cmath>
#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace bayesdoe::detail {

struct BoxResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// Minimizes `f` (value and gradient) over [lo, hi]. `f` may return +inf to
/// reject a point; the line search then backtracks.
inline BoxResult minimize_box(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& f,
    Eigen::VectorXd x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
    int max_iterations, int memory = 8) {
  auto project = [&](const Eigen::VectorXd& v) { return v.cwiseMax(lo).cwiseMin(hi); };
  x = project(x);
  Eigen::VectorXd g(x.size());
  double fx = f(x, g);
  BoxResult result{x, fx, 0};
  if (!std::isfinite(fx)) return result;

  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  int stalls = 0;
  for (int it = 0; it < max_iterations; ++it) {
    result.iterations = it + 1;
    // Active set: coordinates pinned at a bound with the gradient pushing outward.
    Eigen::ArrayXd free = Eigen::ArrayXd::Ones(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if ((x(i) <= lo(i) && g(i) > 0.0) || (x(i) >= hi(i) && g(i) < 0.0)) free(i) = 0.0;
    }
    const Eigen::VectorXd pg = (g.array() * free).matrix();
    if (pg.lpNorm<Eigen::Infinity>() < 1e-8) break;

    // Two-loop recursion restricted to free coordinates.
    Eigen::VectorXd q = pg;
    std::vector<double> alphas(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      alphas[k] = rho * s_hist[k].dot(q);
      q -= alphas[k] * y_hist[k];
    }
    if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      const double beta = rho * y_hist[k].dot(q);
      q += (alphas[k] - beta) * s_hist[k];
    }
    Eigen::VectorXd dir = -(q.array() * free).matrix();
    if (!(dir.dot(pg) < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      dir = -pg;
    }
    if (s_hist.empty()) {
      // Keep the first step inside a unit box-length in log space.
      const double scale = dir.lpNorm<Eigen::Infinity>();
      if (scale > 1.0) dir /= scale;
    }

    double step = 1.0;
    Eigen::VectorXd x_new;
    Eigen::VectorXd g_new(x.size());
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = project(x + step * dir);
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (s_hist.empty()) break;
      s_hist.clear();
      y_hist.clear();
      continue;
    }
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm() && s.dot(y) > 0.0) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      if (static_cast<int>(s_hist.size()) > memory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    const double improvement = fx - f_new;
    x = x_new;
    g = g_new;
    fx = f_new;
    if (improvement < 1e-12 * std::max(1.0, std::abs(fx))) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
  }
  result.x = x;
  result.value = fx;
  return result;
}

}  // namespace bayesdoe::detail
