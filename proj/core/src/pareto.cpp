#include "bayesdoe/pareto.hpp"

#include <algorithm>
#include <numeric>

#include "bayesdoe/errors.hpp"

namespace bayesdoe {

std::vector<std::size_t> pareto_front(const Eigen::Ref<const Eigen::MatrixXd>& outputs,
                                      const std::vector<Sense>& senses) {
  const Eigen::Index n = outputs.rows();
  const Eigen::Index m = outputs.cols();
  if (static_cast<std::size_t>(m) != senses.size()) {
    throw ArgumentError("one sense per objective column is required");
  }
  if (n == 0) return {};
  Eigen::MatrixXd y = outputs;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (senses[static_cast<std::size_t>(j)] == Sense::minimize) y.col(j) = -y.col(j);
  }

  // In lexicographically descending order, any dominator of a row precedes
  // it, and some front member dominates every dominated row (transitivity).
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (y(a, j) != y(b, j)) return y(a, j) > y(b, j);
    }
    return false;
  });

  auto dominates = [&](Eigen::Index a, Eigen::Index b) {
    bool strict = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (y(a, j) < y(b, j)) return false;
      if (y(a, j) > y(b, j)) strict = true;
    }
    return strict;
  };

  std::vector<Eigen::Index> front;
  for (Eigen::Index idx : order) {
    const bool dominated =
        std::any_of(front.begin(), front.end(), [&](Eigen::Index f) { return dominates(f, idx); });
    if (!dominated) front.push_back(idx);
  }
  std::vector<std::size_t> out(front.begin(), front.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bayesdoe
