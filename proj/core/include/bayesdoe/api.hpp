#pragma once

// JSON payloads shared by the HTTP service and the command line's --json mode.

#include <cstddef>
#include <string>

#include "bayesdoe/campaign.hpp"

namespace bayesdoe::api {

/// n, revision, incumbent, space, outputs, observations, pending.
std::string summary(const CampaignState& state);
std::string ask(const AskResult& result);
std::string tell(const CampaignState& state, std::size_t appended);
std::string recommend(const CampaignState& state, const Recommendation& rec);
std::string pareto(const CampaignState& state);
std::string trace(const CampaignState& state);
/// Posterior mean and a +/- 2 sd band of one output along dimension `dim`,
/// other coordinates fixed at `anchor` (original units).
std::string slice(const CampaignState& state, std::size_t dim, std::size_t points,
                  const Eigen::VectorXd& anchor, std::size_t output_index);

}  // namespace bayesdoe::api
