#pragma once

#include <cstddef>

#include "bayesdoe/campaign.hpp"
#include "json_codec.hpp"

namespace bayesdoe::detail {

json summary_payload(const CampaignState& state);
json ask_payload(const AskResult& result);
json tell_payload(const CampaignState& state, std::size_t appended);
json recommend_payload(const CampaignState& state, const Recommendation& rec);
json pareto_payload(const CampaignState& state);
json trace_payload(const CampaignState& state);
json slice_payload(const CampaignState& state, std::size_t dim, std::size_t points,
                   const Eigen::VectorXd& anchor, std::size_t output_index);

}  // namespace bayesdoe::detail
