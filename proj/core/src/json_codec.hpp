#pragma once

// JSON encoding of the public types, shared by persistence and the service.

#include <functional>
#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "bayesdoe/acqopt.hpp"
#include "bayesdoe/acquisition.hpp"
#include "bayesdoe/campaign.hpp"
#include "bayesdoe/dataset.hpp"
#include "bayesdoe/design_space.hpp"
#include "bayesdoe/errors.hpp"
#include "bayesdoe/gp.hpp"

namespace bayesdoe::detail {

using nlohmann::json;

json matrix_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m);
/// Rows of equal length; `cols` fixes the width of an empty matrix.
Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols);
json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v);
Eigen::VectorXd vector_from_json(const json& j);

json space_to_json(const DesignSpace& space);
DesignSpace space_from_json(const json& j);
json column_to_json(const OutputColumn& c);
OutputColumn column_from_json(const json& j);
json acquisition_to_json(const AcquisitionSpec& a);
AcquisitionSpec acquisition_from_json(const json& j);
json settings_to_json(const CampaignSettings& s);
CampaignSettings settings_from_json(const json& j);
json event_to_json(const HistoryEvent& e);
HistoryEvent event_from_json(const json& j, Eigen::Index dim, Eigen::Index outputs);

json state_to_json(const CampaignState& state);
CampaignState state_from_json(const json& j, const std::function<void(const std::string&)>& warn);

json kernel_to_json(const KernelParams& k);
json posterior_to_json(const Posterior& p);

/// Runs `fn`, translating JSON library exceptions into the library's errors.
template <typename F>
auto translate_json_errors(F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("unexpected JSON structure: ") + e.what());
  }
}

}  // namespace bayesdoe::detail
