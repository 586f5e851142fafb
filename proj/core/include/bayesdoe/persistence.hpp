#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bayesdoe/acquisition.hpp"
#include "bayesdoe/campaign.hpp"
#include "bayesdoe/dataset.hpp"
#include "bayesdoe/design_space.hpp"

namespace bayesdoe {

inline constexpr int kSchemaVersion = 1;

using WarningSink = std::function<void(const std::string&)>;

/// Campaign state as a JSON document. Field names:
///   schema_version, space, specs, data{points, outputs}, acquisition,
///   settings, pending, history, seed, revision.
std::string save_campaign(const CampaignState& state);
/// Unknown top-level fields are reported through `warn` and ignored.
/// Throws ParseError on malformed JSON and MigrationError on a version mismatch.
CampaignState load_campaign(std::string_view document, const WarningSink& warn = {});

/// Reads a campaign file.
CampaignState read_campaign(const std::string& path, const WarningSink& warn = {});

/// Revision of a campaign file that does not exist yet.
inline constexpr long long kNoCampaign = -1;

/// Atomically replaces the campaign file. With `expected_revision`, the write
/// only happens if the file currently holds that revision (kNoCampaign: the
/// file must not exist); otherwise ConflictError carries the current
/// revision. Writers on one path are serialized by a lock file.
void write_campaign(const std::string& path, const CampaignState& state,
                    std::optional<long long> expected_revision = std::nullopt);

/// A campaign definition file: variables, outputs and optional acquisition.
struct SpaceDocument {
  DesignSpace space;
  std::vector<OutputColumn> outputs;
  std::optional<AcquisitionSpec> acquisition;
};

/// {"variables": [{name, lower, upper, unit?}], "outputs": [{name, role?,
/// sense?, threshold?, direction?}]?, "acquisition": {...}?}
SpaceDocument parse_space_document(std::string_view document);

}  // namespace bayesdoe
