#pragma once

#include "gesture/forest.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace gesture {

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json forest_params_to_json(const ForestParams& params);
ForestParams forest_params_from_json(const nlohmann::json& j);

/// Versioned model document (see docs/file-formats.md).
std::string serialize_model(const ForestModel& model);

/// Throws MalformedFile, SchemaViolation, VersionUnsupported.
ForestModel parse_model(std::string_view content);

} // namespace gesture
