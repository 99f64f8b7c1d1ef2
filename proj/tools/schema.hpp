#pragma once

// Validation of JSON documents against the subset of JSON Schema used by the
// published configuration schema: type, enum, properties, required,
// additionalProperties (boolean), items, minItems/maxItems and the numeric
// bounds.

#include <string>
#include <vector>

#include <json.hpp>

namespace idsctl {

// One "path: message" line per violation, paths written as $.a.b[2].
std::vector<std::string> schema_violations(const nlohmann::json& schema, const nlohmann::json& document);

// The configuration schema shipped in docs/config.schema.json.
const nlohmann::json& config_schema();

}  // namespace idsctl
