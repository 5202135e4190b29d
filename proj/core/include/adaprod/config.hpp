#pragma once

#include <string>

#include "adaprod/harness.hpp"

namespace adaprod {

/// Parses a run configuration from a single JSON document. Unknown keys
/// are rejected; see the README for the schema. Throws ValidationError.
RunConfig parse_config_text(const std::string& json_text);
RunConfig parse_config_file(const std::string& path);

}  // namespace adaprod
