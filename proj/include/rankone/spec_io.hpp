#pragma once

#include "rankone/tower.hpp"

#include <json.hpp>

#include <string>

namespace rankone {

inline constexpr const char* kSchemaVersion = "rankone-lab/1";

/// Reads {"kind":"explicit",...} or {"kind":"family",...}. Big integers are
/// decimal strings (plain JSON integers are also accepted); rationals are
/// "p/q" strings. Unknown keys are rejected with InvalidSpec.
ConstructionSpec spec_from_json(const nlohmann::json& doc);
ConstructionSpec load_spec_file(const std::string& path);

nlohmann::json spec_to_json(const ConstructionSpec& spec);

}  // namespace rankone
