#pragma once

#include <json.hpp>
#include <map>
#include <string>

#include "projection.hpp"

namespace pforge {

nlohmann::json crs_to_json(const Crs& crs);
Crs crs_from_json(const nlohmann::json& j);

// named parameter-set registry, the data/projections.json format:
// { "<name>": { "kind": ... }, ... }
std::map<std::string, Crs> load_projection_registry(const std::string& json_text);

}  // namespace pforge
