#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "htdbu/generators.hpp"
#include "htdbu/logistic.hpp"

namespace htdbu {

inline constexpr std::string_view kModelFormat = "htdbu.model/1";

using Json = nlohmann::ordered_json;

Json schema_to_json(const Schema& schema);
Schema schema_from_json(const Json& doc);

Json tree_to_json(const TreeModel& tree);
TreeModel tree_from_json(const Json& doc);
Json forest_to_json(const ForestModel& forest);
ForestModel forest_from_json(const Json& doc);
Json gbt_to_json(const GbtModel& gbt);
GbtModel gbt_from_json(const Json& doc);
Json copula_to_json(const CopulaModel& copula);
CopulaModel copula_from_json(const Json& doc);
Json logistic_to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const Json& doc);

Json generator_to_json(const GeneratorModel& model);
// Throws ParseError on a malformed document or a different format tag.
GeneratorModel generator_from_json(const Json& doc);

// Compact JSON text; identical models give identical bytes.
std::string serialize_model(const GeneratorModel& model);
GeneratorModel parse_model(std::string_view text);
void save_model(const GeneratorModel& model, const std::filesystem::path& path);
GeneratorModel load_model(const std::filesystem::path& path);

}  // namespace htdbu
