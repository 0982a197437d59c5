#pragma once

#include <string>

#include <json.hpp>

namespace dsurf::cli {

using Json = nlohmann::ordered_json;

// Deterministic text: fixed key order, 2-space indent, doubles as %.17g.
// Non-finite doubles are written as null.
std::string to_json_text(const Json& doc);

// One row per element of `rows` (objects); nested arrays/objects are
// flattened into key_0_1 style columns taken from the first row.
std::string to_csv(const Json& rows);

bool all_finite(const Json& doc);

}  // namespace dsurf::cli
