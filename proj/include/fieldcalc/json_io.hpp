#ifndef FIELDCALC_JSON_IO_HPP
#define FIELDCALC_JSON_IO_HPP

#include <json.hpp>

#include "fieldcalc/ast.hpp"
#include "fieldcalc/device.hpp"

namespace fieldcalc {

// Canonical encodings:
//   num       {"num": 1.5}  non-finite as "infinity", "-infinity", "NaN"
//   bool      {"bool": true}
//   data      {"data": "Pair", "args": [...]}
//   function  {"fun": "<source text>"}
//   field     {"field": [[id, value], ...]}  ascending ids
nlohmann::json to_json(const Value& v);
nlohmann::json to_json(const TreePtr& t);  // {"v": value, "c": [children]}
Value value_from_json(const nlohmann::json& j);
TreePtr tree_from_json(const nlohmann::json& j);

// Sensor readings in scenario files: numbers, booleans, or source text of a
// closed value such as "() => 0".
Value sensor_value_from_json(const nlohmann::json& j);

// Short rendering for CSV cells: numbers and booleans bare, else source text.
std::string scalar_text(const Value& v);

}  // namespace fieldcalc

#endif
