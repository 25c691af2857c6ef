#include "fieldcalc/json_io.hpp"

#include <cmath>

#include "fieldcalc/parser.hpp"

namespace fieldcalc {

using nlohmann::json;

namespace {

json local_json(const ExprPtr& e) {
  if (auto n = as_number(e)) {
    if (std::isfinite(*n)) return json{{"num", *n}};
    return json{{"num", numeral_text(*n)}};
  }
  if (auto b = as_bool(e)) return json{{"bool", *b}};
  if (const auto* d = e->as<expr::Data>()) {
    json args = json::array();
    for (const auto& a : d->args) args.push_back(local_json(a));
    return json{{"data", d->ctor}, {"args", args}};
  }
  return json{{"fun", pretty_print(e)}};
}

ExprPtr local_from_json(const json& j) {
  if (j.contains("num")) {
    const json& n = j.at("num");
    if (n.is_number()) return make_num(n.get<double>());
    auto v = parse_numeral(n.get<std::string>());
    if (!v) throw std::invalid_argument("bad numeral in JSON: " + n.dump());
    return make_num(*v);
  }
  if (j.contains("bool")) return make_bool(j.at("bool").get<bool>());
  if (j.contains("data")) {
    std::vector<ExprPtr> args;
    for (const auto& a : j.at("args")) args.push_back(local_from_json(a));
    return make_data(j.at("data").get<std::string>(), std::move(args));
  }
  if (j.contains("fun")) {
    ExprPtr e = parse_expr(j.at("fun").get<std::string>());
    if (!e->is_local_value()) throw std::invalid_argument("not a function value: " + j.dump());
    return e;
  }
  throw std::invalid_argument("unrecognised value JSON: " + j.dump());
}

}  // namespace

json to_json(const Value& v) {
  if (!v.is_field()) return local_json(v.local());
  json entries = json::array();
  for (const auto& [d, x] : v.field().entries) entries.push_back(json::array({d, local_json(x)}));
  return json{{"field", entries}};
}

json to_json(const TreePtr& t) {
  json j{{"v", to_json(t->root)}};
  if (!t->children.empty()) {
    json cs = json::array();
    for (const auto& c : t->children) cs.push_back(to_json(c));
    j["c"] = cs;
  }
  return j;
}

Value value_from_json(const json& j) {
  if (j.contains("field")) {
    NbrField f;
    for (const auto& e : j.at("field"))
      f.entries.emplace(e.at(0).get<DeviceId>(), local_from_json(e.at(1)));
    return Value::field(std::move(f));
  }
  return Value::local(local_from_json(j));
}

TreePtr tree_from_json(const json& j) {
  std::vector<TreePtr> kids;
  if (j.contains("c"))
    for (const auto& c : j.at("c")) kids.push_back(tree_from_json(c));
  return make_tree(value_from_json(j.at("v")), std::move(kids));
}

Value sensor_value_from_json(const json& j) {
  if (j.is_boolean()) return Value::local(make_bool(j.get<bool>()));
  if (j.is_number()) return Value::local(make_num(j.get<double>()));
  if (j.is_string()) {
    ExprPtr e = parse_expr(j.get<std::string>());
    if (!e->is_local_value())
      throw std::invalid_argument("sensor reading is not a closed value: " + j.get<std::string>());
    return Value::local(e);
  }
  if (j.is_object()) return value_from_json(j);
  throw std::invalid_argument("unsupported sensor reading: " + j.dump());
}

std::string scalar_text(const Value& v) {
  if (!v.is_field()) {
    if (auto n = as_number(v.local())) return numeral_text(*n);
    if (auto b = as_bool(v.local())) return *b ? "true" : "false";
  }
  return to_string(v);
}

}  // namespace fieldcalc
