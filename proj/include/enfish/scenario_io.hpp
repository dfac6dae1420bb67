#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "enfish/errors.hpp"
#include "enfish/model.hpp"

// Scenario files: a JSON document with a "defaults" block holding a full
// scenario and an optional "overrides" block deep-merged on top. Parsing
// is strict — an unknown key anywhere is an error naming the offending
// path — so a typo cannot silently fall back to a default.

namespace enfish {

namespace detail {

using nlohmann::json;

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw validation_error("scenario: unknown key '" + path + key + "'");
  }
}

inline double get_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key))
    throw validation_error("scenario: missing key '" + path + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw validation_error("scenario: '" + path + key + "' must be a number");
  return v.get<double>();
}

inline void merge_overrides(json& base, const json& overrides, const std::string& path) {
  if (!overrides.is_object())
    throw validation_error("scenario: '" + path + "' must be an object");
  for (const auto& [key, value] : overrides.items()) {
    if (value.is_object() && base.contains(key) && base.at(key).is_object())
      merge_overrides(base.at(key), value, path + key + ".");
    else
      base[key] = value;  // scalars, arrays, and new subtrees replace wholesale
  }
}

inline Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw validation_error("scenario: document root must be an object");
  check_keys(doc, "", {"defaults", "overrides"});
  if (!doc.contains("defaults"))
    throw validation_error("scenario: missing key 'defaults'");
  json body = doc.at("defaults");
  if (!body.is_object()) throw validation_error("scenario: 'defaults' must be an object");
  if (doc.contains("overrides")) merge_overrides(body, doc.at("overrides"), "overrides.");

  check_keys(body, "",
             {"stock", "market", "fleet", "penalty", "enforcement", "discount_rate"});
  Scenario s;

  {
    if (!body.contains("stock") || !body.at("stock").is_object())
      throw validation_error("scenario: 'stock' must be an object");
    const json& o = body.at("stock");
    check_keys(o, "stock.", {"intrinsic_growth", "carrying_capacity"});
    s.stock.intrinsic_growth = get_number(o, "stock.", "intrinsic_growth");
    s.stock.carrying_capacity = get_number(o, "stock.", "carrying_capacity");
    if (!(s.stock.intrinsic_growth > 0.0))
      throw validation_error("scenario: 'stock.intrinsic_growth' must be > 0");
    if (!(s.stock.carrying_capacity > 0.0))
      throw validation_error("scenario: 'stock.carrying_capacity' must be > 0");
  }

  {
    if (!body.contains("market") || !body.at("market").is_object())
      throw validation_error("scenario: 'market' must be an object");
    const json& o = body.at("market");
    check_keys(o, "market.", {"mode", "price", "choke_price", "slope"});
    if (!o.contains("mode") || !o.at("mode").is_string())
      throw validation_error("scenario: 'market.mode' must be a string");
    const std::string mode = o.at("mode").get<std::string>();
    if (mode == "constant") {
      check_keys(o, "market.", {"mode", "price"});
      s.market = MarketParams::constant(get_number(o, "market.", "price"));
      if (!(s.market.price > 0.0))
        throw validation_error("scenario: 'market.price' must be > 0");
    } else if (mode == "linear") {
      check_keys(o, "market.", {"mode", "choke_price", "slope"});
      s.market = MarketParams::linear(get_number(o, "market.", "choke_price"),
                                      get_number(o, "market.", "slope"));
      if (!(s.market.choke_price > 0.0))
        throw validation_error("scenario: 'market.choke_price' must be > 0");
      if (!(s.market.slope > 0.0))
        throw validation_error("scenario: 'market.slope' must be > 0");
    } else {
      throw validation_error("scenario: 'market.mode' must be 'constant' or 'linear'");
    }
  }

  {
    if (!body.contains("fleet") || !body.at("fleet").is_object())
      throw validation_error("scenario: 'fleet' must be an object");
    const json& o = body.at("fleet");
    check_keys(o, "fleet.", {"identical", "firms"});
    if (o.contains("identical") == o.contains("firms"))
      throw validation_error("scenario: 'fleet' needs exactly one of 'identical' or 'firms'");
    if (o.contains("identical")) {
      const json& u = o.at("identical");
      if (!u.is_object())
        throw validation_error("scenario: 'fleet.identical' must be an object");
      check_keys(u, "fleet.identical.", {"count", "cost_coefficient", "quota"});
      if (!u.contains("count") || !u.at("count").is_number_integer())
        throw validation_error("scenario: 'fleet.identical.count' must be an integer");
      const auto count = u.at("count").get<long long>();
      if (count < 1)
        throw validation_error("scenario: 'fleet.identical.count' must be >= 1");
      FirmSlot slot;
      slot.cost.cost_coefficient = get_number(u, "fleet.identical.", "cost_coefficient");
      slot.quota = get_number(u, "fleet.identical.", "quota");
      s.fleet.firms.assign(static_cast<std::size_t>(count), slot);
    } else {
      const json& arr = o.at("firms");
      if (!arr.is_array() || arr.empty())
        throw validation_error("scenario: 'fleet.firms' must be a non-empty array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "fleet.firms[" + std::to_string(i) + "].";
        const json& u = arr.at(i);
        if (!u.is_object()) throw validation_error("scenario: '" + path + "' must be an object");
        check_keys(u, path, {"cost_coefficient", "quota"});
        FirmSlot slot;
        slot.cost.cost_coefficient = get_number(u, path, "cost_coefficient");
        slot.quota = get_number(u, path, "quota");
        s.fleet.firms.push_back(slot);
      }
    }
    for (std::size_t i = 0; i < s.fleet.firms.size(); ++i) {
      const std::string path = "fleet.firms[" + std::to_string(i) + "]";
      if (!(s.fleet.firms[i].cost.cost_coefficient > 0.0))
        throw validation_error("scenario: '" + path + ".cost_coefficient' must be > 0");
      if (!(s.fleet.firms[i].quota >= 0.0))
        throw validation_error("scenario: '" + path + ".quota' must be >= 0");
    }
  }

  {
    if (!body.contains("penalty") || !body.at("penalty").is_object())
      throw validation_error("scenario: 'penalty' must be an object");
    const json& o = body.at("penalty");
    check_keys(o, "penalty.", {"max_fine", "severity"});
    s.penalty.max_fine = get_number(o, "penalty.", "max_fine");
    s.penalty.severity = get_number(o, "penalty.", "severity");
    if (!(s.penalty.max_fine >= 0.0))
      throw validation_error("scenario: 'penalty.max_fine' must be >= 0");
    if (!(s.penalty.severity > 0.0))
      throw validation_error("scenario: 'penalty.severity' must be > 0");
  }

  {
    if (!body.contains("enforcement") || !body.at("enforcement").is_object())
      throw validation_error("scenario: 'enforcement' must be an object");
    const json& o = body.at("enforcement");
    check_keys(o, "enforcement.", {"effort_scale"});
    s.enforcement.effort_scale = get_number(o, "enforcement.", "effort_scale");
    if (!(s.enforcement.effort_scale > 0.0))
      throw validation_error("scenario: 'enforcement.effort_scale' must be > 0");
  }

  s.discount_rate = get_number(body, "", "discount_rate");
  if (!(s.discount_rate > 0.0))
    throw validation_error("scenario: 'discount_rate' must be > 0");

  s.validate();
  return s;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw validation_error(std::string("scenario: invalid JSON: ") + e.what());
  }
  return detail::scenario_from_json(doc);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("scenario: cannot open file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario(text);
}

}  // namespace enfish
