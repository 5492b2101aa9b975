#pragma once

// Path-tracking accessors over nlohmann::json; every failure becomes a
// DataError that names the field.

#include <string>
#include <string_view>

#include <json.hpp>

#include "bannerforge/error.hpp"
#include "bannerforge/geometry.hpp"

namespace bannerforge::detail {

using nlohmann::json;

inline std::string join_path(std::string_view parent, std::string_view key) {
  if (parent.empty()) return std::string(key);
  return std::string(parent) + "." + std::string(key);
}

inline std::string index_path(std::string_view parent, std::size_t i) {
  return std::string(parent) + "[" + std::to_string(i) + "]";
}

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw DataError(std::string(what), std::string("malformed JSON: ") + e.what());
  }
}

inline const json& require(const json& obj, std::string_view key, std::string_view parent) {
  if (!obj.is_object()) throw DataError(std::string(parent), "expected an object");
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) throw DataError(join_path(parent, key), "missing mandatory field");
  return *it;
}

inline const json* optional_field(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw DataError(path, "expected a number");
  return v.get<double>();
}

inline long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
    }
    throw DataError(path, "expected an integer");
  }
  return v.get<long long>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw DataError(path, "expected a string");
  return v.get<std::string>();
}

inline bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw DataError(path, "expected a boolean");
  return v.get<bool>();
}

inline const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw DataError(path, "expected an array");
  return v;
}

inline BBox as_box(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) throw DataError(path, "expected [l, t, r, b]");
  return {as_number(v[0], index_path(path, 0)), as_number(v[1], index_path(path, 1)),
          as_number(v[2], index_path(path, 2)), as_number(v[3], index_path(path, 3))};
}

inline json box_json(const BBox& b) { return json::array({b.x_left, b.y_top, b.x_right, b.y_bottom}); }

inline double number_or(const json& obj, std::string_view key, double fallback, std::string_view parent) {
  const json* v = optional_field(obj, key);
  return v ? as_number(*v, join_path(parent, key)) : fallback;
}

}  // namespace bannerforge::detail
