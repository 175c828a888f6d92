#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "cgra/error.hpp"
#include "json.hpp"

namespace cgra::detail {

using json = nlohmann::ordered_json;

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string(what) + ": " + e.what());
  }
}

inline void require_object(const json& j, std::string_view ctx) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, std::string(ctx) + ": expected object");
}

inline void check_fields(const json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view ctx) {
  require_object(j, ctx);
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw Error(ErrorCode::SchemaError, std::string(ctx) + ": unknown field '" + key + "'");
  }
}

template <typename T>
T get_field(const json& j, std::string_view key, std::string_view ctx) {
  auto it = j.find(key);
  if (it == j.end())
    throw Error(ErrorCode::SchemaError, std::string(ctx) + ": missing field '" + std::string(key) + "'");
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::SchemaError, std::string(ctx) + ": bad type for '" + std::string(key) + "'");
  }
}

template <typename T>
T get_or(const json& j, std::string_view key, T fallback, std::string_view ctx) {
  if (!j.contains(key)) return fallback;
  return get_field<T>(j, key, ctx);
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace cgra::detail
