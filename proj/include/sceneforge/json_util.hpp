#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sceneforge/error.hpp"
#include "sceneforge/math.hpp"

namespace sceneforge {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  out << contents;
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

/// Parses JSON text, reporting syntax errors with a line number.
template <class J = Json>
J parse_json(const std::string& text, const std::string& what, ErrorCode code = ErrorCode::parse) {
  try {
    return J::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(code, what + ": line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
}

template <class J>
Vec3 vec3_from(const J& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::parse, field + ": expected [x, y, z]");
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::parse, field + ": expected numbers");
  }
  return {j[0].template get<double>(), j[1].template get<double>(), j[2].template get<double>()};
}

template <class J>
Vec2 vec2_from(const J& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::parse, field + ": expected [u, v]");
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::parse, field + ": expected numbers");
  }
  return {j[0].template get<double>(), j[1].template get<double>()};
}

inline OrderedJson to_json(Vec3 v) { return OrderedJson::array({v.x, v.y, v.z}); }
inline OrderedJson to_json(Vec2 v) { return OrderedJson::array({v.x, v.y}); }

template <class J>
const J& require(const J& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw Error(ErrorCode::parse, where + ": missing field '" + key + "'");
  return obj.at(key);
}

}  // namespace detail
}  // namespace sceneforge
