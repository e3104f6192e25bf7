#pragma once

/// @file
/// Deterministic report rendering: fixed float formatting and a content
/// digest of the input file.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "idel/io.hpp"

namespace idel {

/// Up to 9 significant digits, trailing zeros trimmed; -0 prints as 0.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline void render(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(key).dump() + ": ";
        render(value, out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        render(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: out += format_number(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// Pretty-printed JSON with every float passed through format_number.
inline std::string render_json(const Json& j) {
  std::string out;
  detail::render(j, out, 0);
  out += "\n";
  return out;
}

}  // namespace idel
