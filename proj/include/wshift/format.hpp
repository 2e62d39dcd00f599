#pragma once

#include <array>
#include <charconv>
#include <string>

#include "log2_value.hpp"

namespace wshift {

/// Shortest round-trip decimal, '.' separator regardless of locale.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

/// Integer for exact values, shortest round-trip decimal otherwise.
inline std::string format_log2(const Log2Value& v) {
  if (v.is_exact()) return std::to_string(v.exponent());
  return format_double(v.log2());
}

}  // namespace wshift
