#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace geophase::detail {

// Shortest decimal representation that round-trips to the same double.
inline std::string format_shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Fixed 17-significant-digit form used by the Wigner CSV export.
inline std::string format_sig17(double v) {
  char buf[48];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace geophase::detail
