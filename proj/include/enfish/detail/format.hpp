#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace enfish::detail {

// Shortest decimal string that round-trips to the same double. Used for
// CSV output so two runs of the same sweep are byte-identical and no
// precision is lost in the file.
inline std::string format_full(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

// Fixed 12-significant-digit formatting for human-facing report lines.
inline std::string format_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

}  // namespace enfish::detail
