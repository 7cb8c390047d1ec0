#pragma once

#include <charconv>
#include <string>

namespace rcgan {

/// Shortest decimal form that round-trips to the same double. Locale
/// independent, so CSV/JSON artifacts are byte-stable.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace rcgan
