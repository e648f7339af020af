#pragma once

#include <array>
#include <charconv>
#include <string>

namespace echotdoa {

/// Shortest decimal form at 9 significant digits, locale-independent
/// (infinities print as "inf"/"-inf").  All file output goes through
/// this so identical runs produce byte-identical files.
inline std::string format_double(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                           std::chars_format::general, 9);
  return std::string(buf.data(), res.ptr);
}

}  // namespace echotdoa
