#pragma once

#include <cstdarg>
#include <cstdio>
#include <string>

namespace blendsim::util {

// printf-style formatting into a std::string. All file output goes through
// explicit formats so reruns with the same seed produce byte-identical logs.
inline std::string strfmt(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  va_list copy;
  va_copy(copy, args);
  int n = std::vsnprintf(nullptr, 0, fmt, copy);
  va_end(copy);
  std::string out(n > 0 ? static_cast<size_t>(n) : 0, '\0');
  if (n > 0) std::vsnprintf(out.data(), out.size() + 1, fmt, args);
  va_end(args);
  return out;
}

inline std::string fnum(double v, int precision = 6) {
  return strfmt("%.*g", precision, v);
}

}  // namespace blendsim::util
