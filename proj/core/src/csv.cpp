#include "speiser/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace speiser {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  return {buf.data(), res.ptr};
}

}  // namespace speiser
