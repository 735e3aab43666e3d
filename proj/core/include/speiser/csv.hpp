#pragma once

#include <string>

namespace speiser {

/// Locale-independent shortest form with 17 significant digits, '.' decimal.
std::string format_double(double x);

}  // namespace speiser
