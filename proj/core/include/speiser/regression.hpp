#pragma once

#include <span>

namespace speiser {

/// Ordinary least squares y ~ intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double rss = 0.0;
  double r_squared = 0.0;
};

/// Requires at least two points with distinct x (std::invalid_argument).
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace speiser
