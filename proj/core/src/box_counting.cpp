#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "speiser/dimension.hpp"
#include "speiser/regression.hpp"

namespace speiser {

std::vector<int> default_box_scales() { return {128, 64, 32, 16, 8, 4}; }

DimensionEstimate box_counting(std::span<const std::pair<int, int>> pixels, std::span<const int> scales) {
  if (scales.size() < 4) throw std::invalid_argument("box_counting: at least 4 scales are required");
  for (int s : scales) {
    if (s < 1) throw std::invalid_argument("box_counting: box sizes must be positive");
  }
  if (pixels.empty()) throw std::domain_error("box_counting: the Julia set is empty, dimension undefined");

  int r0 = pixels.front().first, c0 = pixels.front().second;
  for (const auto& [r, c] : pixels) {
    r0 = std::min(r0, r);
    c0 = std::min(c0, c);
  }

  std::vector<double> x, y;
  std::unordered_set<long long> boxes;
  for (int s : scales) {
    boxes.clear();
    for (const auto& [r, c] : pixels) {
      const long long br = (r - r0) / s, bc = (c - c0) / s;
      boxes.insert((br << 32) | bc);
    }
    x.push_back(-std::log(static_cast<double>(s)));
    y.push_back(std::log(static_cast<double>(boxes.size())));
  }
  const LinearFit fit = fit_line(x, y);

  DimensionEstimate est;
  est.method = DimensionMethod::BoxCounting;
  est.value = std::clamp(fit.slope, 0.0, 2.0);
  est.lo = std::clamp(fit.slope - fit.slope_stderr, 0.0, est.value);
  est.hi = std::clamp(fit.slope + fit.slope_stderr, est.value, 2.0);
  std::ostringstream meta;
  meta << "scales=";
  for (std::size_t i = 0; i < scales.size(); ++i) meta << (i ? "/" : "") << scales[i];
  meta << ";pixels=" << pixels.size();
  est.metadata = meta.str();
  return est;
}

DimensionEstimate box_counting(const RasterResult& raster, std::span<const int> scales) {
  std::vector<std::pair<int, int>> pixels;
  for (int r = 0; r < raster.resolution; ++r) {
    for (int c = 0; c < raster.resolution; ++c) {
      if (raster.at(r, c).kind == PointClass::Julia) pixels.emplace_back(r, c);
    }
  }
  return box_counting(pixels, scales);
}

}  // namespace speiser
