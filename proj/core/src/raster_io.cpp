#include <cmath>
#include <ostream>

#include "speiser/dynamics.hpp"

namespace speiser {

namespace {

unsigned char shade(const Classification& c) {
  switch (c.kind) {
    case PointClass::Julia: return 0;
    case PointClass::Undetermined: return 255;
    case PointClass::Fatou: return static_cast<unsigned char>(64 + std::lround(190.0 * std::exp(-c.steps / 24.0)));
  }
  return 255;
}

char code(PointClass kind) {
  switch (kind) {
    case PointClass::Fatou: return 'F';
    case PointClass::Julia: return 'J';
    case PointClass::Undetermined: return 'U';
  }
  return '?';
}

}  // namespace

void write_pgm(std::ostream& os, const RasterResult& raster, std::span<const std::string> comments) {
  os << "P5\n";
  for (const auto& line : comments) os << "# " << line << '\n';
  os << raster.resolution << ' ' << raster.resolution << "\n255\n";
  for (const auto& px : raster.pixels) os.put(static_cast<char>(shade(px)));
}

void write_class_csv(std::ostream& os, const RasterResult& raster) {
  os << "row,col,class,steps\n";
  for (int r = 0; r < raster.resolution; ++r) {
    for (int c = 0; c < raster.resolution; ++c) {
      const auto& px = raster.at(r, c);
      os << r << ',' << c << ',' << code(px.kind) << ',' << px.steps << '\n';
    }
  }
}

}  // namespace speiser
