#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "speiser/family.hpp"

namespace speiser {

/// Attracting fixed point of f_lambda on (0, eta) and its multiplier.
struct FixedPointData {
  double location = 0.0;
  double multiplier = 0.0;
  double lambda = 1.0;
};

/// No attracting fixed point was found on the scanned interval.
class NoAttractingFixedPoint : public std::runtime_error {
 public:
  NoAttractingFixedPoint(const std::string& what, double scan_lo, double scan_hi)
      : std::runtime_error(what), lo_(scan_lo), hi_(scan_hi) {}
  [[nodiscard]] double scan_lo() const noexcept { return lo_; }
  [[nodiscard]] double scan_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Root of f_lambda(x) - x on (0, eta) by bracketing, to 1e-12.
FixedPointData find_attracting_fixed_point(double lambda, int m, int p, double eta);
/// Same for any real-symmetric family with a parameter eta (H, Hm, FLambda).
FixedPointData find_attracting_fixed_point(const MapFamily& family);

struct AttractingCycle {
  std::vector<complex> points;
  complex multiplier;
};

/// The attracting cycles an orbit may converge to.
using Attractor = std::vector<AttractingCycle>;

Attractor attractor_from(const FixedPointData& fp);

struct CycleSearchOptions {
  int max_period = 3;
  int iterations = 1000;
  double tolerance = 1e-9;
};

/// Runs every seed forward and keeps the attracting cycles of period up to
/// max_period that some orbit settles on. Deterministic in seed order.
Attractor find_attracting_cycles(const MapFamily& family, std::span<const complex> seeds,
                                 const CycleSearchOptions& options = {});

enum class PointClass : std::uint8_t { Fatou, Julia, Undetermined };

struct Classification {
  PointClass kind = PointClass::Undetermined;
  /// Steps needed to reach the attraction disk (Fatou only).
  int steps = 0;

  friend bool operator==(const Classification&, const Classification&) = default;
};

struct ClassifyOptions {
  int max_iter = 500;
  double tol = 1e-6;
  /// Moduli above the guard count as a visit near a pole; the value is still
  /// fed back into the map.
  double guard = 1e12;
  int guard_reentries = 3;
  /// Half-size of the pixel the point stands for. When positive, the chordal
  /// radius of the pixel's image is propagated with the spherical derivative
  /// and the point is Julia once it exceeds marty_threshold.
  double pixel_radius = 0.0;
  double marty_threshold = 1.0;
};

Classification classify_point(complex z, const MapFamily& family, const Attractor& attractor,
                              const ClassifyOptions& options = {});
Classification classify_point(complex z, const MapFamily& family, const FixedPointData& fp, int max_iter = 500,
                              double tol = 1e-6);

struct GridSpec {
  complex center{0.0, 0.0};
  double half_width = 2.0;
  int resolution = 512;
  int max_iterations = 500;
  double tolerance = 1e-6;

  /// Pixel centre; row 0 is the top edge.
  [[nodiscard]] complex pixel(int row, int col) const;
  [[nodiscard]] double pixel_size() const { return 2.0 * half_width / resolution; }
};

struct RenderOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  double guard = 1e12;
  int guard_reentries = 3;
  /// Classify pixels (pixel_radius = half a pixel) rather than pixel centres.
  bool pixel_test = true;
  double marty_threshold = 1.0;
};

struct RasterResult {
  int resolution = 0;
  std::vector<Classification> pixels;  // row-major

  [[nodiscard]] const Classification& at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * resolution + col]; }
  [[nodiscard]] double fraction(PointClass kind) const;
};

/// Classifies every pixel of the grid. The result does not depend on the
/// thread count.
RasterResult render(const GridSpec& grid, const MapFamily& family, const Attractor& attractor,
                    const RenderOptions& options = {});
RasterResult render(const GridSpec& grid, const MapFamily& family, const FixedPointData& fp,
                    const RenderOptions& options = {});

/// Binary P5 image: Julia 0, Undetermined 255, Fatou shaded by step count.
/// Each comment line is written as "# <line>" in the header.
void write_pgm(std::ostream& os, const RasterResult& raster, std::span<const std::string> comments = {});
/// CSV with header row,col,class,steps; class is F, J or U.
void write_class_csv(std::ostream& os, const RasterResult& raster);

/// Thrown when an orbit leaves the linearization disk.
class KoenigsDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct KoenigsOptions {
  double tolerance = 1e-10;
  int max_iter = 400;
  /// Orbits must stay within this distance of the fixed point.
  double radius = 0.1;
};

/// g(z) = lim m^-n phi(f^n(z) - zeta) with phi(u) = u + c2 u^2 the
/// second-order linearizer, iterated until successive values differ by less
/// than options.tolerance or the orbit is within 1e-7 of zeta.
complex koenigs_coordinate(const MapFamily& family, const FixedPointData& fp, complex z,
                           const KoenigsOptions& options = {});
/// |g(f(z)) - m g(z)|.
double koenigs_check(const MapFamily& family, const FixedPointData& fp, complex z, const KoenigsOptions& options = {});

/// Checks the conditions the construction puts on eta and m for an H, Hm or
/// FLambda family: attracting fixed point in (0, eta) whose basin holds
/// [0, eta], f decreasing and f' decreasing on [0, eta], and f'' zero-free on
/// 0 < |z| <= eta (argument principle on |z| = eta).
struct ParameterCheck {
  bool ok = false;
  std::string reason;
  FixedPointData fixed_point;
};
ParameterCheck check_parameters(const MapFamily& family);

/// Largest candidate eta for which H = eta G^p passes check_parameters.
double select_eta(int p, std::span<const double> candidates);

}  // namespace speiser
