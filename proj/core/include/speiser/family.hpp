#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speiser/elliptic.hpp"
#include "speiser/extended_complex.hpp"

namespace speiser {

enum class FamilyTag { G, FMax, H, Hm, FLambda };

/// Which map is being evaluated, with the parameters its tag requires.
///
///   G        the elliptic function (p(z + i pi/2) / e1)^2, critical values 0, 1, inf
///   FMax     i G(pi z / 2), whose Julia set is the whole sphere
///   H        eta G^p
///   Hm       H(m arcsin(z/m)), m odd
///   FLambda  Hm(lambda z), lambda in (0, 1]
///
/// Construction validates: p >= 1, eta in (0, pi/2), m odd and positive,
/// lambda in (0, 1]. Violations throw std::invalid_argument.
class MapFamily {
 public:
  static MapFamily g();
  static MapFamily fmax();
  static MapFamily h(int p, double eta);
  static MapFamily hm(int m, int p, double eta);
  static MapFamily flambda(double lambda, int m, int p, double eta);

  [[nodiscard]] FamilyTag tag() const noexcept { return tag_; }

  // Parameter access; throws std::logic_error when the tag has no such
  // parameter.
  [[nodiscard]] int p() const;
  [[nodiscard]] double eta() const;
  [[nodiscard]] int m() const;
  [[nodiscard]] double lambda() const;

  [[nodiscard]] bool has_p() const noexcept { return tag_ == FamilyTag::H || tag_ == FamilyTag::Hm || tag_ == FamilyTag::FLambda; }
  [[nodiscard]] bool has_m() const noexcept { return tag_ == FamilyTag::Hm || tag_ == FamilyTag::FLambda; }
  [[nodiscard]] bool has_lambda() const noexcept { return tag_ == FamilyTag::FLambda; }

  /// Multiplicity shared by every pole (4 for G and FMax, 4p otherwise).
  [[nodiscard]] int pole_multiplicity() const noexcept;

  /// True when f(conj z) = conj f(z); FMax is the only family without it.
  [[nodiscard]] bool real_symmetric() const noexcept { return tag_ != FamilyTag::FMax; }

  /// Same map with a different lambda (FLambda only).
  [[nodiscard]] MapFamily with_lambda(double lambda) const;

  /// Short human-readable form such as "flambda(lambda=0.5,m=21,p=1,eta=0.25)".
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const MapFamily&, const MapFamily&) = default;

 private:
  MapFamily(FamilyTag tag, int p, double eta, int m, double lambda);

  FamilyTag tag_;
  int p_;
  double eta_;
  int m_;
  double lambda_;
};

std::string to_string(FamilyTag tag);
/// Parses "g", "fmax", "h", "hm", "flambda" (case-insensitive).
std::optional<FamilyTag> parse_family_tag(std::string_view text);

/// Value and first derivative at one point.
struct Jet {
  ExtendedComplex value;
  ExtendedComplex derivative;
};

ExtendedComplex eval_G(complex z);
ExtendedComplex eval_fmax(complex z);
ExtendedComplex eval_H(complex z, int p, double eta);
ExtendedComplex eval_hm(complex z, int m, int p, double eta);
ExtendedComplex eval_flambda(complex z, double lambda, int m, int p, double eta);

ExtendedComplex evaluate(const MapFamily& family, complex z);
ExtendedComplex eval_deriv(const MapFamily& family, complex z);
Jet evaluate_jet(const MapFamily& family, complex z);

/// h_m through an explicit branch: w is either the principal m*arcsin(z/m)
/// or its reflection m*pi - w. Both must give the same value.
ExtendedComplex eval_hm_branch(complex z, int m, int p, double eta, bool reflected);

// -- poles -----------------------------------------------------------------

/// A pole a with f(z) ~ (b / (z - a))^multiplicity; only |b| is kept.
struct PoleData {
  complex location;
  int multiplicity = 0;
  double coeff_magnitude = 0.0;
};

struct PoleOptions {
  bool extract_coefficients = true;
  int samples = 16;
  /// Sampling circle radius in units of the local scale |dz/dw| of the pole.
  double relative_radius = 1e-3;
  std::size_t max_count = 20'000'000;
};

/// All poles with |a| <= radius, sorted by modulus (ties by argument).
/// Throws std::invalid_argument for radius <= 0, std::range_error when pole
/// coordinates at that radius would overflow, std::length_error past
/// options.max_count.
std::vector<PoleData> enumerate_poles(const MapFamily& family, double radius, const PoleOptions& options = {});

/// Number of poles in |a| <= radius without building the list.
std::size_t count_poles(const MapFamily& family, double radius);

/// Location in the z-plane of the Hm pole that comes from the H-pole w.
complex hm_pole_image(complex w, int m);

/// |b| from the circle mean of log|f| at radius `radius` about `pole`.
/// Jensen's formula makes the mean exact for the leading term.
double extract_pole_coefficient(const MapFamily& family, complex pole, int multiplicity, double radius, int samples = 16);

/// The natural length scale of the map near `pole` (|dz/dw| for Hm and
/// FLambda, a constant otherwise).
double pole_local_scale(const MapFamily& family, complex pole);

/// CSV with header re_a,im_a,multiplicity,abs_b.
void write_poles_csv(std::ostream& os, std::span<const PoleData> poles);

// -- local exponents ---------------------------------------------------------

enum class ExponentKind { Zero, Pole, Value };

struct ExponentOptions {
  double r_min = 1e-4;
  double r_max = 1e-3;
  int radii = 9;
  int samples = 32;
  /// RMS residual of the log-log fit above which the result is inconclusive.
  double max_residual = 1e-2;
};

struct ExponentFit {
  double exponent = 0.0;
  double residual = 0.0;
  bool conclusive = false;
};

/// Local multiplicity at z0: slope of the circle-mean of log|f - target|
/// (log|f| for poles, sign flipped) against log r over [r_min, r_max].
ExponentFit local_exponent(const MapFamily& family, complex z0, ExponentKind kind, complex target = {},
                           const ExponentOptions& options = {});

}  // namespace speiser
