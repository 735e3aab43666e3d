#pragma once

#include <complex>
#include <iosfwd>

namespace speiser {

using complex = std::complex<double>;

/// A point of the Riemann sphere: either a finite complex number or the
/// single point at infinity.
///
/// Non-finite results never leak into a finite value. Constructing from a
/// complex with an infinite component yields infinity; constructing from a
/// NaN throws std::domain_error.
class ExtendedComplex {
 public:
  constexpr ExtendedComplex() noexcept = default;
  ExtendedComplex(complex z);  // NOLINT(google-explicit-constructor)
  ExtendedComplex(double re, double im = 0.0) : ExtendedComplex(complex(re, im)) {}  // NOLINT

  static constexpr ExtendedComplex infinity() noexcept { return ExtendedComplex(Tag{}); }

  /// Result of finite arithmetic that may have left the double range: any
  /// non-finite component (including NaN from inf - inf inside a complex
  /// product) is read as overflow and mapped to infinity.
  static ExtendedComplex saturate(complex z) noexcept;

  [[nodiscard]] constexpr bool is_infinite() const noexcept { return infinite_; }
  [[nodiscard]] constexpr bool is_finite() const noexcept { return !infinite_; }

  /// Finite value; throws std::domain_error at infinity.
  [[nodiscard]] complex value() const;
  [[nodiscard]] double real() const { return value().real(); }
  [[nodiscard]] double imag() const { return value().imag(); }

  /// |z|, or +inf at infinity.
  [[nodiscard]] double modulus() const noexcept;

  friend bool operator==(const ExtendedComplex& a, const ExtendedComplex& b) noexcept {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.z_ == b.z_;
  }

 private:
  struct Tag {};
  constexpr explicit ExtendedComplex(Tag) noexcept : infinite_(true) {}

  complex z_{};
  bool infinite_ = false;
};

// Arithmetic on the sphere. Indeterminate forms (inf - inf, 0 * inf,
// 0 / 0, inf / inf) throw std::domain_error.
ExtendedComplex operator+(const ExtendedComplex& a, const ExtendedComplex& b);
ExtendedComplex operator-(const ExtendedComplex& a, const ExtendedComplex& b);
ExtendedComplex operator*(const ExtendedComplex& a, const ExtendedComplex& b);
ExtendedComplex operator/(const ExtendedComplex& a, const ExtendedComplex& b);
ExtendedComplex operator-(const ExtendedComplex& a);

ExtendedComplex reciprocal(const ExtendedComplex& a) noexcept;
ExtendedComplex conj(const ExtendedComplex& a) noexcept;

/// Chordal distance of the unit-sphere embedding, in [0, 2].
double chordal_distance(const ExtendedComplex& a, const ExtendedComplex& b) noexcept;

std::ostream& operator<<(std::ostream& os, const ExtendedComplex& z);

}  // namespace speiser
