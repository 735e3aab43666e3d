#include "speiser/extended_complex.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace speiser {

ExtendedComplex::ExtendedComplex(complex z) {
  if (std::isnan(z.real()) || std::isnan(z.imag())) {
    throw std::domain_error("ExtendedComplex: NaN coordinate");
  }
  if (std::isinf(z.real()) || std::isinf(z.imag())) {
    infinite_ = true;
  } else {
    z_ = z;
  }
}

complex ExtendedComplex::value() const {
  if (infinite_) throw std::domain_error("ExtendedComplex: value() at infinity");
  return z_;
}

ExtendedComplex ExtendedComplex::saturate(complex z) noexcept {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return infinity();
  ExtendedComplex r;
  r.z_ = z;
  return r;
}

double ExtendedComplex::modulus() const noexcept {
  return infinite_ ? HUGE_VAL : std::abs(z_);
}

namespace {

ExtendedComplex from_finite_result(complex r) { return ExtendedComplex::saturate(r); }

bool is_zero(const ExtendedComplex& a) { return a.is_finite() && a.value() == complex(0.0); }

}  // namespace

ExtendedComplex operator+(const ExtendedComplex& a, const ExtendedComplex& b) {
  if (a.is_infinite() && b.is_infinite()) throw std::domain_error("inf + inf is indeterminate");
  if (a.is_infinite() || b.is_infinite()) return ExtendedComplex::infinity();
  return from_finite_result(a.value() + b.value());
}

ExtendedComplex operator-(const ExtendedComplex& a) {
  return a.is_infinite() ? a : ExtendedComplex(-a.value());
}

ExtendedComplex operator-(const ExtendedComplex& a, const ExtendedComplex& b) { return a + (-b); }

ExtendedComplex operator*(const ExtendedComplex& a, const ExtendedComplex& b) {
  if (a.is_infinite() || b.is_infinite()) {
    if (is_zero(a) || is_zero(b)) throw std::domain_error("0 * inf is indeterminate");
    return ExtendedComplex::infinity();
  }
  return from_finite_result(a.value() * b.value());
}

ExtendedComplex operator/(const ExtendedComplex& a, const ExtendedComplex& b) {
  if (a.is_infinite() && b.is_infinite()) throw std::domain_error("inf / inf is indeterminate");
  if (is_zero(a) && is_zero(b)) throw std::domain_error("0 / 0 is indeterminate");
  if (a.is_infinite() || is_zero(b)) return ExtendedComplex::infinity();
  if (b.is_infinite()) return ExtendedComplex();
  return from_finite_result(a.value() / b.value());
}

ExtendedComplex reciprocal(const ExtendedComplex& a) noexcept {
  if (a.is_infinite()) return ExtendedComplex();
  if (is_zero(a)) return ExtendedComplex::infinity();
  return from_finite_result(1.0 / a.value());
}

ExtendedComplex conj(const ExtendedComplex& a) noexcept {
  return a.is_infinite() ? a : from_finite_result(std::conj(a.value()));
}

double chordal_distance(const ExtendedComplex& a, const ExtendedComplex& b) noexcept {
  if (a.is_infinite() && b.is_infinite()) return 0.0;
  if (a.is_infinite()) return 2.0 / std::hypot(1.0, b.modulus());
  if (b.is_infinite()) return 2.0 / std::hypot(1.0, a.modulus());
  const complex za = a.value();
  const complex zb = b.value();
  // Inversion is an isometry; use it to keep both moduli at most 1 when
  // that avoids overflow in the products below.
  if (std::abs(za) > 1.0 && std::abs(zb) > 1.0) {
    const complex ia = 1.0 / za;
    const complex ib = 1.0 / zb;
    return 2.0 * std::abs(ia - ib) / (std::hypot(1.0, std::abs(ia)) * std::hypot(1.0, std::abs(ib)));
  }
  const double d = 2.0 * std::abs(za - zb) / (std::hypot(1.0, std::abs(za)) * std::hypot(1.0, std::abs(zb)));
  return d > 2.0 ? 2.0 : d;
}

std::ostream& operator<<(std::ostream& os, const ExtendedComplex& z) {
  if (z.is_infinite()) return os << "inf";
  return os << z.value();
}

}  // namespace speiser
