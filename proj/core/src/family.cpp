#include "speiser/family.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace speiser {

MapFamily::MapFamily(FamilyTag tag, int p, double eta, int m, double lambda)
    : tag_(tag), p_(p), eta_(eta), m_(m), lambda_(lambda) {
  if (has_p()) {
    if (p_ < 1) throw std::invalid_argument("MapFamily: p must be a positive integer");
    if (!(eta_ > 0.0 && eta_ < 0.5 * kPi)) throw std::invalid_argument("MapFamily: eta must lie in (0, pi/2)");
  }
  if (has_m()) {
    if (m_ < 1) throw std::invalid_argument("MapFamily: m must be a positive integer");
    if (m_ % 2 == 0) {
      throw std::invalid_argument("MapFamily: m must be odd (h_m = H(m arcsin(z/m)) is single-valued with zeros at +-m only for odd m)");
    }
  }
  if (has_lambda() && !(lambda_ > 0.0 && lambda_ <= 1.0)) {
    throw std::invalid_argument("MapFamily: lambda must lie in (0, 1]");
  }
}

MapFamily MapFamily::g() { return {FamilyTag::G, 1, 1.0, 1, 1.0}; }
MapFamily MapFamily::fmax() { return {FamilyTag::FMax, 1, 1.0, 1, 1.0}; }
MapFamily MapFamily::h(int p, double eta) { return {FamilyTag::H, p, eta, 1, 1.0}; }
MapFamily MapFamily::hm(int m, int p, double eta) { return {FamilyTag::Hm, p, eta, m, 1.0}; }
MapFamily MapFamily::flambda(double lambda, int m, int p, double eta) {
  return {FamilyTag::FLambda, p, eta, m, lambda};
}

int MapFamily::p() const {
  if (!has_p()) throw std::logic_error("MapFamily: " + to_string(tag_) + " has no parameter p");
  return p_;
}
double MapFamily::eta() const {
  if (!has_p()) throw std::logic_error("MapFamily: " + to_string(tag_) + " has no parameter eta");
  return eta_;
}
int MapFamily::m() const {
  if (!has_m()) throw std::logic_error("MapFamily: " + to_string(tag_) + " has no parameter m");
  return m_;
}
double MapFamily::lambda() const {
  if (!has_lambda()) throw std::logic_error("MapFamily: " + to_string(tag_) + " has no parameter lambda");
  return lambda_;
}

int MapFamily::pole_multiplicity() const noexcept { return has_p() ? 4 * p_ : 4; }

MapFamily MapFamily::with_lambda(double lambda) const {
  if (tag_ != FamilyTag::FLambda) throw std::logic_error("MapFamily::with_lambda: not an FLambda family");
  return flambda(lambda, m_, p_, eta_);
}

std::string MapFamily::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(tag_);
  switch (tag_) {
    case FamilyTag::G:
    case FamilyTag::FMax:
      break;
    case FamilyTag::H:
      os << "(p=" << p_ << ",eta=" << eta_ << ")";
      break;
    case FamilyTag::Hm:
      os << "(m=" << m_ << ",p=" << p_ << ",eta=" << eta_ << ")";
      break;
    case FamilyTag::FLambda:
      os << "(lambda=" << lambda_ << ",m=" << m_ << ",p=" << p_ << ",eta=" << eta_ << ")";
      break;
  }
  return os.str();
}

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::G: return "g";
    case FamilyTag::FMax: return "fmax";
    case FamilyTag::H: return "h";
    case FamilyTag::Hm: return "hm";
    case FamilyTag::FLambda: return "flambda";
  }
  return "?";
}

std::optional<FamilyTag> parse_family_tag(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (auto tag : {FamilyTag::G, FamilyTag::FMax, FamilyTag::H, FamilyTag::Hm, FamilyTag::FLambda}) {
    if (lower == to_string(tag)) return tag;
  }
  return std::nullopt;
}

namespace {

constexpr complex kHalfPiI{0.0, 0.5 * kPi};

// G, H and h_m are even and real-symmetric. Evaluating at the first-quadrant
// representative and mapping back makes those symmetries exact in floating
// point, which keeps orbit classification symmetric too.
struct Quadrant {
  complex q;
  bool conj_value;
  bool negate_derivative;
};

Quadrant to_first_quadrant(complex z) {
  const bool neg_x = z.real() < 0.0;
  const bool neg_y = z.imag() < 0.0;
  return {complex(std::abs(z.real()), std::abs(z.imag())), neg_x != neg_y, neg_x};
}

Jet from_quadrant(const Quadrant& qd, Jet jet) {
  if (qd.conj_value) {
    jet.value = conj(jet.value);
    jet.derivative = conj(jet.derivative);
  }
  if (qd.negate_derivative) jet.derivative = -jet.derivative;
  return jet;
}

Jet g_jet_canonical(complex q) {
  const auto& lat = LatticeSpec::square();
  const WpPair P = wp_with_derivative(q + kHalfPiI, lat);
  if (P.value.is_infinite()) return {ExtendedComplex::infinity(), ExtendedComplex::infinity()};
  const complex v = P.value.value();
  const complex dv = P.derivative.value();
  const double inv_e1 = 1.0 / lat.e1;
  const complex r = v * inv_e1;
  return {ExtendedComplex::saturate(r * r), ExtendedComplex::saturate(2.0 * v * dv * inv_e1 * inv_e1)};
}

complex int_power(complex x, int n) {
  complex result(1.0);
  while (n > 0) {
    if (n & 1) result *= x;
    x *= x;
    n >>= 1;
  }
  return result;
}

Jet h_jet_from_g(const Jet& g, int p, double eta) {
  if (g.value.is_infinite()) return g;
  const complex gv = g.value.value();
  const complex gpm1 = int_power(gv, p - 1);
  const complex value = eta * gpm1 * gv;
  if (g.derivative.is_infinite()) return {ExtendedComplex::saturate(value), ExtendedComplex::infinity()};
  const complex deriv = eta * static_cast<double>(p) * gpm1 * g.derivative.value();
  return {ExtendedComplex::saturate(value), ExtendedComplex::saturate(deriv)};
}

// H at an arbitrary point (no quadrant folding; callers fold first).
Jet h_jet_any(complex w, int p, double eta) {
  const Quadrant qd = to_first_quadrant(w);
  return from_quadrant(qd, h_jet_from_g(g_jet_canonical(qd.q), p, eta));
}

// cos(arcsin s) on the principal branch, i.e. sqrt(1 - s^2) with Re >= 0.
complex arcsin_cos(complex s, complex w_over_m) {
  if (std::abs(s) < 1e100) return std::sqrt((1.0 - s) * (1.0 + s));
  return std::cos(w_over_m);
}

// h_m at a first-quadrant point. On the cut (Im q = +0) the principal arcsin
// already gives the limit from the upper half-plane.
Jet hm_jet_canonical(complex q, int m, int p, double eta) {
  const double md = static_cast<double>(m);
  const complex s = q / md;
  const complex a = std::asin(s);
  const complex w = md * a;
  const Jet H = h_jet_any(w, p, eta);
  if (H.value.is_infinite()) return H;
  const complex c = arcsin_cos(s, a);
  if (c == complex(0.0)) {
    // z = +-m: zero of order 2p >= 2, so the derivative vanishes.
    return {H.value, ExtendedComplex(0.0)};
  }
  if (H.derivative.is_infinite()) return {H.value, ExtendedComplex::infinity()};
  return {H.value, ExtendedComplex::saturate(H.derivative.value() / c)};
}

Jet hm_jet(complex z, int m, int p, double eta) {
  const Quadrant qd = to_first_quadrant(z);
  return from_quadrant(qd, hm_jet_canonical(qd.q, m, p, eta));
}

Jet scale_derivative(Jet jet, complex factor) {
  if (jet.derivative.is_finite()) jet.derivative = ExtendedComplex::saturate(jet.derivative.value() * factor);
  return jet;
}

}  // namespace

Jet evaluate_jet(const MapFamily& family, complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::domain_error("evaluate: non-finite argument");
  }
  switch (family.tag()) {
    case FamilyTag::G: {
      const Quadrant qd = to_first_quadrant(z);
      return from_quadrant(qd, g_jet_canonical(qd.q));
    }
    case FamilyTag::FMax: {
      const complex u = 0.5 * kPi * z;
      const Quadrant qd = to_first_quadrant(u);
      Jet g = from_quadrant(qd, g_jet_canonical(qd.q));
      const complex i(0.0, 1.0);
      if (g.value.is_finite()) g.value = ExtendedComplex::saturate(i * g.value.value());
      return scale_derivative(g, i * 0.5 * kPi);
    }
    case FamilyTag::H:
      return h_jet_any(z, family.p(), family.eta());
    case FamilyTag::Hm:
      return hm_jet(z, family.m(), family.p(), family.eta());
    case FamilyTag::FLambda: {
      const double lam = family.lambda();
      return scale_derivative(hm_jet(lam * z, family.m(), family.p(), family.eta()), complex(lam));
    }
  }
  throw std::logic_error("evaluate_jet: unknown family");
}

ExtendedComplex evaluate(const MapFamily& family, complex z) { return evaluate_jet(family, z).value; }
ExtendedComplex eval_deriv(const MapFamily& family, complex z) { return evaluate_jet(family, z).derivative; }

ExtendedComplex eval_G(complex z) { return evaluate(MapFamily::g(), z); }
ExtendedComplex eval_fmax(complex z) { return evaluate(MapFamily::fmax(), z); }
ExtendedComplex eval_H(complex z, int p, double eta) { return evaluate(MapFamily::h(p, eta), z); }
ExtendedComplex eval_hm(complex z, int m, int p, double eta) { return evaluate(MapFamily::hm(m, p, eta), z); }
ExtendedComplex eval_flambda(complex z, double lambda, int m, int p, double eta) {
  return evaluate(MapFamily::flambda(lambda, m, p, eta), z);
}

ExtendedComplex eval_hm_branch(complex z, int m, int p, double eta, bool reflected) {
  const MapFamily family = MapFamily::hm(m, p, eta);  // validates
  const double md = static_cast<double>(family.m());
  complex w = md * std::asin(z / md);
  if (reflected) w = md * kPi - w;
  return h_jet_any(w, p, eta).value;
}

}  // namespace speiser
