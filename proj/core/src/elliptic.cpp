#include "speiser/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace speiser {

namespace {

constexpr double kHalfPi = 0.5 * kPi;
// Largest |z|^2 of a reduced point (a corner of the fundamental square).
constexpr double kMaxReducedNorm = 0.5 * kPi * kPi;
constexpr std::size_t kMaxTerms = 400;

// csc^2 of a complex argument, written through exp to stay accurate for
// large imaginary parts where sin itself overflows.
complex csc2(complex w) {
  const complex s = std::sin(w);
  if (std::isfinite(s.real()) && std::isfinite(s.imag())) return 1.0 / (s * s);
  // |Im w| huge: sin w ~ (+-) i e^{-+ i w}/2, so csc^2 w ~ -4 e^{+-2 i w}.
  const double sgn = w.imag() > 0 ? 1.0 : -1.0;
  return -4.0 * std::exp(complex(0.0, 2.0 * sgn) * w);
}

// Sum over l > L of the bound 1/sinh^2(l pi - |y|) + 1/sinh^2(l pi), doubled
// for the rows below the real axis.
double row_tail(int L, double abs_y) {
  double total = 0.0;
  for (int l = L + 1; l < L + 40; ++l) {
    const double a = std::sinh(l * kPi - abs_y);
    const double b = std::sinh(l * kPi);
    const double term = 1.0 / (a * a) + 1.0 / (b * b);
    total += term;
    if (term < 1e-30 * (total + 1e-300)) break;
  }
  return 2.0 * total;
}

std::vector<double> laurent_coefficients(double g2, double g3, std::size_t count) {
  // c_n for n = 2 .. count+1, stored at index n-2.
  std::vector<double> c(count, 0.0);
  if (count > 0) c[0] = g2 / 20.0;
  if (count > 1) c[1] = g3 / 28.0;
  for (std::size_t n = 4; n < count + 2; ++n) {
    double s = 0.0;
    for (std::size_t k = 2; k <= n - 2; ++k) s += c[k - 2] * c[n - k - 2];
    c[n - 2] = 3.0 * s / (static_cast<double>(2 * n + 1) * static_cast<double>(n - 3));
  }
  return c;
}

// Tail bound (value and derivative) after keeping terms n = 2..N.
double laurent_tail_bound(double bound, double q, double abs_z, std::size_t N) {
  const double qN = std::pow(q, static_cast<double>(N));
  const double value_tail = bound * qN / (1.0 - q);
  const double dN = static_cast<double>(N);
  const double deriv_tail = (bound / std::max(abs_z, 1e-300)) * 2.0 * qN * (dN / (1.0 - q) + q / ((1.0 - q) * (1.0 - q)));
  return std::max(value_tail, deriv_tail);
}

}  // namespace

LatticeSumResult wp_row_sum(complex z, double tail_tolerance) {
  const complex zr = reduce_to_fundamental(z, LatticeSpec{});
  const double abs_y = std::abs(zr.imag());
  complex sum = csc2(zr) - 1.0 / 3.0;
  int L = 0;
  double tail = row_tail(0, abs_y);
  while (tail > tail_tolerance && L < 64) {
    ++L;
    const complex shift(0.0, L * kPi);
    const double s = std::sinh(L * kPi);
    const double corr = 1.0 / (s * s);
    sum += csc2(zr - shift) + corr;
    sum += csc2(zr + shift) + corr;
    tail = row_tail(L, abs_y);
  }
  return {sum, tail, L};
}

LatticeSpec LatticeSpec::build(double tail_tolerance) {
  LatticeSpec spec;
  spec.e1 = wp_row_sum(complex(kHalfPi, 0.0)).value.real();

  // G4 = sum' omega^-4 row by row: sum_n (w - n pi)^-4 = csc^4 w - (2/3) csc^2 w,
  // whose regular part at w = 0 is 1/45.
  double g4 = 1.0 / 45.0;
  for (int l = 1; l < 64; ++l) {
    const double s = std::sinh(l * kPi);
    const double inv2 = 1.0 / (s * s);
    const double term = 2.0 * (inv2 * inv2 + (2.0 / 3.0) * inv2);
    g4 += term;
    if (term < 1e-20 * g4) break;
  }
  spec.g2 = 60.0 * g4;
  spec.g3 = 0.0;

  spec.cauchy_radius = 0.95 * kPi;
  double bound = 0.0;
  constexpr int kSamples = 256;
  for (int k = 0; k < kSamples; ++k) {
    const complex zc = std::polar(spec.cauchy_radius, 2.0 * kPi * (k + 0.5) / kSamples);
    bound = std::max(bound, std::abs(wp_row_sum(zc).value - 1.0 / (zc * zc)));
  }
  // The circle is sampled, not enclosed; a modest factor covers the maximum
  // between samples.
  spec.cauchy_bound = 1.25 * bound;

  spec.laurent = laurent_coefficients(spec.g2, spec.g3, kMaxTerms);

  const double r2 = spec.cauchy_radius * spec.cauchy_radius;
  for (std::size_t bin = 0; bin < kTermBins; ++bin) {
    const double norm_hi = kMaxReducedNorm * static_cast<double>(bin + 1) / kTermBins;
    const double q = norm_hi / r2;
    const double abs_lo = std::sqrt(kMaxReducedNorm * static_cast<double>(bin) / kTermBins);
    std::size_t N = 1;
    while (N < kMaxTerms && laurent_tail_bound(spec.cauchy_bound, q, std::max(abs_lo, spec.pole_cutoff), N) > tail_tolerance) {
      ++N;
    }
    if (N >= kMaxTerms) throw std::runtime_error("LatticeSpec: Laurent tail bound not reachable");
    spec.terms_for_bin[bin] = static_cast<unsigned short>(N);
  }
  return spec;
}

const LatticeSpec& LatticeSpec::square() {
  static const LatticeSpec instance = build();
  return instance;
}

complex reduce_to_fundamental(complex z, const LatticeSpec& lattice) {
  const double px = lattice.period1.real();
  const double py = lattice.period2.imag();
  double x = z.real() - px * std::floor((z.real() + 0.5 * px) / px);
  double y = z.imag() - py * std::floor((z.imag() + 0.5 * py) / py);
  // Rounding can land exactly on the excluded upper edge.
  if (x >= 0.5 * px) x -= px;
  if (y >= 0.5 * py) y -= py;
  return {x, y};
}

WpPair wp_with_derivative(complex z, const LatticeSpec& lattice) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::domain_error("wp: non-finite argument");
  }
  const complex zr = reduce_to_fundamental(z, lattice);
  const double abs_z = std::abs(zr);
  if (abs_z < lattice.pole_cutoff) return {ExtendedComplex::infinity(), ExtendedComplex::infinity()};

  const complex u = zr * zr;
  const double norm = std::norm(zr);
  auto bin = static_cast<std::size_t>(norm / kMaxReducedNorm * LatticeSpec::kTermBins);
  bin = std::min(bin, LatticeSpec::kTermBins - 1);
  const std::size_t N = lattice.terms_for_bin[bin];

  // Horner in u for S(u) = sum_{n=2}^{N} c_n u^(n-2) and
  // D(u) = sum_{n=2}^{N} (2n-2) c_n u^(n-2).
  complex s(0.0);
  complex d(0.0);
  for (std::size_t n = N; n >= 2; --n) {
    const double c = lattice.laurent[n - 2];
    s = s * u + c;
    d = d * u + c * static_cast<double>(2 * n - 2);
  }
  const complex inv_u = 1.0 / u;
  const complex value = inv_u + s * u;
  const complex deriv = zr * (d - 2.0 * inv_u * inv_u);
  return {ExtendedComplex(value), ExtendedComplex(deriv)};
}

ExtendedComplex wp(complex z, const LatticeSpec& lattice) { return wp_with_derivative(z, lattice).value; }

ExtendedComplex wp_prime(complex z, const LatticeSpec& lattice) {
  return wp_with_derivative(z, lattice).derivative;
}

}  // namespace speiser
