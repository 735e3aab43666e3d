#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "speiser/csv.hpp"
#include "speiser/family.hpp"

namespace speiser {

namespace {

constexpr double kMaxPoleRadius = 1e300;

void check_radius(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("enumerate_poles: radius must be positive");
  if (!std::isfinite(radius) || radius > kMaxPoleRadius) {
    throw std::range_error("enumerate_poles: pole coordinates at this radius overflow double precision");
  }
}

// Poles of G (and H): i pi/2 + k pi + l pi i.
template <typename Visit>
void visit_lattice_poles(double radius, complex offset, double spacing, Visit&& visit) {
  const auto kmax = static_cast<long long>(std::ceil(radius / spacing)) + 1;
  for (long long l = -kmax - 1; l <= kmax; ++l) {
    const double y = offset.imag() + spacing * static_cast<double>(l);
    if (std::abs(y) > radius) continue;
    for (long long k = -kmax; k <= kmax; ++k) {
      const complex a(offset.real() + spacing * static_cast<double>(k), y);
      if (std::abs(a) <= radius) visit(a, complex(0.0));
    }
  }
}

// Poles of h_m: images m sin(w/m) of w = k pi + i(pi/2 + l pi) with
// |Re w| < m pi/2. For odd m no lattice point sits on the strip boundary.
template <typename Visit>
void visit_hm_poles(int m, double radius, Visit&& visit) {
  const int half = (m - 1) / 2;
  for (int k = -half; k <= half; ++k) {
    for (int dir : {+1, -1}) {
      for (long long l = dir > 0 ? 0 : -1;; l += dir) {
        const complex w(kPi * k, 0.5 * kPi + kPi * static_cast<double>(l));
        const complex a = hm_pole_image(w, m);
        if (!(std::abs(a) <= radius)) break;
        visit(a, w);
      }
    }
  }
}

template <typename Visit>
void visit_poles(const MapFamily& family, double radius, Visit&& visit) {
  switch (family.tag()) {
    case FamilyTag::G:
    case FamilyTag::H:
      visit_lattice_poles(radius, complex(0.0, 0.5 * kPi), kPi, visit);
      return;
    case FamilyTag::FMax:
      visit_lattice_poles(radius, complex(0.0, 1.0), 2.0, visit);
      return;
    case FamilyTag::Hm:
      visit_hm_poles(family.m(), radius, visit);
      return;
    case FamilyTag::FLambda: {
      const double lam = family.lambda();
      visit_hm_poles(family.m(), radius * lam, [&](complex a, complex w) { visit(a / lam, w); });
      return;
    }
  }
}

}  // namespace

complex hm_pole_image(complex w, int m) {
  const double md = static_cast<double>(m);
  return md * std::sin(w / md);
}

double pole_local_scale(const MapFamily& family, complex pole) {
  switch (family.tag()) {
    case FamilyTag::G:
    case FamilyTag::H:
      return 1.0;
    case FamilyTag::FMax:
      return 2.0 / kPi;
    case FamilyTag::Hm:
    case FamilyTag::FLambda: {
      const double lam = family.has_lambda() ? family.lambda() : 1.0;
      const double md = static_cast<double>(family.m());
      const complex s = lam * pole / md;
      // dz/dw = cos(w/m) = sqrt(1 - s^2) on the principal branch.
      const double scale = std::abs(s) < 1e100 ? std::abs(std::sqrt((1.0 - s) * (1.0 + s))) : std::abs(s);
      return scale / lam;
    }
  }
  return 1.0;
}

double extract_pole_coefficient(const MapFamily& family, complex pole, int multiplicity, double radius, int samples) {
  if (multiplicity < 1 || !(radius > 0.0) || samples < 1) {
    throw std::invalid_argument("extract_pole_coefficient: bad arguments");
  }
  double mean_log = 0.0;
  int used = 0;
  for (int k = 0; k < samples; ++k) {
    const complex z = pole + std::polar(radius, 2.0 * kPi * (k + 0.5) / samples);
    const ExtendedComplex f = evaluate(family, z);
    if (f.is_infinite()) continue;
    mean_log += std::log(std::abs(f.value()));
    ++used;
  }
  if (used == 0) throw std::runtime_error("extract_pole_coefficient: sampling circle lies inside the pole cutoff");
  mean_log /= used;
  return radius * std::exp(mean_log / multiplicity);
}

std::size_t count_poles(const MapFamily& family, double radius) {
  check_radius(radius);
  std::size_t count = 0;
  visit_poles(family, radius, [&](complex, complex) { ++count; });
  return count;
}

std::vector<PoleData> enumerate_poles(const MapFamily& family, double radius, const PoleOptions& options) {
  check_radius(radius);
  const double est = family.tag() == FamilyTag::Hm || family.tag() == FamilyTag::FLambda
                         ? 0.0
                         : radius * radius / (family.tag() == FamilyTag::FMax ? 4.0 / kPi : kPi);
  if (est > static_cast<double>(options.max_count)) {
    throw std::length_error("enumerate_poles: too many poles within radius");
  }
  std::vector<PoleData> poles;
  const int mult = family.pole_multiplicity();
  visit_poles(family, radius, [&](complex a, complex) {
    if (poles.size() >= options.max_count) throw std::length_error("enumerate_poles: too many poles within radius");
    poles.push_back({a, mult, 0.0});
  });
  std::sort(poles.begin(), poles.end(), [](const PoleData& x, const PoleData& y) {
    const double ax = std::abs(x.location);
    const double ay = std::abs(y.location);
    if (ax != ay) return ax < ay;
    return std::arg(x.location) < std::arg(y.location);
  });
  if (options.extract_coefficients) {
    for (auto& pole : poles) {
      const double r = options.relative_radius * pole_local_scale(family, pole.location);
      pole.coeff_magnitude = extract_pole_coefficient(family, pole.location, mult, r, options.samples);
    }
  }
  return poles;
}

void write_poles_csv(std::ostream& os, std::span<const PoleData> poles) {
  os << "re_a,im_a,multiplicity,abs_b\n";
  for (const auto& p : poles) {
    os << format_double(p.location.real()) << ',' << format_double(p.location.imag()) << ',' << p.multiplicity << ','
       << format_double(p.coeff_magnitude) << '\n';
  }
}

ExponentFit local_exponent(const MapFamily& family, complex z0, ExponentKind kind, complex target,
                           const ExponentOptions& options) {
  if (options.radii < 3 || !(options.r_min > 0.0) || !(options.r_max > options.r_min) || options.samples < 4) {
    throw std::invalid_argument("local_exponent: bad options");
  }
  const int n = options.radii;
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  const double log_lo = std::log(options.r_min);
  const double log_hi = std::log(options.r_max);
  for (int i = 0; i < n; ++i) {
    const double lr = log_lo + (log_hi - log_lo) * i / (n - 1);
    const double r = std::exp(lr);
    double mean = 0.0;
    for (int k = 0; k < options.samples; ++k) {
      const complex z = z0 + std::polar(r, 2.0 * kPi * (k + 0.5) / options.samples);
      const ExtendedComplex f = evaluate(family, z);
      if (f.is_infinite()) return {};
      complex g = f.value();
      if (kind == ExponentKind::Value) g -= target;
      const double mag = std::abs(g);
      if (!(mag > 0.0) || !std::isfinite(mag)) return {};
      mean += std::log(mag);
    }
    xs[i] = lr;
    ys[i] = mean / options.samples;
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    ss += r * r;
  }
  ExponentFit fit;
  fit.exponent = kind == ExponentKind::Pole ? -slope : slope;
  fit.residual = std::sqrt(ss / n);
  fit.conclusive = fit.residual <= options.max_residual;
  return fit;
}

}  // namespace speiser
