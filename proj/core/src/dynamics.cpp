#include "speiser/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace speiser {

namespace {

double real_residual(const MapFamily& family, double x) {
  const ExtendedComplex f = evaluate(family, complex(x, 0.0));
  if (f.is_infinite()) throw std::domain_error("fixed point search: pole on the real interval");
  return f.value().real() - x;
}

double lambda_of(const MapFamily& family) { return family.has_lambda() ? family.lambda() : 1.0; }

// log(1 + |w|^2) without overflow.
double log_chordal_weight(complex w) { return 2.0 * std::log(std::hypot(1.0, std::abs(w))); }

}  // namespace

FixedPointData find_attracting_fixed_point(const MapFamily& family) {
  if (!family.has_p()) {
    throw std::invalid_argument("find_attracting_fixed_point: family " + family.describe() + " has no parameter eta");
  }
  const double eta = family.eta();
  constexpr int kScan = 256;
  double lo = 0.0;
  double f_lo = real_residual(family, lo);
  double hi = -1.0;
  for (int i = 1; i <= kScan; ++i) {
    const double x = eta * i / kScan;
    const double fx = real_residual(family, x);
    if ((f_lo > 0.0) != (fx > 0.0)) {
      hi = x;
      break;
    }
    lo = x;
    f_lo = fx;
  }
  if (hi < 0.0) {
    throw NoAttractingFixedPoint("no sign change of f(x) - x on [0, eta] for " + family.describe(), 0.0, eta);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = real_residual(family, mid);
    if ((fm > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  const double root = std::abs(real_residual(family, lo)) <= std::abs(real_residual(family, hi)) ? lo : hi;
  const ExtendedComplex d = eval_deriv(family, complex(root, 0.0));
  const double mult = d.is_finite() ? d.value().real() : std::numeric_limits<double>::infinity();
  if (!(root > 0.0 && root < eta)) {
    throw NoAttractingFixedPoint("fixed point outside (0, eta) for " + family.describe(), 0.0, eta);
  }
  if (!(std::abs(mult) < 1.0)) {
    std::ostringstream os;
    os.precision(6);
    os << "fixed point " << root << " of " << family.describe() << " is not attracting (multiplier " << mult << ")";
    throw NoAttractingFixedPoint(os.str(), 0.0, eta);
  }
  return {root, mult, lambda_of(family)};
}

FixedPointData find_attracting_fixed_point(double lambda, int m, int p, double eta) {
  return find_attracting_fixed_point(MapFamily::flambda(lambda, m, p, eta));
}

Attractor attractor_from(const FixedPointData& fp) {
  return {AttractingCycle{{complex(fp.location, 0.0)}, complex(fp.multiplier, 0.0)}};
}

Attractor find_attracting_cycles(const MapFamily& family, std::span<const complex> seeds,
                                 const CycleSearchOptions& options) {
  Attractor found;
  auto known = [&](complex z) {
    for (const auto& cyc : found) {
      for (complex c : cyc.points) {
        if (std::abs(c - z) < 1e-6 * std::max(1.0, std::abs(c))) return true;
      }
    }
    return false;
  };
  for (complex seed : seeds) {
    complex w = seed;
    bool alive = true;
    for (int i = 0; i < options.iterations; ++i) {
      const ExtendedComplex next = evaluate(family, w);
      if (next.is_infinite()) {
        alive = false;
        break;
      }
      w = next.value();
    }
    if (!alive || known(w)) continue;
    for (int q = 1; q <= options.max_period; ++q) {
      // Orbit segment w, f(w), ..., f^q(w).
      std::vector<complex> orbit{w};
      for (int i = 0; i < q && alive; ++i) {
        const ExtendedComplex next = evaluate(family, orbit.back());
        if (next.is_infinite()) alive = false;
        else orbit.push_back(next.value());
      }
      if (!alive) break;
      if (std::abs(orbit[q] - orbit[0]) >= options.tolerance * std::max(1.0, std::abs(orbit[0]))) continue;
      // Newton polish of f^q(z) = z.
      complex z = orbit[0];
      complex mult(1.0);
      bool ok = true;
      for (int newton = 0; newton < 8 && ok; ++newton) {
        complex v = z;
        mult = 1.0;
        for (int i = 0; i < q; ++i) {
          const Jet j = evaluate_jet(family, v);
          if (j.value.is_infinite() || j.derivative.is_infinite()) {
            ok = false;
            break;
          }
          mult *= j.derivative.value();
          v = j.value.value();
        }
        if (!ok) break;
        const complex denom = mult - 1.0;
        if (std::abs(denom) < 1e-300) break;
        const complex step = (v - z) / denom;
        z -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
      }
      if (!ok || !(std::abs(mult) < 1.0)) break;
      AttractingCycle cyc;
      complex v = z;
      for (int i = 0; i < q; ++i) {
        cyc.points.push_back(v);
        v = evaluate(family, v).value();
      }
      cyc.multiplier = mult;
      if (!known(z)) found.push_back(std::move(cyc));
      break;
    }
  }
  return found;
}

Classification classify_point(complex z, const MapFamily& family, const Attractor& attractor,
                              const ClassifyOptions& options) {
  const bool track_radius = options.pixel_radius > 0.0;
  const double log_threshold = std::log(options.marty_threshold);
  double log_rho = track_radius ? std::log(2.0 * options.pixel_radius) - log_chordal_weight(z) : 0.0;
  int guard_hits = 0;
  complex w = z;
  for (int k = 0;; ++k) {
    for (const auto& cyc : attractor) {
      for (complex c : cyc.points) {
        if (std::abs(w - c) < options.tol) return {PointClass::Fatou, k};
      }
    }
    if (k >= options.max_iter) break;
    const Jet jet = evaluate_jet(family, w);
    if (jet.value.is_infinite()) return {PointClass::Julia, k};
    const complex next = jet.value.value();
    if (track_radius) {
      if (jet.derivative.is_infinite()) return {PointClass::Julia, k};
      log_rho += std::log(std::abs(jet.derivative.value())) + log_chordal_weight(w) - log_chordal_weight(next);
      if (log_rho > log_threshold) return {PointClass::Julia, k};
    }
    w = next;
    if (std::abs(w) > options.guard && ++guard_hits >= options.guard_reentries) return {PointClass::Julia, k};
  }
  return {PointClass::Undetermined, options.max_iter};
}

Classification classify_point(complex z, const MapFamily& family, const FixedPointData& fp, int max_iter,
                              double tol) {
  ClassifyOptions opts;
  opts.max_iter = max_iter;
  opts.tol = tol;
  return classify_point(z, family, attractor_from(fp), opts);
}

complex GridSpec::pixel(int row, int col) const {
  const double step = pixel_size();
  return {center.real() - half_width + (col + 0.5) * step, center.imag() + half_width - (row + 0.5) * step};
}

double RasterResult::fraction(PointClass kind) const {
  if (pixels.empty()) return 0.0;
  const auto n = std::count_if(pixels.begin(), pixels.end(), [kind](const Classification& c) { return c.kind == kind; });
  return static_cast<double>(n) / static_cast<double>(pixels.size());
}

RasterResult render(const GridSpec& grid, const MapFamily& family, const Attractor& attractor,
                    const RenderOptions& options) {
  if (grid.resolution < 2) throw std::invalid_argument("render: resolution must be at least 2");
  if (!(grid.tolerance > 0.0)) throw std::invalid_argument("render: tolerance must be positive");
  if (!(grid.half_width > 0.0)) throw std::invalid_argument("render: half_width must be positive");
  if (grid.max_iterations < 1) throw std::invalid_argument("render: max_iterations must be positive");

  ClassifyOptions copts;
  copts.max_iter = grid.max_iterations;
  copts.tol = grid.tolerance;
  copts.guard = options.guard;
  copts.guard_reentries = options.guard_reentries;
  copts.pixel_radius = options.pixel_test ? 0.5 * grid.pixel_size() : 0.0;
  copts.marty_threshold = options.marty_threshold;

  RasterResult result;
  result.resolution = grid.resolution;
  result.pixels.resize(static_cast<std::size_t>(grid.resolution) * grid.resolution);

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.resolution));

  // Rows are dealt round-robin; each pixel is written exactly once by index.
  auto work = [&](unsigned tid) {
    for (int row = static_cast<int>(tid); row < grid.resolution; row += static_cast<int>(threads)) {
      for (int col = 0; col < grid.resolution; ++col) {
        result.pixels[static_cast<std::size_t>(row) * grid.resolution + col] =
            classify_point(grid.pixel(row, col), family, attractor, copts);
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  return result;
}

RasterResult render(const GridSpec& grid, const MapFamily& family, const FixedPointData& fp,
                    const RenderOptions& options) {
  return render(grid, family, attractor_from(fp), options);
}

complex koenigs_coordinate(const MapFamily& family, const FixedPointData& fp, complex z,
                           const KoenigsOptions& options) {
  const double m = fp.multiplier;
  if (!(std::abs(m) > 0.0 && std::abs(m) < 1.0)) {
    throw std::invalid_argument("koenigs_coordinate: multiplier must satisfy 0 < |m| < 1");
  }
  const complex zeta(fp.location, 0.0);
  if (std::abs(z - zeta) > options.radius) throw KoenigsDomainError("koenigs_coordinate: start point outside the linearization disk");
  // Second-order term of the linearizing map: phi(u) = u + c2 u^2 + O(u^3).
  constexpr double kStep = 1e-5;
  const ExtendedComplex dp = eval_deriv(family, zeta + kStep);
  const ExtendedComplex dm = eval_deriv(family, zeta - kStep);
  if (dp.is_infinite() || dm.is_infinite()) throw KoenigsDomainError("koenigs_coordinate: pole next to the fixed point");
  const complex a2 = (dp.value() - dm.value()) / (4.0 * kStep);
  const complex c2 = a2 / (m - m * m);

  complex w = z;
  complex u = z - zeta;
  complex g = u + c2 * u * u;
  double scale = 1.0;
  for (int n = 1; n <= options.max_iter; ++n) {
    const ExtendedComplex next = evaluate(family, w);
    if (next.is_infinite()) throw KoenigsDomainError("koenigs_coordinate: orbit hit a pole");
    w = next.value();
    u = w - zeta;
    if (std::abs(u) > options.radius) throw KoenigsDomainError("koenigs_coordinate: orbit left the linearization disk");
    scale /= m;
    const complex g_next = (u + c2 * u * u) * scale;
    if (std::abs(g_next - g) < options.tolerance || std::abs(u) < 1e-7) return g_next;
    g = g_next;
  }
  throw KoenigsDomainError("koenigs_coordinate: no convergence");
}

double koenigs_check(const MapFamily& family, const FixedPointData& fp, complex z, const KoenigsOptions& options) {
  const complex g = koenigs_coordinate(family, fp, z, options);
  const ExtendedComplex fz = evaluate(family, z);
  if (fz.is_infinite()) throw KoenigsDomainError("koenigs_check: f(z) is a pole");
  const complex gf = koenigs_coordinate(family, fp, fz.value(), options);
  return std::abs(gf - fp.multiplier * g);
}

ParameterCheck check_parameters(const MapFamily& family) {
  ParameterCheck check;
  try {
    check.fixed_point = find_attracting_fixed_point(family);
  } catch (const std::exception& e) {
    check.reason = e.what();
    return check;
  }
  const double eta = family.eta();
  constexpr int kSamples = 200;
  double prev_f = std::numeric_limits<double>::infinity();
  double prev_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSamples; ++i) {
    const double x = eta * i / kSamples;
    const Jet j = evaluate_jet(family, complex(x, 0.0));
    const double f = j.value.value().real();
    const double d = j.derivative.value().real();
    if (i > 0 && !(f < prev_f)) {
      check.reason = "f is not decreasing on [0, eta]";
      return check;
    }
    if (i > 0 && !(d < prev_d)) {
      check.reason = "f' is not decreasing on [0, eta]";
      return check;
    }
    prev_f = f;
    prev_d = d;
  }

  const Attractor attractor = attractor_from(check.fixed_point);
  for (int i = 0; i <= 64; ++i) {
    const Classification c = classify_point(complex(eta * i / 64, 0.0), family, attractor,
                                            ClassifyOptions{.max_iter = 2000, .tol = 1e-9});
    if (c.kind != PointClass::Fatou) {
      check.reason = "[0, eta] is not contained in the basin of the fixed point";
      return check;
    }
  }

  // f'' by central differences of f' on |z| = eta; winding number 0 and no
  // zero on the circle mean f'' has no zero in the closed disk.
  constexpr int kCircle = 512;
  const double h = 1e-5 * eta;
  double winding = 0.0;
  double prev_arg = 0.0;
  double min_mag = std::numeric_limits<double>::infinity();
  double max_mag = 0.0;
  for (int k = 0; k <= kCircle; ++k) {
    const complex z = std::polar(eta, 2.0 * kPi * k / kCircle);
    const complex dp = eval_deriv(family, z + h).value();
    const complex dm = eval_deriv(family, z - h).value();
    const complex f2 = (dp - dm) / (2.0 * h);
    min_mag = std::min(min_mag, std::abs(f2));
    max_mag = std::max(max_mag, std::abs(f2));
    const double a = std::arg(f2);
    if (k > 0) {
      double da = a - prev_arg;
      while (da > kPi) da -= 2.0 * kPi;
      while (da < -kPi) da += 2.0 * kPi;
      winding += da;
    }
    prev_arg = a;
  }
  if (!(min_mag > 1e-6 * max_mag) || std::lround(winding / (2.0 * kPi)) != 0) {
    check.reason = "f'' vanishes somewhere in 0 < |z| <= eta";
    return check;
  }
  check.ok = true;
  return check;
}

double select_eta(int p, std::span<const double> candidates) {
  std::vector<double> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (double eta : sorted) {
    if (!(eta > 0.0 && eta < 0.5 * kPi)) continue;
    if (check_parameters(MapFamily::h(p, eta)).ok) return eta;
  }
  throw std::runtime_error("select_eta: no candidate eta passes the parameter checks");
}

}  // namespace speiser
