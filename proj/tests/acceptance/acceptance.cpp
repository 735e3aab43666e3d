#define DOCTEST_CONFIG_DISABLE
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "property.hpp"
#include "speiser/dimension.hpp"
#include "speiser/dynamics.hpp"
#include "speiser/elliptic.hpp"
#include "speiser/family.hpp"
#include "speiser/regression.hpp"
#include "speiser_cli/commands.hpp"
#include "speiser_cli/config.hpp"

using namespace speiser;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using clk = std::chrono::steady_clock;

double seconds_since(clk::time_point t0) { return std::chrono::duration<double>(clk::now() - t0).count(); }

double rel(complex a, complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

const cli::ExperimentConfig& defaults() {
  static const cli::ExperimentConfig config = cli::parse_config("");
  return config;
}

void elliptic_oracle(Outcome& o) {
  const auto t0 = clk::now();
  prop::Gen gen(20261018);
  double worst = 0.0, worst_tail = 0.0, worst_ode = 0.0;
  const double g2 = LatticeSpec::square().g2;
  for (int i = 0; i < 100; ++i) {
    complex z;
    do {
      z = gen.in_box(kPi / 2);
    } while (std::abs(z) < 1e-3);
    const auto ref = oracle::wp_by_rows(z, 1e-12);
    worst_tail = std::max(worst_tail, ref.tail_bound);
    const auto pair = wp_with_derivative(z);
    const complex w = pair.value.value(), d = pair.derivative.value();
    worst = std::max(worst, rel(w, ref.value));
    const complex rhs = 4.0 * w * w * w - g2 * w;
    worst_ode = std::max(worst_ode, std::abs(d * d - rhs) / std::max(std::abs(rhs), std::abs(d * d)));
  }
  const double elapsed = seconds_since(t0);
  o.detail << "max rel err " << worst << ", oracle tail " << worst_tail << ", ODE residual " << worst_ode << ", "
           << elapsed << " s";
  o.require(worst_tail < 1e-9, "tail bound");
  o.require(worst < 1e-8, "oracle match");
  o.require(worst_ode < 1e-7, "ODE residual");
  o.require(elapsed < 5.0, "runtime");
}

void forced_values(Outcome& o) {
  const double g_half = eval_G(kPi / 2).modulus();
  const double g_zero = std::abs(eval_G(0.0).value() - 1.0);
  const double f_zero = std::abs(eval_fmax(0.0).value() - complex(0, 1));
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double v = eval_G(-3.0 * kPi + 6.0 * kPi * i / 4000.0).real();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  o.detail << "|G(pi/2)| " << g_half << ", |G(0)-1| " << g_zero << ", |f(0)-i| " << f_zero << ", G(R) in [" << lo << ", "
           << hi << "]";
  o.require(g_half < 1e-9 && g_zero < 1e-9 && f_zero < 1e-9, "forced values");
  o.require(lo >= -1e-9 && hi <= 1.0 + 1e-9, "real range");
}

void multiplicities(Outcome& o) {
  double worst = 0.0;
  auto fit = [&](const MapFamily& f, complex z0, ExponentKind kind, complex target, double expected) {
    const double e = local_exponent(f, z0, kind, target).exponent;
    worst = std::max(worst, std::abs(e - expected));
  };
  fit(MapFamily::g(), kPi / 2, ExponentKind::Zero, 0.0, 4);
  fit(MapFamily::g(), complex(0, kPi / 2), ExponentKind::Pole, 0.0, 4);
  fit(MapFamily::g(), 0.0, ExponentKind::Value, 1.0, 2);
  const int m = defaults().m;
  for (int p : {1, 2}) {
    const MapFamily hm = MapFamily::hm(m, p, defaults().eta);
    fit(hm, enumerate_poles(hm, 4.0).front().location, ExponentKind::Pole, 0.0, 4 * p);
    fit(hm, static_cast<double>(m), ExponentKind::Zero, 0.0, 2 * p);
  }
  o.detail << "worst deviation " << worst << " (m = " << m << ")";
  o.require(worst <= 0.05, "exponent tolerance");
}

void bowen(Outcome& o) {
  const std::vector<double> two(2, 0.5), four(4, 0.5);
  const double e2 = std::abs(solve_bowen(two) - 1.0), e4 = std::abs(solve_bowen(four) - 2.0);
  o.require(e2 <= 1e-12 && e4 <= 1e-12, "exact systems");
  prop::Gen gen(4);
  int monotone = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> b(static_cast<std::size_t>(gen.integer(2, 30)));
    for (double& x : b) x = gen.uniform(0.01, 0.95);
    const double t = solve_bowen(b);
    b.push_back(gen.uniform(0.01, 0.95));
    const double t_more = solve_bowen(b);
    monotone += (std::pow(b.back(), t) > 1e-9 ? t_more > t : t_more >= t) ? 1 : 0;
  }
  o.require(monotone == 100, "monotone under insertion");
  const auto poles = enumerate_poles(MapFamily::h(1, 0.25), 200.0, PoleOptions{false});
  const auto b = synthetic_branches(poles, 0, 9999, 4, 2.0).contractions();
  const std::vector<std::size_t> counts = {100, 1000, 10000};
  const auto table = bowen_convergence(b, counts);
  o.detail << "|t-1| " << e2 << ", |t-2| " << e4 << ", insertion " << monotone << "/100, t(N) =";
  for (const auto& row : table) o.detail << " " << row.t;
  o.require(table[0].t < table[1].t && table[1].t < table[2].t, "t(N) increasing");
  o.require(table[2].t >= 1.5, "t(1e4) >= 1.5");
}

void series(Outcome& o) {
  const auto hm_poles = enumerate_poles(MapFamily::hm(21, 1, 0.25), 1e4);
  double worst = 0.0;
  for (double lambda : {0.1, 0.5, 0.9}) {
    auto scaled = hm_poles;
    for (auto& p : scaled) {
      p.location /= lambda;
      p.coeff_magnitude /= lambda;
    }
    for (double t : {0.05, 0.5, 1.0, 1.6}) {
      const auto base = series_terms(hm_poles, t, 4), s = series_terms(scaled, t, 4);
      const double factor = std::pow(lambda, t / 4.0);
      for (std::size_t i = 0; i < base.size(); ++i) worst = std::max(worst, std::abs(s[i] - factor * base[i]) / (factor * base[i]));
    }
  }
  o.require(worst <= 1e-15, "scaling identity");
  std::vector<PoleData> synthetic;
  for (int j = 1; j <= 5000; ++j) synthetic.push_back({complex(std::sqrt(static_cast<double>(j)), 0.0), 1, 1.0});
  const double t_star = series_exponent(synthetic).value;
  const double t_oracle = oracle::p_series_threshold(0.5, 1);
  o.require(std::abs(t_star - t_oracle) <= 0.02, "p-series exponent");
  const auto hm = series_exponent(enumerate_poles(MapFamily::hm(defaults().m, 1, defaults().eta), defaults().pole_radius));
  o.require(hm.value < 0.1, "h_m exponent");
  o.detail << "scaling rel err " << worst << ", p-series t* " << t_star << " (oracle " << t_oracle << "), h_m exponent "
           << hm.value;
}

void fixed_points(Outcome& o) {
  const auto& c = defaults();
  double prev = 1.0, worst_residual = 0.0, worst_koenigs = 0.0;
  bool inside = true, decreasing = true;
  double m1 = 0.0;
  for (int i = 1; i <= 10; ++i) {
    const double lambda = 0.1 * i;
    const MapFamily f = MapFamily::flambda(lambda, c.m, c.p, c.eta);
    const auto fp = find_attracting_fixed_point(lambda, c.m, c.p, c.eta);
    inside = inside && fp.location > 0.0 && fp.location < c.eta;
    worst_residual = std::max(worst_residual, std::abs(evaluate(f, fp.location).value() - fp.location));
    worst_koenigs = std::max(worst_koenigs, koenigs_check(f, fp, fp.location + 1e-4));
    decreasing = decreasing && fp.multiplier < prev;
    prev = fp.multiplier;
    if (i == 10) m1 = fp.multiplier;
  }
  o.detail << "residual " << worst_residual << ", Koenigs " << worst_koenigs << ", m_1 " << m1;
  o.require(inside, "zeta in (0, eta)");
  o.require(worst_residual < 1e-12, "fixed-point residual");
  o.require(decreasing, "multiplier decreasing");
  o.require(worst_koenigs < 1e-8, "Koenigs residual");
  o.require(m1 < 0.0, "m_1 < 0");
}

void fmax_surrogate(Outcome& o) {
  const auto t0 = clk::now();
  GridSpec grid;
  grid.half_width = 2.0;
  grid.resolution = 512;
  grid.max_iterations = 500;
  const MapFamily f = MapFamily::fmax();
  const Attractor attractor = cli::attractor_for(f, grid);
  const auto raster = render(grid, f, attractor);
  const double elapsed = seconds_since(t0);
  const double attracted = raster.fraction(PointClass::Fatou);
  o.detail << attractor.size() << " attracting cycles, attracted fraction " << attracted << ", undetermined "
           << raster.fraction(PointClass::Undetermined) << ", " << elapsed << " s";
  o.require(attracted < 0.01, "attracted fraction");
  o.require(elapsed < 60.0, "runtime");
}

void box_calibration(Outcome& o) {
  const auto scales = default_box_scales();
  const double seg = box_counting(oracle::segment(512), scales).value;
  const double sq = box_counting(oracle::filled_square(512), scales).value;
  const double carpet = box_counting(oracle::sierpinski_carpet(6), scales).value;
  o.detail << "segment " << seg << ", square " << sq << ", carpet " << carpet;
  o.require(std::abs(seg - 1.0) <= 0.05, "segment");
  o.require(std::abs(sq - 2.0) <= 0.05, "square");
  o.require(std::abs(carpet - std::log(8.0) / std::log(3.0)) <= 0.05, "carpet");
}

void envelopes(Outcome& o) {
  o.require(qc_dilatation(-0.2, -0.2).K == 1.0, "K(lambda, lambda) = 1");
  prop::Gen gen(9);
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    const double d = gen.uniform(0.05, 2.0), K = 1.0 + gen.uniform(1e-3, 3.0);
    const auto h = continuity_envelope(d, K, EnvelopeMode::Holder);
    const auto a = continuity_envelope(d, K, EnvelopeMode::Astala);
    inside += (h.lo < a.lo && (a.hi < h.hi || h.hi == 2.0)) ? 1 : 0;
  }
  o.require(inside == 1000, "Astala inside Holder");
  const auto rows = cli::run_sweep(defaults());
  int steps = 0, hits = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!rows[i].ok || !rows[i].astala) continue;
    ++steps;
    hits += rows[i].box.value >= rows[i].astala->lo - 0.15 && rows[i].box.value <= rows[i].astala->hi + 0.15 ? 1 : 0;
  }
  o.detail << "Astala inside Holder " << inside << "/1000, sweep steps within widened envelope " << hits << "/" << steps;
  o.require(steps > 0 && hits >= 0.9 * steps, "sweep envelope");
}

void order_zero(Outcome& o) {
  const MapFamily hm = MapFamily::hm(defaults().m, defaults().p, defaults().eta);
  std::vector<double> x, y;
  for (int i = 0; i <= 60; ++i) {
    const double r = std::pow(10.0, 1.0 + 3.0 * i / 60.0);
    x.push_back(std::log(r));
    y.push_back(static_cast<double>(count_poles(hm, r)));
  }
  const auto fit = fit_line(x, y);
  o.detail << "n(r) ~ " << fit.intercept << " + " << fit.slope << " log r, R^2 " << fit.r_squared;
  o.require(fit.r_squared > 0.9, "R^2");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"Elliptic oracle", elliptic_oracle},
      {"Forced values", forced_values},
      {"Multiplicity exponents", multiplicities},
      {"Bowen solver", bowen},
      {"Series machinery", series},
      {"Fixed point and multiplier", fixed_points},
      {"J = sphere surrogate", fmax_surrogate},
      {"Box-counting calibration", box_calibration},
      {"Continuity envelopes", envelopes},
      {"Order-zero sanity", order_zero},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    o.detail.precision(6);
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
