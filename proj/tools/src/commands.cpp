#include "speiser_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "speiser/csv.hpp"
#include "speiser/elliptic.hpp"
#include "speiser/regression.hpp"

namespace speiser::cli {

namespace {

double rel_err(complex a, complex b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

CheckResult check(std::string name, double measured, double limit, std::string detail = {}) {
  return CheckResult{std::move(name), measured <= limit, measured, limit, std::move(detail)};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  return os;
}

std::string output_path(const ExperimentConfig& config, const std::string& fallback) {
  return config.out.empty() ? fallback : config.out;
}

// Exceptions from the numerical layer get the family attached.
template <typename F>
auto with_context(const MapFamily& family, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(family.describe() + ": " + e.what());
  }
}

}  // namespace

// -- verify -----------------------------------------------------------------

std::vector<CheckResult> run_checks(const ExperimentConfig& config) {
  std::vector<CheckResult> out;
  const auto& L = LatticeSpec::square();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> half(-kPi / 2, kPi / 2);
  std::vector<complex> pts;
  while (static_cast<int>(pts.size()) < config.verify_points) {
    const complex z(half(rng), half(rng));
    if (std::abs(z) > 0.05) pts.push_back(z);
  }

  double oracle = 0.0, ode = 0.0;
  for (complex z : pts) {
    const auto w = wp_with_derivative(z);
    oracle = std::max(oracle, rel_err(w.value.value(), wp_row_sum(z, 1e-15).value));
    const complex p = w.value.value(), dp = w.derivative.value();
    const complex rhs = 4.0 * p * p * p - L.g2 * p;
    ode = std::max(ode, std::abs(dp * dp - rhs) / std::max(std::abs(rhs), std::abs(dp * dp)));
  }
  out.push_back(check("wp matches lattice row sums", oracle, 1e-8));
  out.push_back(check("wp differential equation", ode, 1e-7));
  const double e1_closed = std::pow(std::tgamma(0.25), 4) / (8.0 * kPi * kPi * kPi);
  out.push_back(check("wp(pi/2) = Gamma(1/4)^4 / (8 pi^3)", std::abs(wp(kPi / 2).real() - e1_closed), 1e-12));

  out.push_back(check("G(pi/2) = 0", eval_G(kPi / 2).modulus(), 1e-9));
  out.push_back(check("G(0) = 1", std::abs(eval_G(0.0).value() - 1.0), 1e-9));
  out.push_back(check("iG(pi z/2) at 0 = i", std::abs(eval_fmax(0.0).value() - complex(0, 1)), 1e-9));
  double range_excess = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double g = eval_G(-2.0 * kPi + 4.0 * kPi * i / 400.0).real();
    range_excess = std::max({range_excess, -g, g - 1.0});
  }
  out.push_back(check("G(R) inside [0, 1]", range_excess, 1e-9));

  const MapFamily G = MapFamily::g();
  const MapFamily hm = MapFamily::hm(config.m, config.p, config.eta);
  const int q = 4 * config.p;
  auto exponent_check = [&](const std::string& name, const MapFamily& f, complex z0, ExponentKind kind, complex target,
                            double expected) {
    const auto fit = local_exponent(f, z0, kind, target);
    std::ostringstream detail;
    detail << "fit " << format_double(fit.exponent) << " expected " << expected;
    out.push_back(check(name, std::abs(fit.exponent - expected), 0.05, detail.str()));
  };
  exponent_check("G zero order 4", G, kPi / 2, ExponentKind::Zero, 0.0, 4);
  exponent_check("G pole order 4", G, complex(0, kPi / 2), ExponentKind::Pole, 0.0, 4);
  exponent_check("G 1-point order 2", G, 0.0, ExponentKind::Value, 1.0, 2);
  const complex hm_pole = enumerate_poles(hm, 4.0).front().location;
  exponent_check("h_m pole order 4p", hm, hm_pole, ExponentKind::Pole, 0.0, q);
  exponent_check("h_m zero at m order 2p", hm, static_cast<double>(config.m), ExponentKind::Zero, 0.0, 2 * config.p);

  double even = 0.0, sym = 0.0, branch = 0.0;
  for (complex z : pts) {
    const complex g = eval_G(z).value();
    even = std::max(even, rel_err(eval_G(-z).value(), g));
    const complex w = 3.0 * z;
    const auto h = eval_hm(w, config.m, config.p, config.eta);
    if (h.is_infinite()) continue;
    sym = std::max(sym, rel_err(eval_hm(std::conj(w), config.m, config.p, config.eta).value(), std::conj(h.value())));
    const auto a = eval_hm_branch(w, config.m, config.p, config.eta, false);
    const auto b = eval_hm_branch(w, config.m, config.p, config.eta, true);
    if (a.is_finite() && b.is_finite()) branch = std::max(branch, rel_err(a.value(), b.value()));
  }
  out.push_back(check("G even", even, 1e-12));
  out.push_back(check("h_m real-symmetric", sym, 1e-12));
  out.push_back(check("h_m arcsin branches agree", branch, 1e-9));

  const auto params = check_parameters(hm);
  out.push_back(CheckResult{"h_m parameter conditions", params.ok, params.ok ? 0.0 : 1.0, 0.0, params.reason});
  try {
    const MapFamily f = MapFamily::flambda(config.lambda, config.m, config.p, config.eta);
    const auto fp = find_attracting_fixed_point(config.lambda, config.m, config.p, config.eta);
    const double residual = std::abs(evaluate(f, fp.location).value() - fp.location);
    const bool inside = fp.location > 0.0 && fp.location < config.eta;
    out.push_back(CheckResult{"fixed point in (0, eta)", inside && residual < 1e-12, residual, 1e-12,
                              "zeta " + format_double(fp.location) + " multiplier " +
                                  format_double(fp.multiplier)});
    out.push_back(check("Koenigs functional equation", koenigs_check(f, fp, fp.location + 0.01), 1e-8));
  } catch (const std::exception& e) {
    out.push_back(CheckResult{"fixed point in (0, eta)", false, 1.0, 0.0, e.what()});
  }
  return out;
}

int cmd_verify(const ExperimentConfig& config, std::ostream& report) {
  const auto results = run_checks(config);
  int failed = 0;
  for (const auto& r : results) {
    report << (r.passed ? "PASS " : "FAIL ") << r.name << "  measured=" << format_double(r.measured)
           << " limit=" << format_double(r.limit);
    if (!r.detail.empty()) report << "  (" << r.detail << ")";
    report << '\n';
    failed += r.passed ? 0 : 1;
  }
  report << (results.size() - failed) << "/" << results.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

// -- render -----------------------------------------------------------------

GridSpec grid_from(const ExperimentConfig& config, double scale) {
  GridSpec grid;
  grid.center = complex(config.center_re, config.center_im);
  grid.half_width = config.half_width * scale;
  grid.resolution = config.resolution;
  grid.max_iterations = config.max_iter;
  grid.tolerance = config.tolerance;
  return grid;
}

Attractor attractor_for(const MapFamily& family, const GridSpec& grid) {
  if (family.has_p()) {
    try {
      return attractor_from(find_attracting_fixed_point(family));
    } catch (const NoAttractingFixedPoint&) {
    }
  }
  std::vector<complex> seeds = {0.0, 1.0, complex(0, 1), -1.0, complex(0, -1)};
  if (family.has_p()) seeds.push_back(family.eta());
  constexpr int kSeedGrid = 7;
  for (int i = 0; i < kSeedGrid; ++i) {
    for (int j = 0; j < kSeedGrid; ++j) {
      const double x = (i + 0.5) / kSeedGrid * 2.0 - 1.0, y = (j + 0.5) / kSeedGrid * 2.0 - 1.0;
      seeds.push_back(grid.center + grid.half_width * complex(x, y));
    }
  }
  return find_attracting_cycles(family, seeds);
}

namespace {

RenderOptions render_options(const ExperimentConfig& config) {
  RenderOptions opts;
  opts.threads = config.threads;
  return opts;
}

}  // namespace

int cmd_render(const ExperimentConfig& config, std::ostream& report) {
  const MapFamily family = config.map();
  const GridSpec grid = grid_from(config);
  const auto raster = with_context(family, [&] {
    const Attractor attractor = attractor_for(family, grid);
    return render(grid, family, attractor, render_options(config));
  });
  const std::string path = output_path(config, "render.pgm");
  std::vector<std::string> comments;
  std::istringstream cfg(serialize(config));
  for (std::string line; std::getline(cfg, line);) comments.push_back(line);
  auto os = open_output(path);
  write_pgm(os, raster, comments);
  report << family.describe() << " " << raster.resolution << "x" << raster.resolution
         << " julia=" << format_double(raster.fraction(PointClass::Julia))
         << " fatou=" << format_double(raster.fraction(PointClass::Fatou))
         << " undetermined=" << format_double(raster.fraction(PointClass::Undetermined)) << " -> " << path << '\n';
  return 0;
}

// -- sweep ------------------------------------------------------------------

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  std::vector<SweepRow> rows;
  std::optional<std::size_t> previous;
  for (double lambda : config.lambda_grid) {
    SweepRow row;
    row.lambda = lambda;
    try {
      const MapFamily family = MapFamily::flambda(lambda, config.m, config.p, config.eta);
      row.fixed_point = find_attracting_fixed_point(family);
      const GridSpec grid = grid_from(config, config.scale_window ? 1.0 / lambda : 1.0);
      const auto raster = render(grid, family, attractor_from(row.fixed_point), render_options(config));
      row.julia_fraction = raster.fraction(PointClass::Julia);
      row.box = box_counting(raster, config.box_scales);
      row.ok = true;
      if (previous) {
        const SweepRow& prev = rows[*previous];
        row.dilatation = qc_dilatation(row.fixed_point.multiplier, prev.fixed_point.multiplier);
        if (prev.box.value > 0.0) {
          row.holder = continuity_envelope(prev.box.value, row.dilatation->K, EnvelopeMode::Holder);
          row.astala = continuity_envelope(prev.box.value, row.dilatation->K, EnvelopeMode::Astala);
        }
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.failure = e.what();
    }
    rows.push_back(row);
    if (rows.back().ok) previous = rows.size() - 1;
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "lambda,status,fixed_point,multiplier,box_dim,box_lo,box_hi,julia_fraction,K,sign_mismatch,"
        "holder_lo,holder_hi,astala_lo,astala_hi\n";
  for (const auto& r : rows) {
    os << format_double(r.lambda) << ',';
    if (!r.ok) {
      std::string why = r.failure;
      std::replace(why.begin(), why.end(), ',', ';');
      std::replace(why.begin(), why.end(), '\n', ' ');
      os << "failed: " << why << ",,,,,,,,,,,,\n";
      continue;
    }
    os << "ok," << format_double(r.fixed_point.location) << ',' << format_double(r.fixed_point.multiplier)
       << ',' << format_double(r.box.value) << ',' << format_double(r.box.lo) << ',' << format_double(r.box.hi) << ','
       << format_double(r.julia_fraction) << ',';
    if (r.dilatation) {
      os << format_double(r.dilatation->K) << ',' << (r.dilatation->sign_mismatch ? 1 : 0) << ',';
    } else {
      os << ",,";
    }
    if (r.holder && r.astala) {
      os << format_double(r.holder->lo) << ',' << format_double(r.holder->hi) << ',' << format_double(r.astala->lo)
         << ',' << format_double(r.astala->hi);
    } else {
      os << ",,,";
    }
    os << '\n';
  }
}

int cmd_sweep(const ExperimentConfig& config, std::ostream& report) {
  const auto rows = run_sweep(config);
  const std::string path = output_path(config, "sweep.csv");
  auto os = open_output(path);
  os << config_comment(config);
  write_sweep_csv(os, rows);
  int failed = 0;
  for (const auto& r : rows) {
    report << "lambda=" << format_double(r.lambda);
    if (r.ok) {
      report << " multiplier=" << format_double(r.fixed_point.multiplier)
             << " box_dim=" << format_double(r.box.value);
    } else {
      report << " failed: " << r.failure;
      ++failed;
    }
    report << '\n';
  }
  report << rows.size() - failed << "/" << rows.size() << " grid points -> " << path << '\n';
  return 0;
}

// -- dimension ----------------------------------------------------------------

namespace {

std::vector<PoleData> leading_poles(const MapFamily& family, std::size_t n, bool coefficients) {
  double radius = 8.0;
  while (count_poles(family, radius) < n) {
    if (radius >= 1e300) throw std::runtime_error("fewer than " + std::to_string(n) + " poles below 1e300");
    radius = std::min(radius * 2.0, 1e300);
  }
  PoleOptions opts;
  opts.extract_coefficients = coefficients;
  auto poles = enumerate_poles(family, radius, opts);
  poles.resize(n);
  return poles;
}

void add_bowen_table(std::vector<DimensionEstimate>& out, const IFSBranchSet& set, std::span<const std::size_t> counts,
                     const std::string& mode, std::ostream& log) {
  const auto b = set.contractions();
  for (std::size_t n : counts) {
    if (n > b.size()) {
      log << mode << ": skipping N=" << n << " (only " << b.size() << " branches)\n";
      continue;
    }
    const double t = solve_bowen(std::span<const double>(b).first(n));
    std::ostringstream meta;
    meta << "mode=" << mode << ";N=" << n << ";base=" << set.base_index;
    out.push_back({std::min(t, 2.0), DimensionMethod::BowenLower, std::min(t, 2.0), std::min(t, 2.0), meta.str()});
    log << mode << " t(" << n << ") = " << format_double(t) << '\n';
  }
}

double family_order(const MapFamily& family) {
  return family.tag() == FamilyTag::Hm || family.tag() == FamilyTag::FLambda ? 0.0 : 2.0;
}

}  // namespace

std::vector<DimensionEstimate> run_dim_lower(const ExperimentConfig& config, std::ostream& log) {
  const MapFamily family = config.map();
  return with_context(family, [&] {
    std::vector<DimensionEstimate> out;
    const int q = family.pole_multiplicity();
    const std::size_t max_count = *std::max_element(config.counts.begin(), config.counts.end());
    if (config.bowen_mode != "measured") {
      const auto poles = leading_poles(family, max_count, false);
      const auto set = synthetic_branches(poles, 0, poles.size() - 1, q, config.synthetic_c);
      add_bowen_table(out, set, config.counts, "synthetic", log);
    }
    if (config.bowen_mode != "synthetic") {
      auto probe = leading_poles(family, 4096, true);
      std::size_t M = suggest_base_index(probe, config.r0);
      while (M == probe.size() && probe.size() < (std::size_t{1} << 22)) {
        probe = leading_poles(family, probe.size() * 4, true);
        M = suggest_base_index(probe, config.r0);
      }
      if (M == probe.size()) throw std::runtime_error("no pole satisfies the base-disc condition for r0");
      const auto poles = leading_poles(family, M + config.branches, true);
      BranchOptions opts{config.r0, config.r1};
      opts.threads = config.threads;
      const auto set = estimate_branch_contractions(family, poles, M, M + config.branches - 1, opts);
      for (const auto& why : set.rejected) log << "rejected " << why << '\n';
      std::vector<std::size_t> counts(config.counts.begin(), config.counts.end());
      if (std::find(counts.begin(), counts.end(), set.branches.size()) == counts.end()) counts.push_back(set.branches.size());
      std::sort(counts.begin(), counts.end());
      add_bowen_table(out, set, counts, "measured", log);
    }
    const double lower = formula_lower(q);
    out.push_back({lower, DimensionMethod::FormulaLower, lower, 2.0, "q=" + std::to_string(q)});
    return out;
  });
}

std::vector<DimensionEstimate> run_dim_upper(const ExperimentConfig& config, std::ostream& log) {
  const MapFamily family = config.map();
  return with_context(family, [&] {
    std::vector<DimensionEstimate> out;
    const std::size_t cap = *std::max_element(config.counts.begin(), config.counts.end());
    const std::size_t available = count_poles(family, config.pole_radius);
    const auto poles = available > cap ? leading_poles(family, cap, true) : enumerate_poles(family, config.pole_radius);
    log << poles.size() << " poles";
    if (available > cap) log << " (first " << cap << " of " << available << " with |a| <= " << format_double(config.pole_radius) << ")";
    log << '\n';
    std::vector<std::size_t> counts;
    for (std::size_t n : config.counts) {
      if (n >= 20 && n < poles.size()) counts.push_back(n);
    }
    counts.push_back(poles.size());
    for (std::size_t n : counts) {
      auto est = series_exponent(std::span<const PoleData>(poles).first(n));
      log << "series exponent over " << n << " poles = " << format_double(est.value) << " [" << format_double(est.lo)
          << ", " << format_double(est.hi) << "]\n";
      out.push_back(est);
    }
    const int M = family.pole_multiplicity();
    const double rho = family_order(family);
    const double upper = formula_upper(M, rho);
    out.push_back({upper, DimensionMethod::FormulaUpper, 0.0, upper,
                   "M=" + std::to_string(M) + ";rho=" + format_double(rho)});
    return out;
  });
}

namespace {

int write_estimates(const ExperimentConfig& config, const std::vector<DimensionEstimate>& rows,
                    const std::string& fallback, std::ostream& report) {
  const std::string path = output_path(config, fallback);
  auto os = open_output(path);
  os << config_comment(config);
  write_estimates_csv(os, rows, config.map().describe());
  report << rows.size() << " rows -> " << path << '\n';
  return 0;
}

}  // namespace

int cmd_dim_lower(const ExperimentConfig& config, std::ostream& report) {
  return write_estimates(config, run_dim_lower(config, report), "dim_lower.csv", report);
}

int cmd_dim_upper(const ExperimentConfig& config, std::ostream& report) {
  return write_estimates(config, run_dim_upper(config, report), "dim_upper.csv", report);
}

}  // namespace speiser::cli
