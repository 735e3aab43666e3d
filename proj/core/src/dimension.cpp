#include "speiser/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "speiser/csv.hpp"
#include "speiser/regression.hpp"

namespace speiser {

double formula_upper(int M, double rho) {
  if (M < 1) throw std::invalid_argument("formula_upper: M must be positive");
  if (!(rho >= 0.0)) throw std::invalid_argument("formula_upper: rho must be nonnegative");
  if (std::isinf(rho)) return 2.0;
  const double mr = static_cast<double>(M) * rho;
  return 2.0 * mr / (2.0 + mr);
}

double formula_lower(int q) {
  if (q < 1) throw std::invalid_argument("formula_lower: q must be positive");
  return 2.0 * q / (q + 1.0);
}

std::vector<double> IFSBranchSet::contractions() const {
  std::vector<double> out;
  out.reserve(branches.size());
  for (const auto& b : branches) out.push_back(b.contraction);
  return out;
}

// -- Bowen ------------------------------------------------------------------

namespace {

void check_contractions(std::span<const double> b) {
  if (b.size() < 2) {
    throw DegenerateSystemError("solve_bowen: at least two branches are needed (got " + std::to_string(b.size()) + ")");
  }
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (!(b[k] > 0.0 && b[k] < 1.0)) {
      throw ContractionViolation("solve_bowen: branch " + std::to_string(k) + " has b = " + format_double(b[k]) +
                                 " outside (0, 1)");
    }
  }
}

}  // namespace

double bowen_sum(std::span<const double> contractions, double t) {
  double s = 0.0;
  for (double b : contractions) s += std::pow(b, t);
  return s;
}

double solve_bowen(std::span<const double> contractions) {
  check_contractions(contractions);
  double lo = 0.0, hi = 1.0;
  while (bowen_sum(contractions, hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (bowen_sum(contractions, mid) > 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double solve_bowen(const IFSBranchSet& branches) {
  const auto b = branches.contractions();
  return solve_bowen(std::span<const double>(b));
}

std::vector<BowenPoint> bowen_convergence(std::span<const double> contractions, std::span<const std::size_t> counts) {
  std::vector<BowenPoint> out;
  out.reserve(counts.size());
  for (std::size_t n : counts) {
    if (n > contractions.size()) throw std::out_of_range("bowen_convergence: count exceeds the branch list");
    out.push_back({n, solve_bowen(contractions.first(n))});
  }
  return out;
}

// -- branch contractions ----------------------------------------------------------

namespace {

constexpr int kNewtonSteps = 60;

struct PoleModel {
  complex pole;
  int q = 1;
  double probe = 0.0;
  complex inv_probe_value;  // 1 / f(pole + probe)
};

PoleModel make_model(const MapFamily& family, complex pole, int q) {
  PoleModel m{pole, q, 1e-3 * pole_local_scale(family, pole), {}};
  const ExtendedComplex v = evaluate(family, pole + m.probe);
  m.inv_probe_value = reciprocal(v).value();
  return m;
}

// Leading-term guess for f(v) = target with v near the pole.
complex model_guess(const PoleModel& m, complex target) {
  return m.pole + m.probe * std::pow(1.0 / (m.inv_probe_value * target), 1.0 / m.q);
}

// Newton on 1/f(v) - 1/target, staying within `limit` of the pole.
std::optional<complex> solve_near_pole(const MapFamily& family, const PoleModel& m, complex target, complex guess,
                                       double limit) {
  complex v = guess;
  for (int i = 0; i < kNewtonSteps; ++i) {
    const Jet jet = evaluate_jet(family, v);
    if (jet.value.is_infinite()) {
      v += 1e-9 * limit;
      continue;
    }
    if (jet.derivative.is_infinite()) return std::nullopt;
    const complex f = jet.value.value();
    const complex df = jet.derivative.value();
    if (df == complex(0.0)) return std::nullopt;
    const complex step = f * (1.0 - f / target) / df;
    v += step;
    if (!(std::abs(v - m.pole) < limit)) return std::nullopt;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(v))) return v;
  }
  return std::nullopt;
}

double derivative_modulus(const MapFamily& family, complex z) {
  const ExtendedComplex d = eval_deriv(family, z);
  return d.is_infinite() ? std::numeric_limits<double>::infinity() : d.modulus();
}

struct BranchOutcome {
  std::optional<IFSBranch> branch;
  std::string diagnostic;
};

BranchOutcome measure_branch(const MapFamily& family, const PoleModel& base, const PoleData& pole, std::size_t index,
                             const BranchOptions& options) {
  const double r0 = options.r0;
  auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << "branch " << index << " at " << format_double(pole.location.real()) << ","
       << format_double(pole.location.imag()) << ": " << why;
    return BranchOutcome{std::nullopt, os.str()};
  };

  const PoleModel near = make_model(family, pole.location, pole.multiplicity);
  const complex uc = base.pole;
  const auto vc = solve_near_pole(family, near, uc, model_guess(near, uc), 2.0 * r0);
  if (!vc) return fail("no preimage of the base disc near the pole");
  const auto wc = solve_near_pole(family, base, *vc, model_guess(base, *vc), 2.0 * r0);
  if (!wc) return fail("no preimage near the base pole");

  const double inv_q_near = 1.0 / near.q;
  const double inv_q_base = 1.0 / base.q;
  double sup = 0.0;
  const int samples = std::max(options.boundary_samples, 4);
  for (int s = -1; s < samples; ++s) {
    complex u = uc, v = *vc, w = *wc;
    if (s >= 0) {
      const double theta = 2.0 * kPi * s / samples;
      u = uc + std::polar(r0, theta);
      const auto vs = solve_near_pole(family, near, u, near.pole + (*vc - near.pole) * std::pow(uc / u, inv_q_near),
                                      2.0 * r0);
      if (!vs) return fail("branch lost while sampling the boundary");
      v = *vs;
      const auto ws = solve_near_pole(family, base, v, base.pole + (*wc - base.pole) * std::pow(*vc / v, inv_q_base),
                                      2.0 * r0);
      if (!ws) return fail("branch lost while sampling the boundary");
      w = *ws;
    }
    if (std::abs(v - near.pole) >= r0) return fail("intermediate preimage leaves D(a_k, r0)");
    if (std::abs(w - base.pole) >= r0) return fail("branch domain escapes D(a_M, r0)");
    sup = std::max(sup, derivative_modulus(family, w) * derivative_modulus(family, v));
  }
  const double b = 1.0 / sup;
  if (!(b > 0.0 && b < 1.0)) return fail("measured constant " + format_double(b) + " is not a contraction");
  return BranchOutcome{IFSBranch{index, b, pole.location}, {}};
}

}  // namespace

std::size_t suggest_base_index(std::span<const PoleData> poles, double r0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("suggest_base_index: r0 must be positive");
  for (std::size_t k = 0; k < poles.size(); ++k) {
    const auto& p = poles[k];
    if (std::abs(p.location) >= 2.0 * std::pow(p.coeff_magnitude / r0, p.multiplicity) + r0) return k;
  }
  return poles.size();
}

IFSBranchSet estimate_branch_contractions(const MapFamily& family, std::span<const PoleData> poles, std::size_t M,
                                          std::size_t N, const BranchOptions& options) {
  if (!(options.r0 > 0.0 && options.r1 > 0.0)) throw std::invalid_argument("estimate_branch_contractions: radii must be positive");
  if (options.r0 > (2.0 - std::sqrt(3.0)) * options.r1 * (1.0 + 1e-12)) {
    throw std::invalid_argument("estimate_branch_contractions: r0 must not exceed (2 - sqrt 3) r1");
  }
  if (M > N || N >= poles.size()) throw std::out_of_range("estimate_branch_contractions: need M <= N < pole count");

  IFSBranchSet set;
  set.base_index = M;
  set.base_pole = poles[M].location;
  set.r0 = options.r0;
  set.r1 = options.r1;
  const PoleModel base = make_model(family, poles[M].location, poles[M].multiplicity);

  const std::size_t count = N - M + 1;
  std::vector<BranchOutcome> outcomes(count);
  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  auto work = [&](unsigned tid) {
    for (std::size_t i = tid; i < count; i += threads) outcomes[i] = measure_branch(family, base, poles[M + i], M + i, options);
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  for (auto& o : outcomes) {
    if (o.branch) {
      set.branches.push_back(*o.branch);
    } else {
      set.rejected.push_back(std::move(o.diagnostic));
    }
  }
  return set;
}

IFSBranchSet estimate_branch_contractions(const MapFamily& family, std::size_t M, std::size_t N, double r0, double r1) {
  double radius = 8.0;
  while (count_poles(family, radius) <= N) radius *= 2.0;
  const auto poles = enumerate_poles(family, radius);
  return estimate_branch_contractions(family, poles, M, N, BranchOptions{r0, r1});
}

IFSBranchSet synthetic_branches(std::span<const PoleData> poles, std::size_t M, std::size_t N, int q, double c) {
  if (q < 1) throw std::invalid_argument("synthetic_branches: q must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("synthetic_branches: c must be positive");
  if (M > N || N >= poles.size()) throw std::out_of_range("synthetic_branches: need M <= N < pole count");
  IFSBranchSet set;
  set.base_index = M;
  set.base_pole = poles[M].location;
  const double exponent = -(q + 1.0) / q;
  for (std::size_t k = M; k <= N; ++k) {
    const double b = std::pow(std::abs(poles[k].location), exponent) / c;
    if (!(b > 0.0 && b < 1.0)) {
      throw ContractionViolation("synthetic_branches: pole " + std::to_string(k) + " gives b = " + format_double(b));
    }
    set.branches.push_back({k, b, poles[k].location});
  }
  return set;
}

// -- estimates ----------------------------------------------------------------------

std::string to_string(DimensionMethod method) {
  switch (method) {
    case DimensionMethod::BowenLower: return "bowen_lower";
    case DimensionMethod::SeriesUpper: return "series_upper";
    case DimensionMethod::FormulaUpper: return "formula_upper";
    case DimensionMethod::FormulaLower: return "formula_lower";
    case DimensionMethod::BoxCounting: return "box_counting";
  }
  return "unknown";
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_estimates_csv(std::ostream& os, std::span<const DimensionEstimate> estimates, const std::string& family) {
  os << "method,value,lo,hi,meta,family\n";
  for (const auto& e : estimates) {
    os << to_string(e.method) << ',' << format_double(e.value) << ',' << format_double(e.lo) << ','
       << format_double(e.hi) << ',' << csv_field(e.metadata) << ',' << csv_field(family) << '\n';
  }
}

// -- pole series ------------------------------------------------------------------------

namespace {

constexpr std::size_t kMinSeriesPoles = 20;

int max_multiplicity(std::span<const PoleData> poles) {
  int M = 0;
  for (const auto& p : poles) M = std::max(M, p.multiplicity);
  return M;
}

double log_term(const PoleData& p, int M) {
  return std::log(p.coeff_magnitude) - (1.0 + 1.0 / M) * std::log(std::abs(p.location));
}

void check_series_input(std::span<const PoleData> poles, int M) {
  if (poles.size() < kMinSeriesPoles) {
    throw std::invalid_argument("series: at least " + std::to_string(kMinSeriesPoles) +
                                " poles are needed to estimate the tail (got " + std::to_string(poles.size()) + ")");
  }
  if (M < 1) throw std::invalid_argument("series: M must be positive");
}

}  // namespace

std::vector<double> series_terms(std::span<const PoleData> poles, double t, int M) {
  if (M < 1) throw std::invalid_argument("series_terms: M must be positive");
  std::vector<double> out;
  out.reserve(poles.size());
  const long double e = 1.0L + 1.0L / M;
  for (const auto& p : poles) {
    const long double x = p.coeff_magnitude / std::pow(static_cast<long double>(std::abs(p.location)), e);
    out.push_back(static_cast<double>(std::pow(x, static_cast<long double>(t))));
  }
  return out;
}

TailFit fit_series_tail(std::span<const PoleData> poles, int M) {
  check_series_input(poles, M);
  const std::size_t n = poles.size();
  const std::size_t first = n / 4;
  std::vector<double> lj, j, y;
  for (std::size_t i = first; i < n; ++i) {
    const double idx = static_cast<double>(i + 1);
    lj.push_back(std::log(idx));
    j.push_back(idx);
    y.push_back(log_term(poles[i], M));
  }
  const LinearFit power = fit_line(lj, y);
  const LinearFit geometric = fit_line(j, y);
  TailFit fit;
  fit.power_rss = power.rss;
  fit.geometric_rss = geometric.rss;
  const LinearFit& best = geometric.rss < power.rss ? geometric : power;
  fit.model = geometric.rss < power.rss ? TailModel::Geometric : TailModel::Power;
  fit.intercept = best.intercept;
  fit.rate = -best.slope;
  fit.rate_stderr = best.slope_stderr;
  return fit;
}

SeriesSum series_sum(std::span<const PoleData> poles, double t, int M) {
  check_series_input(poles, M);
  if (!(t > 0.0)) throw std::invalid_argument("series_sum: t must be positive");
  SeriesSum s;
  for (double x : series_terms(poles, t, M)) s.partial += x;
  s.fit = fit_series_tail(poles, M);
  const double n = static_cast<double>(poles.size());
  const double inf = std::numeric_limits<double>::infinity();
  if (s.fit.model == TailModel::Power) {
    const double e = s.fit.rate * t;
    s.tail = e > 1.0 ? std::exp(t * s.fit.intercept) * std::pow(n + 0.5, 1.0 - e) / (e - 1.0) : inf;
  } else {
    const double beta = s.fit.rate;
    s.tail = beta > 0.0 ? std::exp(t * (s.fit.intercept - beta * (n + 1.0))) / -std::expm1(-beta * t) : inf;
  }
  return s;
}

TailVerdict classify_tail(const TailFit& fit, double t, double sigmas) {
  const double threshold = fit.model == TailModel::Power ? 1.0 : 0.0;
  const double excess = fit.rate * t - threshold;
  const double margin = sigmas * fit.rate_stderr * t;
  if (excess > margin) return TailVerdict::Converges;
  if (excess < -margin) return TailVerdict::Diverges;
  return TailVerdict::Borderline;
}

DimensionEstimate series_exponent(std::span<const PoleData> poles, const SeriesOptions& options) {
  const int M = max_multiplicity(poles);
  const TailFit fit = fit_series_tail(poles, M);
  auto verdict = [&](double t) { return t <= 0.0 ? TailVerdict::Diverges : classify_tail(fit, t, options.sigmas); };

  // Largest t still classified divergent, smallest t classified convergent.
  auto boundary = [&](auto&& pred) {
    double lo = 0.0, hi = options.t_max;
    if (pred(hi)) return hi;
    while (hi - lo > options.tolerance) {
      const double mid = 0.5 * (lo + hi);
      (pred(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double t_div = boundary([&](double t) { return verdict(t) == TailVerdict::Diverges; });
  const double t_conv = boundary([&](double t) { return verdict(t) != TailVerdict::Converges; });

  DimensionEstimate est;
  est.method = DimensionMethod::SeriesUpper;
  est.lo = std::clamp(std::min(t_div, t_conv), 0.0, 2.0);
  est.hi = std::clamp(std::max(t_div, t_conv), 0.0, 2.0);
  est.value = std::clamp(0.5 * (t_div + t_conv), est.lo, est.hi);
  std::ostringstream meta;
  meta << "poles=" << poles.size() << ";M=" << M << ";tail=" << (fit.model == TailModel::Power ? "power" : "geometric")
       << ";rate=" << format_double(fit.rate) << ";stderr=" << format_double(fit.rate_stderr);
  est.metadata = meta.str();
  return est;
}

// -- quasiconformal continuity ------------------------------------------------------------

Dilatation qc_dilatation(double m_kappa, double m_lambda) {
  for (double m : {m_kappa, m_lambda}) {
    const double a = std::abs(m);
    if (!(a > 0.0 && a < 1.0)) {
      throw std::domain_error("qc_dilatation: multiplier " + format_double(m) + " is not attracting and nonzero");
    }
  }
  const double lk = std::log(std::abs(m_kappa));
  const double ll = std::log(std::abs(m_lambda));
  Dilatation d;
  d.K = m_kappa == m_lambda ? 1.0 : std::max(lk / ll, ll / lk);
  d.sign_mismatch = std::signbit(m_kappa) != std::signbit(m_lambda);
  return d;
}

Interval continuity_envelope(double dim_lambda, double K, EnvelopeMode mode) {
  if (!(dim_lambda > 0.0 && dim_lambda <= 2.0)) throw std::domain_error("continuity_envelope: dimension must be in (0, 2]");
  if (!(K >= 1.0) || std::isinf(K)) throw std::domain_error("continuity_envelope: K must be finite and at least 1");
  Interval iv;
  if (mode == EnvelopeMode::Holder) {
    iv = {dim_lambda / K, K * dim_lambda};
  } else {
    const double s = 1.0 / dim_lambda - 0.5;
    iv = {1.0 / (K * s + 0.5), 1.0 / (s / K + 0.5)};
  }
  iv.lo = std::clamp(iv.lo, std::numeric_limits<double>::min(), 2.0);
  iv.hi = std::clamp(iv.hi, iv.lo, 2.0);
  return iv;
}

// -- choice of m ------------------------------------------------------------------------------

namespace {

// The n poles of smallest modulus; fewer if the family has fewer below 1e300.
std::vector<PoleData> first_poles(const MapFamily& family, std::size_t n) {
  double radius = 8.0;
  while (count_poles(family, radius) < n && radius < 1e299) radius = std::min(radius * 1.5, 1e300);
  PoleOptions opts;
  opts.extract_coefficients = false;
  auto poles = enumerate_poles(family, radius, opts);
  if (poles.size() > n) poles.resize(n);
  return poles;
}

}  // namespace

MSelection select_m(int p, double eta, const MSelectionOptions& options) {
  const MapFamily h = MapFamily::h(p, eta);
  const int q = h.pole_multiplicity();
  MSelection sel;
  sel.target = formula_lower(q);

  // t(N) > target exactly when sum_{k<N} b_k^target > 1.
  const double exponent = -(q + 1.0) / q;
  auto crossing = [&](std::span<const PoleData> poles) -> std::size_t {
    double s = 0.0;
    for (std::size_t k = 0; k < poles.size(); ++k) {
      s += std::pow(std::pow(std::abs(poles[k].location), exponent) / options.synthetic_c, sel.target);
      if (s > 1.0) return k + 1;
    }
    return 0;
  };
  std::size_t n = 0;
  for (std::size_t cap = 1024; n == 0; cap *= 2) {
    if (cap > (std::size_t{1} << 26)) throw std::runtime_error("select_m: H never reaches the target bound");
    const auto poles = first_poles(h, cap);
    n = crossing(poles);
    if (n != 0) {
      auto b = synthetic_branches(poles, 0, n - 1, q, options.synthetic_c).contractions();
      sel.t_h = solve_bowen(std::span<const double>(b));
    }
  }
  sel.branches = n;

  for (int m = 1; m <= options.m_max; m += 2) {
    const MapFamily hm = MapFamily::hm(m, p, eta);
    const auto poles = first_poles(hm, n);
    if (poles.size() < n) continue;
    const auto b = synthetic_branches(poles, 0, n - 1, q, options.synthetic_c).contractions();
    const double t = solve_bowen(std::span<const double>(b));
    if (t > sel.target && check_parameters(hm).ok) {
      sel.m = m;
      sel.t_hm = t;
      return sel;
    }
  }
  throw std::runtime_error("select_m: no odd m up to " + std::to_string(options.m_max) + " passes");
}

}  // namespace speiser
