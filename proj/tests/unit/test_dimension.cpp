#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "property.hpp"
#include "speiser/dimension.hpp"
#include "speiser/regression.hpp"

using namespace speiser;

namespace {

std::vector<PoleData> p_series_poles(int n, double alpha, int M) {
  std::vector<PoleData> out;
  for (int j = 1; j <= n; ++j) out.push_back({complex(std::pow(j, alpha), 0.0), M, 1.0});
  return out;
}

}  // namespace

TEST_CASE("closed-form bounds") {
  CHECK(formula_upper(1, 2.0) == 1.0);
  CHECK(formula_upper(4, 0.0) == 0.0);
  CHECK(formula_upper(1000000, 1.0) < 2.0);
  CHECK(formula_upper(1000000, 1.0) > formula_upper(1000, 1.0));
  CHECK(formula_lower(4) == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(formula_lower(1) == 1.0);
  CHECK(formula_lower(8) == doctest::Approx(16.0 / 9.0).epsilon(1e-15));
  CHECK_THROWS_AS(formula_upper(1, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(formula_lower(0), std::invalid_argument);
  for (int p = 1; p <= 50; ++p) CHECK(formula_lower(4 * p) < 2.0);
}

TEST_CASE("Bowen equation") {
  const std::vector<double> two = {0.5, 0.5}, four = {0.5, 0.5, 0.5, 0.5};
  CHECK(std::abs(solve_bowen(two) - 1.0) < 1e-12);
  CHECK(std::abs(solve_bowen(four) - 2.0) < 1e-12);
  const std::vector<double> one = {0.5};
  CHECK_THROWS_AS(solve_bowen(one), DegenerateSystemError);
  CHECK_THROWS_AS(solve_bowen(std::vector<double>{}), DegenerateSystemError);
  const std::vector<double> bad = {0.5, 1.0};
  CHECK_THROWS_AS(solve_bowen(bad), ContractionViolation);
  const std::vector<double> zero = {0.5, 0.0};
  CHECK_THROWS_AS(solve_bowen(zero), ContractionViolation);
}

TEST_CASE("Bowen root properties") {
  prop::for_all(200, 51, [](prop::Gen& g) -> std::string {
    std::vector<double> b(static_cast<std::size_t>(g.integer(2, 40)));
    for (double& x : b) x = g.uniform(0.01, 0.9);
    const double t = solve_bowen(b);
    if (std::abs(bowen_sum(b, t) - 1.0) > 1e-10) return prop::describe("residual ", bowen_sum(b, t) - 1.0);
    auto more = b;
    more.push_back(g.uniform(0.01, 0.9));
    const double t_more = solve_bowen(more);
    const bool resolvable = std::pow(more.back(), t) > 1e-9;
    if (resolvable ? !(t_more > t) : t_more < t) return prop::describe("adding a branch did not increase t");
    auto less = b;
    const auto k = static_cast<std::size_t>(g.integer(0, static_cast<int>(b.size()) - 1));
    less[k] *= 0.5;
    const double t_less = solve_bowen(less);
    if (std::pow(b[k], t) > 1e-9 ? !(t_less < t) : t_less > t) return prop::describe("shrinking a branch did not decrease t");
    return {};
  });
}

TEST_CASE("synthetic lattice system approaches 8/5 from below") {
  const auto poles = enumerate_poles(MapFamily::h(1, 0.25), 200.0, PoleOptions{false});
  REQUIRE(poles.size() > 10000);
  const auto set = synthetic_branches(poles, 0, 9999, 4, 2.0);
  const auto b = set.contractions();
  const std::vector<std::size_t> counts = {100, 1000, 10000};
  const auto table = bowen_convergence(b, counts);
  CHECK(table[0].t < table[1].t);
  CHECK(table[1].t < table[2].t);
  CHECK(table[2].t >= 1.5);
  CHECK(table[0].t < 1.6);
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i] <= b[i - 1]);
}

TEST_CASE("measured branch contractions") {
  const MapFamily h = MapFamily::h(1, 0.25);
  const auto poles = enumerate_poles(h, 120.0);
  const std::size_t M = suggest_base_index(poles, 0.4);
  REQUIRE(M < poles.size());
  CHECK(std::abs(poles[M].location) >= 2.0 * std::pow(poles[M].coeff_magnitude / 0.4, 4) + 0.4);
  const auto set = estimate_branch_contractions(h, poles, M, M + 400, BranchOptions{0.4, 1.5});
  CHECK(set.rejected.empty());
  REQUIRE(set.branches.size() == 401);
  std::vector<double> la, lb;
  for (const auto& br : set.branches) {
    CHECK(br.contraction > 0.0);
    CHECK(br.contraction < 1.0);
    la.push_back(std::log(std::abs(br.source_pole)));
    lb.push_back(std::log(br.contraction));
  }
  CHECK(fit_line(la, lb).slope == doctest::Approx(-1.25).epsilon(0.04));
  CHECK(solve_bowen(set) > 0.0);
  CHECK_THROWS_AS(estimate_branch_contractions(h, poles, M, M + 10, BranchOptions{0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("base disc too small for the pole is rejected with a diagnostic") {
  const MapFamily h = MapFamily::h(1, 0.25);
  const auto poles = enumerate_poles(h, 60.0);
  const auto set = estimate_branch_contractions(h, poles, 0, 20, BranchOptions{0.4, 1.5});
  CHECK(!set.rejected.empty());
  CHECK(set.rejected.front().find("branch") != std::string::npos);
}

TEST_CASE("h_m branch constants converge to those of H") {
  const MapFamily h = MapFamily::h(1, 0.25);
  const auto hp = enumerate_poles(h, 70.0);
  const std::size_t M = suggest_base_index(hp, 0.4);
  const BranchOptions opts{0.4, 1.5};
  const auto ref = estimate_branch_contractions(h, hp, M, M + 8, opts);
  double prev = 1e300;
  for (int m : {101, 201, 401}) {
    const MapFamily hm = MapFamily::hm(m, 1, 0.25);
    const auto poles = enumerate_poles(hm, 70.0);
    // same base pole and branch poles, matched by location
    auto nearest = [&](complex a) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < poles.size(); ++i) {
        if (std::abs(poles[i].location - a) < std::abs(poles[best].location - a)) best = i;
      }
      return best;
    };
    std::vector<PoleData> ordered = {poles[nearest(hp[M].location)]};
    for (const auto& br : ref.branches) ordered.push_back(poles[nearest(br.source_pole)]);
    const auto set = estimate_branch_contractions(hm, ordered, 0, ordered.size() - 1, opts);
    CHECK(set.rejected.empty());
    double worst = 0.0;
    for (const auto& br : set.branches) {
      if (br.index == 0) continue;
      worst = std::max(worst, std::abs(std::log(br.contraction / ref.branches[br.index - 1].contraction)));
    }
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("series scaling identity") {
  const auto hm_poles = enumerate_poles(MapFamily::hm(21, 1, 0.25), 500.0);
  for (double lambda : {0.1, 0.5, 0.9}) {
    const auto fl_poles = enumerate_poles(MapFamily::flambda(lambda, 21, 1, 0.25), 500.0 / lambda);
    REQUIRE(fl_poles.size() == hm_poles.size());
    for (double t : {0.3, 1.0, 1.7}) {
      // identical pole data scaled by 1/lambda
      std::vector<PoleData> scaled = hm_poles;
      for (auto& p : scaled) {
        p.location /= lambda;
        p.coeff_magnitude /= lambda;
      }
      const auto base = series_terms(hm_poles, t, 4);
      const auto s = series_terms(scaled, t, 4);
      const double factor = std::pow(lambda, t / 4.0);
      double worst = 0.0;
      for (std::size_t i = 0; i < base.size(); ++i) worst = std::max(worst, std::abs(s[i] / (factor * base[i]) - 1.0));
      CHECK(worst < 1e-15 * 8);
      // extracted coefficients agree to extraction accuracy
      const auto fl = series_terms(fl_poles, t, 4);
      double worst_fl = 0.0;
      for (std::size_t i = 0; i < base.size(); ++i) worst_fl = std::max(worst_fl, std::abs(fl[i] / (factor * base[i]) - 1.0));
      CHECK(worst_fl < 1e-6);
    }
  }
}

TEST_CASE("series exponent on p-series") {
  const auto est = series_exponent(p_series_poles(5000, 0.5, 1));
  CHECK(std::abs(est.value - oracle::p_series_threshold(0.5, 1)) < 0.02);
  CHECK(est.lo <= est.value);
  CHECK(est.value <= est.hi);
  CHECK(est.method == DimensionMethod::SeriesUpper);
  const auto est2 = series_exponent(p_series_poles(5000, 0.8, 4));
  CHECK(std::abs(est2.value - oracle::p_series_threshold(0.8, 4)) < 0.02);
  const auto s = series_sum(p_series_poles(5000, 0.5, 1), 1.5, 1);
  CHECK(std::isfinite(s.tail));
  double exact_tail = 0.0;
  const double zeta_3_2 = 2.6123753486854883;
  exact_tail = zeta_3_2;
  for (int j = 5000; j >= 1; --j) exact_tail -= std::pow(j, -1.5);
  CHECK(s.tail == doctest::Approx(exact_tail).epsilon(0.01));
  CHECK(std::isinf(series_sum(p_series_poles(5000, 0.5, 1), 0.9, 1).tail));
  CHECK_THROWS_AS(series_sum(p_series_poles(19, 0.5, 1), 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(series_sum(p_series_poles(100, 0.5, 1), 0.0, 1), std::invalid_argument);
}

TEST_CASE("series exponent of H and h_m") {
  const auto h = series_exponent(enumerate_poles(MapFamily::h(1, 0.25), 60.0));
  CHECK(h.value == doctest::Approx(1.6).epsilon(0.01));
  const auto poles = enumerate_poles(MapFamily::hm(21, 1, 0.25), 1e60);
  const auto hm = series_exponent(poles);
  CHECK(hm.value < 0.1);
  const auto s = series_sum(poles, 0.05, 4);
  CHECK(s.fit.model == TailModel::Geometric);
  CHECK(std::isfinite(s.tail));
  CHECK(s.tail_ratio() < 0.5);
}

TEST_CASE("borderline t widens the interval") {
  auto poles = p_series_poles(400, 0.5, 1);
  prop::Gen g(52);
  for (auto& p : poles) p.coeff_magnitude = std::exp(g.uniform(-0.5, 0.5));
  const auto est = series_exponent(poles);
  CHECK(est.hi - est.lo > 1e-3);
  CHECK(est.lo <= est.value);
  CHECK(est.value <= est.hi);
}

TEST_CASE("dilatation and envelopes") {
  CHECK(qc_dilatation(-0.3, -0.3).K == 1.0);
  const auto d = qc_dilatation(-0.25, 0.0625);
  CHECK(d.K == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.sign_mismatch);
  CHECK(!qc_dilatation(-0.25, -0.0625).sign_mismatch);
  CHECK_THROWS_AS(qc_dilatation(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(qc_dilatation(1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(qc_dilatation(0.5, -1.0), std::domain_error);

  const auto holder = continuity_envelope(1.0, 2.0, EnvelopeMode::Holder);
  CHECK(holder.lo == 0.5);
  CHECK(holder.hi == 2.0);
  const auto astala = continuity_envelope(1.0, 2.0, EnvelopeMode::Astala);
  CHECK(astala.lo == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(astala.hi == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  for (auto mode : {EnvelopeMode::Holder, EnvelopeMode::Astala}) {
    const auto point = continuity_envelope(1.3, 1.0, mode);
    CHECK(point.lo == doctest::Approx(1.3).epsilon(1e-15));
    CHECK(point.hi == doctest::Approx(1.3).epsilon(1e-15));
  }
  CHECK_THROWS_AS(continuity_envelope(0.0, 2.0, EnvelopeMode::Holder), std::domain_error);
  CHECK_THROWS_AS(continuity_envelope(1.0, 0.5, EnvelopeMode::Astala), std::domain_error);
}

TEST_CASE("envelope properties") {
  prop::for_all(2000, 53, [](prop::Gen& g) -> std::string {
    const double d = g.uniform(0.01, 2.0), K = 1.0 + std::exp(g.uniform(-8.0, 2.0));
    const auto h = continuity_envelope(d, K, EnvelopeMode::Holder);
    const auto a = continuity_envelope(d, K, EnvelopeMode::Astala);
    if (!(h.lo < a.lo && (a.hi < h.hi || (a.hi == 2.0 && h.hi == 2.0)))) {
      return prop::describe("astala not inside holder for d=", d, " K=", K);
    }
    if (!(a.contains(d) && h.contains(d))) return prop::describe("envelope misses d for d=", d, " K=", K);
    const double K2 = K * (1.0 + g.uniform(0.01, 0.5));
    for (auto mode : {EnvelopeMode::Holder, EnvelopeMode::Astala}) {
      const auto w1 = continuity_envelope(d, K, mode), w2 = continuity_envelope(d, K2, mode);
      if (!(w2.width() >= w1.width())) return prop::describe("width not monotone in K at d=", d);
    }
    const auto tight = continuity_envelope(d, 1.0 + 1e-12, EnvelopeMode::Holder);
    if (tight.width() > 1e-10) return prop::describe("width does not vanish as K -> 1");
    return {};
  });
}

TEST_CASE("estimate CSV") {
  const std::vector<DimensionEstimate> rows = {{1.5, DimensionMethod::BowenLower, 1.5, 1.5, "mode=synthetic;N=100"},
                                               {0.0, DimensionMethod::FormulaUpper, 0.0, 0.0, "M=4;rho=0"}};
  std::ostringstream os;
  write_estimates_csv(os, rows, "hm(m=21,p=1,eta=0.25)");
  CHECK(os.str() ==
        "method,value,lo,hi,meta,family\n"
        "bowen_lower,1.5,1.5,1.5,mode=synthetic;N=100,\"hm(m=21,p=1,eta=0.25)\"\n"
        "formula_upper,0,0,0,M=4;rho=0,\"hm(m=21,p=1,eta=0.25)\"\n");
}

TEST_CASE("m selection") {
  const auto sel = select_m(1, 0.25);
  CHECK(sel.m % 2 == 1);
  CHECK(sel.target == doctest::Approx(1.6));
  CHECK(sel.t_h > sel.target);
  CHECK(sel.t_hm > sel.target);
  CHECK(check_parameters(MapFamily::hm(sel.m, 1, 0.25)).ok);
  // the previous odd m falls short at the same truncation
  const auto prev_poles = enumerate_poles(MapFamily::hm(sel.m - 2, 1, 0.25), 1e6, PoleOptions{false});
  REQUIRE(prev_poles.size() >= sel.branches);
  const auto b = synthetic_branches(prev_poles, 0, sel.branches - 1, 4, 2.0).contractions();
  CHECK(solve_bowen(b) <= sel.target);
}
