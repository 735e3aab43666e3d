#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "speiser/dynamics.hpp"
#include "speiser/family.hpp"

namespace speiser {

// -- closed-form bounds -------------------------------------------------------

/// Escaping-set bound 2 M rho / (2 + M rho) for finite order rho and pole
/// multiplicities at most M.
double formula_upper(int M, double rho);

/// Strict lower bound 2q / (q + 1) for elliptic maps whose largest pole
/// multiplicity is q.
double formula_lower(int q);

// -- finite iterated function systems -----------------------------------------

struct IFSBranch {
  std::size_t index = 0;     // position of the source pole in the pole list
  double contraction = 0.0;  // lower Lipschitz constant b_k of the inverse branch
  complex source_pole;
};

struct IFSBranchSet {
  std::vector<IFSBranch> branches;
  std::size_t base_index = 0;
  complex base_pole;
  double r0 = 0.0;
  double r1 = 0.0;
  /// One diagnostic line per rejected branch.
  std::vector<std::string> rejected;

  [[nodiscard]] std::vector<double> contractions() const;
};

/// Bowen's equation cannot be solved: fewer than two branches.
class DegenerateSystemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A branch constant outside (0, 1).
class ContractionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// sum_k b_k^t.
double bowen_sum(std::span<const double> contractions, double t);

/// The unique t > 0 with sum_k b_k^t = 1, by bisection to 1e-12.
double solve_bowen(std::span<const double> contractions);
double solve_bowen(const IFSBranchSet& branches);

struct BranchOptions {
  double r0 = 0.25;
  double r1 = 1.0;
  /// Points on the boundary circle of D(a_M, r0); the centre is sampled too.
  int boundary_samples = 48;
  unsigned threads = 0;
};

/// Inverse branches S_k of f^2 from D(a_M, r0) back into itself through the
/// poles a_k, M <= k <= N (indices into `poles`, which must be sorted by
/// modulus). b_k = 1 / max |(f^2)'| over the sampled branch domain. Branches
/// whose domains leave D(a_k, r0) or D(a_M, r0) are rejected with a
/// diagnostic. Requires r0 <= (2 - sqrt 3) r1 (std::invalid_argument).
IFSBranchSet estimate_branch_contractions(const MapFamily& family, std::span<const PoleData> poles, std::size_t M,
                                          std::size_t N, const BranchOptions& options = {});
/// Convenience form that enumerates the poles itself.
IFSBranchSet estimate_branch_contractions(const MapFamily& family, std::size_t M, std::size_t N, double r0, double r1);

/// Smallest pole index whose branches fit: |a_M| >= 2 (|b_M| / r0)^q + r0.
std::size_t suggest_base_index(std::span<const PoleData> poles, double r0);

/// b_k = |a_k|^(-(q+1)/q) / c for M <= k <= N: the functional form of the
/// branch constants with the unknown constant fixed to c.
IFSBranchSet synthetic_branches(std::span<const PoleData> poles, std::size_t M, std::size_t N, int q, double c);

struct BowenPoint {
  std::size_t branches = 0;
  double t = 0.0;
};
/// t(N) for the first N branches, for each N in `counts` (ascending).
std::vector<BowenPoint> bowen_convergence(std::span<const double> contractions, std::span<const std::size_t> counts);

// -- dimension estimates --------------------------------------------------------

enum class DimensionMethod { BowenLower, SeriesUpper, FormulaUpper, FormulaLower, BoxCounting };

std::string to_string(DimensionMethod method);

struct DimensionEstimate {
  double value = 0.0;
  DimensionMethod method = DimensionMethod::BoxCounting;
  double lo = 0.0;
  double hi = 0.0;
  /// Branch count, scale list or grid description.
  std::string metadata;
};

/// CSV with header method,value,lo,hi,meta,family.
void write_estimates_csv(std::ostream& os, std::span<const DimensionEstimate> estimates, const std::string& family);

// -- pole series ------------------------------------------------------------------

enum class TailModel { Power, Geometric };

/// Fitted decay of the series terms x_j = |b_j| / |a_j|^(1 + 1/M) over the
/// last three quarters of the pole list.
struct TailFit {
  TailModel model = TailModel::Power;
  double intercept = 0.0;  // log x_j ~ intercept - rate * (log j | j)
  double rate = 0.0;
  double rate_stderr = 0.0;
  double power_rss = 0.0;
  double geometric_rss = 0.0;
};

struct SeriesSum {
  double partial = 0.0;
  double tail = 0.0;  // +inf when the fitted tail diverges
  TailFit fit;

  [[nodiscard]] double tail_ratio() const { return tail / (partial + tail); }
};

/// Terms (|b_j| / |a_j|^(1 + 1/M))^t, in pole order.
std::vector<double> series_terms(std::span<const PoleData> poles, double t, int M);

/// Throws std::invalid_argument for fewer than 20 poles or t <= 0.
SeriesSum series_sum(std::span<const PoleData> poles, double t, int M);

TailFit fit_series_tail(std::span<const PoleData> poles, int M);

enum class TailVerdict { Converges, Diverges, Borderline };

/// Decision for one t with a margin of `sigmas` standard errors of the
/// fitted rate.
TailVerdict classify_tail(const TailFit& fit, double t, double sigmas = 2.0);

struct SeriesOptions {
  double tolerance = 1e-4;
  double sigmas = 2.0;
  double t_max = 4.0;
};

/// Infimum of the t for which the pole series converges, estimated from the
/// fitted tail. M is the largest multiplicity in the list.
DimensionEstimate series_exponent(std::span<const PoleData> poles, const SeriesOptions& options = {});

// -- box counting ------------------------------------------------------------------

/// Six dyadic box sizes ending at 4 pixels.
std::vector<int> default_box_scales();

/// Least-squares slope of log N(s) against log(1/s) for the Julia pixels of
/// the raster. The box grid is anchored at the top-left corner of the Julia
/// pixel set. Throws std::domain_error if there are no Julia pixels and
/// std::invalid_argument for fewer than 4 scales.
DimensionEstimate box_counting(const RasterResult& raster, std::span<const int> scales);

/// Same on an explicit set of (row, col) pixels.
DimensionEstimate box_counting(std::span<const std::pair<int, int>> pixels, std::span<const int> scales);

// -- quasiconformal continuity ---------------------------------------------------------

struct Dilatation {
  double K = 1.0;
  /// The multipliers have opposite signs; K is computed from |m|.
  bool sign_mismatch = false;
};

/// K = max(log|m_k| / log|m_l|, log|m_l| / log|m_k|). Throws
/// std::domain_error unless 0 < |m| < 1 for both.
Dilatation qc_dilatation(double m_kappa, double m_lambda);

enum class EnvelopeMode { Holder, Astala };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
  [[nodiscard]] double width() const { return hi - lo; }
};

/// Range allowed for dim J(f_kappa) given dim J(f_lambda) and K, clamped to
/// (0, 2].
Interval continuity_envelope(double dim_lambda, double K, EnvelopeMode mode);

// -- parameter selection ------------------------------------------------------------

struct MSelection {
  int m = 0;
  std::size_t branches = 0;  // truncation N at which the bound is tested
  double target = 0.0;       // 8p / (4p + 1)
  double t_h = 0.0;          // Bowen root for H at that N
  double t_hm = 0.0;         // Bowen root for h_m at that N
};

struct MSelectionOptions {
  double synthetic_c = 2.0;
  int m_max = 201;
};

/// Smallest odd m for which h_m passes check_parameters and its synthetic
/// Bowen root, at the first truncation where H's exceeds 8p / (4p + 1),
/// exceeds it as well.
MSelection select_m(int p, double eta, const MSelectionOptions& options = {});

}  // namespace speiser
