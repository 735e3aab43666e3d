#pragma once

#include <array>
#include <vector>

#include "speiser/extended_complex.hpp"

namespace speiser {

inline constexpr double kPi = 3.14159265358979323846;

/// The square period lattice generated by pi and pi*i, with the invariants
/// of its Weierstrass function.
///
/// e2 = p((pi + pi i)/2) vanishes and e3 = -e1 for this lattice, so only e1 is
/// stored; g2 = 4 e1^2 and g3 = 0. The constants are not hard-coded: they are
/// obtained from the lattice series when the instance is built.
struct LatticeSpec {
  complex period1{kPi, 0.0};
  complex period2{0.0, kPi};
  double e1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;

  /// Laurent coefficients c_n (n = 2, 3, ...) of p about the origin:
  /// p(z) = z^-2 + sum c_n z^(2n-2). laurent[0] holds c_2.
  std::vector<double> laurent;
  /// Cauchy data for the tail bound: |p(z) - z^-2| <= cauchy_bound on
  /// |z| = cauchy_radius.
  double cauchy_radius = 0.0;
  double cauchy_bound = 0.0;
  /// Number of Laurent terms to use for |z|^2 in each of kTermBins equal
  /// slices of [0, pi^2/2].
  static constexpr std::size_t kTermBins = 64;
  std::array<unsigned short, kTermBins> terms_for_bin{};

  /// Distance below which a point counts as sitting on a lattice point.
  double pole_cutoff = 1e-8;

  /// The (pi, pi i) lattice, computed on first use and shared afterwards.
  static const LatticeSpec& square();

  /// Builds a fresh instance; `tail_tolerance` bounds the truncated Laurent
  /// tail for every point of the fundamental domain.
  static LatticeSpec build(double tail_tolerance = 1e-14);
};

/// Representative z' = z + (a pi + b pi i) with Re z', Im z' in [-pi/2, pi/2).
complex reduce_to_fundamental(complex z, const LatticeSpec& lattice = LatticeSpec::square());

ExtendedComplex wp(complex z, const LatticeSpec& lattice = LatticeSpec::square());
ExtendedComplex wp_prime(complex z, const LatticeSpec& lattice = LatticeSpec::square());

struct WpPair {
  ExtendedComplex value;
  ExtendedComplex derivative;
};

/// p and p' in a single pass.
WpPair wp_with_derivative(complex z, const LatticeSpec& lattice = LatticeSpec::square());

/// Lattice series evaluated row by row: each horizontal row of the lattice is
/// summed in closed form (sum_n (z - n pi)^-2 = csc^2 z), rows are added until
/// the explicit exponential tail bound drops below `tail_tolerance`.
/// Used to derive the lattice invariants; also usable as a reference value.
struct LatticeSumResult {
  complex value;
  double tail_bound;
  int rows;
};
LatticeSumResult wp_row_sum(complex z, double tail_tolerance = 1e-15);

}  // namespace speiser
