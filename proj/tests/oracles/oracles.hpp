#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

struct LatticeSum {
  cplx value;
  double tail_bound;
};

/// p(z) for the lattice pi Z + pi i Z as a sum over horizontal lattice rows.
/// Row l is summed exactly with sum_n (z - n pi - l pi i)^-2 = 1/sin^2(z - l pi i)
/// and its constant part with sum_n (n pi + l pi i)^-2 = -1/sinh^2(l pi).
/// Rows are added in pairs +-l until the bound on the remaining rows,
/// 2 sum_{l > L} (|csc^2| + 1/sinh^2) <= 20 e^{-2 pi L}, is below tol.
inline LatticeSum wp_by_rows(cplx z, double tol) {
  // 1/z^2 + sum_{n != 0} [(z - n pi)^-2 - (n pi)^-2] = csc^2 z - 1/3
  const cplx s0 = std::sin(z);
  cplx sum = 1.0 / (s0 * s0) - 1.0 / 3.0;
  double bound = 1.0;
  for (int l = 1; l < 64; ++l) {
    for (int sign : {1, -1}) {
      const cplx s = std::sin(z - cplx(0.0, sign * pi * l));
      const double sh = std::sinh(pi * l);
      sum += 1.0 / (s * s) + 1.0 / (sh * sh);
    }
    bound = 20.0 * std::exp(-2.0 * pi * l) * std::exp(2.0 * std::abs(z.imag()));
    if (bound < tol) break;
  }
  return {sum, bound};
}

/// Plain double sum over the square |m|, |n| <= K, no acceleration.
inline cplx wp_square_sum(cplx z, int K) {
  cplx sum = 1.0 / (z * z);
  for (int m = -K; m <= K; ++m) {
    for (int n = -K; n <= K; ++n) {
      if (m == 0 && n == 0) continue;
      const cplx w(pi * m, pi * n);
      sum += 1.0 / ((z - w) * (z - w)) - 1.0 / (w * w);
    }
  }
  return sum;
}

/// e1 = p(pi/2) for the square lattice of side pi: Gamma(1/4)^4 / (8 pi^3).
inline double e1_closed_form() { return std::pow(std::tgamma(0.25), 4) / (8.0 * pi * pi * pi); }

inline cplx central_difference(const std::function<cplx(cplx)>& f, cplx z, double h) {
  return (f(z + h) - f(z - h)) / (2.0 * h);
}

/// Chordal distance through the stereographic embedding into the sphere of
/// radius 1 centred at the origin: |P(a) - P(b)| with P(z) on the unit sphere.
struct Point3 {
  double x, y, z;
};
inline Point3 stereographic(cplx w) {
  const double r2 = std::norm(w);
  return {2.0 * w.real() / (1.0 + r2), 2.0 * w.imag() / (1.0 + r2), (r2 - 1.0) / (r2 + 1.0)};
}
inline Point3 north_pole() { return {0.0, 0.0, 1.0}; }
inline double distance(Point3 a, Point3 b) { return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z); }

/// Pixels of the level-k Sierpinski carpet on a 3^k grid.
inline std::vector<std::pair<int, int>> sierpinski_carpet(int level) {
  int n = 1;
  for (int i = 0; i < level; ++i) n *= 3;
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      bool hole = false;
      for (int a = r, b = c; a > 0 || b > 0; a /= 3, b /= 3) {
        if (a % 3 == 1 && b % 3 == 1) {
          hole = true;
          break;
        }
      }
      if (!hole) out.emplace_back(r, c);
    }
  }
  return out;
}

inline std::vector<std::pair<int, int>> segment(int length, int row = 0) {
  std::vector<std::pair<int, int>> out;
  for (int c = 0; c < length; ++c) out.emplace_back(row, c);
  return out;
}

inline std::vector<std::pair<int, int>> filled_square(int side) {
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) out.emplace_back(r, c);
  }
  return out;
}

/// Boundary of convergence of sum_j (|b| / |a_j|^(1 + 1/M))^t for
/// |a_j| = j^alpha and constant |b|: the series is a p-series in j with
/// exponent t alpha (1 + 1/M), so it converges exactly for t above
/// 1 / (alpha (1 + 1/M)).
inline double p_series_threshold(double alpha, int M) { return 1.0 / (alpha * (1.0 + 1.0 / M)); }

}  // namespace oracle
