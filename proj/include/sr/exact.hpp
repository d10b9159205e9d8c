#pragma once

#include <array>
#include <vector>

#include "sr/elliptic.hpp"
#include "sr/models.hpp"

namespace sr::exact {

// Characteristic quartic F(y) = (1+alpha y)^2 - (p_x + lambda y^2/2)^2 of the
// conservative Martinet case, factored as
//   F = (2m^2 - l/2 (y-alpha/l)^2)(2m'' + l/2 (y+alpha/l)^2),
//   2m^2 = 1 - p_x + alpha^2/(2 lambda), 2m'' = 1 + p_x - alpha^2/(2 lambda).
enum class QuarticClass { TwoReal, FourReal, Critical };

struct QuarticData {
  std::array<double, 5> coeff{};  // F(y) = sum coeff[i] y^i
  double m2 = 0.0;                // m^2
  double mpp = 0.0;               // m''
  QuarticClass cls = QuarticClass::TwoReal;
  std::vector<double> real_roots;  // sorted
  double y_minus = 0.0, y_plus = 0.0;  // oscillation interval around 0
  double eval(double y) const;
};

QuarticData characteristic_quartic(double alpha, double p_x, double lambda);

struct FlatGeodesicParams {
  double theta0 = 0.0;  // (0, pi) on the primary branch
  double lambda = 0.0;  // > 0 on the primary branch
  elliptic::Modulus mod;  // 2k^2 = 1 - cos(theta0)

  static FlatGeodesicParams make(double theta0, double lambda);
};

// Closed-form flat-Martinet geodesic through cn / Jacobi epsilon, with the
// symmetry extensions S1 (theta0 < 0 -> y flips) and S2 (lambda < 0 ->
// (x,z) flip, theta -> pi - theta).
std::array<double, 3> flat_geodesic(const FlatGeodesicParams& p, double t);

// Heisenberg closed form (linear pendulum). lambda = 0 degenerates to the
// straight line and sets the flag.
struct HeisenbergPoint {
  double x = 0.0, y = 0.0, z = 0.0;
  bool straight_line = false;
};
HeisenbergPoint heisenberg_geodesic(double theta0, double lambda, double t);

// Quadrature evaluation of the conservative-case (beta = 0) integral formulas:
// period P in arc-length time and the end-point (x(T), z(T)) at the N-th
// intersection with y = 0. sigma = sign ydot(0).
struct ConservativeIntegrals {
  double period = 0.0;
  double x = 0.0;
  double z = 0.0;
};
ConservativeIntegrals conservative_integrals(double alpha, double gamma, double p_x,
                                             double lambda, int N, int sigma);

}  // namespace sr::exact
