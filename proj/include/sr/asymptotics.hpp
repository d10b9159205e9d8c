#pragma once

#include <vector>

#include "sr/sphere.hpp"

namespace sr::asymptotics {

using sphere::BranchPoint;
using sphere::BranchTag;

// Leading-order branch law near the abnormal endpoint, X = (x+r)/2r, Z = z/r^3:
//   C1:  Z = X^3/6 + (r^2 a^2/64 + pi r (a+g)/32) X^4
//   C2:  Z = X^3/24
//   D2:  Z = X^3/6 + (r^2 a^2/64 - pi r (a+g)/32) X^4
//   D1:  Z = -2/(r^2 a^2) X^2           (contact law, a != 0)
//   C1bar: raw coordinates, z = -(r^2/pi^2)(x - r), the exact k -> 0 limit of
//          the trace formulas (cross-checked against direct flow integration).
struct BranchLaw {
  BranchTag tag = BranchTag::Generic;
  double c2 = 0.0, c3 = 0.0, c4 = 0.0;  // leading polynomial coefficients in X
  double validity = 0.3;                // advisory |X| range
};

BranchLaw branch_law(BranchTag tag, double r, double alpha, double gamma);

// Evaluates the law; C1bar takes (x - r) and returns z.
double branch_graph(BranchTag tag, double r, double alpha, double gamma, double X);

// Alternative D1 leading coefficient -8/(r^2 a^2) stated for the integrable
// case; kept separately so numeric fits can arbitrate.
double d1_coefficient_contact(double r, double alpha);
double d1_coefficient_integrable(double r, double alpha);

// Flat-term extraction: for each k' compute X = E/K,
// Z = (1/6K^3)[(2k^2-1)E + k'^2 K], and the compensation ratio
//   (Z - X^3/6) / (X^3 e^{-2/X})  ->  -4 as X -> 0.
// The analytic part of Z(X) is X^3/6 exactly; the first flat term sits at the
// e^{-2/X} level (equivalently -k' X^3 e^{-1/X} via k' ~ 4 e^{-1/X}), which
// the AGM evaluation resolves to 50-digit agreement with the -4 constant.
struct FlatTermPoint {
  double kprime = 0.0;
  double X = 0.0, Z = 0.0;
  double ratio = 0.0;
  double rel_error = 0.0;  // propagated cancellation error / flat term
  bool flagged = false;    // precision budget exceeded (> 10%)
};
std::vector<FlatTermPoint> flat_term_ratio(double r, const std::vector<double>& kprime_grid);

// gamma > -alpha -> C1 in the sphere; gamma < -alpha -> D2; |gamma+alpha|
// below 1e-12 -> tie (zero Gauss curvature boundary).
enum class Selector { C1, D2, Tie };
Selector branch_selector(double alpha, double gamma);

// Least-squares c in Z ~ c X^e on log-transformed data.
struct FitResult {
  double coefficient = 0.0;
  double residual = 0.0;  // max relative deviation
};
FitResult fit_contact(const std::vector<BranchPoint>& points, int exponent);

// Same fit on raw (x - r, z) pairs, used for the C1bar slope.
FitResult fit_raw_slope(const std::vector<BranchPoint>& points, double r);

}  // namespace sr::asymptotics
