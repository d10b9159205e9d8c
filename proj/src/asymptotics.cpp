#include "sr/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "sr/elliptic.hpp"
#include "sr/error.hpp"

namespace sr::asymptotics {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

BranchLaw branch_law(BranchTag tag, double r, double alpha, double gamma) {
  BranchLaw law;
  law.tag = tag;
  const double quart = r * r * alpha * alpha / 64.0 + kPi * r * (alpha + gamma) / 32.0;
  const double quart_m = r * r * alpha * alpha / 64.0 - kPi * r * (alpha + gamma) / 32.0;
  switch (tag) {
    case BranchTag::C1:
      law.c3 = 1.0 / 6.0;
      law.c4 = quart;
      break;
    case BranchTag::C2:
      law.c3 = 1.0 / 24.0;
      break;
    case BranchTag::D2:
      law.c3 = 1.0 / 6.0;
      law.c4 = quart_m;
      break;
    case BranchTag::D1:
      if (alpha == 0.0)
        throw std::domain_error("branch_law: D1 undefined for alpha = 0 (non-strict case)");
      law.c2 = -2.0 / (r * r * alpha * alpha);
      break;
    case BranchTag::C1bar:
      // raw-coordinate slope law z = -(2 r^2 / 3 pi^2)(x - r)
      law.c2 = 0.0;
      law.c3 = 0.0;
      law.c4 = 0.0;
      break;
    case BranchTag::Generic:
      throw std::domain_error("branch_law: no law for the generic tag");
  }
  return law;
}

double branch_graph(BranchTag tag, double r, double alpha, double gamma, double X) {
  if (tag == BranchTag::C1bar) {
    // k -> 0 limit of the trace formulas: x - r = -r k^2, z = r^3 k^2 / pi^2,
    // so z = -(r^2/pi^2)(x - r).
    const double slope = -r * r / (kPi * kPi);
    return slope * X;  // X is (x - r) here
  }
  const BranchLaw law = branch_law(tag, r, alpha, gamma);
  return law.c2 * X * X + law.c3 * X * X * X + law.c4 * X * X * X * X;
}

double d1_coefficient_contact(double r, double alpha) {
  if (alpha == 0.0) throw std::domain_error("d1_coefficient: alpha = 0");
  return -2.0 / (r * r * alpha * alpha);
}

double d1_coefficient_integrable(double r, double alpha) {
  if (alpha == 0.0) throw std::domain_error("d1_coefficient: alpha = 0");
  return -8.0 / (r * r * alpha * alpha);
}

std::vector<FlatTermPoint> flat_term_ratio(double r, const std::vector<double>& kprime_grid) {
  (void)r;  // X, Z are scale-free in the flat case
  std::vector<FlatTermPoint> out;
  out.reserve(kprime_grid.size());
  for (double kp : kprime_grid) {
    if (!(kp >= 1e-9 && kp <= 1e-3)) continue;
    const auto mod = elliptic::Modulus::from_kprime(kp);
    const auto [K, E] = elliptic::complete_integrals(mod);
    FlatTermPoint p;
    p.kprime = kp;
    p.X = E / K;
    const double k2m1 = mod.k2() - mod.kprime2();  // 2k^2 - 1 without cancellation
    p.Z = ((k2m1)*E + mod.kprime2() * K) / (6.0 * K * K * K);
    const double analytic = p.X * p.X * p.X / 6.0;
    const double flat = p.Z - analytic;
    const double weight = p.X * p.X * p.X * std::exp(-2.0 / p.X);
    p.ratio = flat / weight;
    // cancellation budget: a few ulps of the subtracted operands
    const double eps = 2.2e-16;
    const double cancel = 8.0 * eps * std::max(std::abs(p.Z), analytic);
    p.rel_error = std::abs(cancel / flat);
    p.flagged = p.rel_error > 0.10;
    out.push_back(p);
  }
  return out;
}

Selector branch_selector(double alpha, double gamma) {
  if (alpha < 0.0) throw std::domain_error("branch_selector: normalization needs alpha >= 0");
  if (std::abs(gamma + alpha) <= 1e-12) return Selector::Tie;
  return gamma > -alpha ? Selector::C1 : Selector::D2;
}

FitResult fit_contact(const std::vector<BranchPoint>& points, int exponent) {
  if (exponent < 2 || exponent > 4) throw std::domain_error("fit_contact: exponent in {2,3,4}");
  // log fit works on |X|; the D-branches approach the endpoint from X < 0
  std::vector<const BranchPoint*> use;
  for (const auto& p : points)
    if (p.X != 0.0 && p.Z != 0.0) use.push_back(&p);
  if (use.size() < 5) throw std::domain_error("fit_contact: need at least 5 usable points");
  double xmin = 1e300, xmax = 0.0;
  for (auto* p : use) {
    xmin = std::min(xmin, std::abs(p->X));
    xmax = std::max(xmax, std::abs(p->X));
  }
  if (xmax / xmin < 3.16227766016838)  // half a decade
    throw std::domain_error("fit_contact: points span less than half a decade in X");

  int negatives = 0;
  double acc = 0.0;
  for (auto* p : use) {
    if (p->Z < 0.0) ++negatives;
    acc += std::log(std::abs(p->Z)) - exponent * std::log(std::abs(p->X));
  }
  const double sign = (2 * negatives > (int)use.size()) ? -1.0 : 1.0;
  FitResult fr;
  fr.coefficient = sign * std::exp(acc / use.size());
  for (auto* p : use) {
    const double pred = fr.coefficient * std::pow(std::abs(p->X), exponent);
    fr.residual = std::max(fr.residual, std::abs(p->Z - pred) / std::abs(pred));
  }
  return fr;
}

FitResult fit_raw_slope(const std::vector<BranchPoint>& points, double r) {
  if (points.size() < 2) throw std::domain_error("fit_raw_slope: need at least 2 points");
  // least squares through the origin: z ~ s (x - r)
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - r;
    sxx += dx * dx;
    sxy += dx * p.z;
  }
  FitResult fr;
  fr.coefficient = sxy / sxx;
  for (const auto& p : points) {
    const double pred = fr.coefficient * (p.x - r);
    if (pred != 0.0)
      fr.residual = std::max(fr.residual, std::abs(p.z - pred) / std::abs(pred));
  }
  return fr;
}

}  // namespace sr::asymptotics
