#include "sr/engel.hpp"

#include <algorithm>
#include <cmath>

#include "sr/exact.hpp"
#include "sr/flow.hpp"

namespace sr::engel {

EngelIntegrals engel_integrals(const GeodesicState& s) {
  EngelIntegrals e;
  e.h = s.P[0] * s.P[0] + s.P[1] * s.P[1];
  e.casimir_c = -2.0 * s.P[0] * s.P[3] + s.P[2] * s.P[2];
  e.p4 = s.P[3];
  return e;
}

ReductionDeviation reduction_check(double theta0, double lambda,
                                   const std::vector<double>& t_grid, double tol) {
  ReductionDeviation out;
  const ModelSpec eng = ModelSpec::engel();
  const double t_end = *std::max_element(t_grid.begin(), t_grid.end());

  // p_z = 0 branch: P3(0) = 0, P4 = lambda -> flat Martinet in (x, y, w).
  {
    const GeodesicState s0 = cylinder_lift(eng, theta0, lambda, /*p3=*/0.0);
    const auto tr = flow::integrate(eng, s0, std::max(t_end, 1e-12), tol);
    const ModelSpec mart = ModelSpec::martinet_flat();
    const GeodesicState m0 = cylinder_lift(mart, theta0, lambda);
    const auto trm = flow::integrate(mart, m0, std::max(t_end, 1e-12), tol);
    for (double t : t_grid) {
      const GeodesicState e = tr.eval(t);
      const GeodesicState m = trm.eval(t);
      const double d = std::max({std::abs(e.q[0] - m.q[0]), std::abs(e.q[1] - m.q[1]),
                                 std::abs(e.q[3] - m.q[2])});
      out.max_dev_martinet = std::max(out.max_dev_martinet, d);
    }
  }

  // p_w = 0 branch: P3 = lambda, P4 = 0 -> Heisenberg in (x, y, z - xy/2).
  {
    GeodesicState s0 = cylinder_lift(eng, theta0, 0.0, /*p3=*/lambda);
    const auto tr = flow::integrate(eng, s0, std::max(t_end, 1e-12), tol);
    for (double t : t_grid) {
      const GeodesicState e = tr.eval(t);
      const auto h = exact::heisenberg_geodesic(theta0, lambda, t);
      const double zg = e.q[2] - 0.5 * e.q[0] * e.q[1];
      const double d = std::max({std::abs(e.q[0] - h.x), std::abs(e.q[1] - h.y),
                                 std::abs(zg - h.z)});
      out.max_dev_heisenberg = std::max(out.max_dev_heisenberg, d);
    }
  }
  return out;
}

double pendulum_residual(double theta0, double lambda, double t_end, double tol) {
  const ModelSpec eng = ModelSpec::engel();
  const GeodesicState s0 = cylinder_lift(eng, theta0, lambda);
  const auto tr = flow::integrate(eng, s0, t_end, tol);
  // theta from (P1, P2) along the Engel flow must follow the pendulum
  // thetadd + lambda sin(theta) = 0 with theta(0) = theta0, thetadot(0) = -P3(0).
  double th = theta0, w = -s0.P[2];
  const int steps = 200000;
  const double h = t_end / steps;
  double worst = 0.0;
  double unwrapped = theta0;
  double prev_raw = theta0;
  for (int i = 1; i <= steps; ++i) {
    auto acc = [&](double a) { return -lambda * std::sin(a); };
    const double k1t = w, k1w = acc(th);
    const double k2t = w + 0.5 * h * k1w, k2w = acc(th + 0.5 * h * k1t);
    const double k3t = w + 0.5 * h * k2w, k3w = acc(th + 0.5 * h * k2t);
    const double k4t = w + h * k3w, k4w = acc(th + h * k3t);
    th += h / 6.0 * (k1t + 2 * k2t + 2 * k3t + k4t);
    w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
    if (i % 1000 == 0) {
      const GeodesicState s = tr.eval(i * h);
      const double raw = std::atan2(s.P[1], s.P[0]);
      double d = raw - prev_raw;
      while (d > 3.141592653589793) d -= 2 * 3.141592653589793;
      while (d < -3.141592653589793) d += 2 * 3.141592653589793;
      unwrapped += d;
      prev_raw = raw;
      worst = std::max(worst, std::abs(unwrapped - th));
    }
  }
  return worst;
}

}  // namespace sr::engel
