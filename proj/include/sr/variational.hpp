#pragma once

#include <vector>

#include "sr/models.hpp"
#include "sr/sphere.hpp"

namespace sr::variational {

// Jacobi field along a normal geodesic, canonical coordinates. The linearized
// flow is co-integrated with the base; the Hamiltonian Hessian is evaluated by
// central finite differences of the canonical vector field.
struct JacobiField {
  std::vector<double> times;
  std::vector<Vec4> q, p;    // base trajectory
  std::vector<Vec4> dq, dp;  // variation along it
  bool vertical = false;     // dq(0) = 0
};

JacobiField jacobi_integrate(const ModelSpec& spec, const GeodesicState& s0, double t_end,
                             const Vec4& dq0, const Vec4& dp0, double tol = 1e-10);

// Conjugate times in (0, t_max]: zeros of det[ Pi J_1(t), ..., Pi J_{n-1}(t),
// qdot(t) ] where the J_i are the vertical fields spanning the tangent of the
// arc-length covector cylinder. Refined by bisection to 1e-6.
struct ConjugateResult {
  std::vector<double> times;
  bool degenerate = false;  // determinant numerically identically zero
};
ConjugateResult conjugate_times(const ModelSpec& spec, double theta0, double lambda,
                                double t_max, double p3 = 0.0);

// Sphere-tangency probe in the abnormal direction: unit normals of the trace
// samples and the limiting contact slope at the abnormal endpoint.
struct TangencyReport {
  std::vector<std::array<double, 2>> normals;  // per-segment unit normals, (x,z) plane
  double limit_slope_raw = 0.0;                // dz/dx at the endpoint
  double limit_slope_XZ = 0.0;                 // dZ/dX at the endpoint
  double limit_angle = 0.0;                    // tangent angle against z = 0
  int endpoint_sign = -1;                      // -1 -> (-r,0), +1 -> (r,0)
};
TangencyReport tangency_probe(const ModelSpec& spec, double r, const sphere::BranchCurve& branch);

}  // namespace sr::variational
