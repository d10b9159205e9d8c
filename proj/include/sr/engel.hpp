#pragma once

#include <vector>

#include "sr/models.hpp"

namespace sr::engel {

// First integrals of the Engel geodesic flow: the Hamiltonian level
// h = P1^2 + P2^2 and the two Casimirs C = -2 P1 P4 + P3^2 and P4.
struct EngelIntegrals {
  double h = 0.0;
  double casimir_c = 0.0;
  double p4 = 0.0;
};

EngelIntegrals engel_integrals(const GeodesicState& s);

// Reductions of the Engel flow onto the two 3-dimensional models.
//   p_z = 0 (P3 = y P4): the (x, y, w) components follow the flat-Martinet
//     geodesic with lambda = P4, under the dictionary Engel w <-> Martinet z.
//   p_w = 0 (P4 = 0, P3 = lambda): the (x, y, z) components follow the
//     Heisenberg geodesic up to the exact gauge z_heis = z_engel - x y / 2
//     (the paper's contact frame dx +- (y/2,-x/2) dz differs from the Engel
//     z-row by the differential of x y / 2).
struct ReductionDeviation {
  double max_dev_heisenberg = 0.0;
  double max_dev_martinet = 0.0;
};
ReductionDeviation reduction_check(double theta0, double lambda,
                                   const std::vector<double>& t_grid, double tol = 1e-12);

// Residual of the pendulum equivalence thetadd + P4 sin(theta) = 0 along an
// integrated Engel trajectory (max over checkpoints).
double pendulum_residual(double theta0, double lambda, double t_end, double tol = 1e-11);

}  // namespace sr::engel
