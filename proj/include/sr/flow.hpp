#pragma once

#include <utility>
#include <vector>

#include "sr/models.hpp"

namespace sr::flow {

// Dense trajectory: states and derivatives at the accepted nodes, cubic
// Hermite in between.
struct Trajectory {
  std::vector<double> times;
  std::vector<GeodesicState> states;
  std::vector<GeodesicState> derivs;
  double max_energy_drift = 0.0;
  int steps_accepted = 0;
  int steps_rejected = 0;
  bool truncated = false;      // metric singularity cut the run short
  std::string truncate_reason;

  double t_end() const { return times.empty() ? 0.0 : times.back(); }
  GeodesicState eval(double t) const;
  GeodesicState eval_deriv(double t) const;
};

struct SectionHit {
  int n = 0;          // 1-based hit index
  double t = 0.0;     // arc-length time of the hit
  double x = 0.0, z = 0.0, w = 0.0;
  double theta0 = 0.0, lambda = 0.0;
  int sigma = 0;      // sign ydot(0), or sign yddot(0) when ydot(0) = 0
  bool degenerate = false;  // |ydot| < 1e-12 at the hit (tangential grazing)
  GeodesicState state;
};

enum class Section { Y0, X0, Z0 };

Trajectory integrate(const ModelSpec& spec, const GeodesicState& s0, double t_end, double tol);

std::pair<Trajectory, std::vector<SectionHit>> integrate_with_section(
    const ModelSpec& spec, const GeodesicState& s0, double t_end, int max_hits,
    double tol = 1e-12, Section section = Section::Y0);

// Pendulum phase-plane projection in the s = tau*sqrt(lambda) parametrization
// (Martinet families only).
struct PendulumPoint {
  double theta = 0.0;
  double dtheta_ds = 0.0;
  double s = 0.0;
};

PendulumPoint pendulum_project(const ModelSpec& spec, const GeodesicState& state);

// Projection along a whole trajectory; theta is unwrapped and s accumulated
// by quadrature of ds = sqrt(lambda) dt / (sqrt(a) sqrt(c)).
std::vector<PendulumPoint> pendulum_project(const ModelSpec& spec, const Trajectory& traj,
                                            int samples_per_step = 8);

// Residual of the section condition theta' = (alpha cos - beta sin)/sqrt(lambda)
// satisfied by projections of geodesics through the origin whenever y = 0.
double section_residual(const ModelSpec& spec, const GeodesicState& state);

// First integral of the conservative (beta = 0) pendulum,
// V = theta'^2/2 - (cos theta + eps^2 alpha^2 cos^2 theta / 2), eps = 1/sqrt(lambda).
double pendulum_first_integral(const ModelSpec& spec, const PendulumPoint& p, double lambda);

}  // namespace sr::flow
