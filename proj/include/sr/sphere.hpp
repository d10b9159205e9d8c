#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sr/flow.hpp"
#include "sr/models.hpp"
#include "sr/parallel.hpp"

namespace sr::sphere {

enum class BranchTag { C1bar, C1, C2, D1, D2, Generic };

std::string branch_tag_name(BranchTag tag);

// One normalized sphere/wave-front trace point: X = (x+r)/(2r), Z = z/r^3.
struct BranchPoint {
  double X = 0.0, Z = 0.0;
  double x = 0.0, z = 0.0;
  double theta0 = 0.0, lambda = 0.0;
  double k = 0.0, kprime = 0.0;  // modulus of the generating pendulum when known
  int n = 0;                     // hit index
  double t = 0.0;                // arc length at the hit (= r after root-finding)
};

struct BranchCurve {
  BranchTag tag = BranchTag::Generic;
  double r = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  std::vector<BranchPoint> points;
};

// n-th intersection of the geodesic from the origin with y = 0; nullopt when
// the trajectory rides a separatrix and never comes back.
std::optional<flow::SectionHit> return_map(const ModelSpec& spec, double theta0, double lambda,
                                           int n, double tol = 1e-12);

// Exact flat-case trace curves C_i(k):
//   x_i = -r + 2 r E/K,  z_i = r^3/(6 i^2 K^3) [(2k^2-1)E + k'^2 K].
BranchCurve sphere_trace_flat(double r, int i, const std::vector<double>& k_grid);

// Same point parametrized by k'; usable where k' is too small for k = 1 - k'^2/2
// to stay below one in double precision (the abnormal-direction regime).
BranchPoint flat_trace_point_from_kprime(double r, int i, double kprime);

// Numeric trace: root-find the free parameter so the n-th hit time equals r.
struct SweepSpec {
  enum class Var { Theta0, Lambda } var = Var::Theta0;
  std::vector<double> values;
  // rotating window sampling for D-branches: theta0 = -pi + u, u in values
  bool near_saddle = false;
};
BranchCurve sphere_trace_numeric(const ModelSpec& spec, double r, int n, const SweepSpec& sweep,
                                 Exec exec = Exec::Parallel);

// Wave front of length r.
struct WavefrontPoint {
  double theta0 = 0.0, lambda = 0.0;
  double x = 0.0, y = 0.0, z = 0.0, w = 0.0;
  int n = 0;        // hit index for slice mode, 0 for cloud / abnormal points
  bool abnormal = false;
  bool ok = true;
  std::string reason;
};
enum class WavefrontMode { SliceY0, Cloud3d };
std::vector<WavefrontPoint> wavefront_trace(const ModelSpec& spec, double r,
                                            const std::vector<double>& theta_grid,
                                            const std::vector<double>& lambda_grid,
                                            WavefrontMode mode, int max_hits = 6,
                                            Exec exec = Exec::Parallel);

// Flat cut locus L(0,r) = C_1 u -C_1; every point is reached by the two
// minimizers (theta0, lambda) and (-theta0, lambda).
struct CutPoint {
  BranchPoint p;
  double theta0_a = 0.0, theta0_b = 0.0, lambda = 0.0;
};
std::pair<std::vector<CutPoint>, std::vector<CutPoint>> cut_locus_flat(
    double r, const std::vector<double>& k_grid);

// Non-properness probe: for each lambda solve k' so that R_1 lands on
// x = -r; k'(lambda) decays like exp(-r sqrt(lambda)/2) (logarithmic branch).
struct ProbeSample {
  double lambda = 0.0;
  double kprime = 0.0;
  double x = 0.0, z = 0.0;
  double dist = 0.0;  // distance of (x,z) to (-r, 0)
};
std::vector<ProbeSample> nonproper_probe(double r, const std::vector<double>& lambdas);

// Least-squares fit of ln k' = a + b sqrt(lambda); returns (a, b, R^2).
std::array<double, 3> probe_loglinear_fit(const std::vector<ProbeSample>& samples);

}  // namespace sr::sphere
