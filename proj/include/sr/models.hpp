#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sr/error.hpp"

namespace sr {

using Vec4 = std::array<double, 4>;

enum class Family {
  MartinetFlat,
  MartinetGraded0,
  Heisenberg,
  ContactGraded1,
  TangentialElliptic,
  TangentialHyperbolic,
  EngelFlat,
  LiuSussmann,
};

// One catalogued model: rank-2 distribution plus orthonormal metric frame.
// MartinetFlat is MartinetGraded0 with alpha = beta = gamma = 0.
struct ModelSpec {
  Family family = Family::MartinetFlat;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;  // Martinet graded-0 metric
  double qa = 0.0, qb = 0.0, qc = 0.0;          // contact quadratic Q
  double eps = 0.0, m = 0.0;                    // tangential / Liu-Sussmann

  static ModelSpec martinet_flat();
  static ModelSpec martinet(double alpha, double beta, double gamma);
  static ModelSpec heisenberg();
  static ModelSpec contact(double a, double b, double c);
  static ModelSpec tangential_elliptic(double eps, double m);
  static ModelSpec tangential_hyperbolic(double eps, double m);
  static ModelSpec engel();
  static ModelSpec liu_sussmann(double eps);

  int dim() const { return family == Family::EngelFlat ? 4 : 3; }
  int frame_arity() const { return 2; }
  bool is_martinet() const {
    return family == Family::MartinetFlat || family == Family::MartinetGraded0;
  }
  std::string name() const;
};

// Configuration point q plus frame-adjoint momenta P_i = <p, F_i(q)>.
// Entries beyond dim() stay zero for 3-dimensional families.
struct GeodesicState {
  Vec4 q{};
  Vec4 P{};
};

struct CylinderCoords {
  double theta = 0.0;
  double lambda = 0.0;
};

// (q', P') of the normal Hamiltonian flow H_n = (P1^2 + P2^2)/2 in frame
// coordinates. Throws singular_metric_error where a metric factor vanishes.
GeodesicState hamiltonian_rhs(const ModelSpec& spec, const GeodesicState& s);

// Arc-length initial state at the origin: P1 = cos(theta0), P2 = sin(theta0),
// last momentum = lambda. Engel gets P3 = 0, P4 = lambda (overridable via p3).
GeodesicState cylinder_lift(const ModelSpec& spec, double theta0, double lambda,
                            double p3 = 0.0);

CylinderCoords cylinder_coords(const ModelSpec& spec, const GeodesicState& s);

// Abnormal geodesics. Line families evaluate to a point; tangential families
// integrate the planar Martinet-surface ODE from a seed.
struct AbnormalResult {
  bool is_line = true;
  Vec4 point{};                       // line families: gamma(t)
  std::vector<double> times;          // tangential families: sampled flow
  std::vector<std::array<double, 2>> xz;
  bool at_equilibrium = false;
};
AbnormalResult abnormal_flow(const ModelSpec& spec, double t, int sign,
                             std::optional<std::array<double, 2>> seed = std::nullopt);

// Full coordinate frame F_1..F_n at q (rows = frame fields).
using FrameMat = std::array<Vec4, 4>;
FrameMat frame_matrix(const ModelSpec& spec, const Vec4& q);

// Conversions between frame momenta P and canonical momenta p.
Vec4 momentum_from_P(const ModelSpec& spec, const Vec4& q, const Vec4& P);
Vec4 P_from_momentum(const ModelSpec& spec, const Vec4& q, const Vec4& p);

// Canonical Hamiltonian H(q, p) = ((A p)_1^2 + (A p)_2^2) / 2 and the exact
// canonical vector field, used by the variational module.
double hamiltonian(const ModelSpec& spec, const Vec4& q, const Vec4& p);
void canonical_rhs(const ModelSpec& spec, const Vec4& q, const Vec4& p, Vec4& dq, Vec4& dp);

}  // namespace sr
