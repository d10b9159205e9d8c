#include "sr/models.hpp"

#include <cmath>

namespace sr {

namespace {

constexpr double kMetricTol = 1e-12;

// Tangential-case distribution coefficient g with dy = g dz on the leaf:
// elliptic  g = eps*x*y + x^3/3 + x*z^2 + m*x^3*z^2
// hyperbolic g = eps*x*y + x^2*z + m*x^3*z^2
double tang_g(const ModelSpec& s, double x, double y, double z) {
  if (s.family == Family::TangentialElliptic)
    return s.eps * x * y + x * x * x / 3.0 + x * z * z + s.m * x * x * x * z * z;
  return s.eps * x * y + x * x * z + s.m * x * x * x * z * z;
}
double tang_gx(const ModelSpec& s, double x, double y, double z) {
  if (s.family == Family::TangentialElliptic)
    return s.eps * y + x * x + z * z + 3.0 * s.m * x * x * z * z;
  return s.eps * y + 2.0 * x * z + 3.0 * s.m * x * x * z * z;
}
double tang_gy(const ModelSpec& s, double x) { return s.eps * x; }
double tang_gz(const ModelSpec& s, double x, double z) {
  if (s.family == Family::TangentialElliptic) return 2.0 * x * z + 2.0 * s.m * x * x * x * z;
  return x * x + 2.0 * s.m * x * x * x * z;
}

double contact_Q(const ModelSpec& s, double x, double y) {
  return s.qa * x * x + 2.0 * s.qb * x * y + s.qc * y * y;
}

void solve4(FrameMat A, Vec4 rhs, int n, Vec4& out) {
  // Gaussian elimination with partial pivoting on the n x n block.
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    std::swap(A[piv], A[col]);
    std::swap(rhs[piv], rhs[col]);
    if (std::abs(A[col][col]) < 1e-300) throw singular_metric_error("frame matrix singular");
    for (int r = col + 1; r < n; ++r) {
      const double f = A[r][col] / A[col][col];
      for (int c2 = col; c2 < n; ++c2) A[r][c2] -= f * A[col][c2];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int c2 = r + 1; c2 < n; ++c2) s -= A[r][c2] * out[c2];
    out[r] = s / A[r][r];
  }
}

}  // namespace

ModelSpec ModelSpec::martinet_flat() { return ModelSpec{}; }
ModelSpec ModelSpec::martinet(double alpha, double beta, double gamma) {
  ModelSpec s;
  s.family = Family::MartinetGraded0;
  s.alpha = alpha;
  s.beta = beta;
  s.gamma = gamma;
  return s;
}
ModelSpec ModelSpec::heisenberg() {
  ModelSpec s;
  s.family = Family::Heisenberg;
  return s;
}
ModelSpec ModelSpec::contact(double a, double b, double c) {
  ModelSpec s;
  s.family = Family::ContactGraded1;
  s.qa = a;
  s.qb = b;
  s.qc = c;
  return s;
}
ModelSpec ModelSpec::tangential_elliptic(double eps, double m) {
  ModelSpec s;
  s.family = Family::TangentialElliptic;
  s.eps = eps;
  s.m = m;
  return s;
}
ModelSpec ModelSpec::tangential_hyperbolic(double eps, double m) {
  ModelSpec s;
  s.family = Family::TangentialHyperbolic;
  s.eps = eps;
  s.m = m;
  return s;
}
ModelSpec ModelSpec::engel() {
  ModelSpec s;
  s.family = Family::EngelFlat;
  return s;
}
ModelSpec ModelSpec::liu_sussmann(double eps) {
  ModelSpec s;
  s.family = Family::LiuSussmann;
  s.eps = eps;
  return s;
}

std::string ModelSpec::name() const {
  switch (family) {
    case Family::MartinetFlat: return "martinet-flat";
    case Family::MartinetGraded0: return "martinet-graded0";
    case Family::Heisenberg: return "heisenberg";
    case Family::ContactGraded1: return "contact";
    case Family::TangentialElliptic: return "tangential-elliptic";
    case Family::TangentialHyperbolic: return "tangential-hyperbolic";
    case Family::EngelFlat: return "engel";
    case Family::LiuSussmann: return "liu-sussmann";
  }
  return "?";
}

GeodesicState hamiltonian_rhs(const ModelSpec& spec, const GeodesicState& s) {
  GeodesicState d{};
  const double x = s.q[0], y = s.q[1];
  const double P1 = s.P[0], P2 = s.P[1], P3 = s.P[2], P4 = s.P[3];

  switch (spec.family) {
    case Family::MartinetFlat:
    case Family::MartinetGraded0: {
      const double sa = 1.0 + spec.alpha * y;
      const double sc = 1.0 + spec.beta * x + spec.gamma * y;
      if (std::abs(sa) < kMetricTol || std::abs(sc) < kMetricTol)
        throw singular_metric_error("martinet: metric coefficient vanished");
      d.q[0] = P1 / sa;
      d.q[1] = P2 / sc;
      d.q[2] = 0.5 * y * y * P1 / sa;
      const double G = (y * P3 - spec.alpha * P1 + spec.beta * P2) / (sa * sc);
      d.P[0] = P2 * G;
      d.P[1] = -P1 * G;
      d.P[2] = 0.0;
      break;
    }
    case Family::Heisenberg:
    case Family::ContactGraded1: {
      const double Q = contact_Q(spec, x, y);
      d.q[0] = P1;
      d.q[1] = P2;
      d.q[2] = 0.5 * (1.0 + Q) * (y * P1 - x * P2);
      const double w = (1.0 + 2.0 * Q) * P3;
      d.P[0] = w * P2;
      d.P[1] = -w * P1;
      d.P[2] = 0.0;
      break;
    }
    case Family::TangentialElliptic:
    case Family::TangentialHyperbolic: {
      const double z = s.q[2];
      const double g = tang_g(spec, x, y, z);
      const double gx = tang_gx(spec, x, y, z);
      d.q[0] = P1;
      d.q[1] = g * P2;
      d.q[2] = P2;
      d.P[0] = -gx * P2 * P3;
      d.P[1] = gx * P1 * P3;
      d.P[2] = -spec.eps * x * P2 * P3;
      break;
    }
    case Family::EngelFlat: {
      d.q[0] = P1;
      d.q[1] = P2;
      d.q[2] = y * P1;
      d.q[3] = 0.5 * y * y * P1;
      d.P[0] = P2 * P3;
      d.P[1] = -P1 * P3;
      d.P[2] = P2 * P4;
      d.P[3] = 0.0;
      break;
    }
    case Family::LiuSussmann: {
      const double w = 1.0 + spec.eps * y;
      if (std::abs(w) < kMetricTol)
        throw singular_metric_error("liu-sussmann: 1 + eps*y vanished");
      const double px = (P1 - 0.5 * y * y * P3) / w;
      d.q[0] = w * P1;
      d.q[1] = P2;
      d.q[2] = 0.5 * y * y * P1;
      const double G = spec.eps * px + y * P3;
      d.P[0] = G * P2;
      d.P[1] = -G * P1;
      d.P[2] = 0.0;
      break;
    }
  }
  return d;
}

GeodesicState cylinder_lift(const ModelSpec& spec, double theta0, double lambda, double p3) {
  GeodesicState s{};
  s.P[0] = std::cos(theta0);
  s.P[1] = std::sin(theta0);
  if (spec.family == Family::EngelFlat) {
    s.P[2] = p3;
    s.P[3] = lambda;
  } else {
    s.P[2] = lambda;
  }
  return s;
}

CylinderCoords cylinder_coords(const ModelSpec& spec, const GeodesicState& s) {
  CylinderCoords c;
  c.theta = std::atan2(s.P[1], s.P[0]);
  c.lambda = (spec.family == Family::EngelFlat) ? s.P[3] : s.P[2];
  return c;
}

AbnormalResult abnormal_flow(const ModelSpec& spec, double t, int sign,
                             std::optional<std::array<double, 2>> seed) {
  AbnormalResult r;
  const double s = (sign >= 0 ? 1.0 : -1.0);
  switch (spec.family) {
    case Family::MartinetFlat:
    case Family::MartinetGraded0:
    case Family::LiuSussmann:
      r.point = {s * t, 0.0, 0.0, 0.0};
      return r;
    case Family::Heisenberg:
    case Family::ContactGraded1:
      throw std::domain_error("abnormal_flow: contact distributions have no abnormal geodesics");
    case Family::EngelFlat:
      r.point = {s * t, 0.0, 0.0, 0.0};
      return r;
    case Family::TangentialElliptic:
    case Family::TangentialHyperbolic:
      break;
  }

  // Planar abnormal ODE inside the Martinet surface.
  r.is_line = false;
  double x = seed ? (*seed)[0] : 0.0;
  double z = seed ? (*seed)[1] : 0.0;
  if (std::abs(x) < 1e-14 && std::abs(z) < 1e-14) {
    r.at_equilibrium = true;
    r.times = {0.0, t};
    r.xz = {{x, z}, {x, z}};
    return r;
  }
  auto rhs = [&](double X, double Z, double& dX, double& dZ) {
    if (spec.family == Family::TangentialElliptic) {
      dX = (2.0 * Z + 6.0 * spec.m * X * X * Z) -
           spec.eps * (2.0 * X * X * X / 3.0 + 2.0 * spec.m * X * X * X * Z * Z);
      dZ = -(2.0 * X + 6.0 * spec.m * X * X * Z);
    } else {
      dX = 2.0 * X - X * X * Z * (spec.eps - 6.0 * spec.m) - 2.0 * spec.m * X * X * X * Z * Z;
      dZ = -(2.0 * Z + 6.0 * spec.m * X * X * Z * Z);
    }
  };
  const int steps = 2000;
  const double h = s * t / steps;
  r.times.reserve(steps + 1);
  r.xz.reserve(steps + 1);
  r.times.push_back(0.0);
  r.xz.push_back({x, z});
  for (int i = 0; i < steps; ++i) {
    double k1x, k1z, k2x, k2z, k3x, k3z, k4x, k4z;
    rhs(x, z, k1x, k1z);
    rhs(x + 0.5 * h * k1x, z + 0.5 * h * k1z, k2x, k2z);
    rhs(x + 0.5 * h * k2x, z + 0.5 * h * k2z, k3x, k3z);
    rhs(x + h * k3x, z + h * k3z, k4x, k4z);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    r.times.push_back((i + 1) * h);
    r.xz.push_back({x, z});
  }
  return r;
}

FrameMat frame_matrix(const ModelSpec& spec, const Vec4& q) {
  FrameMat F{};
  const double x = q[0], y = q[1], z = q[2];
  switch (spec.family) {
    case Family::MartinetFlat:
    case Family::MartinetGraded0: {
      const double sa = 1.0 + spec.alpha * y;
      const double sc = 1.0 + spec.beta * x + spec.gamma * y;
      if (std::abs(sa) < kMetricTol || std::abs(sc) < kMetricTol)
        throw singular_metric_error("martinet: metric coefficient vanished");
      F[0] = {1.0 / sa, 0.0, 0.5 * y * y / sa, 0.0};
      F[1] = {0.0, 1.0 / sc, 0.0, 0.0};
      F[2] = {0.0, 0.0, 1.0, 0.0};
      break;
    }
    case Family::Heisenberg:
    case Family::ContactGraded1: {
      const double Q = contact_Q(spec, x, y);
      F[0] = {1.0, 0.0, 0.5 * y * (1.0 + Q), 0.0};
      F[1] = {0.0, 1.0, -0.5 * x * (1.0 + Q), 0.0};
      F[2] = {0.0, 0.0, 1.0, 0.0};
      break;
    }
    case Family::TangentialElliptic:
    case Family::TangentialHyperbolic: {
      F[0] = {1.0, 0.0, 0.0, 0.0};
      F[1] = {0.0, tang_g(spec, x, y, z), 1.0, 0.0};
      F[2] = {0.0, 1.0, 0.0, 0.0};
      break;
    }
    case Family::EngelFlat: {
      F[0] = {1.0, 0.0, y, 0.5 * y * y};
      F[1] = {0.0, 1.0, 0.0, 0.0};
      F[2] = {0.0, 0.0, 1.0, y};
      F[3] = {0.0, 0.0, 0.0, 1.0};
      break;
    }
    case Family::LiuSussmann: {
      const double w = 1.0 + spec.eps * y;
      if (std::abs(w) < kMetricTol)
        throw singular_metric_error("liu-sussmann: 1 + eps*y vanished");
      F[0] = {w, 0.0, 0.5 * y * y, 0.0};
      F[1] = {0.0, 1.0, 0.0, 0.0};
      F[2] = {0.0, 0.0, 1.0, 0.0};
      break;
    }
  }
  return F;
}

Vec4 P_from_momentum(const ModelSpec& spec, const Vec4& q, const Vec4& p) {
  const FrameMat F = frame_matrix(spec, q);
  Vec4 P{};
  const int n = spec.dim();
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += F[i][j] * p[j];
    P[i] = s;
  }
  return P;
}

Vec4 momentum_from_P(const ModelSpec& spec, const Vec4& q, const Vec4& P) {
  const FrameMat F = frame_matrix(spec, q);
  Vec4 p{};
  solve4(F, P, spec.dim(), p);
  return p;
}

double hamiltonian(const ModelSpec& spec, const Vec4& q, const Vec4& p) {
  const FrameMat F = frame_matrix(spec, q);
  const int n = spec.dim();
  double P1 = 0.0, P2 = 0.0;
  for (int j = 0; j < n; ++j) {
    P1 += F[0][j] * p[j];
    P2 += F[1][j] * p[j];
  }
  return 0.5 * (P1 * P1 + P2 * P2);
}

void canonical_rhs(const ModelSpec& spec, const Vec4& q, const Vec4& p, Vec4& dq, Vec4& dp) {
  const int n = spec.dim();
  const FrameMat F = frame_matrix(spec, q);
  double P1 = 0.0, P2 = 0.0;
  for (int j = 0; j < n; ++j) {
    P1 += F[0][j] * p[j];
    P2 += F[1][j] * p[j];
  }
  dq = {};
  dp = {};
  for (int j = 0; j < n; ++j) dq[j] = P1 * F[0][j] + P2 * F[1][j];

  // dp_j = -(P1 <p, dF1/dq_j> + P2 <p, dF2/dq_j>); frame Jacobians are sparse.
  const double x = q[0], y = q[1], z = q[2];
  auto add = [&](int j, double v) { dp[j] -= v; };
  switch (spec.family) {
    case Family::MartinetFlat:
    case Family::MartinetGraded0: {
      const double sa = 1.0 + spec.alpha * y;
      const double sc = 1.0 + spec.beta * x + spec.gamma * y;
      // dF1/dy = -alpha/sa^2 (1,0,y^2/2) + 1/sa (0,0,y);  dF2/dx, dF2/dy on e_y.
      const double dF1y_p =
          (-spec.alpha / (sa * sa)) * (p[0] + 0.5 * y * y * p[2]) + (y / sa) * p[2];
      add(1, P1 * dF1y_p);
      add(0, P2 * (-spec.beta / (sc * sc)) * p[1]);
      add(1, P2 * (-spec.gamma / (sc * sc)) * p[1]);
      break;
    }
    case Family::Heisenberg:
    case Family::ContactGraded1: {
      const double Q = contact_Q(spec, x, y);
      const double Qx = 2.0 * spec.qa * x + 2.0 * spec.qb * y;
      const double Qy = 2.0 * spec.qb * x + 2.0 * spec.qc * y;
      add(0, P1 * (0.5 * y * Qx) * p[2] + P2 * (-0.5 * (1.0 + Q) - 0.5 * x * Qx) * p[2]);
      add(1, P1 * (0.5 * (1.0 + Q) + 0.5 * y * Qy) * p[2] + P2 * (-0.5 * x * Qy) * p[2]);
      break;
    }
    case Family::TangentialElliptic:
    case Family::TangentialHyperbolic: {
      add(0, P2 * tang_gx(spec, x, y, z) * p[1]);
      add(1, P2 * tang_gy(spec, x) * p[1]);
      add(2, P2 * tang_gz(spec, x, z) * p[1]);
      break;
    }
    case Family::EngelFlat: {
      add(1, P1 * (p[2] + y * p[3]));
      break;
    }
    case Family::LiuSussmann: {
      add(1, P1 * (spec.eps * p[0] + y * p[2]));
      break;
    }
  }
}

}  // namespace sr
