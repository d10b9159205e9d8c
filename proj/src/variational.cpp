#include "sr/variational.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sr/error.hpp"

namespace sr::variational {

namespace {

// Small self-contained RK45 on flat vectors (the combined base + variations
// system does not fit the GeodesicState shape used by the flow module).
struct DenseVecTraj {
  std::vector<double> times;
  std::vector<std::vector<double>> y, f;

  std::vector<double> eval(double t) const {
    if (t <= times.front()) return y.front();
    if (t >= times.back()) return y.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = std::min<std::size_t>(it - times.begin() - 1, times.size() - 2);
    const double h = times[i + 1] - times[i];
    const double u = (t - times[i]) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    const double h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u);
    const double h11 = u * u * (u - 1);
    std::vector<double> out(y[i].size());
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = h00 * y[i][j] + h * h10 * f[i][j] + h01 * y[i + 1][j] + h * h11 * f[i + 1][j];
    return out;
  }
};

using Rhs = std::function<void(const std::vector<double>&, std::vector<double>&)>;

DenseVecTraj rk45(const Rhs& rhs, std::vector<double> y0, double t_end, double tol) {
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  const std::size_t n = y0.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n), err(n);

  DenseVecTraj tr;
  double t = 0.0;
  rhs(y0, k1);
  tr.times.push_back(0.0);
  tr.y.push_back(y0);
  tr.f.push_back(k1);

  double h = std::min(t_end, 1e-2);
  const double hmin = t_end * 1e-15;
  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < hmin) throw stiffness_error("variational rk45: step underflow");
    auto comb = [&](std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = y0[i];
        for (auto& [w, kk] : terms) s += h * w * (*kk)[i];
        tmp[i] = s;
      }
    };
    comb({{a21, &k1}});
    rhs(tmp, k2);
    comb({{a31, &k1}, {a32, &k2}});
    rhs(tmp, k3);
    comb({{a41, &k1}, {a42, &k2}, {a43, &k3}});
    rhs(tmp, k4);
    comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    rhs(tmp, k5);
    comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    rhs(tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y0[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(ynew, k7);
    double errnorm = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      errnorm = std::max(errnorm, std::abs(err[i]));
      scale = std::max({scale, std::abs(y0[i]), std::abs(ynew[i])});
    }
    const double ratio = errnorm / (tol * scale);
    if (ratio <= 1.0) {
      t += h;
      y0 = ynew;
      k1 = k7;
      tr.times.push_back(t);
      tr.y.push_back(y0);
      tr.f.push_back(k1);
    }
    h *= std::clamp(0.9 * std::pow(std::max(ratio, 1e-10), -0.2), 0.2, 5.0);
  }
  return tr;
}

// Combined RHS: base canonical flow plus K variations driven by the
// finite-difference Jacobian of the canonical vector field.
Rhs make_combined_rhs(const ModelSpec& spec, int nvar) {
  const int n = spec.dim();
  return [spec, n, nvar](const std::vector<double>& y, std::vector<double>& dy) {
    Vec4 q{}, p{}, dqv{}, dpv{};
    for (int i = 0; i < n; ++i) q[i] = y[i];
    for (int i = 0; i < n; ++i) p[i] = y[n + i];
    canonical_rhs(spec, q, p, dqv, dpv);
    dy.assign(y.size(), 0.0);
    for (int i = 0; i < n; ++i) dy[i] = dqv[i];
    for (int i = 0; i < n; ++i) dy[n + i] = dpv[i];

    if (nvar == 0) return;
    // Jacobian of the canonical field by central differences.
    const int N2 = 2 * n;
    double scale = 1.0;
    for (int i = 0; i < N2; ++i) scale = std::max(scale, std::abs(y[i]));
    const double h = 1e-7 * scale;
    std::array<std::array<double, 8>, 8> J{};
    for (int j = 0; j < N2; ++j) {
      Vec4 qp = q, pp = p, qm = q, pm = p;
      if (j < n) {
        qp[j] += h;
        qm[j] -= h;
      } else {
        pp[j - n] += h;
        pm[j - n] -= h;
      }
      Vec4 dq1{}, dp1{}, dq2{}, dp2{};
      canonical_rhs(spec, qp, pp, dq1, dp1);
      canonical_rhs(spec, qm, pm, dq2, dp2);
      for (int i = 0; i < n; ++i) {
        J[i][j] = (dq1[i] - dq2[i]) / (2.0 * h);
        J[n + i][j] = (dp1[i] - dp2[i]) / (2.0 * h);
      }
    }
    for (int v = 0; v < nvar; ++v) {
      const int off = N2 * (1 + v);
      for (int i = 0; i < N2; ++i) {
        double s = 0.0;
        for (int j = 0; j < N2; ++j) s += J[i][j] * y[off + j];
        dy[off + i] = s;
      }
    }
  };
}

double det_n(std::array<Vec4, 4>& cols, int n) {
  // determinant of the n x n matrix whose columns are cols[0..n-1]
  double m[4][4];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = cols[j][i];
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m[piv][j], m[c][j]);
      det = -det;
    }
    if (m[c][c] == 0.0) return 0.0;
    det *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      for (int j = c; j < n; ++j) m[r][j] -= f * m[c][j];
    }
  }
  return det;
}

}  // namespace

JacobiField jacobi_integrate(const ModelSpec& spec, const GeodesicState& s0, double t_end,
                             const Vec4& dq0, const Vec4& dp0, double tol) {
  const int n = spec.dim();
  const Vec4 p0 = momentum_from_P(spec, s0.q, s0.P);
  std::vector<double> y0(2 * n * 2, 0.0);
  for (int i = 0; i < n; ++i) y0[i] = s0.q[i];
  for (int i = 0; i < n; ++i) y0[n + i] = p0[i];
  for (int i = 0; i < n; ++i) y0[2 * n + i] = dq0[i];
  for (int i = 0; i < n; ++i) y0[3 * n + i] = dp0[i];

  const DenseVecTraj tr = rk45(make_combined_rhs(spec, 1), y0, t_end, tol);
  JacobiField out;
  out.vertical = true;
  for (int i = 0; i < n; ++i) out.vertical = out.vertical && dq0[i] == 0.0;
  out.times = tr.times;
  out.q.resize(tr.times.size());
  out.p.resize(tr.times.size());
  out.dq.resize(tr.times.size());
  out.dp.resize(tr.times.size());
  for (std::size_t s = 0; s < tr.times.size(); ++s) {
    for (int i = 0; i < n; ++i) {
      out.q[s][i] = tr.y[s][i];
      out.p[s][i] = tr.y[s][n + i];
      out.dq[s][i] = tr.y[s][2 * n + i];
      out.dp[s][i] = tr.y[s][3 * n + i];
    }
  }
  return out;
}

ConjugateResult conjugate_times(const ModelSpec& spec, double theta0, double lambda,
                                double t_max, double p3) {
  const int n = spec.dim();
  const int nvar = n - 1;
  const GeodesicState s0 = cylinder_lift(spec, theta0, lambda, p3);
  const Vec4 p0 = momentum_from_P(spec, s0.q, s0.P);

  // Vertical basis: tangents of the initial covector manifold p(theta0,
  // lambda[, p3]) on the arc-length cylinder.
  std::array<Vec4, 3> dP_dirs{};
  dP_dirs[0] = {-std::sin(theta0), std::cos(theta0), 0.0, 0.0};
  if (spec.family == Family::EngelFlat) {
    dP_dirs[1] = {0.0, 0.0, 0.0, 1.0};  // d/d lambda = d/d P4
    dP_dirs[2] = {0.0, 0.0, 1.0, 0.0};  // d/d P3
  } else {
    dP_dirs[1] = {0.0, 0.0, 1.0, 0.0};  // d/d lambda = d/d P3
  }

  std::vector<double> y0(2 * n * (1 + nvar), 0.0);
  for (int i = 0; i < n; ++i) y0[i] = s0.q[i];
  for (int i = 0; i < n; ++i) y0[n + i] = p0[i];
  for (int v = 0; v < nvar; ++v) {
    const Vec4 dp = momentum_from_P(spec, s0.q, dP_dirs[v]);  // frame at 0
    for (int i = 0; i < n; ++i) y0[2 * n * (1 + v) + n + i] = dp[i];
  }

  const DenseVecTraj tr = rk45(make_combined_rhs(spec, nvar), y0, t_max, 1e-10);

  auto detval = [&](double t) {
    const std::vector<double> y = tr.eval(t);
    std::array<Vec4, 4> cols{};
    for (int v = 0; v < nvar; ++v)
      for (int i = 0; i < n; ++i) cols[v][i] = y[2 * n * (1 + v) + i];
    Vec4 q{}, p{}, dq{}, dp{};
    for (int i = 0; i < n; ++i) q[i] = y[i];
    for (int i = 0; i < n; ++i) p[i] = y[n + i];
    canonical_rhs(spec, q, p, dq, dp);
    cols[nvar] = dq;
    return det_n(cols, n);
  };

  ConjugateResult res;
  const int grid = std::max<int>(400, 40 * (int)tr.times.size());
  double maxabs = 0.0;
  std::vector<double> ts(grid + 1), ds(grid + 1);
  // the determinant vanishes like a power of t at the start; skip that layer
  const double t_start = 0.02 * t_max;
  for (int i = 0; i <= grid; ++i) {
    ts[i] = t_start + (t_max - t_start) * i / grid;
    ds[i] = detval(ts[i]);
    maxabs = std::max(maxabs, std::abs(ds[i]));
  }
  if (maxabs < 1e-14) {
    res.degenerate = true;
    return res;
  }
  const double floor = 1e-9 * maxabs;  // ignore noise-level wiggles
  for (int i = 0; i + 1 <= grid; ++i) {
    if (ds[i] * ds[i + 1] > 0.0) continue;
    if (std::abs(ds[i]) < floor && std::abs(ds[i + 1]) < floor) continue;
    double a = ts[i], b = ts[i + 1], fa = ds[i];
    for (int it = 0; it < 100 && (b - a) > 1e-7; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = detval(m);
      if (fa * fm <= 0.0) {
        b = m;
      } else {
        a = m;
        fa = fm;
      }
    }
    res.times.push_back(0.5 * (a + b));
  }
  std::sort(res.times.begin(), res.times.end());
  return res;
}

TangencyReport tangency_probe(const ModelSpec& spec, double r, const sphere::BranchCurve& branch) {
  (void)spec;
  TangencyReport rep;
  std::vector<sphere::BranchPoint> pts = branch.points;
  if (pts.size() < 2) throw std::domain_error("tangency_probe: need at least 2 samples");

  double mean_x = 0.0;
  for (auto& p : pts) mean_x += p.x;
  mean_x /= pts.size();
  rep.endpoint_sign = mean_x >= 0.0 ? 1 : -1;
  const double xe = rep.endpoint_sign * r;

  // proximity to the endpoint in normalized units
  auto xi = [&](const sphere::BranchPoint& p) { return std::abs(p.x - xe) / (2.0 * r); };
  std::sort(pts.begin(), pts.end(),
            [&](const auto& a, const auto& b) { return xi(a) > xi(b); });
  int close = 0;
  for (auto& p : pts)
    if (xi(p) < 0.1) ++close;
  if (close < 4) throw not_found_error("tangency_probe: insufficient data near the endpoint");

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double dx = pts[i + 1].x - pts[i].x;
    const double dz = pts[i + 1].z - pts[i].z;
    const double nn = std::hypot(dx, dz);
    if (nn == 0.0) continue;
    rep.normals.push_back({-dz / nn, dx / nn});
  }

  const auto& a = pts[pts.size() - 2];
  const auto& b = pts[pts.size() - 1];  // the two samples closest to the endpoint
  rep.limit_slope_raw = (b.z - a.z) / (b.x - a.x);
  rep.limit_slope_XZ = (b.Z - a.Z) / (b.X - a.X);
  rep.limit_angle = std::atan(std::abs(rep.limit_slope_raw));
  return rep;
}

}  // namespace sr::variational
