#include "sr/exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sr::exact {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// 32-point Gauss-Legendre nodes on [-1,1], computed once by Newton iteration.
struct GaussTable {
  std::array<double, 32> x{}, w{};
  GaussTable() {
    const int n = 32;
    for (int i = 0; i < n / 2; ++i) {
      double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = t;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1.0);
        const double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-16) break;
      }
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      x[i] = -t;
      x[n - 1 - i] = t;
      w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
  }
};

const GaussTable& gauss() {
  static const GaussTable table;
  return table;
}

double gl_panel(const std::function<double(double)>& f, double a, double b) {
  const auto& g = gauss();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 32; ++i) s += g.w[i] * f(mid + half * g.x[i]);
  return s * half;
}

// Panel-doubling Gauss-Legendre to absolute tolerance.
double gl_adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
  double prev = gl_panel(f, a, b);
  int panels = 2;
  for (int it = 0; it < 12; ++it) {
    double cur = 0.0;
    const double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) cur += gl_panel(f, a + i * h, a + (i + 1) * h);
    if (std::abs(cur - prev) <= tol) return cur;
    prev = cur;
    panels *= 2;
  }
  return prev;
}

}  // namespace

double QuarticData::eval(double y) const {
  double v = 0.0;
  for (int i = 4; i >= 0; --i) v = v * y + coeff[i];
  return v;
}

QuarticData characteristic_quartic(double alpha, double p_x, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("characteristic_quartic: lambda must be > 0");
  QuarticData q;
  q.coeff = {1.0 - p_x * p_x, 2.0 * alpha, alpha * alpha - p_x * lambda, 0.0,
             -0.25 * lambda * lambda};
  q.m2 = 0.5 * (1.0 - p_x + alpha * alpha / (2.0 * lambda));
  q.mpp = 0.5 * (1.0 + p_x - alpha * alpha / (2.0 * lambda));

  if (std::abs(q.mpp) <= 1e-10)
    q.cls = QuarticClass::Critical;
  else if (q.mpp < 0.0)
    q.cls = QuarticClass::FourReal;
  else
    q.cls = QuarticClass::TwoReal;

  const double sl = std::sqrt(lambda);
  if (q.m2 > 0.0) {
    const double m = std::sqrt(q.m2);
    q.y_minus = alpha / lambda - 2.0 * m / sl;
    q.y_plus = alpha / lambda + 2.0 * m / sl;
    q.real_roots.push_back(q.y_minus);
    q.real_roots.push_back(q.y_plus);
  }
  if (q.mpp < 0.0) {
    const double r = 2.0 * std::sqrt(-q.mpp) / sl;
    q.real_roots.push_back(-alpha / lambda - r);
    q.real_roots.push_back(-alpha / lambda + r);
  }
  std::sort(q.real_roots.begin(), q.real_roots.end());
  return q;
}

FlatGeodesicParams FlatGeodesicParams::make(double theta0, double lambda) {
  FlatGeodesicParams p;
  p.theta0 = theta0;
  p.lambda = lambda;
  const double th = std::abs(std::remainder(theta0, 2.0 * kPi));
  if (th < 1e-14 || std::abs(th - kPi) < 1e-14)
    throw std::domain_error("flat_geodesic: theta0 on the abnormal/separatrix direction");
  if (lambda == 0.0) throw std::domain_error("flat_geodesic: lambda = 0 (equator)");
  p.mod = elliptic::Modulus::from_k2(0.5 * (1.0 - std::cos(th)));
  return p;
}

std::array<double, 3> flat_geodesic(const FlatGeodesicParams& p, double t) {
  double theta = std::remainder(p.theta0, 2.0 * kPi);
  double lambda = p.lambda;
  bool flip_xz = false, flip_y = false;

  if (lambda < 0.0) {  // S2: (x,y,z) -> (-x,y,-z), theta -> pi - theta
    flip_xz = true;
    lambda = -lambda;
    theta = std::remainder(kPi - theta, 2.0 * kPi);
  }
  if (theta < 0.0) {  // S1: (x,y,z) -> (x,-y,z), theta -> -theta
    flip_y = true;
    theta = -theta;
  }

  const elliptic::Modulus mod = elliptic::Modulus::from_k2(0.5 * (1.0 - std::cos(theta)));
  const auto [K, E] = elliptic::complete_integrals(mod);
  const double sl = std::sqrt(lambda);
  const double u = K + t * sl;
  const auto j = elliptic::jacobi_functions(u, mod);
  const double Eu = elliptic::jacobi_epsilon(u, mod);
  const double k = mod.k, kp2 = mod.kprime2();

  double y = -(2.0 * k / sl) * j.cn;
  double x = -t + (2.0 / sl) * (Eu - E);
  double z = (2.0 / (3.0 * lambda * sl)) *
             ((2.0 * k * k - 1.0) * (Eu - E) + kp2 * t * sl + 2.0 * k * k * j.sn * j.cn * j.dn);

  if (flip_y) y = -y;
  if (flip_xz) {
    x = -x;
    z = -z;
  }
  return {x, y, z};
}

HeisenbergPoint heisenberg_geodesic(double theta0, double lambda, double t) {
  HeisenbergPoint out;
  if (lambda == 0.0) {
    out.x = t * std::cos(theta0);
    out.y = t * std::sin(theta0);
    out.z = 0.0;
    out.straight_line = true;
    return out;
  }
  // theta(t) = theta0 - lambda t for the frame F1 = dx + (y/2)dz, F2 = dy - (x/2)dz.
  out.x = (std::sin(theta0) - std::sin(theta0 - lambda * t)) / lambda;
  out.y = (std::cos(theta0 - lambda * t) - std::cos(theta0)) / lambda;
  out.z = (lambda * t - std::sin(lambda * t)) / (2.0 * lambda * lambda);
  return out;
}

ConservativeIntegrals conservative_integrals(double alpha, double gamma, double p_x,
                                             double lambda, int N, int sigma) {
  if (!(lambda > 0.0)) throw std::domain_error("conservative_integrals: lambda must be > 0");
  if (N < 1) throw std::domain_error("conservative_integrals: N must be >= 1");
  if (sigma != 1 && sigma != -1) throw std::domain_error("conservative_integrals: sigma = +-1");

  const QuarticData q = characteristic_quartic(alpha, p_x, lambda);
  if (q.cls == QuarticClass::Critical)
    throw divergence_error("conservative_integrals: critical case m'' = 0, infinite period");
  if (q.m2 <= 0.0 || !(q.y_minus < 0.0 && q.y_plus > 0.0))
    throw std::domain_error("conservative_integrals: no oscillation through y = 0");
  if (q.cls == QuarticClass::FourReal) {
    // inner factor roots must stay outside the oscillation interval
    const double r = 2.0 * std::sqrt(-q.mpp) / std::sqrt(lambda);
    const double f1 = -alpha / lambda - r, f2 = -alpha / lambda + r;
    if ((f1 > q.y_minus && f1 < q.y_plus) || (f2 > q.y_minus && f2 < q.y_plus))
      throw std::domain_error("conservative_integrals: root configuration not oscillatory");
  }

  const double ym = q.y_minus, yp = q.y_plus;
  auto sa = [&](double y) { return 1.0 + alpha * y; };
  auto sc = [&](double y) { return 1.0 + gamma * y; };
  if (sa(ym) <= 0.0 || sa(yp) <= 0.0 || sc(ym) <= 0.0 || sc(yp) <= 0.0)
    throw singular_metric_error("conservative_integrals: metric sign change on the oscillation");

  // F = (lambda/2)(y_+ - y)(y - y_-) F2(y); regularized kernel excludes
  // the root factors handled by the y = y_+- -+ u^2 substitutions.
  auto F2 = [&](double y) {
    const double v = y + alpha / lambda;
    return 2.0 * q.mpp + 0.5 * lambda * v * v;
  };
  auto kernel = [&](double y, const std::function<double(double)>& h) {
    return h(y) / std::sqrt(0.5 * lambda * F2(y));
  };

  auto hx = [&](double y) { return sc(y) * (p_x + 0.5 * lambda * y * y) / sa(y); };
  auto hz = [&](double y) { return 0.5 * y * y * hx(y); };
  auto hper = [&](double y) { return sa(y) * sc(y); };

  const double quad_tol = 1e-11;
  const double mid = 0.5 * (ym + yp);

  // int_{y_-}^{mid} h / sqrt(F): y = y_- + u^2 regularizes the left root.
  auto left_half = [&](const std::function<double(double)>& h) {
    return gl_adaptive(
        [&](double u) {
          const double y = ym + u * u;
          return 2.0 * kernel(y, h) / std::sqrt(yp - y);
        },
        0.0, std::sqrt(mid - ym), quad_tol);
  };
  auto right_half = [&](const std::function<double(double)>& h) {
    return gl_adaptive(
        [&](double u) {
          const double y = yp - u * u;
          return 2.0 * kernel(y, h) / std::sqrt(y - ym);
        },
        0.0, std::sqrt(yp - mid), quad_tol);
  };
  auto full = [&](const std::function<double(double)>& h) {
    return left_half(h) + right_half(h);
  };
  // int_0^{y_sigma} h / sqrt(F), oriented so the result carries sigma's sign
  // convention from the N-odd formulas: sigma * int_0^{y_sigma}.
  auto first_arc = [&](const std::function<double(double)>& h) {
    if (sigma > 0) {
      return gl_adaptive(
          [&](double u) {
            const double y = yp - u * u;
            return 2.0 * kernel(y, h) / std::sqrt(y - ym);
          },
          0.0, std::sqrt(yp), quad_tol);
    }
    return gl_adaptive(
        [&](double u) {
          const double y = ym + u * u;
          return 2.0 * kernel(y, h) / std::sqrt(yp - y);
        },
        0.0, std::sqrt(-ym), quad_tol);
  };

  ConservativeIntegrals out;
  out.period = 2.0 * full(hper);
  if (N % 2 == 0) {
    out.x = N * full(hx);
    out.z = N * full(hz);
  } else {
    out.x = 2.0 * first_arc(hx) + (N - 1) * full(hx);
    out.z = 2.0 * first_arc(hz) + (N - 1) * full(hz);
  }
  return out;
}

}  // namespace sr::exact
