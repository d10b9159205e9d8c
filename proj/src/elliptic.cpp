#include "sr/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sr::elliptic {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// AGM tables shared by K, E, sn/cn/dn and the epsilon function.
struct AgmTable {
  int N = 0;
  std::array<double, 64> a{}, b{}, c{};
  double K = 0.0;
  double E = 0.0;
};

AgmTable build_agm(const Modulus& m) {
  if (m.kprime == 0.0) throw divergence_error("elliptic: k = 1, K diverges");
  AgmTable t;
  t.a[0] = 1.0;
  t.b[0] = m.kprime;
  t.c[0] = m.k;
  int n = 0;
  double csum = 0.5 * t.c[0] * t.c[0];  // sum 2^{n-1} c_n^2
  double two_n = 1.0;
  while (n < 60) {
    if (std::abs(t.c[n]) <= 1e-18 * t.a[n]) break;
    t.a[n + 1] = 0.5 * (t.a[n] + t.b[n]);
    t.b[n + 1] = std::sqrt(t.a[n] * t.b[n]);
    t.c[n + 1] = 0.5 * (t.a[n] - t.b[n]);
    ++n;
    two_n *= 2.0;
    csum += 0.5 * two_n * t.c[n] * t.c[n];
  }
  t.N = n;
  t.K = kPi / (2.0 * t.a[n]);
  t.E = t.K * (1.0 - csum);
  return t;
}

}  // namespace

Modulus Modulus::from_k(double k) {
  if (!(k >= 0.0 && k <= 1.0)) throw std::domain_error("Modulus: k must be in [0,1]");
  Modulus m;
  m.k = k;
  // (1-k)(1+k) keeps accuracy when k is close to 1.
  m.kprime = std::sqrt((1.0 - k) * (1.0 + k));
  return m;
}

Modulus Modulus::from_kprime(double kprime) {
  if (!(kprime >= 0.0 && kprime <= 1.0)) throw std::domain_error("Modulus: k' must be in [0,1]");
  Modulus m;
  m.kprime = kprime;
  m.k = std::sqrt((1.0 - kprime) * (1.0 + kprime));
  return m;
}

Modulus Modulus::from_k2(double k2) {
  if (!(k2 >= 0.0 && k2 <= 1.0)) throw std::domain_error("Modulus: k^2 must be in [0,1]");
  Modulus m;
  m.k = std::sqrt(k2);
  m.kprime = std::sqrt(1.0 - k2);
  return m;
}

CompletePair complete_near_unit(double kprime) {
  if (!(kprime > 0.0 && kprime <= 1e-3))
    throw std::domain_error("complete_near_unit: kprime must be in (0, 1e-3]");
  const double kp2 = kprime * kprime;
  const double kp4 = kp2 * kp2;
  const double L = std::log(4.0 / kprime);
  const double u1 = kp2 / 2.0 + (3.0 / 16.0) * kp4;
  const double u2 = 1.0 - kp2 / 4.0 - (13.0 / 64.0) * kp4;
  const double u3 = 1.0 + kp2 / 4.0 + (9.0 / 64.0) * kp4;
  const double u4 = -kp2 / 4.0 - (21.0 / 128.0) * kp4;
  return {u3 * L + u4, u1 * L + u2};
}

CompletePair complete_integrals(const Modulus& m) {
  if (m.kprime == 0.0) throw divergence_error("complete_integrals: k = 1, K diverges");
  if (m.k == 0.0) return {kPi / 2.0, kPi / 2.0};
  if (m.kprime < 1e-6) return complete_near_unit(m.kprime);
  const AgmTable t = build_agm(m);
  return {t.K, t.E};
}

JacobiTriple jacobi_functions(double u, const Modulus& m) {
  if (m.kprime == 0.0) throw std::domain_error("jacobi_functions: k must be < 1");
  if (m.k < 1e-14) return {std::sin(u), std::cos(u), 1.0};

  const AgmTable t = build_agm(m);

  // Reduce modulo 2K; sn and cn flip sign per half period, dn is 2K-periodic.
  const double twoK = 2.0 * t.K;
  double cycles = std::floor(u / twoK);
  double ur = u - cycles * twoK;
  const double sgn = (std::fmod(std::abs(cycles), 2.0) < 0.5) ? 1.0 : -1.0;

  // Descending phase recurrence (Gauss transformation of the amplitude).
  std::array<double, 64> phi{};
  phi[t.N] = std::ldexp(t.a[t.N] * ur, t.N);
  for (int n = t.N; n >= 1; --n) {
    double s = (t.c[n] / t.a[n]) * std::sin(phi[n]);
    s = std::clamp(s, -1.0, 1.0);
    phi[n - 1] = 0.5 * (phi[n] + std::asin(s));
  }
  JacobiTriple j;
  j.sn = sgn * std::sin(phi[0]);
  j.cn = sgn * std::cos(phi[0]);
  j.dn = std::sqrt(m.kprime2() + m.k2() * (j.cn * j.cn));
  return j;
}

double jacobi_epsilon(double u, const Modulus& m) {
  if (m.kprime == 0.0) throw std::domain_error("jacobi_epsilon: k must be < 1");
  if (m.k < 1e-14) return u;

  const AgmTable t = build_agm(m);
  const double twoK = 2.0 * t.K;
  const double cycles = std::floor(u / twoK);
  const double ur = u - cycles * twoK;

  std::array<double, 64> phi{};
  phi[t.N] = std::ldexp(t.a[t.N] * ur, t.N);
  double sum = 0.0;
  for (int n = t.N; n >= 1; --n) {
    double s = (t.c[n] / t.a[n]) * std::sin(phi[n]);
    s = std::clamp(s, -1.0, 1.0);
    phi[n - 1] = 0.5 * (phi[n] + std::asin(s));
    sum += t.c[n] * std::sin(phi[n]);
  }
  return (t.E / t.K) * ur + sum + cycles * 2.0 * t.E;
}

}  // namespace sr::elliptic
