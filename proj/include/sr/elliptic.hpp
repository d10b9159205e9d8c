#pragma once

#include <cmath>

#include "sr/error.hpp"

namespace sr::elliptic {

// Modulus pair (k, k') with k^2 + k'^2 = 1, both stored. Keeping the pair
// avoids the cancellation in sqrt(1 - k^2) when either endpoint is close:
// k' = 1e-12 is representable while 1 - k^2 is not.
struct Modulus {
  double k = 0.0;
  double kprime = 1.0;

  static Modulus from_k(double k);
  static Modulus from_kprime(double kprime);
  static Modulus from_k2(double k2);

  double k2() const { return k * k; }
  double kprime2() const { return kprime * kprime; }
};

struct CompletePair {
  double K = 0.0;
  double E = 0.0;
};

// Complete integrals K(k), E(k) by the arithmetic-geometric mean.
// Dispatches to the log-series path for kprime < 1e-6.
CompletePair complete_integrals(const Modulus& m);

// Log-expansion near k = 1:
//   E = u1(k'^2) ln(4/k') + u2(k'^2),  K = u3(k'^2) ln(4/k') + u4(k'^2)
// with series through k'^4. Valid for 0 < kprime <= 1e-3.
CompletePair complete_near_unit(double kprime);

struct JacobiTriple {
  double sn = 0.0;
  double cn = 1.0;
  double dn = 1.0;
};

// sn, cn, dn via the AGM phase (descending Landen) recurrence, any real u.
JacobiTriple jacobi_functions(double u, const Modulus& m);

// Jacobi epsilon E(u) = int_0^u dn^2 dv, quasi-periodic:
// E(u + 2K) = E(u) + 2E(k).
double jacobi_epsilon(double u, const Modulus& m);

}  // namespace sr::elliptic
