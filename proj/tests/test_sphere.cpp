#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sr/elliptic.hpp"
#include "sr/exact.hpp"
#include "sr/sphere.hpp"

using namespace sr;
using namespace sr::sphere;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("flat R1 is the theta reflection, R2 the identity") {
  const auto flat = ModelSpec::martinet_flat();
  for (double th : {0.7, 1.9}) {
    const auto h1 = return_map(flat, th, 2.0, 1);
    REQUIRE(h1.has_value());
    const auto cc1 = cylinder_coords(flat, h1->state);
    CHECK(std::abs(std::remainder(cc1.theta + th, 2.0 * kPi)) < 1e-6);
    const auto h2 = return_map(flat, th, 2.0, 2);
    REQUIRE(h2.has_value());
    const auto cc2 = cylinder_coords(flat, h2->state);
    CHECK(std::abs(std::remainder(cc2.theta - th, 2.0 * kPi)) < 1e-6);
  }
}

TEST_CASE("return map on the graded model at high lambda") {
  const auto g = ModelSpec::martinet(1.0, 0.0, 0.0);
  const auto hit = return_map(g, kPi / 2, 200.0, 1);
  REQUIRE(hit.has_value());
  CHECK(std::isfinite(hit->t));
  CHECK(std::abs(hit->state.q[1]) < 1e-10);
  // first return at theta0 = pi/2 sits on x = (2/sqrt(l))(2E - K) > 0; the
  // trace only reaches x < 0 near the separatrix k -> 1
  CHECK(hit->x > 0.0);
  CHECK(hit->x < 0.2);
}

TEST_CASE("separatrix start has no return") {
  const auto flat = ModelSpec::martinet_flat();
  CHECK_FALSE(return_map(flat, kPi, 1.0, 1).has_value());
}

TEST_CASE("flat trace endpoints") {
  const auto c = sphere_trace_flat(1.0, 1, {1e-4, 0.5, 0.999999});
  REQUIRE(c.points.size() == 3);
  // k -> 0 tends to (r, 0)
  CHECK(c.points.front().x == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(c.points.front().z) < 1e-7);
  // k -> 1 tends to x = -r
  CHECK(c.points.back().x < -0.6);
  // all points carry arclength r by construction
  for (const auto& p : c.points) CHECK(p.t == 1.0);
}

TEST_CASE("flat trace against the return map at k = 0.5") {
  const double r = 1.0;
  const auto c = sphere_trace_flat(r, 1, {0.5});
  REQUIRE(c.points.size() == 1);
  const auto& p = c.points.front();
  // lambda solving 2K/sqrt(lambda) = r, theta0 from cos = 1 - 2k^2
  const auto flat = ModelSpec::martinet_flat();
  const auto hit = return_map(flat, p.theta0, p.lambda, 1);
  REQUIRE(hit.has_value());
  CHECK(hit->t == doctest::Approx(r).epsilon(1e-9));
  CHECK(hit->x == doctest::Approx(p.x).epsilon(1e-6));
  CHECK(std::abs(hit->z - p.z) < 1e-6);
}

TEST_CASE("kprime-parametrized trace point matches the k-parametrized one") {
  const auto a = sphere_trace_flat(1.0, 1, {0.8}).points.front();
  const auto b = flat_trace_point_from_kprime(1.0, 1, 0.6);
  CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
  CHECK(a.z == doctest::Approx(b.z).epsilon(1e-12));
}

TEST_CASE("numeric flat trace reproduces the closed form") {
  const auto flat = ModelSpec::martinet_flat();
  const double r = 1.0;
  SweepSpec sw;
  sw.var = SweepSpec::Var::Theta0;
  for (double k : {0.2, 0.5, 0.8}) {
    sw.values = {std::acos(1.0 - 2.0 * k * k)};
    for (int n : {1, 2}) {
      const auto curve = sphere_trace_numeric(flat, r, n, sw, Exec::Serial);
      REQUIRE(curve.points.size() == 1);
      const auto exact_pt = sphere_trace_flat(r, n, {k}).points.front();
      CHECK(std::abs(curve.points[0].x - exact_pt.x) < 1e-6);
      CHECK(std::abs(curve.points[0].z - exact_pt.z) < 1e-6);
    }
  }
}

TEST_CASE("numeric D1 samples sit in z < 0") {
  const auto g = ModelSpec::martinet(1.0, 0.0, 0.0);
  // theta0 resolves the saddle layer to |t1 - r| <= 1e-9 only while
  // exp(sqrt(lambda) r) stays below ~2e6, so the demo sweep stops at 200
  SweepSpec sw;
  sw.var = SweepSpec::Var::Lambda;
  sw.near_saddle = true;
  sw.values = {120.0, 160.0, 200.0};
  const auto curve = sphere_trace_numeric(g, 1.0, 1, sw, Exec::Serial);
  REQUIRE(curve.points.size() >= 2);
  for (const auto& p : curve.points) {
    CHECK(p.Z < 0.0);
    CHECK(p.x < 0.0);
    // the saddle-hugging orbit drifts at xdot ~ -(1 + alpha^2/lambda), so the
    // length-r endpoint sits just beyond -r: X is small and negative
    CHECK(p.X < 0.0);
    CHECK(std::abs(p.X) < 0.01);
  }
  CHECK(curve.tag == BranchTag::D1);
}

TEST_CASE("equator lambda values are rejected") {
  const auto flat = ModelSpec::martinet_flat();
  SweepSpec sw;
  sw.var = SweepSpec::Var::Lambda;
  sw.values = {5e-4};
  const auto curve = sphere_trace_numeric(flat, 1.0, 1, sw, Exec::Serial);
  CHECK(curve.points.empty());
}

TEST_CASE("wavefront slice holds the abnormal endpoints and nested curves") {
  const auto flat = ModelSpec::martinet_flat();
  const auto pts = wavefront_trace(flat, 1.0, {1.2, 2.0}, {}, WavefrontMode::SliceY0, 2,
                                   Exec::Serial);
  int abn = 0;
  for (const auto& p : pts)
    if (p.abnormal) {
      ++abn;
      CHECK(std::abs(std::abs(p.x) - 1.0) < 1e-14);
      CHECK(p.z == 0.0);
    }
  CHECK(abn == 2);
  // for the same theta0, the n = 2 slice point lies strictly inside n = 1 in z
  for (double th : {1.2, 2.0}) {
    double z1 = -1, z2 = -1;
    for (const auto& p : pts) {
      if (p.abnormal || !p.ok || std::abs(p.theta0 - th) > 1e-12) continue;
      if (p.n == 1) z1 = p.z;
      if (p.n == 2) z2 = p.z;
    }
    REQUIRE(z1 > 0);
    REQUIRE(z2 > 0);
    CHECK(z2 < z1);
  }
}

TEST_CASE("wavefront cloud: heisenberg endpoints equal the closed form") {
  const auto h = ModelSpec::heisenberg();
  std::vector<double> thetas, lambdas;
  for (int i = 0; i < 6; ++i) thetas.push_back(-2.5 + i * 1.0);
  for (int i = 0; i < 5; ++i) lambdas.push_back(-2.0 + i * 1.1);
  const auto pts = wavefront_trace(h, 1.0, thetas, lambdas, WavefrontMode::Cloud3d, 1,
                                   Exec::Serial);
  for (const auto& p : pts) {
    REQUIRE(p.ok);
    const auto cf = exact::heisenberg_geodesic(p.theta0, p.lambda, 1.0);
    CHECK(std::abs(p.x - cf.x) < 1e-8);
    CHECK(std::abs(p.y - cf.y) < 1e-8);
    CHECK(std::abs(p.z - cf.z) < 1e-8);
  }
}

TEST_CASE("cut locus: pairs of minimizers and the S2 mirror") {
  const double r = 1.0;
  const auto [plus, minus] = cut_locus_flat(r, {0.3, 0.6, 0.9});
  REQUIRE(plus.size() == 3);
  const auto flat = ModelSpec::martinet_flat();
  for (const auto& c : plus) {
    // both annotated parameters reach the point with length r
    for (double th : {c.theta0_a, c.theta0_b}) {
      const auto tr = flow::integrate(flat, cylinder_lift(flat, th, c.lambda), r, 1e-12);
      const auto e = tr.states.back();
      CHECK(std::abs(e.q[0] - c.p.x) < 1e-7);
      CHECK(std::abs(e.q[1]) < 1e-7);
      CHECK(std::abs(e.q[2] - c.p.z) < 1e-7);
    }
  }
  for (std::size_t i = 0; i < plus.size(); ++i) {
    CHECK(minus[i].p.x == doctest::Approx(-plus[i].p.x));
    CHECK(minus[i].p.z == doctest::Approx(-plus[i].p.z));
  }
}

TEST_CASE("cut locus closure approaches the abnormal endpoint") {
  const auto [plus, minus] = cut_locus_flat(1.0, {0.2, 1.0 - 1e-12});
  CHECK(plus.back().p.x < -0.85);
  CHECK(std::abs(plus.back().p.z) < 0.1);
}

TEST_CASE("wave front has branches for every hit index near (-r, 0)") {
  // length-r end-points with n oscillations inside the 0.05 r ball at (-r,0):
  // K = 45 makes x + r = 2rE/K < 0.05 r for every n
  const double r = 1.0;
  for (int n = 1; n <= 6; ++n) {
    const double kprime = 4.0 * std::exp(-45.0);
    const auto p = flat_trace_point_from_kprime(r, n, kprime);
    CHECK(std::hypot(p.x + r, p.z) < 0.05 * r);
  }
}

TEST_CASE("nonproper probe: logarithmic branch in kprime") {
  const auto samples = nonproper_probe(1.0, {1e2, 1e3, 1e4});
  REQUIRE(samples.size() == 3);
  for (const auto& s : samples) {
    CHECK(s.dist < 0.05);
    CHECK(s.kprime > 0.0);
  }
  CHECK(samples[1].kprime < samples[0].kprime);
  CHECK(samples[2].kprime < samples[1].kprime);
  const auto fit = probe_loglinear_fit(samples);
  CHECK(fit[2] > 0.99);           // R^2
  CHECK(fit[1] < 0.0);            // decaying
  CHECK(std::abs(fit[1] + 0.5) < 0.1);  // ~ exp(-r sqrt(lambda)/2)
}
