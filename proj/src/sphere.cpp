#include "sr/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sr/elliptic.hpp"
#include "sr/error.hpp"

namespace sr::sphere {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

std::optional<double> hit_time(const ModelSpec& spec, double theta0, double lambda, int n,
                               double horizon, double tol = 1e-12) {
  const GeodesicState s0 = cylinder_lift(spec, theta0, lambda);
  auto [tr, hits] = flow::integrate_with_section(spec, s0, horizon, n, tol);
  if ((int)hits.size() < n) return std::nullopt;
  return hits[n - 1].t;
}

// Pendulum-regime classification of the generating trajectory (Fig.-16-style
// phase-plane regions, conservative energy as the discriminator).
BranchTag classify_tag(const ModelSpec& spec, double theta0, double lambda, int n) {
  const double eps = 1.0 / std::sqrt(std::abs(lambda));
  const double tp0 =
      eps * (spec.alpha * std::cos(theta0) - spec.beta * std::sin(theta0));
  const double c = std::cos(theta0);
  const double a2 = spec.alpha * spec.alpha;
  const double V0 = 0.5 * tp0 * tp0 - c - 0.5 * eps * eps * a2 * c * c;
  const double Vsep = 1.0 - 0.5 * eps * eps * a2;
  if (V0 > Vsep) return n == 1 ? BranchTag::D1 : (n == 2 ? BranchTag::D2 : BranchTag::Generic);
  if (n == 1) return V0 > 0.0 ? BranchTag::C1 : BranchTag::C1bar;
  if (n == 2 && V0 > 0.0) return BranchTag::C2;
  return BranchTag::Generic;
}

BranchPoint make_point(const flow::SectionHit& hit, double r, double theta0, double lambda,
                       int n) {
  BranchPoint p;
  p.x = hit.x;
  p.z = hit.z;
  p.X = (hit.x + r) / (2.0 * r);
  p.Z = hit.z / (r * r * r);
  p.theta0 = theta0;
  p.lambda = lambda;
  p.n = n;
  p.t = hit.t;
  const double k2 = std::clamp(0.5 * (1.0 - std::cos(theta0)), 0.0, 1.0);
  p.k = std::sqrt(k2);
  p.kprime = std::sqrt(1.0 - k2);
  return p;
}

}  // namespace

std::string branch_tag_name(BranchTag tag) {
  switch (tag) {
    case BranchTag::C1bar: return "C1bar";
    case BranchTag::C1: return "C1";
    case BranchTag::C2: return "C2";
    case BranchTag::D1: return "D1";
    case BranchTag::D2: return "D2";
    case BranchTag::Generic: return "generic";
  }
  return "?";
}

std::optional<flow::SectionHit> return_map(const ModelSpec& spec, double theta0, double lambda,
                                           int n, double tol) {
  if (lambda == 0.0) throw std::domain_error("return_map: lambda = 0");
  // Horizon from the flat-pendulum period estimate 4K(k)/sqrt(|lambda|).
  const double k2 = std::clamp(0.5 * (1.0 - std::cos(theta0)), 0.0, 1.0 - 1e-12);
  const auto [K, E] = elliptic::complete_integrals(elliptic::Modulus::from_k2(k2));
  (void)E;
  const double period = 4.0 * K / std::sqrt(std::abs(lambda));
  const double horizon = std::min(20.0 * n * period, 1e4);
  const GeodesicState s0 = cylinder_lift(spec, theta0, lambda);
  auto [tr, hits] = flow::integrate_with_section(spec, s0, horizon, n, tol);
  if ((int)hits.size() < n) return std::nullopt;
  return hits[n - 1];
}

BranchCurve sphere_trace_flat(double r, int i, const std::vector<double>& k_grid) {
  if (i < 1) throw std::domain_error("sphere_trace_flat: i >= 1 required");
  BranchCurve curve;
  curve.tag = (i == 1) ? BranchTag::C1 : (i == 2 ? BranchTag::C2 : BranchTag::Generic);
  curve.r = r;
  curve.points.reserve(k_grid.size());
  for (double k : k_grid) {
    if (!(k > 0.0 && k < 1.0)) continue;
    const auto mod = elliptic::Modulus::from_k(k);
    const auto [K, E] = elliptic::complete_integrals(mod);
    BranchPoint p;
    p.k = mod.k;
    p.kprime = mod.kprime;
    p.x = -r + 2.0 * r * E / K;
    p.z = (r * r * r) / (6.0 * i * i * K * K * K) *
          ((2.0 * k * k - 1.0) * E + mod.kprime2() * K);
    p.X = (p.x + r) / (2.0 * r);
    p.Z = p.z / (r * r * r);
    p.n = i;
    p.t = r;
    p.theta0 = std::acos(1.0 - 2.0 * k * k);
    p.lambda = std::pow(2.0 * i * K / r, 2);
    curve.points.push_back(p);
  }
  return curve;
}

BranchPoint flat_trace_point_from_kprime(double r, int i, double kprime) {
  const auto mod = elliptic::Modulus::from_kprime(kprime);
  const auto [K, E] = elliptic::complete_integrals(mod);
  BranchPoint p;
  p.k = mod.k;
  p.kprime = mod.kprime;
  p.x = -r + 2.0 * r * E / K;
  const double k2m1 = mod.k2() - mod.kprime2();  // 2k^2 - 1
  p.z = (r * r * r) / (6.0 * i * i * K * K * K) * (k2m1 * E + mod.kprime2() * K);
  p.X = E / K;
  p.Z = p.z / (r * r * r);
  p.n = i;
  p.t = r;
  p.lambda = std::pow(2.0 * i * K / r, 2);
  p.theta0 = std::acos(std::clamp(1.0 - 2.0 * mod.k2(), -1.0, 1.0));
  return p;
}

BranchCurve sphere_trace_numeric(const ModelSpec& spec, double r, int n, const SweepSpec& sweep,
                                 Exec exec) {
  BranchCurve curve;
  curve.r = r;
  curve.alpha = spec.alpha;
  curve.beta = spec.beta;
  curve.gamma = spec.gamma;

  const double horizon = 3.0 * r;
  std::vector<std::optional<BranchPoint>> slots(sweep.values.size());

  auto solve_theta_fixed = [&](double theta0) -> std::optional<BranchPoint> {
    // Solve t_n(lambda) = r in lambda, scanning down from the separatrix.
    const double delta = kPi - std::abs(std::remainder(theta0, 2.0 * kPi));
    double lam_hi;
    if (std::abs(spec.alpha) > 1e-14 && delta > 1e-12) {
      lam_hi = std::pow(spec.alpha / delta, 2) * (1.0 - 1e-10);
    } else {
      const double k2 = std::clamp(0.5 * (1.0 - std::cos(theta0)), 0.0, 1.0 - 1e-15);
      const auto [K, E] = elliptic::complete_integrals(elliptic::Modulus::from_k2(k2));
      (void)E;
      lam_hi = std::pow(2.0 * n * K / r, 2) * 16.0;
    }
    const double lam_lo = 1e-3;
    if (lam_hi <= lam_lo) return std::nullopt;

    // "miss" treats a missing n-th hit as +infinity: t_n beyond the horizon.
    auto miss = [&](double lam) {
      auto t = hit_time(spec, theta0, lam, n, horizon);
      return t ? (*t - r) : std::numeric_limits<double>::infinity();
    };
    // scan downward in log(lambda); t_n grows as lambda falls, so we look for
    // the first crossing from below to above the target.
    const int scan = 96;
    double la = 0, lb = 0, fa = 0, fb = 0;
    double prev_l = lam_hi, prev_f = miss(lam_hi);
    bool found = false;
    for (int i = 1; i <= scan; ++i) {
      const double l =
          std::exp(std::log(lam_hi) + (std::log(lam_lo) - std::log(lam_hi)) * i / (double)scan);
      const double f = miss(l);
      if ((prev_f <= 0.0 && f >= 0.0) || (prev_f >= 0.0 && f <= 0.0)) {
        la = l;
        fa = f;
        lb = prev_l;
        fb = prev_f;
        found = true;
        break;
      }
      prev_l = l;
      prev_f = f;
    }
    if (!found) return std::nullopt;
    for (int it = 0; it < 80; ++it) {
      const double lm = std::sqrt(la * lb);
      const double fm = miss(lm);
      if ((fa <= 0.0 && fm >= 0.0) || (fa >= 0.0 && fm <= 0.0)) {
        lb = lm;
        fb = fm;
      } else {
        la = lm;
        fa = fm;
      }
      if (std::isfinite(fm) && std::abs(fm) < 1e-10) break;
      if ((lb - la) < 1e-14 * lb) break;
    }
    const double lam = std::abs(fa) < std::abs(fb) ? la : lb;
    auto hit = return_map(spec, theta0, lam, n);
    if (!hit || std::abs(hit->t - r) > 1e-9) return std::nullopt;
    return make_point(*hit, r, theta0, lam, n);
  };

  auto solve_lambda_fixed = [&](double lambda) -> std::optional<BranchPoint> {
    if (std::abs(lambda) < 1e-3) return std::nullopt;  // equator rejected
    auto miss = [&](double theta0) {
      auto t = hit_time(spec, theta0, lambda, n, horizon);
      return t ? (*t - r) : std::numeric_limits<double>::infinity();
    };
    double ua = 0, ub = 0, fa = 0;
    if (sweep.near_saddle) {
      // The t_n = r root lives in an exponentially thin layer at the edge of
      // the rotating window around theta0 = -pi (the saddle-hugging regime,
      // u* = w_edge (1 - e^{-s_f})). First pin the separatrix edge in u, then
      // bisect in log-distance from it.
      const double w0 = std::max(std::abs(spec.alpha), 0.1) / std::sqrt(std::abs(lambda));
      const double classify_horizon = std::max(3.0 * r, 120.0 / std::sqrt(std::abs(lambda)));
      // rotating: theta falls through -pi - 2; oscillating: swings back up
      auto rotating = [&](double u) {
        const GeodesicState s0 = cylinder_lift(spec, -kPi + u, lambda);
        const auto tr = flow::integrate(spec, s0, classify_horizon, 1e-11);
        double th = -kPi + u;
        double prev = th;
        for (std::size_t i = 1; i < tr.times.size(); ++i) {
          const auto cc = cylinder_coords(spec, tr.states[i]);
          double d = cc.theta - std::remainder(prev, 2.0 * kPi);
          while (d > kPi) d -= 2.0 * kPi;
          while (d < -kPi) d += 2.0 * kPi;
          th += d;
          prev = th;
          if (th < -kPi - 2.0) return 1;
          if (th > -kPi + 2.0) return -1;
        }
        return 0;
      };
      double u_rot = 0.5 * w0, u_osc = 2.0 * w0;
      if (rotating(u_rot) != 1 || rotating(u_osc) != -1) return std::nullopt;
      for (int it = 0; it < 64; ++it) {
        const double um = 0.5 * (u_rot + u_osc);
        if (um == u_rot || um == u_osc) break;
        (rotating(um) == 1 ? u_rot : u_osc) = um;
      }
      const double edge = u_rot;  // rotating side of the separatrix

      // bisect t_1(edge (1 - 10^-s)) = r in s; t_1 grows toward the edge
      auto miss_s = [&](double s) { return miss(-kPi + edge * (1.0 - std::pow(10.0, -s))); };
      double sa = 0.5, sb = 15.2;
      double fsa = miss_s(sa), fsb = miss_s(sb);
      if (!(fsa <= 0.0) || !(fsb >= 0.0)) return std::nullopt;
      for (int it = 0; it < 70; ++it) {
        const double sm = 0.5 * (sa + sb);
        const double fm = miss_s(sm);
        if (fm >= 0.0)
          sb = sm;
        else
          sa = sm;
        if (std::isfinite(fm) && std::abs(fm) < 1e-10) break;
      }
      const double theta0 = -kPi + edge * (1.0 - std::pow(10.0, -0.5 * (sa + sb)));
      auto hit = return_map(spec, theta0, lambda, n);
      if (!hit || std::abs(hit->t - r) > 1e-9) return std::nullopt;
      return make_point(*hit, r, theta0, lambda, n);
    }
    // oscillating side: theta0 in (0.05, pi - 0.05), t_n increasing in theta0
    ua = 0.05;
    ub = kPi - 0.05;
    fa = miss(ua);
    const double fb = miss(ub);
    if (!(fa <= 0.0) || !(fb >= 0.0)) return std::nullopt;
    for (int it = 0; it < 80; ++it) {
      const double um = 0.5 * (ua + ub);
      const double fm = miss(um);
      if (fm >= 0.0)
        ub = um;
      else
        ua = um;
      if (std::isfinite(fm) && std::abs(fm) < 1e-10) break;
    }
    const double theta0 = 0.5 * (ua + ub);
    auto hit = return_map(spec, theta0, lambda, n);
    if (!hit || std::abs(hit->t - r) > 1e-9) return std::nullopt;
    return make_point(*hit, r, theta0, lambda, n);
  };

  parallel_for(
      sweep.values.size(),
      [&](std::size_t i) {
        const double v = sweep.values[i];
        slots[i] = (sweep.var == SweepSpec::Var::Theta0) ? solve_theta_fixed(v)
                                                         : solve_lambda_fixed(v);
      },
      exec);

  for (auto& s : slots)
    if (s) curve.points.push_back(*s);

  // tag by majority of the per-point pendulum regimes
  std::array<int, 6> votes{};
  for (auto& p : curve.points)
    votes[(int)classify_tag(spec, p.theta0, p.lambda, n)]++;
  int best = 5;
  for (int i = 0; i < 6; ++i)
    if (votes[i] > votes[best]) best = i;
  curve.tag = (BranchTag)best;
  return curve;
}

std::vector<WavefrontPoint> wavefront_trace(const ModelSpec& spec, double r,
                                            const std::vector<double>& theta_grid,
                                            const std::vector<double>& lambda_grid,
                                            WavefrontMode mode, int max_hits, Exec exec) {
  std::vector<WavefrontPoint> out;
  if (mode == WavefrontMode::Cloud3d) {
    std::vector<WavefrontPoint> pts(theta_grid.size() * lambda_grid.size());
    parallel_for(
        pts.size(),
        [&](std::size_t idx) {
          const double th = theta_grid[idx / lambda_grid.size()];
          const double la = lambda_grid[idx % lambda_grid.size()];
          WavefrontPoint p;
          p.theta0 = th;
          p.lambda = la;
          try {
            const auto tr = flow::integrate(spec, cylinder_lift(spec, th, la), r, 1e-10);
            if (tr.truncated) {
              p.ok = false;
              p.reason = tr.truncate_reason;
            } else {
              const GeodesicState e = tr.states.back();
              p.x = e.q[0];
              p.y = e.q[1];
              p.z = e.q[2];
              p.w = e.q[3];
            }
          } catch (const std::exception& ex) {
            p.ok = false;
            p.reason = ex.what();
          }
          pts[idx] = p;
        },
        exec);
    return pts;
  }

  // slice: per theta0 and hit index n, solve lambda so that t_n = r
  std::vector<std::vector<WavefrontPoint>> rows(theta_grid.size());
  parallel_for(
      theta_grid.size(),
      [&](std::size_t i) {
        const double th = theta_grid[i];
        for (int n = 1; n <= max_hits; ++n) {
          SweepSpec sw;
          sw.var = SweepSpec::Var::Theta0;
          sw.values = {th};
          const BranchCurve c = sphere_trace_numeric(spec, r, n, sw, Exec::Serial);
          if (c.points.empty()) {
            WavefrontPoint p;
            p.theta0 = th;
            p.n = n;
            p.ok = false;
            p.reason = "no root";
            rows[i].push_back(p);
            continue;
          }
          const BranchPoint& bp = c.points.front();
          WavefrontPoint p;
          p.theta0 = th;
          p.lambda = bp.lambda;
          p.x = bp.x;
          p.z = bp.z;
          p.n = n;
          rows[i].push_back(p);
        }
      },
      exec);
  for (auto& rw : rows)
    for (auto& p : rw) out.push_back(p);

  for (int s : {1, -1}) {
    WavefrontPoint p;
    p.x = s * r;
    p.abnormal = true;
    out.push_back(p);
  }
  return out;
}

std::pair<std::vector<CutPoint>, std::vector<CutPoint>> cut_locus_flat(
    double r, const std::vector<double>& k_grid) {
  const BranchCurve c1 = sphere_trace_flat(r, 1, k_grid);
  std::vector<CutPoint> plus, minus;
  plus.reserve(c1.points.size());
  minus.reserve(c1.points.size());
  for (const auto& p : c1.points) {
    CutPoint cp;
    cp.p = p;
    cp.theta0_a = p.theta0;
    cp.theta0_b = -p.theta0;  // the y -> -y mirror geodesic, same length
    cp.lambda = p.lambda;
    plus.push_back(cp);
    CutPoint cm = cp;  // S2 image
    cm.p.x = -p.x;
    cm.p.z = -p.z;
    cm.p.X = (cm.p.x + r) / (2.0 * r);
    cm.p.Z = cm.p.z / (r * r * r);
    cm.theta0_a = kPi - p.theta0;
    cm.theta0_b = -(kPi - p.theta0);
    cm.lambda = -p.lambda;
    minus.push_back(cm);
  }
  return {plus, minus};
}

std::vector<ProbeSample> nonproper_probe(double r, const std::vector<double>& lambdas) {
  std::vector<ProbeSample> out;
  out.reserve(lambdas.size());
  for (double lam : lambdas) {
    const double sl = std::sqrt(lam);
    // R_1 lands at x = (2/sqrt(lambda))(2E - K); solve x = -r in ln k'.
    auto f = [&](double lnkp) {
      const auto mod = elliptic::Modulus::from_kprime(std::exp(lnkp));
      const auto [K, E] = elliptic::complete_integrals(mod);
      return (2.0 / sl) * (2.0 * E - K) + r;
    };
    double a = std::log(1e-280), b = std::log(0.9);
    double fa = f(a), fb = f(b);
    if (fa * fb > 0.0) throw not_found_error("nonproper_probe: no bracket");
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = f(m);
      if (fa * fm <= 0.0) {
        b = m;
        fb = fm;
      } else {
        a = m;
        fa = fm;
      }
      if (b - a < 1e-14 * std::max(1.0, std::abs(b))) break;
    }
    ProbeSample s;
    s.lambda = lam;
    s.kprime = std::exp(0.5 * (a + b));
    const auto mod = elliptic::Modulus::from_kprime(s.kprime);
    const auto [K, E] = elliptic::complete_integrals(mod);
    s.x = (2.0 / sl) * (2.0 * E - K);
    s.z = 4.0 / (3.0 * lam * sl) * ((2.0 * mod.k2() - 1.0) * E + mod.kprime2() * K);
    s.dist = std::hypot(s.x + r, s.z);
    out.push_back(s);
  }
  return out;
}

std::array<double, 3> probe_loglinear_fit(const std::vector<ProbeSample>& samples) {
  // ln k' = a + b sqrt(lambda)
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = (double)samples.size();
  for (const auto& s : samples) {
    const double x = std::sqrt(s.lambda), y = std::log(s.kprime);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double a = (sy - b * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (const auto& s : samples) {
    const double x = std::sqrt(s.lambda), y = std::log(s.kprime);
    ss_res += std::pow(y - (a + b * x), 2);
    ss_tot += std::pow(y - ybar, 2);
  }
  return {a, b, 1.0 - ss_res / ss_tot};
}

}  // namespace sr::sphere
