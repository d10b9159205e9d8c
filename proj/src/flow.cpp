#include "sr/flow.hpp"

#include <algorithm>
#include <cmath>

namespace sr::flow {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StateOps {
  int n;  // number of active doubles (2 * dim)

  static double* flat(GeodesicState& s) { return s.q.data(); }
  static const double* flat(const GeodesicState& s) { return s.q.data(); }
};

GeodesicState axpy(const GeodesicState& y0, double h,
                   std::initializer_list<std::pair<double, const GeodesicState*>> terms) {
  GeodesicState out = y0;
  for (auto& [w, k] : terms) {
    for (int i = 0; i < 4; ++i) {
      out.q[i] += h * w * k->q[i];
      out.P[i] += h * w * k->P[i];
    }
  }
  return out;
}

double energy(const GeodesicState& s) { return 0.5 * (s.P[0] * s.P[0] + s.P[1] * s.P[1]); }

double section_value(Section sec, const GeodesicState& s) {
  switch (sec) {
    case Section::Y0: return s.q[1];
    case Section::X0: return s.q[0];
    case Section::Z0: return s.q[2];
  }
  return 0.0;
}

GeodesicState hermite(const Trajectory& tr, std::size_t i, double t) {
  const double t0 = tr.times[i], t1 = tr.times[i + 1];
  const double h = t1 - t0;
  const double u = (t - t0) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  GeodesicState out{};
  for (int j = 0; j < 4; ++j) {
    out.q[j] = h00 * tr.states[i].q[j] + h * h10 * tr.derivs[i].q[j] +
               h01 * tr.states[i + 1].q[j] + h * h11 * tr.derivs[i + 1].q[j];
    out.P[j] = h00 * tr.states[i].P[j] + h * h10 * tr.derivs[i].P[j] +
               h01 * tr.states[i + 1].P[j] + h * h11 * tr.derivs[i + 1].P[j];
  }
  return out;
}

std::size_t bracket_index(const Trajectory& tr, double t) {
  auto it = std::upper_bound(tr.times.begin(), tr.times.end(), t);
  std::size_t i = (it == tr.times.begin()) ? 0 : (it - tr.times.begin() - 1);
  return std::min(i, tr.times.size() - 2);
}

}  // namespace

GeodesicState Trajectory::eval(double t) const {
  if (times.size() < 2 || t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  return hermite(*this, bracket_index(*this, t), t);
}

GeodesicState Trajectory::eval_deriv(double t) const {
  // Derivative of the cubic Hermite interpolant.
  if (times.size() < 2) return derivs.front();
  if (t <= times.front()) return derivs.front();
  if (t >= times.back()) return derivs.back();
  const std::size_t i = bracket_index(*this, t);
  const double t0 = times[i], t1 = times[i + 1];
  const double h = t1 - t0;
  const double u = (t - t0) / h;
  const double d00 = 6 * u * (u - 1) / h;
  const double d10 = (1 - u) * (1 - 3 * u);
  const double d01 = -6 * u * (u - 1) / h;
  const double d11 = u * (3 * u - 2);
  GeodesicState out{};
  for (int j = 0; j < 4; ++j) {
    out.q[j] = d00 * states[i].q[j] + d10 * derivs[i].q[j] + d01 * states[i + 1].q[j] +
               d11 * derivs[i + 1].q[j];
    out.P[j] = d00 * states[i].P[j] + d10 * derivs[i].P[j] + d01 * states[i + 1].P[j] +
               d11 * derivs[i + 1].P[j];
  }
  return out;
}

Trajectory integrate(const ModelSpec& spec, const GeodesicState& s0, double t_end, double tol) {
  if (!(tol >= 1e-13 && tol <= 1e-4)) throw std::domain_error("integrate: tol out of [1e-13,1e-4]");
  if (!(t_end > 0.0)) throw std::domain_error("integrate: t_end must be positive");

  Trajectory tr;
  tr.times.reserve(256);
  tr.states.reserve(256);
  tr.derivs.reserve(256);

  GeodesicState y = s0;
  double t = 0.0;
  const double H0 = energy(s0);

  GeodesicState k1;
  try {
    k1 = hamiltonian_rhs(spec, y);
  } catch (const singular_metric_error& e) {
    tr.truncated = true;
    tr.truncate_reason = e.what();
    tr.times = {0.0};
    tr.states = {y};
    tr.derivs = {GeodesicState{}};
    return tr;
  }
  tr.times.push_back(0.0);
  tr.states.push_back(y);
  tr.derivs.push_back(k1);

  double h = std::min(t_end, std::max(1e-6, std::pow(tol, 0.2)));
  const double hmin = t_end * 1e-15;

  while (t < t_end) {
    h = std::min(h, t_end - t);
    if (h < hmin) throw stiffness_error("integrate: step size underflow");

    GeodesicState k2, k3, k4, k5, k6, k7, ynew;
    try {
      k2 = hamiltonian_rhs(spec, axpy(y, h, {{a21, &k1}}));
      k3 = hamiltonian_rhs(spec, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      k4 = hamiltonian_rhs(spec, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      k5 = hamiltonian_rhs(spec, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      k6 = hamiltonian_rhs(
          spec, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      ynew = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      k7 = hamiltonian_rhs(spec, ynew);
    } catch (const singular_metric_error& e) {
      if (h > 16.0 * hmin) {  // try to approach the singularity before giving up
        h *= 0.25;
        continue;
      }
      tr.truncated = true;
      tr.truncate_reason = e.what();
      return tr;
    }

    const GeodesicState err =
        axpy(GeodesicState{}, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
    double ratio = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double sq = tol * (1.0 + std::max(std::abs(y.q[i]), std::abs(ynew.q[i])));
      const double sp = tol * (1.0 + std::max(std::abs(y.P[i]), std::abs(ynew.P[i])));
      ratio = std::max({ratio, std::abs(err.q[i]) / sq, std::abs(err.P[i]) / sp});
    }

    if (ratio <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      tr.times.push_back(t);
      tr.states.push_back(y);
      tr.derivs.push_back(k1);
      ++tr.steps_accepted;
      tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(energy(y) - H0));
    } else {
      ++tr.steps_rejected;
    }
    const double f = 0.9 * std::pow(std::max(ratio, 1e-10), -0.2);
    h *= std::clamp(f, 0.2, 5.0);
  }
  return tr;
}

namespace {

int initial_sigma(const ModelSpec& spec, const GeodesicState& s0, Section sec) {
  const GeodesicState d0 = hamiltonian_rhs(spec, s0);
  const int axis = (sec == Section::Y0) ? 1 : (sec == Section::X0 ? 0 : 2);
  const double v = d0.q[axis];
  if (std::abs(v) > 1e-12) return v > 0 ? 1 : -1;
  // ydot(0) = 0: use the sign of yddot(0), estimated along the flow.
  const double h = 1e-6;
  const GeodesicState s1 = axpy(s0, h, {{1.0, &d0}});
  const GeodesicState d1 = hamiltonian_rhs(spec, s1);
  const double acc = (d1.q[axis] - d0.q[axis]) / h;
  return acc >= 0 ? 1 : -1;
}

}  // namespace

std::pair<Trajectory, std::vector<SectionHit>> integrate_with_section(
    const ModelSpec& spec, const GeodesicState& s0, double t_end, int max_hits, double tol,
    Section section) {
  Trajectory tr = integrate(spec, s0, t_end, tol);
  std::vector<SectionHit> hits;
  if (tr.times.size() < 2) return {std::move(tr), std::move(hits)};

  const CylinderCoords cc = cylinder_coords(spec, s0);
  const int sigma = initial_sigma(spec, s0, section);

  for (std::size_t i = 0; i + 1 < tr.times.size() && (int)hits.size() < max_hits; ++i) {
    double f0 = section_value(section, tr.states[i]);
    double f1 = section_value(section, tr.states[i + 1]);
    if (i == 0 && std::abs(f0) < 1e-14) continue;  // departure from the section itself
    if (f0 == 0.0) continue;                       // counted at the previous step
    if (f0 * f1 > 0.0) continue;

    // Bisection on the dense output down to 1e-12 in time.
    double ta = tr.times[i], tb = tr.times[i + 1];
    double fa = f0;
    for (int it = 0; it < 200 && (tb - ta) > 1e-12 * std::max(1.0, tb); ++it) {
      const double tm = 0.5 * (ta + tb);
      const double fm = section_value(section, tr.eval(tm));
      if (fa * fm <= 0.0) {
        tb = tm;
      } else {
        ta = tm;
        fa = fm;
      }
    }
    double th = 0.5 * (ta + tb);

    // Newton polish on the section coordinate using the exact vector field.
    GeodesicState sh = tr.eval(th);
    for (int it = 0; it < 4; ++it) {
      const double val = section_value(section, sh);
      const GeodesicState dv = hamiltonian_rhs(spec, sh);
      const int axis = (section == Section::Y0) ? 1 : (section == Section::X0 ? 0 : 2);
      const double der = dv.q[axis];
      if (std::abs(der) < 1e-14) break;
      th -= val / der;
      th = std::clamp(th, tr.times[i], tr.times[i + 1]);
      sh = tr.eval(th);
    }

    SectionHit hit;
    hit.n = (int)hits.size() + 1;
    hit.t = th;
    hit.state = sh;
    hit.x = sh.q[0];
    hit.z = sh.q[2];
    hit.w = sh.q[3];
    hit.theta0 = cc.theta;
    hit.lambda = cc.lambda;
    hit.sigma = sigma;
    const GeodesicState dv = hamiltonian_rhs(spec, sh);
    const int axis = (section == Section::Y0) ? 1 : (section == Section::X0 ? 0 : 2);
    hit.degenerate = std::abs(dv.q[axis]) < 1e-12;
    hits.push_back(hit);
  }
  return {std::move(tr), std::move(hits)};
}

PendulumPoint pendulum_project(const ModelSpec& spec, const GeodesicState& state) {
  if (!spec.is_martinet())
    throw std::domain_error("pendulum_project: Martinet families only");
  const CylinderCoords cc = cylinder_coords(spec, state);
  if (cc.lambda == 0.0)
    throw std::domain_error("pendulum_project: lambda = 0 (equator), projection undefined");
  const double sl = std::sqrt(std::abs(cc.lambda));
  const double y = state.q[1];
  PendulumPoint p;
  p.theta = cc.theta;
  // dtheta/ds = dtheta/dtau / sqrt(lambda) with
  // dtheta/dtau = -(y lambda - alpha cos + beta sin).
  p.dtheta_ds =
      -(y * cc.lambda - spec.alpha * std::cos(cc.theta) + spec.beta * std::sin(cc.theta)) / sl;
  p.s = 0.0;
  return p;
}

std::vector<PendulumPoint> pendulum_project(const ModelSpec& spec, const Trajectory& traj,
                                            int samples_per_step) {
  if (!spec.is_martinet())
    throw std::domain_error("pendulum_project: Martinet families only");
  std::vector<PendulumPoint> out;
  if (traj.times.empty()) return out;
  const CylinderCoords cc0 = cylinder_coords(spec, traj.states.front());
  if (cc0.lambda == 0.0)
    throw std::domain_error("pendulum_project: lambda = 0 (equator), projection undefined");
  const double sl = std::sqrt(std::abs(cc0.lambda));

  auto ds_dt = [&](const GeodesicState& s) {
    const double sa = 1.0 + spec.alpha * s.q[1];
    const double sc = 1.0 + spec.beta * s.q[0] + spec.gamma * s.q[1];
    return sl / (sa * sc);
  };

  double s_acc = 0.0;
  double theta_prev = cc0.theta;
  double unwrap = 0.0;
  PendulumPoint p0 = pendulum_project(spec, traj.states.front());
  out.push_back(p0);

  for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
    const double t0 = traj.times[i], t1 = traj.times[i + 1];
    const int ns = std::max(1, samples_per_step);
    double rate_prev = ds_dt(traj.eval(t0));
    for (int j = 1; j <= ns; ++j) {
      const double t = t0 + (t1 - t0) * j / ns;
      const GeodesicState s = traj.eval(t);
      const double rate = ds_dt(s);
      s_acc += 0.5 * (rate_prev + rate) * (t1 - t0) / ns;
      rate_prev = rate;
      if (j == ns) {
        PendulumPoint p = pendulum_project(spec, s);
        // unwrap theta onto the real line
        double dtheta = p.theta - theta_prev;
        while (dtheta > 3.14159265358979323846) dtheta -= 2 * 3.14159265358979323846;
        while (dtheta < -3.14159265358979323846) dtheta += 2 * 3.14159265358979323846;
        theta_prev = p.theta;
        unwrap += dtheta;
        p.theta = out.front().theta + unwrap;
        p.s = s_acc;
        out.push_back(p);
      }
    }
  }
  return out;
}

double section_residual(const ModelSpec& spec, const GeodesicState& state) {
  const PendulumPoint p = pendulum_project(spec, state);
  const CylinderCoords cc = cylinder_coords(spec, state);
  const double eps = 1.0 / std::sqrt(std::abs(cc.lambda));
  return p.dtheta_ds -
         eps * (spec.alpha * std::cos(p.theta) - spec.beta * std::sin(p.theta));
}

double pendulum_first_integral(const ModelSpec& spec, const PendulumPoint& p, double lambda) {
  const double eps2 = 1.0 / std::abs(lambda);
  const double ct = std::cos(p.theta);
  return 0.5 * p.dtheta_ds * p.dtheta_ds -
         (ct + 0.5 * eps2 * spec.alpha * spec.alpha * ct * ct);
}

}  // namespace sr::flow
