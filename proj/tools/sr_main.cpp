// sr: command-line front end for the sub-Riemannian Martinet laboratory.
//
// Commands: geodesic, pendulum, sphere-trace, wavefront, cut-locus, branch,
// flat-term, conjugate, engel-check, elliptic.
//
// Options may come from flags or from a JSON config (--config run.json);
// flags override the file. Exit codes: 0 ok, 2 config error, 3 numerical
// failure, 4 I/O failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "sr/asymptotics.hpp"
#include "sr/elliptic.hpp"
#include "sr/engel.hpp"
#include "sr/error.hpp"
#include "sr/exact.hpp"
#include "sr/flow.hpp"
#include "sr/io.hpp"
#include "sr/models.hpp"
#include "sr/sphere.hpp"
#include "sr/variational.hpp"

namespace {

using sr::io::Cell;
using sr::io::Table;

struct Options {
  std::string command;
  std::map<std::string, std::string> kv;

  bool has(const std::string& k) const { return kv.count(k) > 0; }
  std::string str(const std::string& k, const std::string& dflt = "") const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  }
  double num(const std::string& k, std::optional<double> dflt = std::nullopt) const {
    auto it = kv.find(k);
    if (it == kv.end()) {
      if (dflt) return *dflt;
      throw std::invalid_argument("missing required option --" + k);
    }
    return std::stod(it->second);
  }
  int integer(const std::string& k, std::optional<int> dflt = std::nullopt) const {
    auto it = kv.find(k);
    if (it == kv.end()) {
      if (dflt) return *dflt;
      throw std::invalid_argument("missing required option --" + k);
    }
    return std::stoi(it->second);
  }
};

Options parse_cli(int argc, char** argv) {
  Options o;
  if (argc < 2) throw std::invalid_argument("usage: sr <command> [--key value ...]");
  o.command = argv[1];
  std::map<std::string, std::string> flags;
  for (int i = 2; i < argc; ++i) {
    std::string a = argv[i];
    if (a.rfind("--", 0) != 0) throw std::invalid_argument("unexpected argument: " + a);
    a = a.substr(2);
    std::string val = "1";
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      val = a.substr(eq + 1);
      a = a.substr(0, eq);
    } else if (i + 1 < argc && std::string(argv[i + 1]).rfind("--", 0) != 0) {
      val = argv[++i];
    }
    flags[a] = val;
  }
  // config file first, flags override
  if (flags.count("config")) {
    std::ifstream is(flags["config"]);
    if (!is) throw std::invalid_argument("cannot open config " + flags["config"]);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    for (auto& [k, v] : j.items()) {
      if (k == "command") {
        if (o.command == "run") o.command = v.get<std::string>();
        continue;
      }
      if (v.is_string())
        o.kv[k] = v.get<std::string>();
      else if (v.is_number_integer())
        o.kv[k] = std::to_string(v.get<long long>());
      else if (v.is_number())
        o.kv[k] = sr::io::format_double(v.get<double>());
      else if (v.is_boolean())
        o.kv[k] = v.get<bool>() ? "1" : "0";
      else
        throw std::invalid_argument("config key " + k + " has unsupported type");
    }
  }
  for (auto& [k, v] : flags) o.kv[k] = v;
  return o;
}

sr::ModelSpec model_from(const Options& o) {
  const std::string m = o.str("model", "flat");
  if (m == "flat" || m == "martinet-flat") return sr::ModelSpec::martinet_flat();
  if (m == "graded" || m == "martinet" || m == "martinet-graded0")
    return sr::ModelSpec::martinet(o.num("alpha", 0.0), o.num("beta", 0.0), o.num("gamma", 0.0));
  if (m == "heisenberg") return sr::ModelSpec::heisenberg();
  if (m == "contact")
    return sr::ModelSpec::contact(o.num("qa", 0.0), o.num("qb", 0.0), o.num("qc", 0.0));
  if (m == "tangential-elliptic")
    return sr::ModelSpec::tangential_elliptic(o.num("eps", 1.0), o.num("m", 0.0));
  if (m == "tangential-hyperbolic")
    return sr::ModelSpec::tangential_hyperbolic(o.num("eps", 1.0), o.num("m", 0.0));
  if (m == "engel") return sr::ModelSpec::engel();
  if (m == "liu-sussmann") return sr::ModelSpec::liu_sussmann(o.num("eps", 0.0));
  throw std::invalid_argument("unknown model: " + m);
}

void emit(const Options& o, const Table& t, const std::string& summary) {
  const std::string out = o.str("out");
  const sr::io::Format fmt =
      o.str("format", "csv") == "json" ? sr::io::Format::Json : sr::io::Format::Csv;
  if (out.empty()) {
    std::fputs(sr::io::render_table(t, fmt).c_str(), stdout);
  } else {
    sr::io::write_table(t, out, fmt);
  }
  std::fprintf(stderr, "%s\n", summary.c_str());
}

int cmd_geodesic(const Options& o) {
  const auto spec = model_from(o);
  const double theta0 = o.num("theta0");
  const double lambda = o.num("lambda");
  const double tmax = o.num("tmax", 3.0);
  const double tol = o.num("tol", 1e-10);
  const int samples = o.integer("samples", 200);
  const auto s0 = sr::cylinder_lift(spec, theta0, lambda, o.num("p3", 0.0));
  const auto tr = sr::flow::integrate(spec, s0, tmax, tol);

  Table t;
  t.columns = {"t", "x", "y", "z", "w", "P1", "P2", "P3", "P4", "H"};
  for (int i = 0; i <= samples; ++i) {
    const double tt = tmax * i / samples;
    const auto s = tr.eval(tt);
    const double H = 0.5 * (s.P[0] * s.P[0] + s.P[1] * s.P[1]);
    t.add_row({tt, s.q[0], s.q[1], s.q[2], s.q[3], s.P[0], s.P[1], s.P[2], s.P[3], H});
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "geodesic: %d samples, energy drift %.3e, %d steps",
                samples + 1, tr.max_energy_drift, tr.steps_accepted);
  emit(o, t, buf);
  return 0;
}

int cmd_pendulum(const Options& o) {
  const auto spec = model_from(o);
  const double theta0 = o.num("theta0");
  const double lambda = o.num("lambda");
  const double tmax = o.num("tmax", 3.0);
  const auto s0 = sr::cylinder_lift(spec, theta0, lambda);
  const auto tr = sr::flow::integrate(spec, s0, tmax, o.num("tol", 1e-10));
  const auto proj = sr::flow::pendulum_project(spec, tr);

  Table t;
  t.columns = {"s", "theta", "dtheta_ds", "V"};
  for (const auto& p : proj)
    t.add_row({p.s, p.theta, p.dtheta_ds, sr::flow::pendulum_first_integral(spec, p, lambda)});
  char buf[120];
  std::snprintf(buf, sizeof(buf), "pendulum: %zu nodes, V drift %.3e", proj.size(),
                proj.empty() ? 0.0
                             : std::abs(sr::flow::pendulum_first_integral(spec, proj.back(), lambda) -
                                        sr::flow::pendulum_first_integral(spec, proj.front(), lambda)));
  emit(o, t, buf);
  return 0;
}

int cmd_sphere_trace(const Options& o) {
  const auto spec = model_from(o);
  const double r = o.num("radius");
  Table t;
  t.columns = {"k", "kprime", "theta0", "lambda", "x", "z", "X", "Z", "n", "tag"};
  std::string summary;
  if (o.has("numeric") && o.str("numeric") != "0") {
    const int n = o.integer("n", 1);
    sr::sphere::SweepSpec sw;
    const std::string sweep = o.str("sweep");
    const auto colon = sweep.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("sphere-trace --numeric wants --sweep var:grid");
    const std::string var = sweep.substr(0, colon);
    sw.values = sr::io::parse_grid(sweep.substr(colon + 1));
    if (var == "theta0")
      sw.var = sr::sphere::SweepSpec::Var::Theta0;
    else if (var == "lambda")
      sw.var = sr::sphere::SweepSpec::Var::Lambda;
    else
      throw std::invalid_argument("sweep variable must be theta0 or lambda");
    sw.near_saddle = o.has("near-saddle") && o.str("near-saddle") != "0";
    const auto curve = sr::sphere::sphere_trace_numeric(spec, r, n, sw);
    for (const auto& p : curve.points)
      t.add_row({p.k, p.kprime, p.theta0, p.lambda, p.x, p.z, p.X, p.Z, (long long)p.n,
                 sr::sphere::branch_tag_name(curve.tag)});
    summary = "sphere-trace numeric: " + std::to_string(curve.points.size()) + " points, tag " +
              sr::sphere::branch_tag_name(curve.tag);
  } else {
    const int i = o.integer("i", 1);
    const auto grid = sr::io::parse_grid(o.str("k", "linspace:0.01:0.99:99"));
    const auto curve = sr::sphere::sphere_trace_flat(r, i, grid);
    for (const auto& p : curve.points)
      t.add_row({p.k, p.kprime, p.theta0, p.lambda, p.x, p.z, p.X, p.Z, (long long)p.n,
                 sr::sphere::branch_tag_name(curve.tag)});
    summary = "sphere-trace flat: i=" + std::to_string(i) + ", " +
              std::to_string(curve.points.size()) + " points";
  }
  emit(o, t, summary);
  return 0;
}

int cmd_wavefront(const Options& o) {
  const auto spec = model_from(o);
  const double r = o.num("radius");
  const auto thetas = sr::io::parse_grid(o.str("theta0", "linspace:0.1:3.04:40"));
  const auto lambdas = sr::io::parse_grid(o.str("lambda", "linspace:0.5:30:40"));
  const auto mode = o.str("mode", "slice") == "cloud" ? sr::sphere::WavefrontMode::Cloud3d
                                                      : sr::sphere::WavefrontMode::SliceY0;
  const auto pts = sr::sphere::wavefront_trace(spec, r, thetas, lambdas, mode,
                                               o.integer("max-hits", 4));
  Table t;
  t.columns = {"theta0", "lambda", "x", "y", "z", "w", "n", "abnormal", "ok"};
  int good = 0;
  for (const auto& p : pts) {
    if (p.ok) ++good;
    t.add_row({p.theta0, p.lambda, p.x, p.y, p.z, p.w, (long long)p.n,
               (long long)(p.abnormal ? 1 : 0), (long long)(p.ok ? 1 : 0)});
  }
  emit(o, t, "wavefront: " + std::to_string(good) + "/" + std::to_string(pts.size()) +
                 " points ok");
  return 0;
}

int cmd_cut_locus(const Options& o) {
  const double r = o.num("radius");
  const auto grid = sr::io::parse_grid(o.str("k", "linspace:0.01:0.99:99"));
  const auto [plus, minus] = sr::sphere::cut_locus_flat(r, grid);
  Table t;
  t.columns = {"side", "k", "x", "z", "theta0_a", "theta0_b", "lambda"};
  for (const auto& c : plus)
    t.add_row({std::string("C1"), c.p.k, c.p.x, c.p.z, c.theta0_a, c.theta0_b, c.lambda});
  for (const auto& c : minus)
    t.add_row({std::string("-C1"), c.p.k, c.p.x, c.p.z, c.theta0_a, c.theta0_b, c.lambda});
  emit(o, t, "cut-locus: " + std::to_string(plus.size() + minus.size()) + " points");
  return 0;
}

int cmd_branch(const Options& o) {
  const std::string which = o.str("which", "C1");
  const double r = o.num("radius");
  const double alpha = o.num("alpha", 0.0);
  const double gamma = o.num("gamma", 0.0);
  sr::sphere::BranchTag tag;
  if (which == "C1bar")
    tag = sr::sphere::BranchTag::C1bar;
  else if (which == "C1")
    tag = sr::sphere::BranchTag::C1;
  else if (which == "C2")
    tag = sr::sphere::BranchTag::C2;
  else if (which == "D1")
    tag = sr::sphere::BranchTag::D1;
  else if (which == "D2")
    tag = sr::sphere::BranchTag::D2;
  else
    throw std::invalid_argument("unknown branch: " + which);

  Table t;
  std::string summary = "branch " + which;

  if (o.has("sweep")) {
    // numeric samples + optional fit
    const auto spec = sr::ModelSpec::martinet(alpha, o.num("beta", 0.0), gamma);
    const std::string sweep = o.str("sweep");
    const auto colon = sweep.find(':');
    sr::sphere::SweepSpec sw;
    const std::string var = sweep.substr(0, colon);
    sw.values = sr::io::parse_grid(sweep.substr(colon + 1));
    sw.var = (var == "lambda") ? sr::sphere::SweepSpec::Var::Lambda
                               : sr::sphere::SweepSpec::Var::Theta0;
    sw.near_saddle = (tag == sr::sphere::BranchTag::D1 || tag == sr::sphere::BranchTag::D2);
    const int n = (tag == sr::sphere::BranchTag::C2 || tag == sr::sphere::BranchTag::D2) ? 2 : 1;
    const auto curve = sr::sphere::sphere_trace_numeric(spec, r, n, sw);
    t.columns = {"theta0", "lambda", "x", "z", "X", "Z"};
    for (const auto& p : curve.points) t.add_row({p.theta0, p.lambda, p.x, p.z, p.X, p.Z});
    if (o.has("fit")) {
      const auto fit = sr::asymptotics::fit_contact(curve.points, o.integer("fit"));
      char buf[200];
      std::snprintf(buf, sizeof(buf),
                    "branch %s: %zu samples, fit c = %.6g (X^%d), residual %.2g", which.c_str(),
                    curve.points.size(), fit.coefficient, o.integer("fit"), fit.residual);
      summary = buf;
      if (tag == sr::sphere::BranchTag::D1) {
        char buf2[120];
        std::snprintf(buf2, sizeof(buf2), "; contact law target %.6g",
                      sr::asymptotics::d1_coefficient_contact(r, alpha));
        summary += buf2;
      }
    } else {
      summary += ": " + std::to_string(curve.points.size()) + " samples";
    }
  } else {
    // closed-form law
    const auto grid = sr::io::parse_grid(o.str("X", "linspace:0.005:0.3:60"));
    t.columns = {"X", "Z"};
    for (double X : grid)
      t.add_row({X, sr::asymptotics::branch_graph(tag, r, alpha, gamma, X)});
    summary += " law";
  }
  emit(o, t, summary);
  return 0;
}

int cmd_flat_term(const Options& o) {
  const double r = o.num("radius", 1.0);
  const auto grid = sr::io::parse_grid(o.str("kprime", "logspace:1e-8:1e-4:40"));
  const auto pts = sr::asymptotics::flat_term_ratio(r, grid);
  Table t;
  t.columns = {"kprime", "X", "Z", "ratio", "rel_error", "flagged"};
  for (const auto& p : pts)
    t.add_row({p.kprime, p.X, p.Z, p.ratio, p.rel_error, (long long)(p.flagged ? 1 : 0)});
  double last = 0.0;
  for (const auto& p : pts)
    if (!p.flagged) last = p.ratio;
  char buf[120];
  std::snprintf(buf, sizeof(buf), "flat-term: %zu points, smallest-X unflagged ratio %.4f",
                pts.size(), last);
  emit(o, t, buf);
  return 0;
}

int cmd_conjugate(const Options& o) {
  const auto spec = model_from(o);
  const auto res = sr::variational::conjugate_times(spec, o.num("theta0"), o.num("lambda"),
                                                    o.num("tmax"), o.num("p3", 0.0));
  Table t;
  t.columns = {"index", "t_conjugate"};
  for (std::size_t i = 0; i < res.times.size(); ++i)
    t.add_row({(long long)(i + 1), res.times[i]});
  emit(o, t, "conjugate: " + std::to_string(res.times.size()) + " times" +
                 (res.degenerate ? " (degenerate)" : ""));
  return 0;
}

int cmd_engel_check(const Options& o) {
  const double theta0 = o.num("theta0");
  const double lambda = o.num("lambda");
  const auto grid = sr::io::parse_grid(o.str("tgrid", "linspace:0.25:2.5:10"));
  const auto dev = sr::engel::reduction_check(theta0, lambda, grid);
  Table t;
  t.columns = {"theta0", "lambda", "max_dev_heisenberg", "max_dev_martinet"};
  t.add_row({theta0, lambda, dev.max_dev_heisenberg, dev.max_dev_martinet});
  char buf[160];
  std::snprintf(buf, sizeof(buf), "engel-check: dev_heis %.3e, dev_mart %.3e",
                dev.max_dev_heisenberg, dev.max_dev_martinet);
  emit(o, t, buf);
  return 0;
}

int cmd_elliptic(const Options& o) {
  Table t;
  if (o.has("kprime")) {
    const auto grid = sr::io::parse_grid(o.str("kprime"));
    t.columns = {"kprime", "K", "E"};
    for (double kp : grid) {
      const auto ce = sr::elliptic::complete_integrals(sr::elliptic::Modulus::from_kprime(kp));
      t.add_row({kp, ce.K, ce.E});
    }
  } else if (o.has("u")) {
    const auto grid = sr::io::parse_grid(o.str("u"));
    const auto mod = sr::elliptic::Modulus::from_k(o.num("k", 0.5));
    t.columns = {"u", "sn", "cn", "dn", "epsilon"};
    for (double u : grid) {
      const auto j = sr::elliptic::jacobi_functions(u, mod);
      t.add_row({u, j.sn, j.cn, j.dn, sr::elliptic::jacobi_epsilon(u, mod)});
    }
  } else {
    const auto grid = sr::io::parse_grid(o.str("k", "linspace:0:0.99:100"));
    t.columns = {"k", "K", "E"};
    for (double k : grid) {
      const auto ce = sr::elliptic::complete_integrals(sr::elliptic::Modulus::from_k(k));
      t.add_row({k, ce.K, ce.E});
    }
  }
  emit(o, t, "elliptic: " + std::to_string(t.rows.size()) + " rows");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  try {
    o = parse_cli(argc, argv);
    if (o.has("threads")) {
      // worker cap via env so nested helpers see it too
      setenv("SR_THREADS", o.str("threads").c_str(), 1);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  try {
    if (o.command == "geodesic") return cmd_geodesic(o);
    if (o.command == "pendulum") return cmd_pendulum(o);
    if (o.command == "sphere-trace") return cmd_sphere_trace(o);
    if (o.command == "wavefront") return cmd_wavefront(o);
    if (o.command == "cut-locus") return cmd_cut_locus(o);
    if (o.command == "branch") return cmd_branch(o);
    if (o.command == "flat-term") return cmd_flat_term(o);
    if (o.command == "conjugate") return cmd_conjugate(o);
    if (o.command == "engel-check") return cmd_engel_check(o);
    if (o.command == "elliptic") return cmd_elliptic(o);
    if (o.command == "run") {
      std::fprintf(stderr, "config error: config file must set \"command\"\n");
      return 2;
    }
    std::fprintf(stderr, "config error: unknown command '%s'\n", o.command.c_str());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const sr::singular_metric_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const sr::stiffness_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const sr::divergence_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const sr::not_found_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  }
}
