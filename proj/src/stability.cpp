#include "symadapt/stability.hpp"

#include <cmath>

#include "symadapt/rng.hpp"

namespace symadapt {

namespace {

double eval1(const SmoothFn& f, double x) {
  return f.scalar(std::span<const double>(&x, 1));
}

// Adaptive Simpson with straightforward interval bisection.
double adaptive_simpson(const SmoothFn& f, double a, double b, double tol) {
  struct Rec {
    const SmoothFn& f;
    double tol;
    int depth_limit = 48;
    double simpson(double a, double fa, double m, double fm, double b, double fb) const {
      return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }
    double go(double a, double fa, double m, double fm, double b, double fb, double whole,
              double tol, int depth) const {
      double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      double flm = eval1(f, lm), frm = eval1(f, rm);
      double left = simpson(a, fa, lm, flm, m, fm);
      double right = simpson(m, fm, rm, frm, b, fb);
      double err = left + right - whole;
      if (depth <= 0 || std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
      return go(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
             go(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
    }
  };
  if (a == b) return 0.0;
  Rec rec{f, tol};
  double m = 0.5 * (a + b);
  double fa = eval1(f, a), fm = eval1(f, m), fb = eval1(f, b);
  double whole = rec.simpson(a, fa, m, fm, b, fb);
  return rec.go(a, fa, m, fm, b, fb, whole, tol, 48);
}

}  // namespace

double LyapunovTriple::f_normalized(double x) const { return eval1(f, x) - c; }
double LyapunovTriple::k_normalized(double y) const { return eval1(k, y) + c; }
double LyapunovTriple::g_value(double y) const { return eval1(g, y); }

double lyapunov_value(const LyapunovTriple& triple, double x, double y, double quad_tol) {
  const double c = triple.c;
  const SmoothFn& f = triple.f;
  SmoothFn fn(1, 1, [f, c]<typename T>(std::span<const T> r, std::span<T> o) {
    f.eval<T>(r, o);
    o[0] = o[0] - c;
  });
  double vx = adaptive_simpson(fn, triple.x0, x, quad_tol);
  double vy = adaptive_simpson(triple.g, triple.y0, y, quad_tol);
  return vx + vy;
}

DecreaseReport lyapunov_decrease_check(const LyapunovTriple& triple, const SystemSpec& sys,
                                       const Trajectory& traj, double tol) {
  DecreaseReport rep;
  rep.tol = tol;
  double prev_v = 0.0;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const auto& z = traj.states[i];
    const auto& u = traj.inputs.at(i);
    auto dz = sys.rhs(z, u);
    double fz = triple.f_normalized(z[0]);
    double gy = triple.g_value(z[1]);
    double chain = fz * dz[0] + gy * dz[1];
    double closed = -gy * triple.k_normalized(z[1]);
    rep.max_chain_mismatch = std::max(rep.max_chain_mismatch, std::abs(chain - closed));
    rep.max_vdot = std::max(rep.max_vdot, std::max(chain, closed));
    double v = lyapunov_value(triple, z[0], z[1]);
    if (i > 0) rep.max_increase = std::max(rep.max_increase, v - prev_v);
    prev_v = v;
  }
  rep.pass = rep.max_chain_mismatch <= tol && rep.max_vdot <= tol && rep.max_increase <= tol;
  return rep;
}

Corollary52Result corollary52_transform(const SystemSpec& sys, double u_bar) {
  const std::string& name = sys.name;
  if (name != "fig1c" && name != "fig1d")
    throw ConfigError("corollary52_transform: system is not of the x*g(y) damping form");
  if (!(u_bar > 0.0)) throw ConfigError("corollary52_transform: input must be positive");
  const ParamSet& P = sys.params;
  const double a = P.alpha, b = P.beta, g = P.gamma, y0 = P.y0;
  const bool flip = name == "fig1d";  // z = -ln x turns decreasing f, g into increasing

  Corollary52Result out;
  out.flipped = flip;
  out.u_bar = u_bar;

  SystemSpec t;
  t.name = name + "_log";
  t.n = 2;
  t.m = 1;
  t.q = 1;
  t.params = P;
  t.domain = {Interval::all(), Interval::all()};
  t.input_set = {Interval::positive()};
  t.state_box = {{-3.0, 3.0}, {0.2, 5.0}};
  t.input_box = {{0.5, 8.0}};
  t.equations = "dz/dt = alpha*(y - y0), dy/dt = beta*u*exp(-z) - gamma*y, h = y  (z = " +
                std::string(flip ? "-ln x" : "ln x") + ")";
  // In both cases the z-equation becomes dz/dt = alpha*(y - y0).
  t.F = Dynamics(2, 1, [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = a * (z[1] - y0);
    dz[1] = b * u[0] * exp(-z[0]) - g * z[1];
  });
  t.h = SmoothFn(2, 1, []<typename T>(std::span<const T> z, std::span<T> o) { o[0] = z[1]; });
  t.affine_parts = {
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = a * (z[1] - y0);
        o[1] = T{} - g * z[1];
      }),
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = T{};
        o[1] = b * exp(-z[0]);
      })};
  out.transformed = t;

  LyapunovTriple tri;
  tri.x0 = std::log(b * u_bar / (g * y0));  // = ln x_bar (fig1c) = -ln x_bar (fig1d)
  tri.y0 = y0;
  tri.f = SmoothFn(1, 1, [=]<typename T>(std::span<const T> z, std::span<T> o) {
    o[0] = T{} - b * u_bar * exp(-z[0]);
  });
  tri.g = SmoothFn(1, 1, [=]<typename T>(std::span<const T> y, std::span<T> o) {
    o[0] = a * (y[0] - y0);
  });
  tri.k = SmoothFn(1, 1, [=]<typename T>(std::span<const T> y, std::span<T> o) {
    o[0] = g * y[0];
  });
  tri.c = -g * y0;  // f(x0) = -beta*u/x_bar = -gamma*y0
  out.triple = tri;
  return out;
}

std::vector<double> Corollary52Result::to_transformed(std::span<const double> xy) const {
  double z = flipped ? -std::log(xy[0]) : std::log(xy[0]);
  return {z, xy[1]};
}

std::vector<double> Corollary52Result::to_original(std::span<const double> zy) const {
  double x = flipped ? std::exp(-zy[0]) : std::exp(zy[0]);
  return {x, zy[1]};
}

GasReport gas_empirical(const SystemSpec& sys, double u_bar, int N,
                        std::span<const std::pair<double, double>> box, double T, double tol,
                        std::uint64_t seed) {
  if (static_cast<int>(box.size()) != sys.n) throw ConfigError("gas_empirical: box dimension");
  GasReport rep;
  rep.n = N;
  rep.tol = tol;
  double uv[1] = {u_bar};
  std::span<const double> us(uv, 1);
  auto guess = registry_has(sys.name) ? steady_state_closed_form(sys, us)
                                      : std::vector<double>(sys.n, 1.0);
  auto target = steady_state(sys, us, guess);
  auto u = InputSignal::constant1(u_bar, T);
  IntegratorConfig cfg;
  cfg.dense_output = false;
  for (int run = 0; run < N; ++run) {
    Rng rng = Rng::split(seed, static_cast<std::uint64_t>(run));
    GasRow row;
    row.start.resize(sys.n);
    for (int i = 0; i < sys.n; ++i) row.start[i] = rng.uniform(box[i].first, box[i].second);
    try {
      Trajectory traj = integrate(sys, u, row.start, T, cfg);
      double d = 0.0;
      for (int i = 0; i < sys.n; ++i)
        d = std::max(d, std::abs(traj.states.back()[i] - target[i]));
      row.final_distance = d;
      row.converged = d <= tol;
    } catch (const NumericError&) {
      row.integration_failed = true;
      row.converged = false;
      row.final_distance = std::numeric_limits<double>::infinity();
    }
    if (row.converged) ++rep.n_converged;
    rep.worst_final_distance = std::max(rep.worst_final_distance, row.final_distance);
    rep.rows.push_back(std::move(row));
  }
  rep.fraction_converged = N > 0 ? static_cast<double>(rep.n_converged) / N : 0.0;
  rep.pass = rep.n_converged == N;
  return rep;
}

}  // namespace symadapt
