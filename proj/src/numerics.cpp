#include "symadapt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace symadapt {

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0) || !(abs_tol > 0.0 && abs_tol < 1.0))
    throw ConfigError("integrator tolerances must lie in (0, 1)");
  if (!(min_step > 0.0 && min_step < max_step))
    throw ConfigError("integrator steps must satisfy 0 < min_step < max_step");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

struct Stepper {
  const OdeRhs& rhs;
  int n;
  long n_rhs = 0;

  std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp;

  explicit Stepper(const OdeRhs& f, int dim) : rhs(f), n(dim) {
    for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &ytmp}) v->assign(n, 0.0);
  }

  void eval(double t, std::span<const double> y, std::span<double> dy) {
    rhs(t, y, dy);
    ++n_rhs;
  }

  // One trial step; returns the scaled error norm, or infinity when a stage
  // produced a non-finite value. k1 must hold f(t, y) on entry; on acceptance
  // k7 holds f(t+h, ynew) (FSAL).
  double try_step(double t, std::span<const double> y, double h, std::span<double> ynew,
                  double rel_tol, double abs_tol) {
    auto stage = [&](std::span<double> k, double c, auto&&... terms) {
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        ((acc += terms.first * terms.second[i]), ...);
        ytmp[i] = y[i] + h * acc;
      }
      if (!all_finite(ytmp)) return false;
      eval(t + c * h, ytmp, k);
      return all_finite(k);
    };
    using P = std::pair<double, std::span<const double>>;
    bool ok = stage(k2, c2, P{a21, k1}) &&
              stage(k3, c3, P{a31, k1}, P{a32, k2}) &&
              stage(k4, c4, P{a41, k1}, P{a42, k2}, P{a43, k3}) &&
              stage(k5, c5, P{a51, k1}, P{a52, k2}, P{a53, k3}, P{a54, k4}) &&
              stage(k6, 1.0, P{a61, k1}, P{a62, k2}, P{a63, k3}, P{a64, k4}, P{a65, k5});
    if (!ok) return std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    if (!all_finite(ynew)) return std::numeric_limits<double>::infinity();
    eval(t + h, ynew, k7);
    if (!all_finite(k7)) return std::numeric_limits<double>::infinity();
    double err2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err2 += (ei / sc) * (ei / sc);
    }
    return std::sqrt(err2 / n);
  }
};

double initial_step(double span, double ynorm, double fnorm, const IntegratorConfig& cfg) {
  // Scale-invariant when the state is away from zero, so that trajectories
  // related by a symmetry start (and usually stay) on identical step grids.
  double h = (ynorm > 1e-8 && fnorm > 1e-8) ? 0.01 * ynorm / fnorm
                                            : 0.01 * (1.0 + ynorm) / (1.0 + fnorm);
  h = std::min({h, cfg.max_step, span});
  return std::max(h, cfg.min_step);
}

}  // namespace

std::vector<double> Trajectory::state_at(double t) const {
  if (dense.empty()) throw NumericError("Trajectory::state_at: no dense output stored");
  if (t <= dense.front().t0) return dense.front().y0;
  if (t >= dense.back().t1) return dense.back().y1;
  // binary search for the segment containing t
  size_t lo = 0, hi = dense.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (dense[mid].t1 < t)
      lo = mid + 1;
    else
      hi = mid;
  }
  const DenseSegment& s = dense[lo];
  double h = s.t1 - s.t0;
  double th = (t - s.t0) / h;
  double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
  double h10 = th * (1 - th) * (1 - th);
  double h01 = th * th * (3 - 2 * th);
  double h11 = th * th * (th - 1);
  std::vector<double> y(s.y0.size());
  for (size_t i = 0; i < y.size(); ++i)
    y[i] = h00 * s.y0[i] + h10 * h * s.f0[i] + h01 * s.y1[i] + h11 * h * s.f1[i];
  return y;
}

void Trajectory::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open for writing: " + path);
  os.precision(17);
  size_t nz = states.empty() ? 0 : states.front().size();
  size_t ny = outputs.empty() ? 0 : outputs.front().size();
  size_t nu = inputs.empty() ? 0 : inputs.front().size();
  os << "time";
  for (size_t i = 1; i <= nz; ++i) os << ",z" << i;
  for (size_t i = 1; i <= ny; ++i) os << ",y" << i;
  for (size_t i = 1; i <= nu; ++i) os << ",u" << i;
  os << "\n";
  for (size_t r = 0; r < times.size(); ++r) {
    os << times[r];
    for (size_t i = 0; i < nz; ++i) os << "," << states[r][i];
    for (size_t i = 0; i < ny; ++i) os << "," << (r < outputs.size() ? outputs[r][i] : 0.0);
    for (size_t i = 0; i < nu; ++i) os << "," << (r < inputs.size() ? inputs[r][i] : 0.0);
    os << "\n";
  }
}

Trajectory integrate_ode(const OdeRhs& rhs, int n, std::span<const double> z0, double t0, double t1,
                         std::span<const double> breakpoints, const IntegratorConfig& cfg,
                         const StateCheck& state_ok) {
  cfg.validate();
  if (static_cast<int>(z0.size()) != n) throw ConfigError("integrate: initial state dimension");
  if (state_ok && !state_ok(z0)) throw DomainExitError("initial state outside the domain", t0);

  Trajectory traj;
  traj.meta.rel_tol = cfg.rel_tol;
  traj.meta.abs_tol = cfg.abs_tol;

  // checkpoints: t0 < bp_1 < ... < t1
  std::vector<double> checks;
  for (double b : breakpoints)
    if (b > t0 && b < t1) checks.push_back(b);
  std::sort(checks.begin(), checks.end());
  checks.erase(std::unique(checks.begin(), checks.end()), checks.end());
  checks.push_back(t1);

  std::vector<double> y(z0.begin(), z0.end());
  std::vector<double> ynew(n);
  Stepper st(rhs, n);

  traj.times.push_back(t0);
  traj.states.push_back(y);

  double t = t0;
  double facold = 1e-4;
  const double safe = 0.9, beta = 0.04;
  const double expo1 = 0.2 - beta * 0.75;
  long steps = 0;

  for (double t_stop : checks) {
    if (t_stop <= t) continue;
    st.eval(t, y, st.k1);  // fresh derivative after each restart
    double fn = 0.0, yn = 0.0;
    for (int i = 0; i < n; ++i) {
      fn += st.k1[i] * st.k1[i];
      yn += y[i] * y[i];
    }
    double h = initial_step(t_stop - t, std::sqrt(yn), std::sqrt(fn), cfg);
    while (t < t_stop) {
      if (++steps > cfg.max_steps) throw NumericError("integrate: max step count exceeded");
      bool last = false;
      if (t + h >= t_stop) {
        h = t_stop - t;
        last = true;
      }
      double err = st.try_step(t, y, h, ynew, cfg.rel_tol, cfg.abs_tol);
      if (err <= 1.0) {
        double tnew = last ? t_stop : t + h;
        if (state_ok && !state_ok(ynew))
          throw DomainExitError("state left the domain during integration", tnew);
        if (cfg.dense_output) {
          DenseSegment seg;
          seg.t0 = t;
          seg.t1 = tnew;
          seg.y0 = y;
          seg.y1.assign(ynew.begin(), ynew.end());
          seg.f0 = st.k1;
          seg.f1 = st.k7;
          traj.dense.push_back(std::move(seg));
        }
        t = tnew;
        y = ynew;
        st.k1 = st.k7;  // FSAL
        traj.times.push_back(t);
        traj.states.push_back(y);
        ++traj.meta.n_accepted;
        double fac11 = std::pow(std::max(err, 1e-16), expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(0.1, std::min(5.0, fac / safe));
        h = std::min(h / fac, cfg.max_step);
        facold = std::max(err, 1e-4);
      } else {
        ++traj.meta.n_rejected;
        double fac11 = std::isfinite(err) ? std::pow(err, expo1) : 10.0;
        h = h / std::min(5.0, fac11 / safe);
        if (h < cfg.min_step)
          throw NumericError("integrate: step size underflow at t = " + std::to_string(t));
      }
    }
  }
  traj.meta.n_rhs = st.n_rhs;
  return traj;
}

Trajectory integrate(const SystemSpec& sys, const InputSignal& u, std::span<const double> z0,
                     double T, const IntegratorConfig& cfg) {
  if (u.m != sys.m) throw ConfigError("integrate: signal dimension does not match system");
  if (T > u.T + 1e-12) throw ConfigError("integrate: horizon exceeds signal definition");

  // The active segment is pinned per subinterval so that stage evaluations at
  // a right endpoint use the current segment's closed form, not the jump.
  int active_segment = 0;
  auto rhs = [&](double t, std::span<const double> z, std::span<double> dz) {
    std::vector<double> uv = u.eval_segment(active_segment, t);
    sys.F.eval<double>(z, uv, dz);
  };
  auto ok = [&sys](std::span<const double> z) { return sys.in_domain(z); };

  auto bps = u.breakpoints();
  std::vector<double> checks;
  for (double b : bps)
    if (b < T) checks.push_back(b);
  checks.push_back(T);

  Trajectory total;
  total.meta.rel_tol = cfg.rel_tol;
  total.meta.abs_tol = cfg.abs_tol;
  std::vector<double> y(z0.begin(), z0.end());
  double t = 0.0;
  bool first = true;
  for (double t_stop : checks) {
    if (t_stop <= t) continue;
    active_segment = u.segment_index_at(t);
    Trajectory part = integrate_ode(rhs, sys.n, y, t, t_stop, {}, cfg, ok);
    size_t skip = first ? 0 : 1;  // drop duplicated restart point
    for (size_t i = skip; i < part.times.size(); ++i) {
      total.times.push_back(part.times[i]);
      total.states.push_back(part.states[i]);
    }
    for (auto& seg : part.dense) total.dense.push_back(std::move(seg));
    total.meta.n_accepted += part.meta.n_accepted;
    total.meta.n_rejected += part.meta.n_rejected;
    total.meta.n_rhs += part.meta.n_rhs;
    y = total.states.back();
    t = t_stop;
    first = false;
  }
  total.outputs.reserve(total.times.size());
  total.inputs.reserve(total.times.size());
  for (size_t i = 0; i < total.times.size(); ++i) {
    total.outputs.push_back(sys.output(total.states[i]));
    total.inputs.push_back(u.sample(std::min(total.times[i], u.T)));
  }
  return total;
}

Trajectory integrate_dde(const DdeRhs& rhs, int n, double delay, const HistoryFn& history,
                         double T, const IntegratorConfig& cfg, const SmoothFn* output,
                         std::span<const double> extra_breakpoints) {
  if (delay < 0.0) throw ConfigError("integrate_dde: delay must be >= 0");
  std::vector<double> z0 = history(0.0);
  if (static_cast<int>(z0.size()) != n) throw ConfigError("integrate_dde: history dimension");

  IntegratorConfig c = cfg;
  c.dense_output = true;  // required by the method of steps
  if (delay > 0.0) c.max_step = std::min(c.max_step, delay);

  Trajectory traj;  // accumulated solution; dense segments used for the lag term

  auto delayed_state = [&](double t) -> std::vector<double> {
    if (t <= 0.0) return history(t);
    return traj.state_at(t);
  };

  auto ode_rhs = [&](double t, std::span<const double> z, std::span<double> dz) {
    if (delay == 0.0) {
      rhs(t, z, z, dz);
    } else {
      std::vector<double> zd = delayed_state(t - delay);
      rhs(t, z, zd, dz);
    }
  };

  // Discontinuity propagation at multiples of the delay.
  std::vector<double> checks(extra_breakpoints.begin(), extra_breakpoints.end());
  if (delay > 0.0)
    for (double b = delay; b < T; b += delay) checks.push_back(b);
  std::sort(checks.begin(), checks.end());
  checks.erase(std::unique(checks.begin(), checks.end()), checks.end());
  checks.push_back(T);

  traj.meta.rel_tol = c.rel_tol;
  traj.meta.abs_tol = c.abs_tol;
  std::vector<double> y = z0;
  double t = 0.0;
  bool first = true;
  for (double t_stop : checks) {
    if (t_stop <= t) continue;
    Trajectory part = integrate_ode(ode_rhs, n, y, t, t_stop, {}, c, {});
    size_t skip = first ? 0 : 1;
    for (size_t i = skip; i < part.times.size(); ++i) {
      traj.times.push_back(part.times[i]);
      traj.states.push_back(part.states[i]);
    }
    for (auto& seg : part.dense) traj.dense.push_back(std::move(seg));
    traj.meta.n_accepted += part.meta.n_accepted;
    traj.meta.n_rejected += part.meta.n_rejected;
    traj.meta.n_rhs += part.meta.n_rhs;
    y = traj.states.back();
    t = t_stop;
    first = false;
  }
  if (output) {
    traj.outputs.reserve(traj.times.size());
    for (const auto& z : traj.states) traj.outputs.push_back((*output)(z));
  }
  return traj;
}

namespace {

double fnorm(const SystemSpec& sys, std::span<const double> z, std::span<const double> u) {
  auto f = sys.rhs(z, u);
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> steady_state(const SystemSpec& sys, std::span<const double> u_bar,
                                 std::span<const double> guess, double tol) {
  if (!sys.input_ok(u_bar)) throw ConfigError("steady_state: input outside the input set");
  if (!sys.in_domain(guess)) throw ConfigError("steady_state: guess outside the domain");

  auto newton = [&](std::vector<double> z, int max_iter) -> std::optional<std::vector<double>> {
    for (int it = 0; it < max_iter; ++it) {
      double r0 = fnorm(sys, z, u_bar);
      if (r0 <= tol) return z;
      Eigen::MatrixXd J = jacobian_state(sys, z, u_bar);
      std::vector<double> fvec = sys.rhs(z, u_bar);
      Eigen::Map<const Eigen::VectorXd> fz(fvec.data(), sys.n);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
      if (!lu.isInvertible()) return std::nullopt;
      Eigen::VectorXd step = lu.solve(-fz);
      double lambda = 1.0;
      bool moved = false;
      for (int bis = 0; bis <= 12; ++bis) {
        std::vector<double> zt(sys.n);
        for (int i = 0; i < sys.n; ++i) zt[i] = z[i] + lambda * step[i];
        if (sys.in_domain(zt) && fnorm(sys, zt, u_bar) < r0) {
          z = std::move(zt);
          moved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!moved) return std::nullopt;  // stalled
    }
    if (fnorm(sys, z, u_bar) <= tol) return z;
    return std::nullopt;
  };

  std::vector<double> g(guess.begin(), guess.end());
  if (auto z = newton(g, 50)) return *z;

  // Fallback: simulate to quiescence under the constant input, then polish.
  IntegratorConfig cfg;
  cfg.dense_output = false;
  std::vector<double> z = g;
  InputSignal u = InputSignal::constant(std::vector<double>(u_bar.begin(), u_bar.end()), 10.0);
  for (int chunk = 0; chunk < 200; ++chunk) {
    Trajectory traj = integrate(sys, u, z, 10.0, cfg);
    z = traj.states.back();
    if (fnorm(sys, z, u_bar) <= 1e-9) break;
  }
  if (auto zs = newton(z, 50)) return *zs;
  if (fnorm(sys, z, u_bar) <= tol) return z;
  throw NumericError("steady_state: no convergence for input level");
}

std::vector<double> steady_state1(const SystemSpec& sys, double u_bar, double tol) {
  double u[1] = {u_bar};
  std::span<const double> us(u, 1);
  std::vector<double> guess;
  if (registry_has(sys.name))
    guess = steady_state_closed_form(sys, us);
  else
    guess.assign(sys.n, 1.0);
  return steady_state(sys, us, guess, tol);
}

Eigen::MatrixXd jacobian(const SmoothFn& f, std::span<const double> z) {
  std::vector<double> J;
  jacobian_eval<double>(f, z, J);
  Eigen::MatrixXd M(f.out_dim(), f.in_dim());
  for (int r = 0; r < f.out_dim(); ++r)
    for (int c = 0; c < f.in_dim(); ++c) M(r, c) = J[static_cast<size_t>(r) * f.in_dim() + c];
  return M;
}

Eigen::MatrixXd jacobian_state(const SystemSpec& sys, std::span<const double> z,
                               std::span<const double> u) {
  std::vector<double> J;
  dynamics_state_jacobian<double>(sys.F, z, u, J);
  Eigen::MatrixXd M(sys.n, sys.n);
  for (int r = 0; r < sys.n; ++r)
    for (int c = 0; c < sys.n; ++c) M(r, c) = J[static_cast<size_t>(r) * sys.n + c];
  return M;
}

Eigen::MatrixXd jacobian_state_input(const SystemSpec& sys, std::span<const double> z,
                                     std::span<const double> u) {
  const int n = sys.n, m = sys.m;
  Eigen::MatrixXd M(n, n + m);
  std::vector<D1> zi(n), ui(m), dz(n);
  for (int j = 0; j < n + m; ++j) {
    for (int k = 0; k < n; ++k) zi[k] = D1{z[k], k == j ? 1.0 : 0.0};
    for (int k = 0; k < m; ++k) ui[k] = D1{u[k], n + k == j ? 1.0 : 0.0};
    sys.F.eval<D1>(zi, ui, dz);
    for (int r = 0; r < n; ++r) M(r, j) = dz[r].du;
  }
  return M;
}

std::vector<double> lie_bracket(const SmoothFn& f, const SmoothFn& g, std::span<const double> z) {
  SmoothFn br = lie_bracket_field(f, g);
  return br(z);
}

}  // namespace symadapt
