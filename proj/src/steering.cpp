#include "symadapt/steering.hpp"

#include <cmath>
#include <fstream>

#include "symadapt/rng.hpp"

namespace symadapt {

SteeringSpec SteeringSpec::error_integrator(double y0_ref) {
  SteeringSpec s;
  s.dim_q = 1;
  s.dim_r = 1;
  s.Q = [y0_ref](std::span<const double>, double y, std::span<double> dq) { dq[0] = y - y0_ref; };
  s.R = [](std::span<const double> q) { return std::vector<double>(q.begin(), q.end()); };
  s.q0 = {0.0};
  return s;
}

SteeringSpec SteeringSpec::run_and_tumble(double v, double lambda0, double y0_ref,
                                          double rate_ceiling) {
  SteeringSpec s;
  s.dim_q = 1;
  s.dim_r = 1;
  s.Q = [v](std::span<const double>, double, std::span<double> dq) { dq[0] = v; };
  s.Q_noise = [v](std::span<const double>, double, double X, std::span<double> dq) {
    dq[0] = v * X;
  };
  s.R = [](std::span<const double> q) { return std::vector<double>(q.begin(), q.end()); };
  s.q0 = {0.0};
  NoiseProcess np;
  np.kind = NoiseProcess::Kind::Telegraph;
  np.base_rate = lambda0;
  np.rate_ceiling = rate_ceiling > 0.0 ? rate_ceiling : 10.0 * lambda0;
  np.rate = [lambda0, y0_ref](double y) { return std::max(0.0, lambda0 * y / y0_ref); };
  np.initial_value = 1.0;
  s.noise = np;
  return s;
}

FieldSpec FieldSpec::constant(double I0) {
  FieldSpec f;
  f.I0 = I0;
  f.intensity = [I0](double, std::span<const double>) { return I0; };
  return f;
}

FieldSpec FieldSpec::exponential(double I0, double k) {
  FieldSpec f;
  f.I0 = I0;
  f.intensity = [I0, k](double, std::span<const double> r) { return I0 * std::exp(k * r[0]); };
  return f;
}

FieldSpec FieldSpec::gaussian_bump(double I0, double amplitude, double center, double width) {
  FieldSpec f;
  f.I0 = I0;
  f.intensity = [=](double, std::span<const double> r) {
    double d = (r[0] - center) / width;
    return I0 * (1.0 + amplitude * std::exp(-d * d));
  };
  return f;
}

FieldSpec FieldSpec::time_modulated(const FieldSpec& base, double mod_amplitude, double period) {
  FieldSpec f = base;
  auto inner = base.intensity;
  f.intensity = [inner, mod_amplitude, period](double t, std::span<const double> r) {
    return inner(t, r) * (1.0 + mod_amplitude * std::sin(2.0 * M_PI * t / period));
  };
  return f;
}

void ClosedLoopTrajectory::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open for writing: " + path);
  os.precision(17);
  size_t nz = z.empty() ? 0 : z.front().size();
  size_t nq = q.empty() ? 0 : q.front().size();
  size_t nr = r.empty() ? 0 : r.front().size();
  os << "time";
  for (size_t i = 1; i <= nz; ++i) os << ",z" << i;
  for (size_t i = 1; i <= nq; ++i) os << ",q" << i;
  for (size_t i = 1; i <= nr; ++i) os << ",r" << i;
  os << ",y,u\n";
  for (size_t k = 0; k < times.size(); ++k) {
    os << times[k];
    for (size_t i = 0; i < nz; ++i) os << "," << z[k][i];
    for (size_t i = 0; i < nq; ++i) os << "," << q[k][i];
    for (size_t i = 0; i < nr; ++i) os << "," << r[k][i];
    os << "," << y[k] << "," << u[k] << "\n";
  }
}

ClosedLoopTrajectory simulate_closed_loop(const SystemSpec& sys, const SteeringSpec& steer,
                                          const FieldSpec& field, const Transform& pi, double T,
                                          const IntegratorConfig& cfg, std::uint64_t seed) {
  if (sys.m != 1) throw ConfigError("simulate_closed_loop: scalar-input sensors only");
  if (!steer.Q && !steer.Q_noise) throw ConfigError("simulate_closed_loop: steering law missing");
  const int n = sys.n;
  const int nq = steer.dim_q;
  const int dim = n + nq;

  const bool noisy_spec = steer.noise && steer.noise->kind == NoiseProcess::Kind::Telegraph;
  // sanity: the deterministic steering law is stationary at (q0, y0)
  double y0_ref = registry_has(sys.name) ? adaptation_value(sys) : 0.0;
  if (!noisy_spec && steer.Q && registry_has(sys.name)) {
    std::vector<double> dq(nq);
    steer.Q(steer.q0, y0_ref, dq);
    double nn = 0.0;
    for (double v : dq) nn += v * v;
    if (std::sqrt(nn) > 1e-10)
      throw ConfigError("simulate_closed_loop: Q(q0, y0) must vanish (no adapted rest state)");
  }

  // pre-adapted start: z(0) = sigma(pi(I0))
  double sensed0 = pi.apply1(field.I0);
  double uv[1] = {sensed0};
  std::span<const double> us(uv, 1);
  auto guess = registry_has(sys.name) ? steady_state_closed_form(sys, us)
                                      : std::vector<double>(sys.n, 1.0);
  auto z0 = steady_state(sys, us, guess);

  std::vector<double> w(dim);
  std::copy(z0.begin(), z0.end(), w.begin());
  std::copy(steer.q0.begin(), steer.q0.end(), w.begin() + n);

  const bool noisy = noisy_spec;
  double X = noisy ? steer.noise->initial_value : 0.0;

  auto rhs = [&](double t, std::span<const double> state, std::span<double> dstate) {
    std::span<const double> zz = state.subspan(0, n);
    std::span<const double> qq = state.subspan(n, nq);
    auto rr = steer.R(qq);
    double sensed = pi.apply1(field.intensity(t, rr));
    double u1[1] = {sensed};
    sys.F.eval<double>(zz, std::span<const double>(u1, 1), dstate.subspan(0, n));
    double y = sys.output1(zz);
    if (noisy && steer.Q_noise)
      steer.Q_noise(qq, y, X, dstate.subspan(n, nq));
    else
      steer.Q(qq, y, dstate.subspan(n, nq));
  };
  auto ok = [&](std::span<const double> state) {
    return sys.in_domain(state.subspan(0, n));
  };

  ClosedLoopTrajectory out;
  Trajectory total;
  total.meta.rel_tol = cfg.rel_tol;
  total.meta.abs_tol = cfg.abs_tol;
  total.meta.seed = seed;

  IntegratorConfig c = cfg;
  c.dense_output = true;

  Rng rng(seed);
  double t = 0.0;
  bool first = true;
  auto append = [&](Trajectory&& part) {
    size_t skip = first ? 0 : 1;
    for (size_t i = skip; i < part.times.size(); ++i) {
      total.times.push_back(part.times[i]);
      total.states.push_back(part.states[i]);
    }
    for (auto& seg : part.dense) total.dense.push_back(std::move(seg));
    total.meta.n_accepted += part.meta.n_accepted;
    total.meta.n_rejected += part.meta.n_rejected;
    total.meta.n_rhs += part.meta.n_rhs;
    first = false;
  };

  if (!noisy) {
    append(integrate_ode(rhs, dim, w, 0.0, T, {}, c, ok));
  } else {
    const NoiseProcess& np = *steer.noise;
    while (t < T) {
      // draws are consumed in a fixed order regardless of acceptance, so a
      // seed fully determines the sample path (replayable across the pi pair)
      double gap = rng.exponential(np.rate_ceiling);
      double u01 = rng.uniform01();
      double t_prop = t + gap;
      double t_stop = std::min(t_prop, T);
      if (t_stop > t) {
        append(integrate_ode(rhs, dim, w, t, t_stop, {}, c, ok));
        w = total.states.back();
        t = t_stop;
      }
      if (t_prop <= T) {
        double y = sys.output1(std::span<const double>(w.data(), n));
        double lam = np.rate(y);
        if (u01 < lam / np.rate_ceiling) {
          X = -X;
          out.noise_events.push_back(t_prop);
        }
      }
    }
  }
  if (!noisy) t = T;

  out.raw = std::move(total);
  out.times = out.raw.times;
  for (const auto& st : out.raw.states) {
    std::span<const double> zz(st.data(), n);
    std::span<const double> qq(st.data() + n, nq);
    out.z.emplace_back(zz.begin(), zz.end());
    out.q.emplace_back(qq.begin(), qq.end());
    out.r.push_back(steer.R(qq));
    out.y.push_back(sys.output1(zz));
  }
  out.u.reserve(out.times.size());
  for (size_t k = 0; k < out.times.size(); ++k)
    out.u.push_back(pi.apply1(field.intensity(out.times[k], out.r[k])));
  return out;
}

namespace {

struct LoopSampler {
  const ClosedLoopTrajectory& traj;
  int n, nq;
  std::vector<double> state_at(double t) const { return traj.raw.state_at(t); }
};

}  // namespace

SteeringInvarianceReport steering_invariance_experiment(const SystemSpec& sys,
                                                        const SteeringSpec& steer,
                                                        const FieldSpec& field,
                                                        const Transform& pi, double T, double tol,
                                                        const IntegratorConfig& cfg,
                                                        std::uint64_t seed) {
  SteeringInvarianceReport rep;
  rep.tol = tol;
  auto base = simulate_closed_loop(sys, steer, field, Transform::identity(), T, cfg, seed);
  auto transformed = simulate_closed_loop(sys, steer, field, pi, T, cfg, seed);

  const int n = sys.n;
  const int nq = steer.dim_q;
  const int grid = 2048;
  for (int k = 0; k < grid; ++k) {
    double t = T * k / (grid - 1);
    auto w1 = base.raw.state_at(t);
    auto w2 = transformed.raw.state_at(t);
    std::span<const double> q1(w1.data() + n, nq), q2(w2.data() + n, nq);
    auto r1 = steer.R(q1);
    auto r2 = steer.R(q2);
    for (size_t i = 0; i < r1.size(); ++i)
      rep.r_deviation = std::max(rep.r_deviation, std::abs(r1[i] - r2[i]));
    for (int i = 0; i < nq; ++i)
      rep.q_deviation = std::max(rep.q_deviation, std::abs(q1[i] - q2[i]));
    double y1 = sys.output1(std::span<const double>(w1.data(), n));
    double y2 = sys.output1(std::span<const double>(w2.data(), n));
    rep.y_deviation = std::max(rep.y_deviation, std::abs(y1 - y2));
    double u1 = field.intensity(t, r1);
    double u2 = pi.apply1(field.intensity(t, r2));
    rep.u_relation_deviation = std::max(rep.u_relation_deviation, std::abs(u2 - pi.apply1(u1)));
  }
  rep.pass = rep.r_deviation <= tol && rep.y_deviation <= tol && rep.q_deviation <= tol &&
             rep.u_relation_deviation <= tol;
  return rep;
}

StochasticSteeringReport stochastic_steering_experiment(const SystemSpec& sys,
                                                        const SteeringSpec& steer,
                                                        const FieldSpec& field,
                                                        const Transform& pi, double T,
                                                        std::span<const std::uint64_t> seeds,
                                                        double tol,
                                                        const IntegratorConfig& cfg) {
  if (!steer.noise || steer.noise->kind == NoiseProcess::Kind::None)
    throw ConfigError("stochastic_steering_experiment: steering law has no noise process");
  StochasticSteeringReport rep;
  rep.tol = tol;
  const int n = sys.n;
  const int nq = steer.dim_q;
  const int grid = 1024;
  for (std::uint64_t seed : seeds) {
    auto base = simulate_closed_loop(sys, steer, field, Transform::identity(), T, cfg, seed);
    auto transformed = simulate_closed_loop(sys, steer, field, pi, T, cfg, seed);
    StochasticSteeringReport::PerSeed row;
    row.seed = seed;
    row.n_events_base = base.noise_events.size();
    row.n_events_transformed = transformed.noise_events.size();
    row.events_identical = base.noise_events == transformed.noise_events;
    for (int k = 0; k < grid; ++k) {
      double t = T * k / (grid - 1);
      auto w1 = base.raw.state_at(t);
      auto w2 = transformed.raw.state_at(t);
      std::span<const double> q1(w1.data() + n, nq), q2(w2.data() + n, nq);
      auto r1 = steer.R(q1);
      auto r2 = steer.R(q2);
      for (size_t i = 0; i < r1.size(); ++i)
        row.r_deviation = std::max(row.r_deviation, std::abs(r1[i] - r2[i]));
      double y1 = sys.output1(std::span<const double>(w1.data(), n));
      double y2 = sys.output1(std::span<const double>(w2.data(), n));
      row.y_deviation = std::max(row.y_deviation, std::abs(y1 - y2));
    }
    double disp1 = base.r.back()[0] - base.r.front()[0];
    double disp2 = transformed.r.back()[0] - transformed.r.front()[0];
    rep.mean_displacement_base += disp1;
    rep.mean_displacement_transformed += disp2;
    rep.msd_base += disp1 * disp1;
    rep.msd_transformed += disp2 * disp2;
    rep.max_r_deviation = std::max(rep.max_r_deviation, row.r_deviation);
    rep.seeds.push_back(row);
  }
  const double ns = static_cast<double>(seeds.size());
  rep.mean_displacement_base /= ns;
  rep.mean_displacement_transformed /= ns;
  rep.msd_base /= ns;
  rep.msd_transformed /= ns;
  rep.pass = rep.max_r_deviation <= tol &&
             std::abs(rep.mean_displacement_base - rep.mean_displacement_transformed) <= tol &&
             std::abs(rep.msd_base - rep.msd_transformed) <=
                 tol * (1.0 + std::abs(rep.msd_base));
  return rep;
}

}  // namespace symadapt
