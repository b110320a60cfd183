#include "symadapt/imp.hpp"

#include <cmath>

#include "symadapt/rng.hpp"

namespace symadapt {

RelativeDegreeReport relative_degree(const SystemSpec& sys,
                                     std::span<const std::vector<double>> samples, int r_max,
                                     double zero_tol, double nonzero_tol) {
  if (!sys.has_affine() || sys.m != 1 || sys.q != 1)
    throw ConfigError("relative_degree: needs a single-input single-output affine system");
  if (r_max + 1 > kMaxDualLevel)
    throw ConfigError("relative_degree: r_max exceeds the instantiated dual tower");
  RelativeDegreeReport rep;
  rep.r_max = r_max;
  const SmoothFn& f = sys.affine_parts[0];
  const SmoothFn& g = sys.affine_parts[1];
  SmoothFn lfk_h = sys.h;  // L_f^k h, starting at k = 0
  for (int k = 0; k < r_max; ++k) {
    SmoothFn lg_lfk_h = lie_derivative(lfk_h, g);
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (const auto& z : samples) {
      double v = std::abs(lg_lfk_h.scalar(z));
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
    rep.max_by_k.push_back(mx);
    if (mx <= zero_tol) {
      lfk_h = lie_derivative(lfk_h, f);
      continue;
    }
    if (mn >= nonzero_tol) {
      rep.r = k + 1;
      rep.min_decisive = mn;
      rep.uniform = true;
    }
    return rep;  // either found, or mixed magnitudes (not uniform)
  }
  return rep;
}

TauFieldsReport tau_fields(const SystemSpec& sys, int r,
                           std::span<const std::vector<double>> samples, double tol) {
  if (!sys.has_affine() || sys.m != 1) throw ConfigError("tau_fields: needs a SISO affine system");
  if (r < 1) throw ConfigError("tau_fields: r must be >= 1");
  TauFieldsReport rep;
  const SmoothFn& f = sys.affine_parts[0];
  const SmoothFn& g = sys.affine_parts[1];

  SmoothFn lf_h = sys.h;  // L_f^{r-1} h
  for (int k = 0; k < r - 1; ++k) lf_h = lie_derivative(lf_h, f);
  SmoothFn denom = lie_derivative(lf_h, g);          // L_g L_f^{r-1} h
  SmoothFn lfr_h = lie_derivative(lf_h, f);          // L_f^r h

  rep.min_denominator = std::numeric_limits<double>::infinity();
  for (const auto& z : samples)
    rep.min_denominator = std::min(rep.min_denominator, std::abs(denom.scalar(z)));
  if (rep.min_denominator < 1e-8)
    throw NumericError("tau_fields: L_g L_f^{r-1} h too close to zero at a sample");

  SmoothFn g_tilde = divide_field(g, denom);
  SmoothFn f_tilde = subtract_scaled_field(f, lfr_h, g_tilde);

  rep.taus.push_back(g_tilde);
  rep.names.push_back("tau1 = g~");
  for (int i = 2; i <= r; ++i) {
    rep.taus.push_back(lie_bracket_field(f_tilde, rep.taus.back()));
    rep.names.push_back("tau" + std::to_string(i) + " = ad_f~ " + rep.names.back().substr(0, 4));
  }

  if (r == 1) {
    rep.max_commutator = 0.0;
    rep.commuting = true;
    rep.note = "r = 1: every vector field commutes with itself";
    return rep;
  }
  for (size_t i = 0; i < rep.taus.size(); ++i) {
    for (size_t j = i + 1; j < rep.taus.size(); ++j) {
      for (const auto& z : samples) {
        auto br = lie_bracket(rep.taus[i], rep.taus[j], z);
        double nn = 0.0;
        for (double v : br) nn += v * v;
        rep.max_commutator = std::max(rep.max_commutator, std::sqrt(nn));
      }
    }
  }
  rep.commuting = rep.max_commutator <= tol;
  return rep;
}

ImpTransformResult imp_transform_fig2a(const ParamSet& params, int n_samples) {
  params.validate();
  const double a = params.alpha, b = params.beta, g = params.gamma, d = params.delta;
  ImpTransformResult out;

  out.diffeo.r = 1;
  out.diffeo.forward = SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
    o[0] = z[1];
    o[1] = a * z[1] - b * log(z[0]);
  });
  out.diffeo.inverse = SmoothFn(2, 2, [=]<typename T>(std::span<const T> w, std::span<T> o) {
    o[0] = exp((a * w[0] - w[1]) / b);
    o[1] = w[0];
  });

  SystemSpec t;
  t.name = "fig2a_imp";
  t.n = 2;
  t.m = 1;
  t.q = 1;
  t.params = params;
  t.domain = {Interval::all(), Interval::all()};
  t.input_set = {Interval::positive()};
  t.state_box = {{0.2, 5.0}, {-3.0, 3.0}};
  t.input_box = {{0.5, 8.0}};
  t.equations =
      "dz1/dt = beta*u*exp((z2 - alpha*z1)/beta) - gamma*z1, dz2/dt = beta*delta - "
      "alpha*gamma*z1, h = z1";
  t.F = Dynamics(2, 1, [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = b * u[0] * exp((z[1] - a * z[0]) / b) - g * z[0];
    dz[1] = b * d - a * g * z[0];
  });
  t.h = SmoothFn(2, 1, []<typename T>(std::span<const T> z, std::span<T> o) { o[0] = z[0]; });
  out.transformed = t;

  out.feedback_xy = registry_get("imp_fb", params);

  // The defining PDE L_g phi = 0 for phi(x, y) = alpha y - beta log x.
  auto fig2a = registry_get("fig2a", params);
  SmoothFn phi(2, 1, [=]<typename T>(std::span<const T> z, std::span<T> o) {
    o[0] = a * z[1] - b * log(z[0]);
  });
  SmoothFn lg_phi = lie_derivative(phi, fig2a.affine_parts[1]);
  auto pts = sobol_box(n_samples, fig2a.state_box);
  for (const auto& z : pts) {
    out.max_lg_phi = std::max(out.max_lg_phi, std::abs(lg_phi.scalar(z)));
    auto w = out.diffeo.forward(z);
    auto back = out.diffeo.inverse(w);
    double rt = std::max(std::abs(back[0] - z[0]), std::abs(back[1] - z[1]));
    out.max_roundtrip = std::max(out.max_roundtrip, rt);
  }
  return out;
}

LinearRecastReport linear_recast_demo(double T, const IntegratorConfig& cfg) {
  LinearRecastReport rep;
  auto orig = registry_get("linear_ff");

  SystemSpec recast;
  recast.name = "linear_ifb";
  recast.n = 2;
  recast.m = 1;
  recast.q = 1;
  recast.domain = {Interval::all(), Interval::all()};
  recast.input_set = {Interval::all()};
  recast.state_box = {{-2.0, 2.0}, {-2.0, 2.0}};
  recast.input_box = {{-2.0, 2.0}};
  recast.equations = "dx~/dt = y, dy/dt = -x~ - 2y + u, h = y";
  recast.F = Dynamics(2, 1,
                      []<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = z[1];
    dz[1] = u[0] - z[0] - 2.0 * z[1];
  });
  recast.h = SmoothFn(2, 1, []<typename T>(std::span<const T> z, std::span<T> o) { o[0] = z[1]; });

  Eigen::Matrix2d A1, A2;
  A1 << -1, 0, -1, -1;
  A2 << 0, 1, -1, -2;
  auto eigs = [](const Eigen::Matrix2d& A) {
    Eigen::EigenSolver<Eigen::Matrix2d> es(A);
    std::array<double, 2> out{es.eigenvalues()[0].real(), es.eigenvalues()[1].real()};
    if (out[0] > out[1]) std::swap(out[0], out[1]);
    return out;
  };
  rep.eig_original = eigs(A1);
  rep.eig_recast = eigs(A2);

  auto compare_runs = [&](const InputSignal& u, std::span<const double> z0) {
    std::vector<double> w0 = {z0[0] - z0[1], z0[1]};  // x~ = x - y
    IntegratorConfig c = cfg;
    c.dense_output = true;
    auto t1 = integrate(orig, u, z0, T, c);
    auto t2 = integrate(recast, u, w0, T, c);
    double worst = 0.0;
    for (int k = 0; k < 2048; ++k) {
      double tt = T * k / 2047;
      worst = std::max(worst, std::abs(orig.output1(t1.state_at(tt)) -
                                       recast.output1(t2.state_at(tt))));
    }
    return worst;
  };

  std::vector<double> z0 = {1.0, 0.0};
  rep.max_output_mismatch = compare_runs(InputSignal::constant1(0.0, T), z0);
  auto ustep = InputSignal::step1(0.0, 1.0, 1.0, T);
  rep.max_output_mismatch = std::max(rep.max_output_mismatch, compare_runs(ustep, z0));
  std::vector<double> zz = {0.0, 0.0};
  rep.max_output_mismatch = std::max(rep.max_output_mismatch,
                                     compare_runs(InputSignal::constant1(0.0, T), zz));

  auto tstep = integrate(orig, ustep, zz, T, cfg);
  rep.step_final_output = orig.output1(tstep.states.back());
  rep.pass = rep.max_output_mismatch <= 1e-8 && std::abs(rep.step_final_output) <= 1e-6;
  return rep;
}

PerturbationReport perturbation_robustness(const SmoothFn& delta, const ParamSet& params,
                                           double u_bar, double T) {
  params.validate();
  if (!(u_bar > 0.0)) throw ConfigError("perturbation_robustness: input must be positive");
  PerturbationReport rep;
  const double a = params.alpha, b = params.beta, g = params.gamma, d = params.delta;
  const double y_star = b * d / (a * g);

  auto perturbed = [&](const SystemSpec& base) {
    SystemSpec s = base;
    Dynamics F = base.F;
    SmoothFn D = delta;
    s.name = base.name + "_perturbed";
    s.F = Dynamics(2, 1,
                   [F, D]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
      F.eval<T>(z, u, dz);
      T dv{};
      D.eval<T>(z, std::span<T>(&dv, 1));
      dz[1] = dz[1] + dv;
    });
    s.affine_parts.clear();
    return s;
  };

  SystemSpec fb = perturbed(registry_get("imp_fb", params));
  SystemSpec ff = perturbed(registry_get("fig2a", params));

  double uv[1] = {u_bar};
  std::span<const double> us(uv, 1);
  auto fb_guess = steady_state_closed_form(registry_get("imp_fb", params), us);
  auto ff_guess = steady_state_closed_form(registry_get("fig2a", params), us);
  auto fb_ss = steady_state(fb, us, fb_guess);
  auto ff_ss = steady_state(ff, us, ff_guess);
  rep.feedback_ybar = fb_ss[1];
  rep.feedforward_ybar = ff_ss[1];
  rep.feedback_shift = std::abs(fb_ss[1] - y_star);
  rep.feedforward_shift = std::abs(ff_ss[1] - y_star);
  rep.feedback_pinned = rep.feedback_shift <= 1e-8;

  // quick empirical stability check of the perturbed systems
  rep.gas_checked = true;
  rep.gas_ok = true;
  IntegratorConfig cfg;
  cfg.dense_output = false;
  auto u = InputSignal::constant1(u_bar, T);
  for (const auto* pair : {&fb, &ff}) {
    const auto& target = (pair == &fb) ? fb_ss : ff_ss;
    for (double scalefac : {0.5, 1.7}) {
      std::vector<double> z0 = {target[0] * scalefac, target[1] * scalefac + 0.2};
      try {
        auto traj = integrate(*pair, u, z0, T, cfg);
        double dist = std::max(std::abs(traj.states.back()[0] - target[0]),
                               std::abs(traj.states.back()[1] - target[1]));
        if (dist > 1e-5) rep.gas_ok = false;
      } catch (const NumericError&) {
        rep.gas_ok = false;
      }
    }
  }
  return rep;
}

DelayReport delay_experiment(const DelaySystemSpec& spec, double T, const IntegratorConfig& cfg) {
  if (spec.delay > 0.0 && T < 20.0 * spec.delay)
    throw ConfigError("delay_experiment: horizon must be at least 20 delays");
  const ParamSet& P = spec.params;
  InputSignal u = spec.input ? *spec.input : InputSignal::constant1(0.0, T);
  if (u.T < T) throw ConfigError("delay_experiment: input not defined up to T");

  DdeRhs rhs;
  if (spec.base == DelaySystemSpec::Base::Linear9) {
    rhs = [&u](double t, std::span<const double> z, std::span<const double> zd,
               std::span<double> dz) {
      dz[0] = zd[1];
      dz[1] = -z[0] - 2.0 * z[1] + u.sample1(std::min(t, u.T));
    };
  } else {
    const double a = P.alpha, b = P.beta, g = P.gamma, d = P.delta;
    rhs = [&u, a, b, g, d](double t, std::span<const double> z, std::span<const double> zd,
                           std::span<double> dz) {
      dz[0] = z[0] * (d - (a * g / b) * zd[1]);
      dz[1] = b * u.sample1(std::min(t, u.T)) * z[0] * exp(-(a / b) * z[1]) - g * z[1];
    };
  }

  std::vector<double> h0 = spec.history_value.empty() ? std::vector<double>{0.1, 0.1}
                                                      : spec.history_value;
  HistoryFn hist = [h0](double) { return h0; };
  SmoothFn out(2, 1, []<typename T>(std::span<const T> z, std::span<T> o) { o[0] = z[1]; });

  auto bps = u.breakpoints();
  DelayReport rep;
  rep.trajectory = integrate_dde(rhs, 2, spec.delay, hist, T, cfg, &out, bps);
  rep.trajectory.inputs.reserve(rep.trajectory.times.size());
  for (double t : rep.trajectory.times) rep.trajectory.inputs.push_back(u.sample(std::min(t, u.T)));

  // peak-to-peak amplitudes on the third and fourth quarters of [0, T]
  const int kGrid = 2048;
  std::vector<double> y(kGrid);
  for (int k = 0; k < kGrid; ++k) y[k] = rep.trajectory.state_at(T * k / (kGrid - 1))[1];
  auto p2p = [&](int lo, int hi) {
    double mn = y[lo], mx = y[lo];
    for (int k = lo; k < hi; ++k) {
      mn = std::min(mn, y[k]);
      mx = std::max(mx, y[k]);
    }
    return mx - mn;
  };
  rep.p2p_third = p2p(kGrid / 2, 3 * kGrid / 4);
  rep.p2p_last = p2p(3 * kGrid / 4, kGrid);
  double global_p2p = p2p(0, kGrid);
  rep.amplitude_ratio = rep.p2p_third > 0.0 ? rep.p2p_last / rep.p2p_third : 0.0;
  const double amp_floor = 1e-6 * std::max(1.0, global_p2p);
  rep.oscillating = rep.p2p_last >= 0.9 * rep.p2p_third && rep.p2p_last > amp_floor;

  // dominant period from zero crossings of y - mean over the last half
  double mean = 0.0;
  for (int k = kGrid / 2; k < kGrid; ++k) mean += y[k];
  mean /= (kGrid - kGrid / 2);
  std::vector<double> crossings;
  for (int k = kGrid / 2 + 1; k < kGrid; ++k) {
    double a0 = y[k - 1] - mean, a1 = y[k] - mean;
    if (a0 == 0.0 || a0 * a1 < 0.0) {
      double t0 = T * (k - 1) / (kGrid - 1), t1 = T * k / (kGrid - 1);
      crossings.push_back(t0 + (t1 - t0) * (a0 / (a0 - a1)));
    }
  }
  if (crossings.size() >= 3)
    rep.dominant_period = 2.0 * (crossings.back() - crossings.front()) /
                          static_cast<double>(crossings.size() - 1);
  return rep;
}

}  // namespace symadapt
