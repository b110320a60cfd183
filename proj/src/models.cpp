#include "symadapt/models.hpp"

#include <cmath>
#include <sstream>

namespace symadapt {

void ParamSet::validate() const {
  auto pos = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string("parameter must be positive: ") + name);
  };
  pos(alpha, "alpha");
  pos(beta, "beta");
  pos(gamma, "gamma");
  pos(delta, "delta");
  pos(mu, "mu");
  pos(y0, "y0");
}

std::map<std::string, double> ParamSet::as_map() const {
  return {{"alpha", alpha}, {"beta", beta}, {"gamma", gamma},
          {"delta", delta}, {"mu", mu},     {"y0", y0}};
}

ParamSet ParamSet::from_map(const std::map<std::string, double>& m) {
  ParamSet p;
  for (const auto& [k, v] : m) {
    if (k == "alpha")
      p.alpha = v;
    else if (k == "beta")
      p.beta = v;
    else if (k == "gamma")
      p.gamma = v;
    else if (k == "delta")
      p.delta = v;
    else if (k == "mu")
      p.mu = v;
    else if (k == "y0")
      p.y0 = v;
    else
      throw ConfigError("unknown parameter name: " + k);
  }
  return p;
}

std::vector<double> SystemSpec::warp_input(std::span<const double> u) const {
  std::vector<double> w(u.begin(), u.end());
  if (input_warp == InputWarp::Log)
    for (auto& v : w) v = std::log(v);
  return w;
}

namespace {

SmoothFn pick_second_coordinate(int n) {
  return SmoothFn(n, 1, [n]<typename T>(std::span<const T> z, std::span<T> out) {
    out[0] = z[n - 1];  // y is always the last coordinate here
  });
}

std::vector<Interval> plane() { return {Interval::all(), Interval::all()}; }
std::vector<Interval> half_plane_xpos() { return {Interval::positive(), Interval::all()}; }

SystemSpec base2d(const std::string& name, const ParamSet& P) {
  SystemSpec s;
  s.name = name;
  s.n = 2;
  s.m = 1;
  s.q = 1;
  s.params = P;
  s.h = pick_second_coordinate(2);
  s.state_box = {{0.2, 5.0}, {0.2, 5.0}};
  s.input_box = {{0.5, 8.0}};
  return s;
}

SystemSpec make_fig1a(const ParamSet& P) {
  const double a = P.alpha, b = P.beta, g = P.gamma, mu = P.mu, y0 = P.y0;
  SystemSpec s = base2d("fig1a", P);
  s.domain = plane();
  s.input_set = {Interval::all()};
  s.state_box = {{-3.0, 5.0}, {-2.0, 5.0}};
  s.equations = "dx/dt = alpha*(y - y0), dy/dt = beta*u - mu*x - gamma*y, h = y";
  s.F = Dynamics(2, 1, [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = a * (z[1] - y0);
    dz[1] = b * u[0] - mu * z[0] - g * z[1];
  });
  s.affine_parts = {
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = a * (z[1] - y0);
        o[1] = 0.0 - mu * z[0] - g * z[1];
      }),
      SmoothFn(2, 2, [=]<typename T>(std::span<const T>, std::span<T> o) {
        o[0] = T{};
        o[1] = T(b);
      })};
  return s;
}

SystemSpec make_fig1b(const ParamSet& P) {
  const double a = P.alpha, b = P.beta, g = P.gamma, mu = P.mu, y0 = P.y0;
  SystemSpec s = base2d("fig1b", P);
  s.domain = plane();
  s.input_set = {Interval::positive()};
  s.state_box = {{-3.0, 5.0}, {-2.0, 5.0}};
  s.equations = "dx/dt = alpha*(y - y0), dy/dt = beta*ln(u) - mu*x - gamma*y, h = y";
  s.F = Dynamics(2, 1, [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = a * (z[1] - y0);
    dz[1] = b * log(u[0]) - mu * z[0] - g * z[1];
  });
  // Affine in the warped input v = ln(u); vector fields match fig1a.
  s.input_warp = SystemSpec::InputWarp::Log;
  s.affine_parts = {
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = a * (z[1] - y0);
        o[1] = 0.0 - mu * z[0] - g * z[1];
      }),
      SmoothFn(2, 2, [=]<typename T>(std::span<const T>, std::span<T> o) {
        o[0] = T{};
        o[1] = T(b);
      })};
  return s;
}

SystemSpec make_fig1c(const ParamSet& P) {
  const double a = P.alpha, b = P.beta, g = P.gamma, y0 = P.y0;
  SystemSpec s = base2d("fig1c", P);
  s.domain = half_plane_xpos();
  s.input_set = {Interval::positive()};
  s.equations = "dx/dt = alpha*x*(y - y0), dy/dt = beta*u/x - gamma*y, h = y";
  s.F = Dynamics(2, 1, [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = a * z[0] * (z[1] - y0);
    dz[1] = b * u[0] / z[0] - g * z[1];
  });
  s.affine_parts = {
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = a * z[0] * (z[1] - y0);
        o[1] = T{} - g * z[1];
      }),
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = T{};
        o[1] = b / z[0];
      })};
  return s;
}

SystemSpec make_fig1d(const ParamSet& P) {
  const double a = P.alpha, b = P.beta, g = P.gamma, y0 = P.y0;
  SystemSpec s = base2d("fig1d", P);
  s.domain = half_plane_xpos();
  s.input_set = {Interval::positive()};
  s.equations = "dx/dt = alpha*x*(y0 - y), dy/dt = beta*u*x - gamma*y, h = y";
  s.F = Dynamics(2, 1, [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = a * z[0] * (y0 - z[1]);
    dz[1] = b * u[0] * z[0] - g * z[1];
  });
  s.affine_parts = {
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = a * z[0] * (y0 - z[1]);
        o[1] = T{} - g * z[1];
      }),
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = T{};
        o[1] = b * z[0];
      })};
  return s;
}

SystemSpec make_fig2a(const ParamSet& P) {
  const double a = P.alpha, b = P.beta, g = P.gamma, d = P.delta;
  SystemSpec s = base2d("fig2a", P);
  s.domain = half_plane_xpos();
  s.input_set = {Interval::positive()};
  s.equations = "dx/dt = alpha*u - delta*x, dy/dt = beta*u/x - gamma*y, h = y";
  s.F = Dynamics(2, 1, [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = a * u[0] - d * z[0];
    dz[1] = b * u[0] / z[0] - g * z[1];
  });
  s.affine_parts = {
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = T{} - d * z[0];
        o[1] = T{} - g * z[1];
      }),
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = T(a);
        o[1] = b / z[0];
      })};
  return s;
}

SystemSpec make_fig2b(const ParamSet& P) {
  const double a = P.alpha, b = P.beta, g = P.gamma, d = P.delta;
  SystemSpec s = base2d("fig2b", P);
  s.domain = half_plane_xpos();
  s.input_set = {Interval::positive()};
  s.state_box = {{0.2, 5.0}, {0.0, 5.0}};  // include y = 0, the observability edge case
  s.equations = "dx/dt = alpha*u - delta*x, dy/dt = beta*u - gamma*x*y, h = y";
  s.F = Dynamics(2, 1, [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = a * u[0] - d * z[0];
    dz[1] = b * u[0] - g * z[0] * z[1];
  });
  s.affine_parts = {
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = T{} - d * z[0];
        o[1] = T{} - g * z[0] * z[1];
      }),
      SmoothFn(2, 2, [=]<typename T>(std::span<const T>, std::span<T> o) {
        o[0] = T(a);
        o[1] = T(b);
      })};
  return s;
}

SystemSpec make_rotation_ifb(const ParamSet& P, int nx) {
  if (nx < 1) throw ConfigError("rotation_ifb: dimension must be >= 1");
  const double g = P.gamma, y0 = P.y0;
  SystemSpec s;
  s.name = "rotation_ifb";
  s.n = nx + 1;
  s.m = nx;
  s.q = 1;
  s.params = P;
  s.domain.assign(nx + 1, Interval::all());
  s.input_set.assign(nx, Interval::all());
  s.h = pick_second_coordinate(nx + 1);
  s.equations = "dx/dt = (y - y0)*x, dy/dt = <u, x> - gamma*y, h = y  (x, u in R^n)";
  s.F = Dynamics(nx + 1, nx,
                 [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    for (int i = 0; i < nx; ++i) dz[i] = (z[nx] - y0) * z[i];
    T dot{};
    for (int i = 0; i < nx; ++i) dot = dot + u[i] * z[i];
    dz[nx] = dot - g * z[nx];
  });
  s.affine_parts.push_back(SmoothFn(nx + 1, nx + 1, [=]<typename T>(std::span<const T> z, std::span<T> o) {
    for (int i = 0; i < nx; ++i) o[i] = (z[nx] - y0) * z[i];
    o[nx] = T{} - g * z[nx];
  }));
  for (int k = 0; k < nx; ++k)
    s.affine_parts.push_back(
        SmoothFn(nx + 1, nx + 1, [=]<typename T>(std::span<const T> z, std::span<T> o) {
          for (int i = 0; i <= nx; ++i) o[i] = T{};
          o[nx] = z[k];
        }));
  s.state_box.assign(nx, {0.3, 3.0});
  s.state_box.push_back({0.2, 5.0});
  s.input_box.assign(nx, {-2.0, 2.0});
  return s;
}

SystemSpec make_linear_ff(const ParamSet& P) {
  SystemSpec s = base2d("linear_ff", P);
  s.domain = plane();
  s.input_set = {Interval::all()};
  s.state_box = {{-2.0, 2.0}, {-2.0, 2.0}};
  s.equations = "dx/dt = -x + u, dy/dt = -x - y + u, h = y";
  s.F = Dynamics(2, 1, [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = u[0] - z[0];
    dz[1] = u[0] - z[0] - z[1];
  });
  s.affine_parts = {
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = T{} - z[0];
        o[1] = T{} - z[0] - z[1];
      }),
      SmoothFn(2, 2, [=]<typename T>(std::span<const T>, std::span<T> o) {
        o[0] = T(1.0);
        o[1] = T(1.0);
      })};
  return s;
}

// Feedback recasting of fig2a (the internal-model form).
SystemSpec make_imp_fb(const ParamSet& P) {
  const double a = P.alpha, b = P.beta, g = P.gamma, d = P.delta;
  SystemSpec s = base2d("imp_fb", P);
  s.domain = half_plane_xpos();
  s.input_set = {Interval::positive()};
  s.equations =
      "dx/dt = x*(delta - (alpha*gamma/beta)*y), dy/dt = beta*u*x*exp(-(alpha/beta)*y) - gamma*y, "
      "h = y";
  s.F = Dynamics(2, 1, [=]<typename T>(std::span<const T> z, std::span<const T> u, std::span<T> dz) {
    dz[0] = z[0] * (d - (a * g / b) * z[1]);
    dz[1] = b * u[0] * z[0] * exp(-(a / b) * z[1]) - g * z[1];
  });
  s.affine_parts = {
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = z[0] * (d - (a * g / b) * z[1]);
        o[1] = T{} - g * z[1];
      }),
      SmoothFn(2, 2, [=]<typename T>(std::span<const T> z, std::span<T> o) {
        o[0] = T{};
        o[1] = b * z[0] * exp(-(a / b) * z[1]);
      })};
  return s;
}

}  // namespace

std::vector<std::string> registry_names() {
  return {"fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "rotation_ifb", "linear_ff", "imp_fb"};
}

bool registry_has(const std::string& name) {
  for (const auto& n : registry_names())
    if (n == name) return true;
  return false;
}

SystemSpec registry_get(const std::string& name, const ParamSet& params, int rotation_dim) {
  params.validate();
  if (name == "fig1a") return make_fig1a(params);
  if (name == "fig1b") return make_fig1b(params);
  if (name == "fig1c") return make_fig1c(params);
  if (name == "fig1d") return make_fig1d(params);
  if (name == "fig2a") return make_fig2a(params);
  if (name == "fig2b") return make_fig2b(params);
  if (name == "rotation_ifb") return make_rotation_ifb(params, rotation_dim);
  if (name == "linear_ff") return make_linear_ff(params);
  if (name == "imp_fb") return make_imp_fb(params);
  throw ConfigError("unknown model: " + name);
}

std::vector<double> steady_state_closed_form(const SystemSpec& sys, std::span<const double> u_bar) {
  if (static_cast<int>(u_bar.size()) != sys.m)
    throw ConfigError("steady_state_closed_form: input dimension mismatch");
  if (!sys.input_ok(u_bar))
    throw ConfigError("steady_state_closed_form: input outside the input set");
  const ParamSet& P = sys.params;
  const std::string& n = sys.name;
  const double u = u_bar.empty() ? 0.0 : u_bar[0];
  if (n == "fig1a") return {(P.beta * u - P.gamma * P.y0) / P.mu, P.y0};
  if (n == "fig1b") return {(P.beta * std::log(u) - P.gamma * P.y0) / P.mu, P.y0};
  if (n == "fig1c") return {P.beta * u / (P.gamma * P.y0), P.y0};
  if (n == "fig1d") return {P.gamma * P.y0 / (P.beta * u), P.y0};
  if (n == "fig2a" || n == "fig2b")
    return {P.alpha * u / P.delta, P.beta * P.delta / (P.alpha * P.gamma)};
  if (n == "linear_ff") return {u, 0.0};
  if (n == "imp_fb") {
    double yb = P.beta * P.delta / (P.alpha * P.gamma);
    double xb = P.gamma * yb * std::exp((P.alpha / P.beta) * yb) / (P.beta * u);
    return {xb, yb};
  }
  if (n == "rotation_ifb") {
    // The steady set {<u, x> = gamma*y0, y = y0} is a manifold for m > 1;
    // return the minimum-norm representative, which commutes with rotations.
    double uu = 0.0;
    for (double v : u_bar) uu += v * v;
    if (uu == 0.0) throw ConfigError("rotation_ifb: zero input has no adapted steady state");
    std::vector<double> z(sys.n);
    for (int i = 0; i < sys.m; ++i) z[i] = P.gamma * P.y0 * u_bar[i] / uu;
    z[sys.n - 1] = P.y0;
    return z;
  }
  throw ConfigError("steady_state_closed_form: not a registry model: " + n);
}

std::vector<double> steady_state_closed_form1(const SystemSpec& sys, double u_bar) {
  double u[1] = {u_bar};
  return steady_state_closed_form(sys, std::span<const double>(u, 1));
}

double adaptation_value(const SystemSpec& sys) {
  const ParamSet& P = sys.params;
  const std::string& n = sys.name;
  if (n == "fig1a" || n == "fig1b" || n == "fig1c" || n == "fig1d" || n == "rotation_ifb")
    return P.y0;
  if (n == "fig2a" || n == "fig2b" || n == "imp_fb") return P.beta * P.delta / (P.alpha * P.gamma);
  if (n == "linear_ff") return 0.0;
  throw ConfigError("adaptation_value: not a registry model: " + n);
}

}  // namespace symadapt
