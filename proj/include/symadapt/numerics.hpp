#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symadapt/models.hpp"

namespace symadapt {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double max_step = 0.5;
  double min_step = 1e-12;
  bool dense_output = true;
  long max_steps = 5000000;

  void validate() const;
};

struct TrajectoryMeta {
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  long n_accepted = 0;
  long n_rejected = 0;
  long n_rhs = 0;
  std::optional<std::uint64_t> seed;
};

// One accepted step with endpoint derivatives, for cubic Hermite interpolation.
struct DenseSegment {
  double t0 = 0.0, t1 = 0.0;
  std::vector<double> y0, y1, f0, f1;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> outputs;
  std::vector<std::vector<double>> inputs;
  std::vector<DenseSegment> dense;
  TrajectoryMeta meta;

  double t_end() const { return times.empty() ? 0.0 : times.back(); }
  // Hermite interpolation through the dense segments; requires dense_output.
  std::vector<double> state_at(double t) const;
  void write_csv(const std::string& path) const;
};

// Right-hand sides for the generic integrators.
using OdeRhs = std::function<void(double t, std::span<const double> z, std::span<double> dz)>;
using StateCheck = std::function<bool(std::span<const double> z)>;
using DdeRhs = std::function<void(double t, std::span<const double> z,
                                  std::span<const double> z_delayed, std::span<double> dz)>;
using HistoryFn = std::function<std::vector<double>(double t)>;

// Adaptive Dormand-Prince 5(4) with PI step-size control. Integration restarts
// exactly at each breakpoint. `state_ok` failures abort with DomainExitError.
Trajectory integrate_ode(const OdeRhs& rhs, int n, std::span<const double> z0, double t0, double t1,
                         std::span<const double> breakpoints, const IntegratorConfig& cfg,
                         const StateCheck& state_ok = {});

// System trajectory under a piecewise input signal.
Trajectory integrate(const SystemSpec& sys, const InputSignal& u, std::span<const double> z0,
                     double T, const IntegratorConfig& cfg = {});

// Single constant-delay DDE by the method of steps; delay = 0 degenerates to
// a plain ODE. `output` (optional) fills Trajectory::outputs.
Trajectory integrate_dde(const DdeRhs& rhs, int n, double delay, const HistoryFn& history,
                         double T, const IntegratorConfig& cfg = {},
                         const SmoothFn* output = nullptr,
                         std::span<const double> extra_breakpoints = {});

// Damped Newton on z -> F(z, u_bar), falling back to simulation to quiescence
// plus a Newton polish. Guaranteed ||F(result, u_bar)|| <= tol on success.
std::vector<double> steady_state(const SystemSpec& sys, std::span<const double> u_bar,
                                 std::span<const double> guess, double tol = 1e-10);
std::vector<double> steady_state1(const SystemSpec& sys, double u_bar, double tol = 1e-10);

// Forward-mode Jacobians at the double level.
Eigen::MatrixXd jacobian(const SmoothFn& f, std::span<const double> z);
Eigen::MatrixXd jacobian_state(const SystemSpec& sys, std::span<const double> z,
                               std::span<const double> u);
// n x (n + m) Jacobian of F with respect to (z, u) jointly.
Eigen::MatrixXd jacobian_state_input(const SystemSpec& sys, std::span<const double> z,
                                     std::span<const double> u);

// [f, g](z) evaluated at a point.
std::vector<double> lie_bracket(const SmoothFn& f, const SmoothFn& g, std::span<const double> z);

}  // namespace symadapt
