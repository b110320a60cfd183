#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "symadapt/numerics.hpp"
#include "symadapt/signals.hpp"

namespace symadapt {

// Piecewise-constant two-state random process with an output-dependent
// switching rate, sampled by thinning against a fixed rate ceiling so that a
// sample path is fully determined by its seed.
struct NoiseProcess {
  enum class Kind { None, Telegraph };
  Kind kind = Kind::None;
  double base_rate = 1.0;                      // lambda0
  double rate_ceiling = 10.0;                  // must dominate lambda(y) for all y seen
  std::function<double(double y)> rate;        // lambda(y); default lambda0 * y / y0_ref
  double initial_value = 1.0;                  // X(0)
};

// Steering mechanism dq/dt = Q(q, y [, X]), r = R(q).
struct SteeringSpec {
  int dim_q = 1;
  int dim_r = 1;
  // deterministic law; also used between noise events when q_noise is absent
  std::function<void(std::span<const double> q, double y, std::span<double> dq)> Q;
  // noisy law, used when noise.kind != None
  std::function<void(std::span<const double> q, double y, double X, std::span<double> dq)> Q_noise;
  std::function<std::vector<double>(std::span<const double> q)> R;
  std::vector<double> q0;
  std::optional<NoiseProcess> noise;

  // Default demo: dq/dt = y - y0_ref, r = q.
  static SteeringSpec error_integrator(double y0_ref);
  // Run-and-tumble: dr/dt = v * X with telegraph switching at rate
  // lambda0 * y / y0_ref.
  static SteeringSpec run_and_tumble(double v, double lambda0, double y0_ref,
                                     double rate_ceiling = 0.0);
};

// Spatial intensity field I(t, r) with a pre-adaptation level I0.
struct FieldSpec {
  std::function<double(double t, std::span<const double> r)> intensity;
  double I0 = 1.0;
  int dim_r = 1;

  static FieldSpec constant(double I0);
  static FieldSpec exponential(double I0, double k);  // I0 * exp(k * r)
  static FieldSpec gaussian_bump(double I0, double amplitude, double center, double width);
  static FieldSpec time_modulated(const FieldSpec& base, double mod_amplitude, double period);
};

struct ClosedLoopTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> z;  // sensor state
  std::vector<std::vector<double>> q;  // steering state
  std::vector<std::vector<double>> r;  // position
  std::vector<double> y;               // sensor output
  std::vector<double> u;               // sensed input (after pi)
  std::vector<double> noise_events;    // telegraph switch times
  Trajectory raw;                      // dense combined (z, q) trajectory

  void write_csv(const std::string& path) const;
};

// Integrates the coupled sensor + steering loop; the field is queried at the
// live position and passed through pi before sensing. Initial sensor state is
// sigma(pi(I0)), initial steering state q0.
ClosedLoopTrajectory simulate_closed_loop(const SystemSpec& sys, const SteeringSpec& steer,
                                          const FieldSpec& field, const Transform& pi, double T,
                                          const IntegratorConfig& cfg = {},
                                          std::uint64_t seed = 0);

struct SteeringInvarianceReport {
  double r_deviation = 0.0;
  double y_deviation = 0.0;
  double q_deviation = 0.0;
  double u_relation_deviation = 0.0;  // max |u2(t) - pi(u1(t))|
  double tol = 0.0;
  bool pass = false;
};

SteeringInvarianceReport steering_invariance_experiment(const SystemSpec& sys,
                                                        const SteeringSpec& steer,
                                                        const FieldSpec& field,
                                                        const Transform& pi, double T, double tol,
                                                        const IntegratorConfig& cfg = {},
                                                        std::uint64_t seed = 0);

struct StochasticSteeringReport {
  struct PerSeed {
    std::uint64_t seed = 0;
    double r_deviation = 0.0;
    double y_deviation = 0.0;
    size_t n_events_base = 0, n_events_transformed = 0;
    bool events_identical = false;
  };
  std::vector<PerSeed> seeds;
  double max_r_deviation = 0.0;
  double mean_displacement_base = 0.0, mean_displacement_transformed = 0.0;
  double msd_base = 0.0, msd_transformed = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// Per-seed paired runs with the identical thinning draw sequence (the fixed
// sample-path argument); r(t) must agree seedwise.
StochasticSteeringReport stochastic_steering_experiment(const SystemSpec& sys,
                                                        const SteeringSpec& steer,
                                                        const FieldSpec& field,
                                                        const Transform& pi, double T,
                                                        std::span<const std::uint64_t> seeds,
                                                        double tol,
                                                        const IntegratorConfig& cfg = {});

}  // namespace symadapt
