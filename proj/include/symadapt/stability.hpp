#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "symadapt/numerics.hpp"

namespace symadapt {

// The nonlinear-damping normal form dx/dt = g(y), dy/dt = -f(x) - k(y), with
// the normalization c = f(x0) so that f-c and k+c vanish at the equilibrium.
struct LyapunovTriple {
  SmoothFn f, g, k;  // scalar functions of a single variable
  double x0 = 0.0, y0 = 0.0;
  double c = 0.0;

  double f_normalized(double x) const;
  double k_normalized(double y) const;
  double g_value(double y) const;
};

// V(x, y) = int_{x0}^{x} (f - c) + int_{y0}^{y} g by adaptive Simpson.
double lyapunov_value(const LyapunovTriple& triple, double x, double y, double quad_tol = 1e-10);

struct DecreaseReport {
  double max_chain_mismatch = 0.0;  // chain-rule Vdot vs closed form -g(y) k~(y)
  double max_vdot = 0.0;            // most positive Vdot seen
  double max_increase = 0.0;        // most positive step-to-step V increment
  double tol = 0.0;
  bool pass = false;
};

// Checks along a trajectory of `sys` (the system the triple was built for).
DecreaseReport lyapunov_decrease_check(const LyapunovTriple& triple, const SystemSpec& sys,
                                       const Trajectory& traj, double tol);

// Log-coordinate reduction of the self-feeding integral feedback systems to
// the nonlinear-damping form; case (b) uses z = -ln x.
struct Corollary52Result {
  SystemSpec transformed;  // state (z, y) on R^2, input kept
  LyapunovTriple triple;   // for the given constant input
  bool flipped = false;    // true when z = -ln x
  double u_bar = 0.0;

  std::vector<double> to_transformed(std::span<const double> xy) const;
  std::vector<double> to_original(std::span<const double> zy) const;
};

Corollary52Result corollary52_transform(const SystemSpec& sys, double u_bar);

struct GasRow {
  std::vector<double> start;
  double final_distance = 0.0;
  bool converged = false;
  bool integration_failed = false;
};

struct GasReport {
  std::vector<GasRow> rows;
  int n = 0;
  int n_converged = 0;
  double fraction_converged = 0.0;
  double worst_final_distance = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// N random starts in the box, integrated for T under the constant input; all
// must land within tol of the steady state.
GasReport gas_empirical(const SystemSpec& sys, double u_bar, int N,
                        std::span<const std::pair<double, double>> box, double T, double tol,
                        std::uint64_t seed = 77);

}  // namespace symadapt
