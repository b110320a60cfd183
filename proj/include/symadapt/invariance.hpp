#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "symadapt/equivariance.hpp"

namespace symadapt {

// Result of one response-invariance experiment: the two pre-adapted runs
// compared on a shared output grid.
struct InvarianceVerdict {
  double sup_deviation = 0.0;
  double l2_deviation = 0.0;
  double T = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::vector<double> u_bar, pi_u_bar;
  int grid_points = 0;
};

InvarianceVerdict invariance_experiment(const SystemSpec& sys, std::span<const double> u_bar,
                                        const InputSignal& u, const Transform& pi, double T,
                                        double tol, const IntegratorConfig& cfg = {},
                                        int grid_points = 2048);
InvarianceVerdict invariance_experiment1(const SystemSpec& sys, double u_bar, const InputSignal& u,
                                         const Transform& pi, double T, double tol,
                                         const IntegratorConfig& cfg = {}, int grid_points = 2048);

struct AdaptationRow {
  double u_bar = 0.0;
  double y_final = 0.0;
  std::vector<double> start;
};

struct AdaptationReport {
  std::vector<AdaptationRow> rows;
  double max_pairwise_spread = 0.0;
  double max_reference_error = 0.0;  // against the registry adaptation value, when known
  bool has_reference = false;
  double tol = 0.0;
  bool pass = false;
};

// Integrate from randomly perturbed initial states under each constant input;
// all runs must settle on one common output level.
AdaptationReport adaptation_test(const SystemSpec& sys, std::span<const double> u_bars, double T,
                                 double tol, std::uint64_t seed = 20240101);

struct FcdRow {
  std::array<double, 2> step_a{}, step_b{};  // level0 -> level1
  double fold_a = 0.0, fold_b = 0.0;
  bool same_fold = false;
  double sup_deviation = 0.0;
  bool pass = false;
};

struct FcdReport {
  std::vector<FcdRow> rows;
  double tol = 0.0;
  double separation_floor = 0.0;
  bool pass = false;
};

// Step battery: every pair of listed steps is compared, plus each step
// against its p-scaled copy for p in p_grid. Equal folds must match within
// tol; different folds must separate above the stored regression floor.
FcdReport fcd_step_battery(const SystemSpec& sys,
                           std::span<const std::array<double, 2>> steps,
                           std::span<const double> p_grid, double T, double tol,
                           double separation_floor, double t_step = 1.0,
                           const IntegratorConfig& cfg = {});

struct QssReport {
  std::vector<double> kappas;
  std::vector<double> deviations;
  double reduced_deviation = 0.0;
  bool monotone_nonincreasing = false;
  bool reduced_invariant = false;
};

// Speed parameter kappa multiplies both beta and gamma in the sniffer's
// y-equation, separating time scales without moving the y-nullcline. The
// kappa -> infinity reference is the reduced system dx/dt = alpha u - delta x
// with static output y = (beta/gamma) u / x, which is exactly scale-invariant.
QssReport approximate_invariance_qss(const ParamSet& params, std::span<const double> kappas,
                                     double u_bar, const InputSignal& u, double p, double T,
                                     const IntegratorConfig& cfg = {});

}  // namespace symadapt
