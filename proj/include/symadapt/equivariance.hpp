#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "symadapt/numerics.hpp"

namespace symadapt {

// A differentiable state map rho paired with the input transform pi it is
// supposed to intertwine: F(rho(z), pi u) = rho'(z) F(z, u), h(rho(z)) = h(z).
struct EquivarianceCandidate {
  enum class Provenance { Lemma31, Lemma32, LinearShift, LogShift, RotationLift, Identity, Custom };
  Transform pi;
  SmoothFn rho;  // Z -> Z
  Provenance provenance = Provenance::Custom;
  std::string label;
};

struct SampleGrid {
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> inputs;
};

// 200 Sobol states over the system's default box crossed with 10 inputs.
SampleGrid default_grid(const SystemSpec& sys, int n_states = 200, int n_inputs = 10);

struct EquivarianceReport {
  double pde_residual = 0.0;     // max ||F(rho z, pi u) - rho' F|| / (1 + ||F||)
  double output_residual = 0.0;  // max |h(rho z) - h(z)|
  bool pass = false;
  double tol = 0.0;
  int n_samples = 0;
};

EquivarianceReport verify_equivariance(const SystemSpec& sys, const EquivarianceCandidate& cand,
                                       const SampleGrid& grid, double tol = 1e-8);

// A one-parameter (or matrix-parameter) family of candidates.
struct SymmetryFamily {
  enum class Kind { Scalings, Translations, Rotations, Orthogonal, Linear, None };
  Kind kind = Kind::None;
  std::function<EquivarianceCandidate(double)> candidate;
  std::function<EquivarianceCandidate(const Eigen::MatrixXd&)> matrix_candidate;
  // Lemma structural condition on f, evaluated over a grid and parameter set;
  // the family is confirmed only if this residual stays below tolerance.
  std::function<double(const SampleGrid&, std::span<const double>)> condition_residual;
  std::string description;
};

// Structural form dy/dt = G(u^beta_exp x^mu_exp, y), one-to-one G: the only
// possible symmetries are fold changes u -> p u with rho^x = p^(-beta/mu) x.
SymmetryFamily classify_ratio_form(double beta_exp, double mu_exp, const SmoothFn& f,
                                   const SmoothFn& G);

// Structural form dy/dt = G(mu_coef x + beta_coef u, y): the only possible
// symmetries are translations u -> p + u with rho^x = x - (beta/mu) p.
SymmetryFamily classify_affine_form(double mu_coef, double beta_coef, const SmoothFn& f,
                                    const SmoothFn& G);

// Explicit candidate constructors.
EquivarianceCandidate scaling_candidate(double p, double exponent);          // rho^x = p^exponent x
EquivarianceCandidate translation_candidate(double p, double shift_per_p);   // rho^x = x + shift_per_p p
EquivarianceCandidate log_shift_candidate(double p, const ParamSet& params); // rho^x = x + beta ln(p)/mu
EquivarianceCandidate rotation_lift_candidate(const Eigen::MatrixXd& R, bool general_linear = false);
EquivarianceCandidate identity_candidate(int n);

// The model's own symmetry family per the classification results; kind None
// for the sniffer and the plain feedforward system.
SymmetryFamily model_symmetry_family(const SystemSpec& sys);

struct InterlaceReport {
  double max_deviation = 0.0;
  bool pass = false;
  int n_checked = 0;
  double tol = 0.0;
};

// rho(sigma(u_bar)) = sigma(pi u_bar) with sigma from the Newton solver.
InterlaceReport interlace_check(const SystemSpec& sys, const EquivarianceCandidate& cand,
                                std::span<const double> u_bars, double tol = 1e-8);

}  // namespace symadapt
