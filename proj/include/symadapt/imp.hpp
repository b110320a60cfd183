#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "symadapt/lie.hpp"

namespace symadapt {

struct RelativeDegreeReport {
  std::optional<int> r;  // empty = no uniform relative degree up to r_max
  int r_max = 0;
  double min_decisive = 0.0;      // min |L_g L_f^{r-1} h| over samples
  std::vector<double> max_by_k;   // max |L_g L_f^k h| for k = 0, 1, ...
  bool uniform = false;           // decisive term bounded away from zero at all samples
};

// Smallest r with L_g L_f^k h vanishing for k <= r-2 and L_g L_f^{r-1} h
// nonzero at every sample. Sample-certified only.
RelativeDegreeReport relative_degree(const SystemSpec& sys,
                                     std::span<const std::vector<double>> samples, int r_max,
                                     double zero_tol = 1e-10, double nonzero_tol = 1e-8);

struct TauFieldsReport {
  std::vector<SmoothFn> taus;  // tau_i = ad_{f~}^{i-1} g~
  std::vector<std::string> names;
  double max_commutator = 0.0;   // max ||[tau_i, tau_j]|| over pairs and samples
  double min_denominator = 0.0;  // min |L_g L_f^{r-1} h| encountered
  bool commuting = false;
  std::string note;
};

TauFieldsReport tau_fields(const SystemSpec& sys, int r,
                           std::span<const std::vector<double>> samples, double tol = 1e-8);

struct DiffeoSpec {
  SmoothFn forward;   // original -> (z1, z2)
  SmoothFn inverse;   // (z1, z2) -> original
  int r = 1;          // z1 block size
};

struct ImpTransformResult {
  DiffeoSpec diffeo;
  SystemSpec transformed;  // internal-model coordinates (z1, z2)
  SystemSpec feedback_xy;  // equivalent feedback form in (x, y) coordinates
  double max_lg_phi = 0.0;     // |L_g phi| over the sample set (the defining PDE)
  double max_roundtrip = 0.0;  // |inverse(forward(z)) - z| over samples
};

// Explicit coordinate change phi(x, y) = alpha y - beta log x for the
// feedforward system, yielding integral-feedback coordinates.
ImpTransformResult imp_transform_fig2a(const ParamSet& params, int n_samples = 200);

struct LinearRecastReport {
  double max_output_mismatch = 0.0;   // original vs recast output, matched starts
  std::array<double, 2> eig_original{}, eig_recast{};
  double step_final_output = 0.0;     // adapts back to zero under a unit step
  bool pass = false;
};

// The linear feedforward system rewritten with x~ = x - y as an integral
// feedback system; both simulated and compared.
LinearRecastReport linear_recast_demo(double T = 30.0, const IntegratorConfig& cfg = {});

struct PerturbationReport {
  double feedback_ybar = 0.0;
  double feedforward_ybar = 0.0;
  double feedback_shift = 0.0;     // |ybar - beta*delta/(alpha*gamma)|
  double feedforward_shift = 0.0;  // |ybar - y0|
  bool feedback_pinned = false;
  bool gas_checked = false;
  bool gas_ok = false;
};

// Adds Delta(x, y) to the y-equation of both architectures; the feedback
// form's steady-state output must remain beta*delta/(alpha*gamma).
PerturbationReport perturbation_robustness(const SmoothFn& delta, const ParamSet& params,
                                           double u_bar, double T = 100.0);

struct DelaySystemSpec {
  enum class Base { Linear9, Nonlinear16 };
  Base base = Base::Linear9;
  double delay = 0.0;
  ParamSet params;                    // used by the nonlinear form
  std::optional<InputSignal> input;   // default u = 0
  std::vector<double> history_value;  // constant history on [-h, 0]
};

struct DelayReport {
  bool oscillating = false;
  double p2p_third = 0.0;  // peak-to-peak of y on the third quarter of [0, T]
  double p2p_last = 0.0;   // and on the last quarter
  double amplitude_ratio = 0.0;
  double dominant_period = 0.0;  // zero-crossing estimate, 0 when none found
  Trajectory trajectory;
};

// Integrates the delayed coupling (the x-equation reads y(t - h)) and applies
// the sustained-oscillation test: the last quarter's amplitude must hold at
// least 90% of the third quarter's, above an absolute floor.
DelayReport delay_experiment(const DelaySystemSpec& spec, double T,
                             const IntegratorConfig& cfg = {});

}  // namespace symadapt
