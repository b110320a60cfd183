#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "symadapt/signals.hpp"
#include "symadapt/smooth.hpp"

namespace symadapt {

// Model coefficients. Every registered system uses a subset; all must be
// strictly positive.
struct ParamSet {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double delta = 1.0;
  double mu = 1.0;
  double y0 = 1.0;

  void validate() const;
  std::map<std::string, double> as_map() const;
  static ParamSet from_map(const std::map<std::string, double>& m);
};

// An input-output ODE system dz/dt = F(z, u), y = h(z).
struct SystemSpec {
  std::string name;
  int n = 0;  // state dimension
  int m = 1;  // input dimension
  int q = 1;  // output dimension
  std::vector<Interval> domain;     // per state coordinate
  std::vector<Interval> input_set;  // per input coordinate
  Dynamics F;
  SmoothFn h;
  // Optional input-affine decomposition F(z, u) = g0(z) + sum_i w(u)_i gi(z),
  // where w is the input warp (identity except for the log-linear model).
  std::vector<SmoothFn> affine_parts;
  enum class InputWarp { Identity, Log } input_warp = InputWarp::Identity;
  ParamSet params;

  std::string equations;  // display form for the CLI registry listing
  // Default sampling boxes used by the analysis modules.
  std::vector<std::pair<double, double>> state_box;
  std::vector<std::pair<double, double>> input_box;

  bool has_affine() const { return !affine_parts.empty(); }
  bool in_domain(std::span<const double> z) const { return contains_point(domain, z); }
  bool input_ok(std::span<const double> u) const { return contains_point(input_set, u); }
  std::vector<double> warp_input(std::span<const double> u) const;

  std::vector<double> rhs(std::span<const double> z, std::span<const double> u) const {
    return F(z, u);
  }
  std::vector<double> output(std::span<const double> z) const { return h(z); }
  double output1(std::span<const double> z) const { return h(z).at(0); }
};

// Benchmark registry. Names: fig1a, fig1b, fig1c, fig1d, fig2a, fig2b,
// rotation_ifb (dimension via rotation_dim), linear_ff, imp_fb.
SystemSpec registry_get(const std::string& name, const ParamSet& params = {}, int rotation_dim = 3);
std::vector<std::string> registry_names();
bool registry_has(const std::string& name);

// Analytic steady state for a registry system under constant input.
std::vector<double> steady_state_closed_form(const SystemSpec& sys, std::span<const double> u_bar);
std::vector<double> steady_state_closed_form1(const SystemSpec& sys, double u_bar);

// The adaptation value: steady-state output, independent of the input.
double adaptation_value(const SystemSpec& sys);

}  // namespace symadapt
