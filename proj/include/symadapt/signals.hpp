#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symadapt/errors.hpp"

namespace symadapt {

// One-dimensional interval with open/closed endpoints; infinities allowed.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double v) const {
    if (lo_open ? !(v > lo) : !(v >= lo)) return false;
    if (hi_open ? !(v < hi) : !(v <= hi)) return false;
    return true;
  }

  static Interval all() { return {}; }
  static Interval positive() { return {0.0, std::numeric_limits<double>::infinity(), true, false}; }
};

bool contains_point(std::span<const Interval> box, std::span<const double> v);

// Piecewise input signal on [0, T]. Values are right-continuous at segment
// boundaries, matching restart-at-breakpoint integration.
struct Segment {
  enum class Kind { Constant, Sinusoid, Ramp, Sampled };
  Kind kind = Kind::Constant;
  double start = 0.0;

  std::vector<double> value;                 // Constant
  std::vector<double> offset, amplitude;     // Sinusoid: offset + A*sin(2*pi*t/period + phase)
  double period = 1.0, phase = 0.0;          //   (absolute time t)
  std::vector<double> v0, slope;             // Ramp: v0 + slope*(t - start)
  std::vector<double> knot_times;            // Sampled: absolute times, strictly increasing
  std::vector<std::vector<double>> knot_values;  //   linear interpolation between knots
};

class InputSignal {
 public:
  double T = 0.0;
  int m = 1;
  std::vector<Segment> segments;
  // When set, construction and transformation check sampled values against it.
  std::optional<std::vector<Interval>> input_set;

  static InputSignal constant(std::vector<double> v, double T);
  static InputSignal constant1(double v, double T);
  // (time, level) pairs, first time must be 0.
  static InputSignal steps(const std::vector<std::pair<double, std::vector<double>>>& levels, double T);
  static InputSignal step1(double u0, double u1, double t_switch, double T);
  static InputSignal sinusoid1(double offset, double amplitude, double period, double phase, double T);
  static InputSignal ramp1(double v0, double slope, double t_start, double T);
  static InputSignal sampled1(std::vector<double> times, std::vector<double> values, double T);

  std::vector<double> sample(double t) const;  // right-continuous
  double sample1(double t) const;

  // Interior breakpoints (segment starts and sampled knots), strictly inside (0, T).
  std::vector<double> breakpoints() const;

  int segment_index_at(double t) const;
  // Closed-form continuation of a specific segment, defined for any t.
  std::vector<double> eval_segment(int idx, double t) const;

  void validate(int n_check_samples = 257) const;  // structure + input_set membership
};

// Pointwise input transformation pi : U -> U.
class Transform {
 public:
  enum class Kind { Identity, Scale, Translate, Rotate, Orthogonal, Linear };

  Transform() = default;

  static Transform identity();
  static Transform scale(double p);      // p > 0
  static Transform translate(double p);
  static Transform rotation(const Eigen::MatrixXd& R);    // R^T R = I, det = +1
  static Transform orthogonal(const Eigen::MatrixXd& R);  // R^T R = I, det = +/-1
  static Transform linear(const Eigen::MatrixXd& M);      // invertible

  Kind kind() const { return kind_; }
  double param() const { return p_; }
  const Eigen::MatrixXd& matrix() const { return M_; }
  int dim() const;  // 0 for componentwise scalar kinds

  std::vector<double> apply(std::span<const double> u) const;
  double apply1(double u) const;
  Transform inverse() const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::Identity;
  double p_ = 0.0;
  Eigen::MatrixXd M_;
};

// Pointwise-transformed signal with identical segment structure. Throws
// ConfigError if a transformed value leaves the signal's input set.
InputSignal apply_transform(const Transform& pi, const InputSignal& u);

// Sample-based onto-ness check of pi on an input box: forward images and
// preimages of box samples must stay in the box. Not a proof.
struct OntoReport {
  bool onto = true;
  int n_forward_violations = 0;
  int n_preimage_violations = 0;
};
OntoReport check_onto(const Transform& pi, std::span<const Interval> input_set, int n_samples = 128);

}  // namespace symadapt
