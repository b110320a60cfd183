#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "symadapt/numerics.hpp"

namespace symadapt {

// A bracket expression over the affine generators g0..gm, evaluable at a
// state. Built by composing lie_bracket_field, so evaluation is the recursive
// bracket formula by construction.
struct BracketTerm {
  SmoothFn field;
  std::string text;  // stable notation, e.g. "[g0,g1]"
  int depth = 0;
};

BracketTerm generator_term(const SystemSpec& sys, int index);
BracketTerm bracket_term(const BracketTerm& a, const BracketTerm& b);

// Breadth-first generation following F_{k+1} = {[f, g] : f in F_k, g a
// generator}; trivially zero and antisymmetric duplicates are pruned at depth 1.
std::vector<BracketTerm> generate_bracket_terms(const SystemSpec& sys, int max_depth);

struct AccessibilityPoint {
  std::vector<double> state;
  std::vector<double> singular_values;  // descending
  int rank = 0;
  double witness_det = 0.0;  // det of the witness columns at this state
};

struct AccessibilityReport {
  std::vector<std::string> term_texts;
  std::vector<AccessibilityPoint> points;
  bool full_rank = true;
  std::vector<std::string> witness;  // n bracket expressions spanning at every point
  std::vector<int> witness_indices;
  double witness_min_normalized_det = 0.0;
  double rank_rel_tol = 0.0;
};

AccessibilityReport accessibility_rank(const SystemSpec& sys,
                                       std::span<const std::vector<double>> points, int max_depth,
                                       double rank_rel_tol = 1e-8);

// Elementary observable L_{g_{i1}} ... L_{g_{ik}} h_j (outermost index first).
struct ObservableFunctional {
  std::vector<int> sequence;
  int output_index = 0;
  SmoothFn fn;
  std::string text;
};

ObservableFunctional make_observable(const SystemSpec& sys, std::span<const int> sequence,
                                     int output_index = 0);

struct SeparationResult {
  bool separated = false;
  ObservableFunctional witness;  // valid when separated
  double value1 = 0.0, value2 = 0.0;
  int max_order_searched = 0;
  double tol = 0.0;
};

// Breadth-first search for an elementary observable separating z1 from z2.
// A negative answer is a bounded-search verdict, not a proof.
SeparationResult separation_test(const SystemSpec& sys, std::span<const double> z1,
                                 std::span<const double> z2, int max_order, double tol = 1e-9);

}  // namespace symadapt
