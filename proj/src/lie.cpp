#include "symadapt/lie.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace symadapt {

BracketTerm generator_term(const SystemSpec& sys, int index) {
  if (!sys.has_affine()) throw ConfigError("bracket terms need an input-affine decomposition");
  if (index < 0 || index > sys.m) throw ConfigError("generator index out of range");
  return {sys.affine_parts[static_cast<size_t>(index)], "g" + std::to_string(index), 0};
}

BracketTerm bracket_term(const BracketTerm& a, const BracketTerm& b) {
  return {lie_bracket_field(a.field, b.field), "[" + a.text + "," + b.text + "]",
          std::max(a.depth, b.depth) + 1};
}

std::vector<BracketTerm> generate_bracket_terms(const SystemSpec& sys, int max_depth) {
  if (max_depth + 1 > kMaxDualLevel)
    throw ConfigError("bracket depth exceeds the instantiated dual tower");
  std::vector<BracketTerm> gens;
  for (int i = 0; i <= sys.m; ++i) gens.push_back(generator_term(sys, i));

  std::vector<BracketTerm> all = gens;
  std::vector<BracketTerm> frontier = gens;
  for (int depth = 1; depth <= max_depth; ++depth) {
    std::vector<BracketTerm> next;
    for (size_t a = 0; a < frontier.size(); ++a) {
      for (size_t b = 0; b < gens.size(); ++b) {
        if (depth == 1) {
          // frontier == gens here; [gi,gi] = 0 and [gj,gi] = -[gi,gj]
          if (a >= b) continue;
        }
        next.push_back(bracket_term(frontier[a], gens[b]));
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return all;
}

namespace {

Eigen::MatrixXd evaluate_terms(const std::vector<BracketTerm>& terms,
                               std::span<const double> z) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd M(n, static_cast<int>(terms.size()));
  for (size_t c = 0; c < terms.size(); ++c) {
    auto v = terms[c].field(z);
    for (int r = 0; r < n; ++r) M(r, static_cast<int>(c)) = v[r];
  }
  return M;
}

double normalized_subset_det(const Eigen::MatrixXd& M, std::span<const int> cols) {
  const int n = static_cast<int>(M.rows());
  Eigen::MatrixXd S(n, n);
  double scale = 1.0;
  for (int j = 0; j < n; ++j) {
    S.col(j) = M.col(cols[j]);
    scale *= S.col(j).norm();
  }
  if (scale == 0.0) return 0.0;
  return std::abs(S.determinant()) / scale;
}

}  // namespace

AccessibilityReport accessibility_rank(const SystemSpec& sys,
                                       std::span<const std::vector<double>> points, int max_depth,
                                       double rank_rel_tol) {
  AccessibilityReport rep;
  rep.rank_rel_tol = rank_rel_tol;
  auto terms = generate_bracket_terms(sys, max_depth);
  for (const auto& t : terms) rep.term_texts.push_back(t.text);

  const int n = sys.n;
  std::vector<Eigen::MatrixXd> evals;
  evals.reserve(points.size());
  for (const auto& z : points) {
    if (!sys.in_domain(z)) throw ConfigError("accessibility_rank: point outside the domain");
    Eigen::MatrixXd M = evaluate_terms(terms, z);
    evals.push_back(M);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    AccessibilityPoint pt;
    pt.state = z;
    const auto& sv = svd.singularValues();
    pt.singular_values.assign(sv.data(), sv.data() + sv.size());
    double smax = sv.size() ? sv(0) : 0.0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > rank_rel_tol * smax) ++pt.rank;
    if (pt.rank < n) rep.full_rank = false;
    rep.points.push_back(std::move(pt));
  }

  // Witness: a certificate valid at every probed state, not merely at the
  // caller's points. Candidate pairs are scanned with the input fields first
  // and the drift last, accepting the first subset whose determinant keeps a
  // constant sign and stays away from zero (relative to the column norms)
  // over the caller points, a dense grid across the default box, and the
  // adapted steady states. The drift is degenerate on the steady-state locus,
  // which is what disqualifies the naive (g0, g1) certificate.
  const int K = static_cast<int>(terms.size());
  std::vector<int> best;
  double best_score = -1.0;
  if (n == 2) {
    std::vector<std::vector<double>> probes(points.begin(), points.end());
    if (static_cast<int>(sys.state_box.size()) == n) {
      const int grid = 33;
      for (int ix = 0; ix < grid; ++ix)
        for (int iy = 0; iy < grid; ++iy) {
          double x = sys.state_box[0].first +
                     (sys.state_box[0].second - sys.state_box[0].first) * ix / (grid - 1);
          double y = sys.state_box[1].first +
                     (sys.state_box[1].second - sys.state_box[1].first) * iy / (grid - 1);
          std::vector<double> z = {x, y};
          if (sys.in_domain(z)) probes.push_back(std::move(z));
        }
    }
    if (registry_has(sys.name) && sys.m == 1) {
      for (double ub : {0.5, 1.0, 2.0, 4.0}) {
        try {
          auto z = steady_state_closed_form1(sys, ub);
          if (sys.in_domain(z)) probes.push_back(std::move(z));
        } catch (const Error&) {
        }
      }
    }
    std::vector<Eigen::MatrixXd> probe_evals;
    probe_evals.reserve(probes.size());
    for (const auto& z : probes) probe_evals.push_back(evaluate_terms(terms, z));

    // input generators first, drift last
    std::vector<int> order;
    for (int i = 1; i <= sys.m; ++i) order.push_back(i);
    for (int i = sys.m + 1; i < K; ++i) order.push_back(i);
    order.push_back(0);

    const double uniform_floor = 1e-6;
    auto subset_uniform = [&](int i, int j, double& min_norm_det) {
      min_norm_det = std::numeric_limits<double>::infinity();
      int sign = 0;
      for (const auto& M : probe_evals) {
        Eigen::Matrix2d S;
        S.col(0) = M.col(i);
        S.col(1) = M.col(j);
        double det = S.determinant();
        int s = det > 0 ? 1 : (det < 0 ? -1 : 0);
        if (s == 0) return false;
        if (sign == 0) sign = s;
        if (s != sign) return false;
        double scale = S.col(0).norm() * S.col(1).norm();
        if (scale == 0.0) return false;
        min_norm_det = std::min(min_norm_det, std::abs(det) / scale);
      }
      return min_norm_det >= uniform_floor;
    };
    for (size_t a = 0; a < order.size() && best.empty(); ++a) {
      for (size_t b = a + 1; b < order.size() && best.empty(); ++b) {
        double score = 0.0;
        if (subset_uniform(order[a], order[b], score)) {
          best = {order[a], order[b]};
          best_score = score;
        }
      }
    }
    if (best.empty()) {
      // no uniform certificate found; report the most robust pair instead
      for (int i = 0; i < K; ++i) {
        for (int j = i + 1; j < K; ++j) {
          int cols[2] = {i, j};
          double score = std::numeric_limits<double>::infinity();
          for (const auto& M : evals) score = std::min(score, normalized_subset_det(M, cols));
          if (score > best_score) {
            best_score = score;
            best = {i, j};
          }
        }
      }
    }
  } else {
    best.clear();
    for (int pick = 0; pick < n; ++pick) {
      int arg = -1;
      double arg_score = -1.0;
      for (int cand = 0; cand < K; ++cand) {
        if (std::find(best.begin(), best.end(), cand) != best.end()) continue;
        std::vector<int> trial = best;
        trial.push_back(cand);
        double score = std::numeric_limits<double>::infinity();
        for (const auto& M : evals) {
          Eigen::MatrixXd S(n, static_cast<int>(trial.size()));
          for (size_t j = 0; j < trial.size(); ++j) {
            Eigen::VectorXd col = M.col(trial[j]);
            double nn = col.norm();
            S.col(static_cast<int>(j)) = nn > 0 ? (col / nn).eval() : col;
          }
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
          score = std::min(score, svd.singularValues().minCoeff());
        }
        if (score > arg_score) {
          arg_score = score;
          arg = cand;
        }
      }
      best.push_back(arg);
    }
    best_score = std::numeric_limits<double>::infinity();
    for (const auto& M : evals)
      best_score = std::min(best_score, normalized_subset_det(M, best));
  }
  rep.witness_indices = best;
  for (int i : best) rep.witness.push_back(terms[static_cast<size_t>(i)].text);
  rep.witness_min_normalized_det = best_score;
  for (size_t p = 0; p < evals.size(); ++p) {
    Eigen::MatrixXd S(n, n);
    for (int j = 0; j < n; ++j) S.col(j) = evals[p].col(best[static_cast<size_t>(j)]);
    rep.points[p].witness_det = S.determinant();
  }
  return rep;
}

ObservableFunctional make_observable(const SystemSpec& sys, std::span<const int> sequence,
                                     int output_index) {
  if (!sys.has_affine()) throw ConfigError("observables need an input-affine decomposition");
  if (output_index < 0 || output_index >= sys.q) throw ConfigError("output index out of range");
  const int n = sys.n;
  SmoothFn h = sys.h;
  SmoothFn fn;
  if (sys.q == 1) {
    fn = h;
  } else {
    fn = SmoothFn(n, 1, [h, output_index, n]<typename T>(std::span<const T> z, std::span<T> o) {
      std::vector<T> out(static_cast<size_t>(h.out_dim()));
      h.eval<T>(z, out);
      o[0] = out[static_cast<size_t>(output_index)];
    });
  }
  std::string text = "h";
  if (sys.q > 1) text = "h" + std::to_string(output_index + 1);
  // innermost Lie derivative is applied first
  for (auto it = sequence.rbegin(); it != sequence.rend(); ++it) {
    int gi = *it;
    if (gi < 0 || gi > sys.m) throw ConfigError("generator index out of range");
    fn = lie_derivative(fn, sys.affine_parts[static_cast<size_t>(gi)]);
    text = "L_g" + std::to_string(gi) + " " + text;
  }
  ObservableFunctional obs;
  obs.sequence.assign(sequence.begin(), sequence.end());
  obs.output_index = output_index;
  obs.fn = fn;
  obs.text = text;
  return obs;
}

SeparationResult separation_test(const SystemSpec& sys, std::span<const double> z1,
                                 std::span<const double> z2, int max_order, double tol) {
  if (max_order + 1 > kMaxDualLevel)
    throw ConfigError("observable order exceeds the instantiated dual tower");
  SeparationResult res;
  res.max_order_searched = max_order;
  res.tol = tol;

  // BFS over sequences, reusing suffix functionals.
  std::vector<std::vector<int>> prev_seqs = {{}};
  std::vector<SmoothFn> prev_fns;
  for (int j = 0; j < sys.q; ++j) {
    // k = 0 observables are the outputs themselves
    auto obs = make_observable(sys, {}, j);
    double v1 = obs.fn.scalar(z1);
    double v2 = obs.fn.scalar(z2);
    if (std::abs(v1 - v2) > tol * (1.0 + std::abs(v1))) {
      res.separated = true;
      res.witness = obs;
      res.value1 = v1;
      res.value2 = v2;
      return res;
    }
  }
  // For the scoped systems q = 1; deeper sequences attach to output 0.
  struct Node {
    std::vector<int> seq;
    SmoothFn fn;
  };
  std::vector<Node> frontier;
  frontier.push_back({{}, make_observable(sys, {}, 0).fn});
  for (int k = 1; k <= max_order; ++k) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      for (int gi = 0; gi <= sys.m; ++gi) {
        // L_{g_gi} applied outermost: sequence (gi, node.seq...)
        std::vector<int> seq = {gi};
        seq.insert(seq.end(), node.seq.begin(), node.seq.end());
        SmoothFn fn = lie_derivative(node.fn, sys.affine_parts[static_cast<size_t>(gi)]);
        double v1 = fn.scalar(z1);
        double v2 = fn.scalar(z2);
        if (std::abs(v1 - v2) > tol * (1.0 + std::abs(v1))) {
          res.separated = true;
          res.witness = make_observable(sys, seq, 0);
          res.value1 = v1;
          res.value2 = v2;
          return res;
        }
        next.push_back({std::move(seq), std::move(fn)});
      }
    }
    frontier = std::move(next);
  }
  return res;
}

}  // namespace symadapt
