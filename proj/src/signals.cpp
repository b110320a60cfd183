#include "symadapt/signals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace symadapt {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}
}  // namespace

bool contains_point(std::span<const Interval> box, std::span<const double> v) {
  if (box.size() != v.size()) return false;
  for (size_t i = 0; i < box.size(); ++i)
    if (!box[i].contains(v[i])) return false;
  return true;
}

InputSignal InputSignal::constant(std::vector<double> v, double T) {
  InputSignal s;
  s.T = T;
  s.m = static_cast<int>(v.size());
  Segment seg;
  seg.kind = Segment::Kind::Constant;
  seg.start = 0.0;
  seg.value = std::move(v);
  s.segments.push_back(std::move(seg));
  return s;
}

InputSignal InputSignal::constant1(double v, double T) { return constant({v}, T); }

InputSignal InputSignal::steps(const std::vector<std::pair<double, std::vector<double>>>& levels,
                               double T) {
  require(!levels.empty(), "steps: empty level list");
  InputSignal s;
  s.T = T;
  s.m = static_cast<int>(levels.front().second.size());
  for (const auto& [t, v] : levels) {
    Segment seg;
    seg.kind = Segment::Kind::Constant;
    seg.start = t;
    seg.value = v;
    s.segments.push_back(std::move(seg));
  }
  s.validate(0);
  return s;
}

InputSignal InputSignal::step1(double u0, double u1, double t_switch, double T) {
  return steps({{0.0, {u0}}, {t_switch, {u1}}}, T);
}

InputSignal InputSignal::sinusoid1(double offset, double amplitude, double period, double phase,
                                   double T) {
  require(period > 0.0, "sinusoid: period must be positive");
  InputSignal s;
  s.T = T;
  s.m = 1;
  Segment seg;
  seg.kind = Segment::Kind::Sinusoid;
  seg.start = 0.0;
  seg.offset = {offset};
  seg.amplitude = {amplitude};
  seg.period = period;
  seg.phase = phase;
  s.segments.push_back(std::move(seg));
  return s;
}

InputSignal InputSignal::ramp1(double v0, double slope, double t_start, double T) {
  InputSignal s;
  s.T = T;
  s.m = 1;
  Segment seg;
  seg.kind = Segment::Kind::Ramp;
  seg.start = t_start;
  seg.v0 = {v0};
  seg.slope = {slope};
  s.segments.push_back(std::move(seg));
  if (t_start > 0.0) {
    Segment pre;
    pre.kind = Segment::Kind::Constant;
    pre.start = 0.0;
    pre.value = {v0};
    s.segments.insert(s.segments.begin(), std::move(pre));
  }
  return s;
}

InputSignal InputSignal::sampled1(std::vector<double> times, std::vector<double> values, double T) {
  require(times.size() == values.size() && times.size() >= 2, "sampled: need matching times/values");
  InputSignal s;
  s.T = T;
  s.m = 1;
  Segment seg;
  seg.kind = Segment::Kind::Sampled;
  seg.start = times.front();
  seg.knot_times = std::move(times);
  for (double v : values) seg.knot_values.push_back({v});
  require(seg.start == 0.0, "sampled: first knot must be at t = 0");
  s.segments.push_back(std::move(seg));
  return s;
}

int InputSignal::segment_index_at(double t) const {
  int idx = 0;
  for (size_t i = 0; i < segments.size(); ++i)
    if (segments[i].start <= t) idx = static_cast<int>(i);
  return idx;
}

std::vector<double> InputSignal::eval_segment(int idx, double t) const {
  const Segment& seg = segments.at(static_cast<size_t>(idx));
  switch (seg.kind) {
    case Segment::Kind::Constant:
      return seg.value;
    case Segment::Kind::Sinusoid: {
      std::vector<double> v(seg.offset.size());
      double s = std::sin(kTwoPi * t / seg.period + seg.phase);
      for (size_t i = 0; i < v.size(); ++i) v[i] = seg.offset[i] + seg.amplitude[i] * s;
      return v;
    }
    case Segment::Kind::Ramp: {
      std::vector<double> v(seg.v0.size());
      for (size_t i = 0; i < v.size(); ++i) v[i] = seg.v0[i] + seg.slope[i] * (t - seg.start);
      return v;
    }
    case Segment::Kind::Sampled: {
      const auto& ts = seg.knot_times;
      if (t <= ts.front()) return seg.knot_values.front();
      if (t >= ts.back()) return seg.knot_values.back();
      auto it = std::upper_bound(ts.begin(), ts.end(), t);
      size_t k = static_cast<size_t>(it - ts.begin());
      double w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
      std::vector<double> v(seg.knot_values[k].size());
      for (size_t i = 0; i < v.size(); ++i)
        v[i] = (1.0 - w) * seg.knot_values[k - 1][i] + w * seg.knot_values[k][i];
      return v;
    }
  }
  throw Error("eval_segment: unreachable");
}

std::vector<double> InputSignal::sample(double t) const {
  if (t < 0.0 || t > T) throw ConfigError("InputSignal::sample: time outside [0, T]");
  return eval_segment(segment_index_at(t), t);
}

double InputSignal::sample1(double t) const {
  auto v = sample(t);
  return v.at(0);
}

std::vector<double> InputSignal::breakpoints() const {
  std::vector<double> bp;
  for (const auto& seg : segments) {
    if (seg.start > 0.0 && seg.start < T) bp.push_back(seg.start);
    if (seg.kind == Segment::Kind::Sampled)
      for (double kt : seg.knot_times)
        if (kt > 0.0 && kt < T) bp.push_back(kt);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  return bp;
}

void InputSignal::validate(int n_check_samples) const {
  require(T > 0.0, "signal: horizon must be positive");
  require(!segments.empty(), "signal: no segments");
  require(segments.front().start == 0.0, "signal: first segment must start at t = 0");
  for (size_t i = 1; i < segments.size(); ++i)
    require(segments[i].start > segments[i - 1].start, "signal: segment starts must increase");
  if (input_set && n_check_samples > 0) {
    for (int k = 0; k <= n_check_samples; ++k) {
      double t = T * k / n_check_samples;
      auto v = sample(t);
      if (!contains_point(*input_set, v)) {
        std::ostringstream os;
        os << "signal value leaves the input set at t = " << t;
        throw ConfigError(os.str());
      }
    }
    for (const auto& seg : segments) {
      if (seg.start >= 0.0 && seg.start <= T)
        require(contains_point(*input_set, eval_segment(segment_index_at(seg.start), seg.start)),
                "signal value leaves the input set at a breakpoint");
    }
  }
}

Transform Transform::identity() { return Transform(); }

Transform Transform::scale(double p) {
  if (!(p > 0.0)) throw ConfigError("Transform::scale: p must be positive");
  Transform t;
  t.kind_ = Kind::Scale;
  t.p_ = p;
  return t;
}

Transform Transform::translate(double p) {
  Transform t;
  t.kind_ = Kind::Translate;
  t.p_ = p;
  return t;
}

namespace {
void check_orthogonal(const Eigen::MatrixXd& R, bool special) {
  if (R.rows() != R.cols()) throw ConfigError("Transform: matrix must be square");
  double dev = (R.transpose() * R - Eigen::MatrixXd::Identity(R.rows(), R.cols())).norm();
  if (dev > 1e-12) throw ConfigError("Transform: matrix is not orthogonal (|R^T R - I| > 1e-12)");
  double det = R.determinant();
  if (special && std::abs(det - 1.0) > 1e-9)
    throw ConfigError("Transform: rotation must have det = +1");
  if (!special && std::abs(std::abs(det) - 1.0) > 1e-9)
    throw ConfigError("Transform: orthogonal must have det = +/-1");
}
}  // namespace

Transform Transform::rotation(const Eigen::MatrixXd& R) {
  check_orthogonal(R, true);
  Transform t;
  t.kind_ = Kind::Rotate;
  t.M_ = R;
  return t;
}

Transform Transform::orthogonal(const Eigen::MatrixXd& R) {
  check_orthogonal(R, false);
  Transform t;
  t.kind_ = Kind::Orthogonal;
  t.M_ = R;
  return t;
}

Transform Transform::linear(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw ConfigError("Transform: matrix must be square");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) throw ConfigError("Transform: linear map must be invertible");
  Transform t;
  t.kind_ = Kind::Linear;
  t.M_ = M;
  return t;
}

int Transform::dim() const {
  switch (kind_) {
    case Kind::Rotate:
    case Kind::Orthogonal:
    case Kind::Linear:
      return static_cast<int>(M_.rows());
    default:
      return 0;  // componentwise
  }
}

std::vector<double> Transform::apply(std::span<const double> u) const {
  std::vector<double> out(u.begin(), u.end());
  switch (kind_) {
    case Kind::Identity:
      break;
    case Kind::Scale:
      for (auto& v : out) v *= p_;
      break;
    case Kind::Translate:
      for (auto& v : out) v += p_;
      break;
    case Kind::Rotate:
    case Kind::Orthogonal:
    case Kind::Linear: {
      if (static_cast<int>(u.size()) != M_.rows())
        throw ConfigError("Transform::apply: dimension mismatch");
      Eigen::Map<const Eigen::VectorXd> uv(u.data(), u.size());
      Eigen::VectorXd r = M_ * uv;
      std::copy(r.data(), r.data() + r.size(), out.begin());
      break;
    }
  }
  return out;
}

double Transform::apply1(double u) const {
  double v[1] = {u};
  return apply(std::span<const double>(v, 1)).at(0);
}

Transform Transform::inverse() const {
  switch (kind_) {
    case Kind::Identity:
      return identity();
    case Kind::Scale:
      return scale(1.0 / p_);
    case Kind::Translate:
      return translate(-p_);
    case Kind::Rotate:
      return rotation(M_.transpose());
    case Kind::Orthogonal:
      return orthogonal(M_.transpose());
    case Kind::Linear:
      return linear(M_.inverse());
  }
  throw Error("Transform::inverse: unreachable");
}

std::string Transform::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Identity:
      os << "identity";
      break;
    case Kind::Scale:
      os << "scale(" << p_ << ")";
      break;
    case Kind::Translate:
      os << "translate(" << p_ << ")";
      break;
    case Kind::Rotate:
      os << "rotation(" << M_.rows() << "x" << M_.cols() << ")";
      break;
    case Kind::Orthogonal:
      os << "orthogonal(" << M_.rows() << "x" << M_.cols() << ")";
      break;
    case Kind::Linear:
      os << "linear(" << M_.rows() << "x" << M_.cols() << ")";
      break;
  }
  return os.str();
}

InputSignal apply_transform(const Transform& pi, const InputSignal& u) {
  if (pi.dim() != 0 && pi.dim() != u.m)
    throw ConfigError("apply_transform: transform dimension does not match signal");
  InputSignal out = u;
  auto map_vec = [&pi](std::vector<double>& v) {
    if (v.empty()) return;
    v = pi.apply(v);
  };
  auto map_linear_part = [&pi](std::vector<double>& v) {
    // Direction-like payloads (amplitudes, slopes): translation leaves them
    // unchanged, linear kinds act by the matrix, scaling scales.
    if (v.empty() || pi.kind() == Transform::Kind::Translate ||
        pi.kind() == Transform::Kind::Identity)
      return;
    if (pi.kind() == Transform::Kind::Scale) {
      for (auto& x : v) x *= pi.param();
      return;
    }
    v = pi.apply(v);
  };
  for (auto& seg : out.segments) {
    map_vec(seg.value);
    map_vec(seg.offset);
    map_linear_part(seg.amplitude);
    map_vec(seg.v0);
    map_linear_part(seg.slope);
    for (auto& kv : seg.knot_values) map_vec(kv);
  }
  out.validate(out.input_set ? 257 : 0);
  return out;
}

OntoReport check_onto(const Transform& pi, std::span<const Interval> input_set, int n_samples) {
  OntoReport rep;
  Transform inv = pi.inverse();
  // Deterministic sample grid across the (possibly unbounded) input set;
  // unbounded edges are truncated to a generous decade range.
  int m = static_cast<int>(input_set.size());
  for (int k = 0; k < n_samples; ++k) {
    std::vector<double> v(m);
    for (int j = 0; j < m; ++j) {
      const Interval& iv = input_set[j];
      double lo = std::isfinite(iv.lo) ? iv.lo : -100.0;
      double hi = std::isfinite(iv.hi) ? iv.hi : 100.0;
      if (iv.lo_open && lo == 0.0) lo = 1e-3;
      double w = (k + 0.5) / n_samples;
      v[j] = lo + (hi - lo) * w;
    }
    if (!contains_point(input_set, pi.apply(v))) ++rep.n_forward_violations;
    if (!contains_point(input_set, inv.apply(v))) ++rep.n_preimage_violations;
  }
  rep.onto = rep.n_forward_violations == 0 && rep.n_preimage_violations == 0;
  return rep;
}

}  // namespace symadapt
