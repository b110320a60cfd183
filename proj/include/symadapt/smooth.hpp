#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symadapt/dual.hpp"

namespace symadapt {

// Type-erased R^in -> R^out map evaluable at every level of the dual tower.
// The callable must be a generic lambda (or functor) templated on the scalar
// type; composition combinators (Lie derivative, bracket, ...) then work by
// seeding one level up.
class SmoothFn {
  struct Iface {
    virtual ~Iface() = default;
    virtual void e0(std::span<const D0>, std::span<D0>) const = 0;
    virtual void e1(std::span<const D1>, std::span<D1>) const = 0;
    virtual void e2(std::span<const D2>, std::span<D2>) const = 0;
    virtual void e3(std::span<const D3>, std::span<D3>) const = 0;
    virtual void e4(std::span<const D4>, std::span<D4>) const = 0;
    virtual void e5(std::span<const D5>, std::span<D5>) const = 0;
  };
  template <typename F>
  struct Impl final : Iface {
    F f;
    explicit Impl(F fn) : f(std::move(fn)) {}
    void e0(std::span<const D0> i, std::span<D0> o) const override { f(i, o); }
    void e1(std::span<const D1> i, std::span<D1> o) const override { f(i, o); }
    void e2(std::span<const D2> i, std::span<D2> o) const override { f(i, o); }
    void e3(std::span<const D3> i, std::span<D3> o) const override { f(i, o); }
    void e4(std::span<const D4> i, std::span<D4> o) const override { f(i, o); }
    void e5(std::span<const D5> i, std::span<D5> o) const override { f(i, o); }
  };

 public:
  SmoothFn() = default;
  template <typename F>
  SmoothFn(int in_dim, int out_dim, F f)
      : in_(in_dim), out_(out_dim), p_(std::make_shared<const Impl<F>>(std::move(f))) {}

  bool valid() const { return static_cast<bool>(p_); }
  int in_dim() const { return in_; }
  int out_dim() const { return out_; }

  template <typename T>
  void eval(std::span<const T> in, std::span<T> out) const {
    constexpr int L = dual_level_v<T>;
    static_assert(L >= 0 && L <= kMaxDualLevel, "scalar type outside the dual tower");
    if constexpr (L == 0)
      p_->e0(in, out);
    else if constexpr (L == 1)
      p_->e1(in, out);
    else if constexpr (L == 2)
      p_->e2(in, out);
    else if constexpr (L == 3)
      p_->e3(in, out);
    else if constexpr (L == 4)
      p_->e4(in, out);
    else
      p_->e5(in, out);
  }

  std::vector<double> operator()(std::span<const double> in) const {
    std::vector<double> out(static_cast<size_t>(out_));
    eval<double>(in, out);
    return out;
  }

  double scalar(std::span<const double> in) const {
    double out = 0.0;
    eval<double>(in, std::span<double>(&out, 1));
    return out;
  }

 private:
  int in_ = 0, out_ = 0;
  std::shared_ptr<const Iface> p_;
};

// Dynamics F(z, u) -> dz, same tower treatment with state and input promoted
// to a common scalar type.
class Dynamics {
  struct Iface {
    virtual ~Iface() = default;
    virtual void e0(std::span<const D0>, std::span<const D0>, std::span<D0>) const = 0;
    virtual void e1(std::span<const D1>, std::span<const D1>, std::span<D1>) const = 0;
    virtual void e2(std::span<const D2>, std::span<const D2>, std::span<D2>) const = 0;
    virtual void e3(std::span<const D3>, std::span<const D3>, std::span<D3>) const = 0;
    virtual void e4(std::span<const D4>, std::span<const D4>, std::span<D4>) const = 0;
    virtual void e5(std::span<const D5>, std::span<const D5>, std::span<D5>) const = 0;
  };
  template <typename F>
  struct Impl final : Iface {
    F f;
    explicit Impl(F fn) : f(std::move(fn)) {}
    void e0(std::span<const D0> z, std::span<const D0> u, std::span<D0> o) const override { f(z, u, o); }
    void e1(std::span<const D1> z, std::span<const D1> u, std::span<D1> o) const override { f(z, u, o); }
    void e2(std::span<const D2> z, std::span<const D2> u, std::span<D2> o) const override { f(z, u, o); }
    void e3(std::span<const D3> z, std::span<const D3> u, std::span<D3> o) const override { f(z, u, o); }
    void e4(std::span<const D4> z, std::span<const D4> u, std::span<D4> o) const override { f(z, u, o); }
    void e5(std::span<const D5> z, std::span<const D5> u, std::span<D5> o) const override { f(z, u, o); }
  };

 public:
  Dynamics() = default;
  template <typename F>
  Dynamics(int n, int m, F f)
      : n_(n), m_(m), p_(std::make_shared<const Impl<F>>(std::move(f))) {}

  bool valid() const { return static_cast<bool>(p_); }
  int n() const { return n_; }
  int m() const { return m_; }

  template <typename T>
  void eval(std::span<const T> z, std::span<const T> u, std::span<T> dz) const {
    constexpr int L = dual_level_v<T>;
    if constexpr (L == 0)
      p_->e0(z, u, dz);
    else if constexpr (L == 1)
      p_->e1(z, u, dz);
    else if constexpr (L == 2)
      p_->e2(z, u, dz);
    else if constexpr (L == 3)
      p_->e3(z, u, dz);
    else if constexpr (L == 4)
      p_->e4(z, u, dz);
    else
      p_->e5(z, u, dz);
  }

  // Plain double evaluation.
  std::vector<double> operator()(std::span<const double> z, std::span<const double> u) const {
    std::vector<double> dz(static_cast<size_t>(n_));
    eval<double>(z, u, dz);
    return dz;
  }

 private:
  int n_ = 0, m_ = 0;
  std::shared_ptr<const Iface> p_;
};

// Jacobian of f at x, row-major out_dim x in_dim with entries of the calling
// level's scalar type. One forward pass per input coordinate.
template <typename T>
void jacobian_eval(const SmoothFn& f, std::span<const T> x, std::vector<T>& J) {
  if constexpr (dual_level_v<T> >= kMaxDualLevel) {
    throw std::runtime_error("jacobian_eval: dual tower depth exhausted");
  } else {
    using U = Dual<T>;
    const int n = f.in_dim();
    const int m = f.out_dim();
    J.assign(static_cast<size_t>(n) * m, T{});
    std::vector<U> xi(n);
    std::vector<U> yo(m);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) xi[k] = U{x[k], T(k == j ? 1.0 : 0.0)};
      f.eval<U>(xi, yo);
      for (int r = 0; r < m; ++r) J[static_cast<size_t>(r) * n + j] = yo[r].du;
    }
  }
}

// Gradient of a scalar-valued SmoothFn.
template <typename T>
void gradient_eval(const SmoothFn& h, std::span<const T> x, std::vector<T>& g) {
  std::vector<T> J;
  jacobian_eval<T>(h, x, J);
  g = std::move(J);
}

// Jacobian of F(., u) with respect to the state, inputs held constant.
template <typename T>
void dynamics_state_jacobian(const Dynamics& F, std::span<const T> z, std::span<const T> u,
                             std::vector<T>& J) {
  if constexpr (dual_level_v<T> >= kMaxDualLevel) {
    throw std::runtime_error("dynamics_state_jacobian: dual tower depth exhausted");
  } else {
    using U = Dual<T>;
    const int n = F.n();
    const int m = F.m();
    J.assign(static_cast<size_t>(n) * n, T{});
    std::vector<U> zi(n), ui(m), dz(n);
    for (int k = 0; k < m; ++k) ui[k] = U{u[k], T{}};
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) zi[k] = U{z[k], T(k == j ? 1.0 : 0.0)};
      F.eval<U>(zi, ui, dz);
      for (int r = 0; r < n; ++r) J[static_cast<size_t>(r) * n + j] = dz[r].du;
    }
  }
}

// Lie derivative L_X h of a scalar function along a vector field, as a new
// SmoothFn usable at one level less than the tower top.
inline SmoothFn lie_derivative(const SmoothFn& h, const SmoothFn& X) {
  if (h.in_dim() != X.in_dim() || X.out_dim() != X.in_dim() || h.out_dim() != 1)
    throw std::invalid_argument("lie_derivative: dimension mismatch");
  const int n = h.in_dim();
  return SmoothFn(n, 1, [h, X, n]<typename T>(std::span<const T> z, std::span<T> out) {
    if constexpr (dual_level_v<T> >= kMaxDualLevel) {
      throw std::runtime_error("lie_derivative: dual tower depth exhausted");
    } else {
      std::vector<T> grad;
      gradient_eval<T>(h, z, grad);
      std::vector<T> xv(n);
      X.eval<T>(z, xv);
      T acc{};
      for (int i = 0; i < n; ++i) acc = acc + grad[i] * xv[i];
      out[0] = acc;
    }
  });
}

// Lie bracket [f, g] = (dg/dz) f - (df/dz) g as a SmoothFn.
inline SmoothFn lie_bracket_field(const SmoothFn& f, const SmoothFn& g) {
  if (f.in_dim() != g.in_dim() || f.out_dim() != g.out_dim() || f.in_dim() != f.out_dim())
    throw std::invalid_argument("lie_bracket_field: dimension mismatch");
  const int n = f.in_dim();
  return SmoothFn(n, n, [f, g, n]<typename T>(std::span<const T> z, std::span<T> out) {
    if constexpr (dual_level_v<T> >= kMaxDualLevel) {
      throw std::runtime_error("lie_bracket_field: dual tower depth exhausted");
    } else {
      std::vector<T> fv(n), gv(n), Jf, Jg;
      f.eval<T>(z, fv);
      g.eval<T>(z, gv);
      jacobian_eval<T>(f, z, Jf);
      jacobian_eval<T>(g, z, Jg);
      for (int i = 0; i < n; ++i) {
        T acc{};
        for (int j = 0; j < n; ++j)
          acc = acc + Jg[static_cast<size_t>(i) * n + j] * fv[j] -
                Jf[static_cast<size_t>(i) * n + j] * gv[j];
        out[i] = acc;
      }
    }
  });
}

// s(z) * g(z) for scalar s.
inline SmoothFn scale_field(const SmoothFn& s, const SmoothFn& g) {
  const int n = g.in_dim();
  return SmoothFn(n, g.out_dim(), [s, g]<typename T>(std::span<const T> z, std::span<T> out) {
    T sv{};
    s.eval<T>(z, std::span<T>(&sv, 1));
    g.eval<T>(z, out);
    for (auto& o : out) o = o * sv;
  });
}

// g(z) / s(z) for scalar s.
inline SmoothFn divide_field(const SmoothFn& g, const SmoothFn& s) {
  const int n = g.in_dim();
  return SmoothFn(n, g.out_dim(), [s, g]<typename T>(std::span<const T> z, std::span<T> out) {
    T sv{};
    s.eval<T>(z, std::span<T>(&sv, 1));
    g.eval<T>(z, out);
    for (auto& o : out) o = o / sv;
  });
}

// f(z) - s(z) * g(z) for scalar s.
inline SmoothFn subtract_scaled_field(const SmoothFn& f, const SmoothFn& s, const SmoothFn& g) {
  const int n = f.in_dim();
  return SmoothFn(n, f.out_dim(), [f, s, g, n]<typename T>(std::span<const T> z, std::span<T> out) {
    std::vector<T> gv(n);
    T sv{};
    f.eval<T>(z, out);
    s.eval<T>(z, std::span<T>(&sv, 1));
    g.eval<T>(z, gv);
    for (int i = 0; i < n; ++i) out[i] = out[i] - sv * gv[i];
  });
}

}  // namespace symadapt
