#include <doctest.h>

#include <cmath>

#include "symadapt/rng.hpp"
#include "symadapt/stability.hpp"

using namespace symadapt;

namespace {

LyapunovTriple linear_triple() {
  LyapunovTriple t;
  t.x0 = 1.0;
  t.y0 = 2.0;
  t.c = 0.0;
  t.f = SmoothFn(1, 1, []<typename T>(std::span<const T> x, std::span<T> o) { o[0] = x[0] - 1.0; });
  t.g = SmoothFn(1, 1, []<typename T>(std::span<const T> y, std::span<T> o) { o[0] = y[0] - 2.0; });
  t.k = SmoothFn(1, 1, []<typename T>(std::span<const T> y, std::span<T> o) { o[0] = y[0] - 2.0; });
  return t;
}

}  // namespace

TEST_CASE("lyapunov_value on closed-form integrands") {
  SUBCASE("zero at the equilibrium") {
    auto t = linear_triple();
    CHECK(lyapunov_value(t, 1.0, 2.0) == 0.0);
  }
  SUBCASE("quadratic for linear f, g") {
    auto t = linear_triple();
    double v = lyapunov_value(t, 3.0, 1.0);
    CHECK(v == doctest::Approx(((3.0 - 1) * (3.0 - 1) + (1.0 - 2) * (1.0 - 2)) / 2).epsilon(1e-12));
  }
  SUBCASE("fig1c triple value matches the hand antiderivative at (2, 2), u = 1") {
    auto sys = registry_get("fig1c");
    auto cor = corollary52_transform(sys, 1.0);
    // V(z, y) = beta*u*(exp(-z) - exp(-z0)) + gamma*y0*(z - z0) + alpha*(y - y0)^2/2
    double z = 2.0, y = 2.0;
    double expect = 1.0 * (std::exp(-z) - 1.0) + 1.0 * (z - 0.0) + 0.5 * (y - 1.0) * (y - 1.0);
    CHECK(cor.triple.x0 == doctest::Approx(0.0));
    CHECK(lyapunov_value(cor.triple, z, y) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("corollary 5.2 transform") {
  SUBCASE("fig1c maps to the damping form with increasing pieces") {
    auto sys = registry_get("fig1c");
    auto cor = corollary52_transform(sys, 1.0);
    CHECK(!cor.flipped);
    CHECK(cor.triple.x0 == doctest::Approx(std::log(1.0)));
    CHECK(cor.triple.y0 == doctest::Approx(1.0));
    // normalized roles vanish at the equilibrium
    CHECK(cor.triple.f_normalized(cor.triple.x0) == doctest::Approx(0.0));
    CHECK(cor.triple.k_normalized(cor.triple.y0) == doctest::Approx(0.0));
    CHECK(cor.triple.g_value(cor.triple.y0) == doctest::Approx(0.0));
    // derivative signs on a sample grid
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
      double z = rng.uniform(-3.0, 3.0), y = rng.uniform(-2.0, 5.0);
      Eigen::MatrixXd df = jacobian(cor.triple.f, std::span<const double>(&z, 1));
      Eigen::MatrixXd dg = jacobian(cor.triple.g, std::span<const double>(&y, 1));
      Eigen::MatrixXd dk = jacobian(cor.triple.k, std::span<const double>(&y, 1));
      CHECK(df(0, 0) > 0.0);
      CHECK(dg(0, 0) > 0.0);
      CHECK(dk(0, 0) > 0.0);
    }
  }
  SUBCASE("fig1d uses z = -ln x") {
    auto sys = registry_get("fig1d");
    auto cor = corollary52_transform(sys, 1.0);
    CHECK(cor.flipped);
    auto zy = cor.to_transformed(std::vector<double>{2.0, 1.0});
    CHECK(zy[0] == doctest::Approx(-std::log(2.0)));
    auto xy = cor.to_original(zy);
    CHECK(xy[0] == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("fig1a does not match the form") {
    auto sys = registry_get("fig1a");
    CHECK_THROWS_AS(corollary52_transform(sys, 1.0), ConfigError);
  }
  SUBCASE("transformed trajectories map back to the original system") {
    for (const auto& name : {"fig1c", "fig1d"}) {
      auto sys = registry_get(name);
      auto cor = corollary52_transform(sys, 2.0);
      std::vector<double> x0 = {1.7, 0.6};
      auto u = InputSignal::constant1(2.0, 20.0);
      auto torig = integrate(sys, u, x0, 20.0, {});
      auto ttrans = integrate(cor.transformed, u, cor.to_transformed(x0), 20.0, {});
      for (double tt : {1.0, 5.0, 12.0, 20.0}) {
        auto zo = torig.state_at(tt);
        auto zt = cor.to_original(ttrans.state_at(tt));
        CHECK(zo[0] == doctest::Approx(zt[0]).epsilon(1e-7));
        CHECK(zo[1] == doctest::Approx(zt[1]).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("lyapunov decrease along trajectories") {
  SUBCASE("trajectory from the equilibrium stays at V = 0") {
    auto sys = registry_get("fig1c");
    auto cor = corollary52_transform(sys, 1.0);
    std::vector<double> z0 = {cor.triple.x0, cor.triple.y0};
    auto u = InputSignal::constant1(1.0, 10.0);
    auto traj = integrate(cor.transformed, u, z0, 10.0, {});
    auto rep = lyapunov_decrease_check(cor.triple, cor.transformed, traj, 1e-7);
    CHECK(rep.pass);
    CHECK(std::abs(lyapunov_value(cor.triple, traj.states.back()[0], traj.states.back()[1])) <=
          1e-10);
  }
  SUBCASE("random starts pass all three checks at 1e-7") {
    Rng rng(9);
    for (const auto& name : {"fig1c", "fig1d"}) {
      auto sys = registry_get(name);
      for (int trial = 0; trial < 10; ++trial) {
        double ub = rng.uniform(0.5, 3.0);
        auto cor = corollary52_transform(sys, ub);
        std::vector<double> z0 = {rng.uniform(-2.0, 2.0), rng.uniform(0.2, 4.0)};
        auto u = InputSignal::constant1(ub, 50.0);
        auto traj = integrate(cor.transformed, u, z0, 50.0, {});
        auto rep = lyapunov_decrease_check(cor.triple, cor.transformed, traj, 1e-7);
        CHECK(rep.pass);
      }
    }
  }
  SUBCASE("a sign-flipped damping term is caught") {
    auto sys = registry_get("fig1c");
    auto cor = corollary52_transform(sys, 1.0);
    LyapunovTriple bad = cor.triple;
    bad.k = SmoothFn(1, 1, []<typename T>(std::span<const T> y, std::span<T> o) {
      o[0] = T{} - 1.0 * y[0];
    });
    bad.c = 1.0;  // keep k~(y0) = 0 so only the sign structure is wrong
    std::vector<double> z0 = {1.5, 2.0};
    auto u = InputSignal::constant1(1.0, 10.0);
    auto traj = integrate(cor.transformed, u, z0, 10.0, {});
    auto rep = lyapunov_decrease_check(bad, cor.transformed, traj, 1e-7);
    CHECK(!rep.pass);
  }
}

TEST_CASE("lyapunov function shape properties") {
  auto sys = registry_get("fig1c");
  auto cor = corollary52_transform(sys, 2.0);
  SUBCASE("hessian is diagonal positive (strict convexity samples)") {
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
      double z = rng.uniform(-3.0, 3.0);
      double arr[1] = {z};
      Eigen::MatrixXd dfz = jacobian(cor.triple.f, std::span<const double>(arr, 1));
      CHECK(dfz(0, 0) > 0.0);
    }
  }
  SUBCASE("V increases along rays from the equilibrium") {
    for (int ray = 0; ray < 8; ++ray) {
      double ang = 2 * M_PI * ray / 8;
      double prev = 0.0;
      for (double r : {0.25, 0.5, 1.0, 1.5, 2.0}) {
        double v = lyapunov_value(cor.triple, cor.triple.x0 + r * std::cos(ang),
                                  cor.triple.y0 + r * std::sin(ang));
        CHECK(v > prev);
        prev = v;
      }
    }
  }
  SUBCASE("LaSalle residual: tiny |Vdot| persistently means near the equilibrium") {
    std::vector<double> z0 = {1.0, 2.0};
    auto u = InputSignal::constant1(2.0, 120.0);
    auto traj = integrate(cor.transformed, u, z0, 120.0, {});
    for (size_t i = 0; i < traj.times.size(); ++i) {
      if (traj.times[i] < 40.0) continue;
      const auto& z = traj.states[i];
      double gy = cor.triple.g_value(z[1]);
      double vdot = -gy * cor.triple.k_normalized(z[1]);
      if (std::abs(vdot) <= 1e-9) {
        CHECK(std::abs(z[0] - cor.triple.x0) <= 1e-3);
        CHECK(std::abs(z[1] - cor.triple.y0) <= 1e-3);
      }
    }
  }
}

TEST_CASE("empirical global asymptotic stability") {
  SUBCASE("fig1a over [0.1, 10]^2") {
    auto sys = registry_get("fig1a");
    std::vector<std::pair<double, double>> box = {{0.1, 10.0}, {0.1, 10.0}};
    auto rep = gas_empirical(sys, 2.0, 100, box, 100.0, 1e-5);
    CHECK(rep.pass);
    CHECK(rep.fraction_converged == 1.0);
  }
  SUBCASE("fig2b over (0, 10] x [0, 10]") {
    auto sys = registry_get("fig2b");
    std::vector<std::pair<double, double>> box = {{0.01, 10.0}, {0.0, 10.0}};
    auto rep = gas_empirical(sys, 2.0, 100, box, 200.0, 1e-5);
    CHECK(rep.pass);
  }
  SUBCASE("fig1c in original coordinates with the boundary layer avoided") {
    auto sys = registry_get("fig1c");
    std::vector<std::pair<double, double>> box = {{0.05, 20.0}, {0.1, 10.0}};
    auto rep = gas_empirical(sys, 2.0, 100, box, 200.0, 1e-5);
    CHECK(rep.pass);
  }
}
