#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ddestab/mol.hpp"
#include "ddestab/theta_solver.hpp"
#include "oracles.hpp"

using namespace ddestab;
using namespace ddestab::solver;

namespace {

constexpr double kPi = std::numbers::pi;

CMatrix scalar(Complex v) { return CMatrix::Constant(1, 1, v); }

History constant(const CVector& v) {
  return [v](double) { return v; };
}

LinearDDE smooth_scalar(double a, double s, double tau) {
  // y = e^{st} solves y' = -a y + b y(t - tau) with b = (s + a) e^{s tau}.
  LinearDDE p{scalar(a), scalar((s + a) * std::exp(s * tau)), tau,
              [s](double t) { return CVector::Constant(1, std::exp(s * t)); }};
  return p;
}

}  // namespace

TEST_CASE("step_count") {
  CHECK(step_count(1.0, 0.1) == 10);
  CHECK(step_count(10.0 * kPi, (kPi / 2.0) / 5.0) == 100);
  CHECK(step_count(1.05, 0.1) == 11);
  CHECK(step_count(0.0, 0.1) == 0);
}

TEST_CASE("B = 0 halves the state each step") {
  const LinearDDE p{scalar(1.0), scalar(0.0), 1.0, constant(CVector::Constant(1, 1.0))};
  const auto traj = solve_linear(p, ThetaScheme(1.0, 0.0, 1, 1.0), 10.0, {true});
  REQUIRE(traj.steps() == 10);
  for (std::size_t n = 0; n <= 10; ++n) {
    CHECK(std::abs(traj.state(n)(0) - std::pow(0.5, static_cast<double>(n))) <= 1e-15);
    CHECK(traj.times[n] == doctest::Approx(static_cast<double>(n)));
  }
  CHECK(traj.is_real);
  CHECK_FALSE(traj.diverged);
}

TEST_CASE("semilinear pure decay and zero fixed point") {
  SemilinearDDE p;
  p.linear = numerics::SystemMatrix(CMatrix(-CMatrix::Identity(2, 2)));
  p.g = [](const CVector& z) { return CVector::Zero(z.size()).eval(); };
  p.tau = 1.0;
  p.history = constant(CVector::Constant(2, 3.0));
  const ThetaScheme s(1.0, 0.0, 4, 1.0);
  const auto traj = solve_semilinear(p, s, 2.0, {true});
  for (std::size_t n = 0; n <= traj.steps(); ++n) {
    CHECK(std::abs(traj.state(n)(1) - 3.0 / std::pow(1.25, static_cast<double>(n))) <= 1e-13);
  }

  SemilinearDDE logistic;
  logistic.linear = numerics::SystemMatrix(CMatrix(-2.0 * CMatrix::Identity(3, 3)));
  logistic.g = [](const CVector& z) { return (3.0 * z.array() * (1.0 - z.array())).matrix().eval(); };
  logistic.tau = 1.0;
  logistic.history = constant(CVector::Zero(3));
  const auto zero = solve_semilinear(logistic, ThetaScheme(0.5, 0.0, 5, 1.0), 5.0);
  CHECK(zero.final_state.norm() == 0.0);
  for (double v : zero.norms) CHECK(v == 0.0);
}

TEST_CASE("linearity in the history") {
  oracle::Rng rng(3);
  const CMatrix a = rng.spd(3), b = rng.matrix(3);
  const CVector v = rng.unit_vector(3);
  const Complex alpha(2.5, -1.0);
  auto hist = [v](double t) { return (v * std::cos(t)).eval(); };
  auto scaled = [v, alpha](double t) { return (alpha * v * std::cos(t)).eval(); };
  const ThetaScheme s(0.7, 0.4, 4, 1.3);
  const auto t1 = solve_linear({a, b, 1.3, hist}, s, 5.0, {true});
  const auto t2 = solve_linear({a, b, 1.3, scaled}, s, 5.0, {true});
  for (std::size_t n = 0; n <= t1.steps(); ++n) {
    CHECK((t2.state(n) - alpha * t1.state(n)).norm() <= 1e-12 * (1.0 + std::abs(alpha) * t1.state(n).norm()));
  }
}

TEST_CASE("trajectory matches repeated application of W") {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto n = rng.integer(1, 3);
    const CMatrix a = rng.spd(n), b = rng.matrix(n);
    const double theta = trial % 2 == 0 ? 1.0 : rng.uniform(0.0, 1.0);
    const double u = trial % 3 == 0 ? 0.0 : rng.uniform(0.0, 0.9);
    const int m = rng.integer(3, 6);
    const ThetaScheme s(theta, u, m, rng.uniform(0.5, 2.0));
    const CVector v0 = rng.unit_vector(n), v1 = rng.unit_vector(n);
    auto hist = [v0, v1](double t) { return (v0 + t * v1).eval(); };
    const auto traj = solve_linear({a, b, s.tau(), hist}, s, 50.5 * s.h(), {true});
    REQUIRE(traj.steps() == 51);

    const CMatrix w = stability::build_w(a, b, s);
    CVector y((m + 1) * n);
    for (int k = 0; k <= m; ++k) y.segment(k * n, n) = hist(-k * s.h());
    for (std::size_t step = 1; step <= 50; ++step) {
      y = w * y;
      const CVector& got = traj.state(step);
      CHECK((got - y.head(n)).norm() <= 1e-10 * (1.0 + y.head(n).norm()));
    }
  }
}

TEST_CASE("asymptotics follow the oracle") {
  oracle::Rng rng(99);
  int decaying = 0, growing = 0;
  for (int trial = 0; trial < 60 && (decaying < 5 || growing < 5); ++trial) {
    const auto n = rng.integer(1, 3);
    const CMatrix a = rng.spd(n);
    const CMatrix b = rng.uniform(0.2, 3.0) * rng.matrix(n);
    const ThetaScheme s(1.0, 0.0, rng.integer(1, 5), 1.0);
    const double rho = stability::oracle_stability(a, b, s).rho;
    if (rho > 0.95 && rho < 1.05) continue;
    const CVector v = rng.unit_vector(n);
    auto run = [&](const CVector& hv) { return solve_linear({a, b, 1.0, constant(hv)}, s, 50.0); };
    auto traj = run(v);
    if (rho < 0.95) {
      ++decaying;
      CHECK(traj.final_state.norm() <= v.norm());
    } else {
      ++growing;
      bool grew = traj.diverged || traj.final_state.norm() >= 10.0 * v.norm();
      if (!grew) {
        const CVector fresh = rng.unit_vector(n);
        traj = run(fresh);
        grew = traj.diverged || traj.final_state.norm() >= 10.0 * fresh.norm();
      }
      CHECK(grew);
    }
  }
  CHECK(decaying >= 5);
  CHECK(growing >= 5);
}

TEST_CASE("example31 runs: decay at m = 2, growth at m = 50") {
  CMatrix a(3, 3), b(3, 3);
  a << 29, -7, 1, 3, 27, -7, 3, 9, 11;
  b << -30, -27, 33, -3, -96, 75, -3, -111, 90;
  const CVector v = CVector::Constant(3, 1.0);
  const auto stable = solve_linear({a, b, 1.0, constant(v)}, ThetaScheme(1.0, 0.0, 2, 1.0), 1000.0);
  CHECK(stable.final_state.norm() < 1e-6 * v.norm());
  const auto unstable = solve_linear({a, b, 1.0, constant(v)}, ThetaScheme(1.0, 0.0, 50, 1.0), 400.0);
  CHECK(unstable.final_state.norm() > 10.0 * v.norm());
}

TEST_CASE("observed order: trapezoidal rule on a smooth scalar problem") {
  const LinearDDE p = smooth_scalar(1.0, -0.5, 1.0);
  const auto study = observed_order(p, 0.5, {10, 20, 40, 80}, 5.0, [](const CVector& y, double t) {
    return std::abs(y(0) - std::exp(-0.5 * t));
  });
  CHECK(study.slope >= 1.8);
  CHECK(study.slope <= 2.2);
  const auto euler = observed_order(p, 1.0, {10, 20, 40, 80}, 5.0, [](const CVector& y, double t) {
    return std::abs(y(0) - std::exp(-0.5 * t));
  });
  CHECK(euler.slope >= 0.8);
  CHECK(euler.slope <= 1.2);
}

TEST_CASE("observed order: implicit Euler on example1") {
  const auto prob = mol::build_example1(100, 1.0, 1.0, -0.1, kPi / 2.0);
  const auto study = observed_order(*prob.linear, 1.0, {25, 50, 100}, 10.0 * kPi,
                                    [&prob](const CVector& y, double t) {
                                      double sum = 0.0;
                                      for (Eigen::Index i = 0; i < y.size(); ++i) {
                                        const auto nd = prob.node(i);
                                        sum += std::norm(y(i) - prob.exact(nd.component, t, nd.x, nd.y));
                                      }
                                      return std::sqrt(sum);
                                    });
  CHECK(study.slope >= 0.8);
  CHECK(study.slope <= 1.2);
}

TEST_CASE("linear-in-time solutions are reproduced to round-off") {
  // y = 1 + t solves y' = y - y(t - 1).
  const LinearDDE p{scalar(-1.0), scalar(-1.0), 1.0, [](double t) { return CVector::Constant(1, 1.0 + t); }};
  for (double theta : {0.5, 1.0}) {
    for (int m : {4, 8, 16}) {
      const auto traj = solve_linear(p, ThetaScheme(theta, 0.0, m, 1.0), 3.0);
      CHECK(std::abs(traj.final_state(0) - 4.0) <= 1e-12);
    }
  }
}

TEST_CASE("divergence is flagged, not thrown") {
  const LinearDDE p{scalar(0.1), scalar(50.0), 0.1, constant(CVector::Constant(1, 1.0))};
  const auto traj = solve_linear(p, ThetaScheme(1.0, 0.0, 1, 0.1), 1e4);
  CHECK(traj.diverged);
  CHECK(traj.steps() < step_count(1e4, 0.1));
  CHECK(std::isfinite(traj.norms.back()));
}

TEST_CASE("grid access errors") {
  const LinearDDE p{scalar(1.0), scalar(0.2), 1.0, constant(CVector::Constant(1, 1.0))};
  const auto traj = solve_linear(p, ThetaScheme(1.0, 0.0, 4, 1.0), 2.0);
  try {
    (void)traj.index_of(0.3);
    FAIL("expected TimeOffGrid");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::TimeOffGrid);
  }
  CHECK_THROWS_AS((void)traj.index_of(5.0), Error);
  CHECK(traj.index_of(0.5) == 2);
  try {
    (void)traj.state(3);
    FAIL("expected StateNotRetained");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::StateNotRetained);
  }
  CHECK(traj.state_at(2.0)(0) == traj.final_state(0));
  CHECK(traj.norms.size() == traj.steps() + 1);
}

TEST_CASE("argument validation") {
  const LinearDDE mismatched{CMatrix::Identity(2, 2), CMatrix::Identity(3, 3), 1.0,
                             constant(CVector::Zero(2))};
  CHECK_THROWS_AS(solve_linear(mismatched, ThetaScheme(1.0, 0.0, 2, 1.0), 1.0), Error);
  const LinearDDE p{scalar(1.0), scalar(0.0), 1.0, constant(CVector::Constant(1, 1.0))};
  // Scheme delay must match the problem delay.
  CHECK_THROWS_AS(solve_linear(p, ThetaScheme(1.0, 0.0, 2, 2.0), 1.0), Error);
  const LinearDDE singular{scalar(-1.0), scalar(0.0), 1.0, constant(CVector::Constant(1, 1.0))};
  try {
    solve_linear(singular, ThetaScheme(1.0, 0.0, 1, 1.0), 1.0);
    FAIL("expected Singular");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::Singular);
  }
}
