#include "ddestab/mol.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ddestab::mol {

using numerics::Complex;
using numerics::CVector;
using numerics::RVector;

namespace {

constexpr double kPi = std::numbers::pi;

void require_grid(int m, const char* op) {
  if (m < 2) fail(ErrorCode::InvalidParams, std::string(op) + ": M must be at least 2");
}

void require_positive(double v, const char* name, const char* op) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorCode::InvalidParams, std::string(op) + ": " + name + " must be positive");
  }
}

}  // namespace

std::vector<double> laplacian_eigenvalues(const Grid1D& grid) {
  std::vector<double> out;
  const double scale = 4.0 / (grid.dx() * grid.dx());
  for (int k = 1; k < grid.m; ++k) {
    const double s = std::sin(k * kPi / (2.0 * grid.m));
    out.push_back(-scale * s * s);
  }
  return out;
}

RSparse second_difference(const Grid1D& grid) {
  const int n = grid.interior();
  const double inv = 1.0 / (grid.dx() * grid.dx());
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < n; ++i) {
    entries.emplace_back(i, i, -2.0 * inv);
    if (i > 0) entries.emplace_back(i, i - 1, inv);
    if (i + 1 < n) entries.emplace_back(i, i + 1, inv);
  }
  RSparse l(n, n);
  l.setFromTriplets(entries.begin(), entries.end());
  return l;
}

const char* to_string(ProblemKind kind) noexcept {
  return kind == ProblemKind::Example1 ? "example1" : "example2";
}

Eigen::Index MolProblem::unknowns() const {
  const Eigen::Index per = grid.interior();
  return spatial_dims == 2 ? per * per * components : per * components;
}

double MolProblem::param(const std::string& name) const {
  for (const auto& [key, value] : params) {
    if (key == name) return value;
  }
  fail(ErrorCode::InvalidArgument, "unknown problem parameter " + name);
}

CMatrix MolProblem::stability_a() const {
  if (linear) return linear->a;
  return -semilinear->linear.to_dense();
}

CMatrix MolProblem::stability_b() const {
  if (linear) return linear->b;
  fail(ErrorCode::InvalidArgument, "example2 has no constant delay coupling");
}

MolProblem::Node MolProblem::node(Eigen::Index i) const {
  const Eigen::Index per = grid.interior();
  if (spatial_dims == 1) {
    return {grid.node(static_cast<int>(i % per) + 1), 0.0, static_cast<int>(i / per)};
  }
  return {grid.node(static_cast<int>(i % per) + 1), grid.node(static_cast<int>(i / per) + 1), 0};
}

MolProblem build_example1(int m, double lambda1, double lambda2, double l, double tau) {
  require_grid(m, "build_example1");
  require_positive(lambda1, "lambda1", "build_example1");
  require_positive(lambda2, "lambda2", "build_example1");
  require_positive(tau, "tau", "build_example1");
  if (!std::isfinite(l)) fail(ErrorCode::InvalidParams, "build_example1: l must be finite");

  MolProblem p;
  p.kind = ProblemKind::Example1;
  p.grid = {m, 2.0};
  p.components = 2;
  p.spatial_dims = 1;
  p.tau = tau;
  p.params = {{"lambda1", lambda1}, {"lambda2", lambda2}, {"l", l}, {"tau", tau}};

  const int n = p.grid.interior();
  const CMatrix lap = numerics::RMatrix(second_difference(p.grid)).cast<Complex>();
  CMatrix a = CMatrix::Zero(2 * n, 2 * n);
  a.topLeftCorner(n, n) = -lambda1 * lap;
  a.bottomRightCorner(n, n) = -lambda2 * lap;

  const double e = std::exp(l * kPi / 2.0);
  const double k = l + kPi * kPi / 4.0;
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix b(2 * n, 2 * n);
  b << -e * id, e * k * id, -e * k * id, -e * id;

  auto exact = [l](int component, double t, double x, double) {
    const double wave = std::exp(l * t) * std::sin(kPi * x / 2.0);
    return component == 0 ? wave * std::sin(t) : wave * std::cos(t);
  };
  const Grid1D grid = p.grid;
  auto history = [grid, exact, n](double t) {
    CVector v(2 * n);
    for (int j = 0; j < n; ++j) {
      const double x = grid.node(j + 1);
      v(j) = exact(0, t, x, 0.0);
      v(n + j) = exact(1, t, x, 0.0);
    }
    return v;
  };
  p.linear = solver::LinearDDE{std::move(a), std::move(b), tau, history};
  if (lambda1 == 1.0 && lambda2 == 1.0 && std::abs(tau - kPi / 2.0) <= 1e-12) p.exact = exact;
  return p;
}

MolProblem build_example2(int m, double lambda, double reaction_mu, double tau) {
  require_grid(m, "build_example2");
  require_positive(lambda, "lambda", "build_example2");
  require_positive(reaction_mu, "reaction_mu", "build_example2");
  require_positive(tau, "tau", "build_example2");

  MolProblem p;
  p.kind = ProblemKind::Example2;
  p.grid = {m, 1.0};
  p.components = 1;
  p.spatial_dims = 2;
  p.tau = tau;
  p.params = {{"lambda", lambda}, {"reaction_mu", reaction_mu}, {"tau", tau}};

  const int n = p.grid.interior();
  // lambda (I (x) L + L (x) I), x varying fastest.
  const double inv = lambda / (p.grid.dx() * p.grid.dx());
  const auto idx = [n](int i, int j) { return static_cast<Eigen::Index>(j) * n + i; };
  std::vector<Eigen::Triplet<double>> entries;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      entries.emplace_back(idx(i, j), idx(i, j), -4.0 * inv);
      if (i > 0) entries.emplace_back(idx(i, j), idx(i - 1, j), inv);
      if (i + 1 < n) entries.emplace_back(idx(i, j), idx(i + 1, j), inv);
      if (j > 0) entries.emplace_back(idx(i, j), idx(i, j - 1), inv);
      if (j + 1 < n) entries.emplace_back(idx(i, j), idx(i, j + 1), inv);
    }
  }
  RSparse a(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(n) * n);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();

  const double mu = reaction_mu;
  auto g = [mu](const CVector& z) {
    return CVector(mu * z.array() * (1.0 - z.array()));
  };
  auto g_real = [mu](const RVector& z) {
    return RVector(mu * z.array() * (1.0 - z.array()));
  };
  const Grid1D grid = p.grid;
  CVector initial(static_cast<Eigen::Index>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      initial(static_cast<Eigen::Index>(j) * n + i) =
          std::sin(kPi * grid.node(i + 1)) * std::sin(kPi * grid.node(j + 1));
    }
  }
  auto history = [initial](double) { return initial; };
  p.semilinear = solver::SemilinearDDE{numerics::SystemMatrix(std::move(a)), g, g_real, tau, history};
  return p;
}

Example2Condition example2_condition(int m, double lambda, double reaction_mu) {
  require_grid(m, "example2_condition");
  Example2Condition out;
  const double s = std::sin(kPi / (2.0 * m));
  const double m2 = static_cast<double>(m) * m;
  out.threshold = 3.0 * reaction_mu / (8.0 * m2 * s * s);
  out.margin = lambda - out.threshold;
  out.holds = out.margin > 0.0;
  out.lambda_min = 8.0 * lambda * m2 * s * s;
  out.slope_low = -reaction_mu;
  out.slope_high = 3.0 * reaction_mu;
  out.radius_bound = out.lambda_min > 0.0 ? 3.0 * reaction_mu / out.lambda_min
                                          : std::numeric_limits<double>::infinity();
  return out;
}

CMatrix example2_coupling(const std::vector<double>& slopes) {
  CVector d(static_cast<Eigen::Index>(slopes.size()));
  for (std::size_t i = 0; i < slopes.size(); ++i) d(static_cast<Eigen::Index>(i)) = slopes[i];
  return d.asDiagonal();
}

double discrete_error(const solver::Trajectory& traj, const MolProblem& problem, double t,
                      int component) {
  if (!problem.exact) {
    fail(ErrorCode::InvalidArgument, "discrete_error: the problem has no exact solution");
  }
  if (component < 0 || component >= problem.components) {
    fail(ErrorCode::InvalidArgument, "discrete_error: component out of range");
  }
  const CVector& y = traj.state_at(t);
  if (y.size() != problem.unknowns()) {
    fail(ErrorCode::InvalidArgument, "discrete_error: trajectory does not match the problem");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const MolProblem::Node nd = problem.node(i);
    if (nd.component != component) continue;
    const double e = std::abs(y(i) - problem.exact(component, t, nd.x, nd.y));
    sum += e * e;
  }
  return std::sqrt(sum);
}

}  // namespace ddestab::mol
