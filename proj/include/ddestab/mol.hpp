#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ddestab/numerics.hpp"
#include "ddestab/theta_solver.hpp"

namespace ddestab::mol {

using numerics::CMatrix;
using numerics::RSparse;

struct Grid1D {
  int m = 2;
  double length = 1.0;

  double dx() const { return length / m; }
  double node(int j) const { return j * dx(); }
  int interior() const { return m - 1; }
};

/// Eigenvalues of the 1D Dirichlet second-difference matrix,
/// -4/dx^2 sin^2(k pi / (2M)) for k = 1..M-1.
std::vector<double> laplacian_eigenvalues(const Grid1D& grid);

/// Tridiagonal (1, -2, 1) / dx^2 on the interior nodes.
RSparse second_difference(const Grid1D& grid);

enum class ProblemKind { Example1, Example2 };

const char* to_string(ProblemKind kind) noexcept;

/// Exact value of component c at (t, x, y).
using ExactSolution = std::function<double(int component, double t, double x, double y)>;

struct MolProblem {
  ProblemKind kind = ProblemKind::Example1;
  Grid1D grid;
  int components = 1;
  int spatial_dims = 1;
  double tau = 0.0;
  std::vector<std::pair<std::string, double>> params;
  std::optional<solver::LinearDDE> linear;          // example1
  std::optional<solver::SemilinearDDE> semilinear;  // example2
  ExactSolution exact;                              // empty when unknown

  Eigen::Index unknowns() const;
  double param(const std::string& name) const;

  /// Positive definite factor A and coupling B of y' = -Ay + By(t - tau), as
  /// the stability checks expect them. example2 has no fixed B; use
  /// example2_coupling.
  CMatrix stability_a() const;
  CMatrix stability_b() const;

  /// Physical coordinates of unknown i: (x, y, component).
  struct Node {
    double x;
    double y;
    int component;
  };
  Node node(Eigen::Index i) const;
};

/// v1_t = l1 v1_xx - e^{l pi/2} v1(t - tau) + e^{l pi/2}(l + pi^2/4) v2(t - tau),
/// v2_t = l2 v2_xx - e^{l pi/2}(l + pi^2/4) v1(t - tau) - e^{l pi/2} v2(t - tau)
/// on (0, 2) with zero Dirichlet data. Unknowns: v1 on the interior nodes, then v2.
MolProblem build_example1(int m, double lambda1, double lambda2, double l, double tau);

/// v_t = lambda (v_xx + v_yy) + mu v(t - tau)(1 - v(t - tau)) on the unit
/// square, x varying fastest. A is stored sparse.
MolProblem build_example2(int m, double lambda, double reaction_mu, double tau);

struct Example2Condition {
  bool holds = false;
  double margin = 0.0;      // lambda - threshold
  double threshold = 0.0;   // 3 mu / (8 M^2 sin^2(pi / (2M)))
  double lambda_min = 0.0;  // smallest eigenvalue of -A
  double slope_low = 0.0;   // g' lies in (slope_low, slope_high) while |z| <= 1
  double slope_high = 0.0;
  double radius_bound = 0.0;  // 3 mu / lambda_min, bound on r(A^{-1/2} B A^{-1/2})
};

Example2Condition example2_condition(int m, double lambda, double reaction_mu);

/// Diagonal coupling diag(g'(c_i)) of the mean-value linearisation, from the
/// given slopes (one per unknown).
CMatrix example2_coupling(const std::vector<double>& slopes);

/// sqrt(sum_j (numerical - exact)^2) over the interior nodes of one component.
double discrete_error(const solver::Trajectory& traj, const MolProblem& problem, double t,
                      int component);

}  // namespace ddestab::mol
