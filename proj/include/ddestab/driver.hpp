#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ddestab/mol.hpp"
#include "ddestab/stability.hpp"
#include "ddestab/theta_solver.hpp"

namespace ddestab::driver {

using numerics::CMatrix;

struct CheckOptions {
  std::vector<double> p_grid = stability::kDefaultPGrid;
  std::size_t n_angles = fov::kDefaultAngles;
  std::size_t oracle_cap = 5000;  // largest (m+1)N for which rho(W) is computed
};

/// Eigen-pair analysis when A and B are simultaneously diagonalisable, the
/// FOV certificates otherwise (or when the pairs decide nothing), and the
/// companion-matrix oracle for small systems, merged into one report.
/// Contradicting checks downgrade the verdict to Uncertified. A numerical
/// failure inside a check is recorded in failing_check.
stability::StabilityReport check_system(const CMatrix& a, const CMatrix& b,
                                        const stability::ThetaScheme& scheme,
                                        const CheckOptions& options = {});

struct SolveRequest {
  std::string problem = "example1";
  int grid_m = 100;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double l = -0.1;
  double lambda = 0.5;
  double reaction_mu = 3.0;
  double tau = 0.0;  // problem default when <= 0
  double theta = 1.0;
  double u = 0.0;
  int m = 5;
  double t_end = 0.0;  // problem default when <= 0
  bool keep_states = false;
  bool zero_history = false;
};

/// Builds "example1" or "example2"; throws InvalidArgument for other names.
mol::MolProblem build_problem(const SolveRequest& request);

struct SolveResult {
  mol::MolProblem problem;
  solver::Trajectory trajectory;
  double t_end = 0.0;
};

SolveResult solve_builtin(const SolveRequest& request);

/// Final and initial norms, divergence flag, max-norm bound and, when the
/// exact solution is known, the discrete errors per component.
std::string summary_json(const SolveResult& result);

struct Comparison {
  std::string target;
  std::string item;
  std::string expected;
  std::string got;
  bool passed = false;
};

struct ReproduceOutcome {
  std::vector<Comparison> rows;

  bool passed() const;
  std::string table() const;
};

inline const std::vector<std::string> kTargets{"table1", "example31", "example2-condition",
                                               "figures"};

/// Regenerates a target ("all" runs every one) and compares it with the
/// reference values. Data files go to out_dir when it is non-empty.
ReproduceOutcome reproduce(const std::string& target, bool full, const std::string& out_dir);

/// The 3x3 pair used for the simultaneously diagonalisable example.
CMatrix example31_a();
CMatrix example31_b();

}  // namespace ddestab::driver
