#pragma once

#include <string>

#include "ddestab/fov.hpp"
#include "ddestab/mol.hpp"
#include "ddestab/numerics.hpp"
#include "ddestab/stability.hpp"
#include "ddestab/theta_solver.hpp"

namespace ddestab::io {

using numerics::CMatrix;

/// {"rows": n, "cols": n, "entries": [[re, im], ...]} row-major; a bare
/// number entry is a real value. Throws Parse on malformed or non-finite data.
CMatrix parse_matrix(const std::string& json_text);
std::string matrix_to_json(const CMatrix& m);

CMatrix read_matrix(const std::string& path);
void write_matrix(const std::string& path, const CMatrix& m);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

std::string report_to_json(const stability::StabilityReport& report);

/// alpha,re,im
std::string region_csv(const stability::RegionBoundary& region);
/// angle,re,im
std::string fov_csv(const fov::FovBoundary& boundary);

/// t then one column per component (re, plus im when the run is complex), or
/// t,norm when norm_only. Runs without retained states are always norm-only.
std::string trajectory_csv(const solver::Trajectory& traj, bool norm_only);

/// x[,y],value per component at the final time.
std::string snapshot_csv(const solver::Trajectory& traj, const mol::MolProblem& problem);

/// Dimensions, parameters and eigenvalue bounds of a builtin problem.
std::string problem_summary_json(const mol::MolProblem& problem);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace ddestab::io
