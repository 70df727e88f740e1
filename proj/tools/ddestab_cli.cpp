#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddestab.h"

namespace {

enum Exit { kOk = 0, kMismatch = 1, kUsage = 2, kNumerical = 3 };

struct Failure {
  int code;
};

int exit_for(ddestab_status s) {
  switch (s) {
    case DDESTAB_OK: return kOk;
    case DDESTAB_ERR_INVALID_ARGUMENT:
    case DDESTAB_ERR_PARSE:
    case DDESTAB_ERR_IO: return kUsage;
    default: return kNumerical;
  }
}

void check(ddestab_status s) {
  if (s != DDESTAB_OK) {
    std::cerr << "error: " << ddestab_last_error() << '\n';
    throw Failure{exit_for(s)};
  }
}

struct MatrixDeleter {
  void operator()(ddestab_matrix* m) const { ddestab_matrix_free(m); }
};
using Matrix = std::unique_ptr<ddestab_matrix, MatrixDeleter>;

// A file path, or builtin:NAME.
Matrix load_matrix(const std::string& spec) {
  ddestab_matrix* m = nullptr;
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    check(ddestab_matrix_builtin(spec.substr(prefix.size()).c_str(), &m));
  } else {
    check(ddestab_matrix_load(spec.c_str(), &m));
  }
  return Matrix(m);
}

// Takes ownership of a library string and writes it to path, or stdout.
void emit(char* text, const std::string& path) {
  std::unique_ptr<char, void (*)(char*)> owned(text, ddestab_string_free);
  if (path.empty() || path == "-") {
    std::fputs(owned.get(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << '\n';
    throw Failure{kUsage};
  }
  out << owned.get();
}

struct SchemeFlags {
  double theta = 1.0;
  double u = 0.0;
  int m = 1;
  double tau = 1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--theta", theta, "theta-method parameter in [0, 1]")->capture_default_str();
    cmd->add_option("--u", u, "interpolation offset in [0, 1)")->capture_default_str();
    cmd->add_option("--m", m, "steps per delay, tau = (m - u) h")->capture_default_str();
    cmd->add_option("--tau", tau, "delay")->capture_default_str();
  }
  ddestab_scheme scheme() const { return {theta, u, m, tau}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis and simulation of theta-methods for delay equations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ddestab_version()));

  // check
  auto* check_cmd = app.add_subcommand("check", "Stability report for y' = -Ay + By(t - tau)");
  std::string a_path, b_path, report_path;
  std::vector<double> p_grid;
  std::size_t n_angles = 256, oracle_cap = 5000;
  SchemeFlags check_scheme;
  check_cmd->add_option("-a,--a", a_path, "matrix A (JSON file or builtin:NAME)")->required();
  check_cmd->add_option("-b,--b", b_path, "matrix B (JSON file or builtin:NAME)")->required();
  check_scheme.add(check_cmd);
  check_cmd->add_option("--p", p_grid, "transform exponents (default 0 1 2)");
  check_cmd->add_option("--n-angles", n_angles, "FOV sweep angles")->capture_default_str();
  check_cmd->add_option("--oracle-cap", oracle_cap, "largest (m+1)N for the companion oracle")
      ->capture_default_str();
  check_cmd->add_option("-o,--out", report_path, "report file (default stdout)");

  // region
  auto* region_cmd = app.add_subcommand("region", "Boundary curve of D_y as CSV (alpha,re,im)");
  double region_y = -2.0;
  std::size_t region_n = 721;
  std::string region_out;
  SchemeFlags region_scheme;
  region_cmd->add_option("--y", region_y, "y = -h lambda (negative)")->required();
  region_scheme.add(region_cmd);
  region_cmd->add_option("--n", region_n, "samples")->capture_default_str();
  region_cmd->add_option("-o,--out", region_out, "CSV file (default stdout)");

  // fov
  auto* fov_cmd = app.add_subcommand("fov", "Field-of-values boundary as CSV (angle,re,im)");
  std::string fov_a, fov_b, fov_out;
  double fov_p = 0.0;
  std::size_t fov_n = 256;
  fov_cmd->add_option("--matrix", fov_a, "matrix (JSON file or builtin:NAME)")->required();
  fov_cmd->add_option("--matrix-b", fov_b, "B: plot A^{p/2-1} B A^{-p/2} instead");
  fov_cmd->add_option("--p", fov_p, "transform exponent")->capture_default_str();
  fov_cmd->add_option("--n", fov_n, "sweep angles")->capture_default_str();
  fov_cmd->add_option("-o,--out", fov_out, "CSV file (default stdout)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Integrate a builtin problem");
  std::string problem = "example1";
  ddestab_solve_options solve = ddestab_solve_defaults("example1");
  bool keep = false, norm_only = false, zero_history = false;
  std::string traj_out, summary_out, snapshot_out;
  solve_cmd->add_option("problem", problem, "example1 or example2")->capture_default_str();
  solve_cmd->add_option("--grid-m", solve.grid_m, "spatial resolution M")->capture_default_str();
  solve_cmd->add_option("--lambda1", solve.lambda1, "example1 diffusion of v1")->capture_default_str();
  solve_cmd->add_option("--lambda2", solve.lambda2, "example1 diffusion of v2")->capture_default_str();
  solve_cmd->add_option("--l", solve.l, "example1 growth parameter")->capture_default_str();
  solve_cmd->add_option("--lambda", solve.lambda, "example2 diffusion")->capture_default_str();
  solve_cmd->add_option("--reaction-mu", solve.reaction_mu, "example2 reaction rate")
      ->capture_default_str();
  solve_cmd->add_option("--tau", solve.tau, "delay (default pi/2 for example1, 1 for example2)");
  solve_cmd->add_option("--theta", solve.theta, "theta-method parameter")->capture_default_str();
  solve_cmd->add_option("--u", solve.u, "interpolation offset")->capture_default_str();
  solve_cmd->add_option("--m", solve.m, "steps per delay")->capture_default_str();
  solve_cmd->add_option("--t-end", solve.t_end, "final time (default 10 pi for example1, 10 for example2)");
  solve_cmd->add_flag("--keep-trajectory", keep, "retain every state for the trajectory CSV");
  solve_cmd->add_flag("--norm-only", norm_only, "trajectory CSV with t,norm only");
  solve_cmd->add_flag("--zero-history", zero_history, "replace the initial function by zero");
  solve_cmd->add_option("--trajectory", traj_out, "trajectory CSV file");
  solve_cmd->add_option("--snapshot", snapshot_out, "final-time spatial snapshot CSV file");
  solve_cmd->add_option("--summary", summary_out, "summary JSON file (default stdout)");

  // describe
  auto* describe_cmd = app.add_subcommand("describe", "Summary of a builtin problem as JSON");
  std::string describe_problem = "example1";
  ddestab_solve_options describe = ddestab_solve_defaults("example1");
  describe_cmd->add_option("problem", describe_problem, "example1 or example2")->capture_default_str();
  describe_cmd->add_option("--grid-m", describe.grid_m, "spatial resolution M")->capture_default_str();
  describe_cmd->add_option("--lambda1", describe.lambda1, "example1 diffusion of v1");
  describe_cmd->add_option("--lambda2", describe.lambda2, "example1 diffusion of v2");
  describe_cmd->add_option("--l", describe.l, "example1 growth parameter");
  describe_cmd->add_option("--lambda", describe.lambda, "example2 diffusion");
  describe_cmd->add_option("--reaction-mu", describe.reaction_mu, "example2 reaction rate");

  // reproduce
  auto* repro_cmd = app.add_subcommand("reproduce", "Regenerate the reference results and compare");
  std::string target = "all", out_dir;
  bool full = false;
  repro_cmd->add_option("--target", target, "table1, example31, example2-condition, figures or all")
      ->capture_default_str();
  repro_cmd->add_flag("--full", full, "include the m = 1000 column of table1");
  repro_cmd->add_option("--out-dir", out_dir, "directory for generated data files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check_cmd) {
      const Matrix a = load_matrix(a_path);
      const Matrix b = load_matrix(b_path);
      ddestab_check_options opts{p_grid.empty() ? nullptr : p_grid.data(), p_grid.size(), n_angles,
                                 oracle_cap};
      ddestab_report* report = nullptr;
      check(ddestab_check(a.get(), b.get(), check_scheme.scheme(), &opts, &report));
      std::unique_ptr<ddestab_report, void (*)(ddestab_report*)> owned(report, ddestab_report_free);
      char* json = nullptr;
      check(ddestab_report_json(report, &json));
      emit(json, report_path);
      return ddestab_report_has_failure(report) ? kNumerical : kOk;
    }
    if (*region_cmd) {
      char* csv = nullptr;
      check(ddestab_region_csv(region_scheme.scheme(), region_y, region_n, &csv));
      emit(csv, region_out);
      return kOk;
    }
    if (*fov_cmd) {
      const Matrix a = load_matrix(fov_a);
      const Matrix b = fov_b.empty() ? Matrix() : load_matrix(fov_b);
      char* csv = nullptr;
      check(ddestab_fov_csv(a.get(), b.get(), fov_p, fov_n, &csv));
      emit(csv, fov_out);
      return kOk;
    }
    if (*solve_cmd) {
      solve.problem = problem.c_str();
      solve.keep_states = keep ? 1 : 0;
      solve.zero_history = zero_history ? 1 : 0;
      ddestab_run* run = nullptr;
      check(ddestab_solve_builtin(&solve, &run));
      std::unique_ptr<ddestab_run, void (*)(ddestab_run*)> owned(run, ddestab_run_free);
      if (!traj_out.empty()) {
        char* csv = nullptr;
        check(ddestab_run_trajectory_csv(run, norm_only ? 1 : 0, &csv));
        emit(csv, traj_out);
      }
      if (!snapshot_out.empty()) {
        char* csv = nullptr;
        check(ddestab_run_snapshot_csv(run, &csv));
        emit(csv, snapshot_out);
      }
      char* summary = nullptr;
      check(ddestab_run_summary_json(run, &summary));
      emit(summary, summary_out);
      return kOk;
    }
    if (*describe_cmd) {
      describe.problem = describe_problem.c_str();
      char* json = nullptr;
      check(ddestab_problem_summary_json(&describe, &json));
      emit(json, "");
      return kOk;
    }
    if (*repro_cmd) {
      char* table = nullptr;
      int passed = 0;
      check(ddestab_reproduce(target.c_str(), full ? 1 : 0, out_dir.empty() ? nullptr : out_dir.c_str(),
                              &table, &passed));
      emit(table, "");
      return passed ? kOk : kMismatch;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kUsage;
}
