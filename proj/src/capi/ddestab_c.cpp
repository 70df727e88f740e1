#include "ddestab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "ddestab/driver.hpp"
#include "ddestab/fov.hpp"
#include "ddestab/io.hpp"
#include "ddestab/mol.hpp"
#include "ddestab/stability.hpp"

using namespace ddestab;

struct ddestab_matrix {
  numerics::CMatrix m;
};

struct ddestab_report {
  stability::StabilityReport report;
};

struct ddestab_run {
  std::optional<mol::MolProblem> problem;
  solver::Trajectory trajectory;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

ddestab_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return DDESTAB_ERR_PARSE;
    case ErrorCode::Io: return DDESTAB_ERR_IO;
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidParams:
    case ErrorCode::UnsupportedScheme:
    case ErrorCode::TimeOffGrid:
    case ErrorCode::StateNotRetained: return DDESTAB_ERR_INVALID_ARGUMENT;
    default: return DDESTAB_ERR_NUMERICAL;
  }
}

template <typename F>
ddestab_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return DDESTAB_OK;
  } catch (const Error& e) {
    g_last_error = std::string(to_string(e.code())) + ": " + e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DDESTAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DDESTAB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DDESTAB_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

char* copy_out(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

stability::ThetaScheme to_scheme(const ddestab_scheme& s) {
  return stability::ThetaScheme(s.theta, s.u, s.m, s.tau);
}

driver::SolveRequest to_request(const ddestab_solve_options& o) {
  driver::SolveRequest r;
  r.problem = o.problem ? o.problem : "";
  r.grid_m = o.grid_m;
  r.lambda1 = o.lambda1;
  r.lambda2 = o.lambda2;
  r.l = o.l;
  r.lambda = o.lambda;
  r.reaction_mu = o.reaction_mu;
  r.tau = o.tau;
  r.theta = o.theta;
  r.u = o.u;
  r.m = o.m;
  r.t_end = o.t_end;
  r.keep_states = o.keep_states != 0;
  r.zero_history = o.zero_history != 0;
  return r;
}

}  // namespace

extern "C" {

const char* ddestab_last_error(void) { return g_last_error.c_str(); }

const char* ddestab_version(void) { return "1.0.0"; }

void ddestab_string_free(char* s) { std::free(s); }

ddestab_status ddestab_matrix_create(int rows, int cols, const double* re, const double* im,
                                     ddestab_matrix** out) {
  return guard([&] {
    require(out && re && rows > 0 && cols > 0, "matrix_create: bad arguments");
    auto* h = new ddestab_matrix{numerics::CMatrix(rows, cols)};
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const int k = i * cols + j;
        h->m(i, j) = {re[k], im ? im[k] : 0.0};
      }
    }
    *out = h;
  });
}

ddestab_status ddestab_matrix_parse(const char* json, ddestab_matrix** out) {
  return guard([&] {
    require(json && out, "matrix_parse: null argument");
    *out = new ddestab_matrix{io::parse_matrix(json)};
  });
}

ddestab_status ddestab_matrix_load(const char* path, ddestab_matrix** out) {
  return guard([&] {
    require(path && out, "matrix_load: null argument");
    *out = new ddestab_matrix{io::read_matrix(path)};
  });
}

ddestab_status ddestab_matrix_save(const ddestab_matrix* m, const char* path) {
  return guard([&] {
    require(m && path, "matrix_save: null argument");
    io::write_matrix(path, m->m);
  });
}

ddestab_status ddestab_matrix_to_json(const ddestab_matrix* m, char** out) {
  return guard([&] {
    require(m && out, "matrix_to_json: null argument");
    *out = copy_out(io::matrix_to_json(m->m));
  });
}

ddestab_status ddestab_matrix_builtin(const char* name, ddestab_matrix** out) {
  return guard([&] {
    require(name && out, "matrix_builtin: null argument");
    const std::string n = name;
    numerics::CMatrix m;
    if (n == "example31-a") {
      m = driver::example31_a();
    } else if (n == "example31-b") {
      m = driver::example31_b();
    } else if (n == "example1-a" || n == "example1-b") {
      const auto p = driver::build_problem({});
      m = n == "example1-a" ? p.stability_a() : p.stability_b();
    } else {
      fail(ErrorCode::InvalidArgument, "unknown builtin matrix '" + n + "'");
    }
    *out = new ddestab_matrix{std::move(m)};
  });
}

int ddestab_matrix_rows(const ddestab_matrix* m) { return m ? static_cast<int>(m->m.rows()) : 0; }

int ddestab_matrix_cols(const ddestab_matrix* m) { return m ? static_cast<int>(m->m.cols()) : 0; }

ddestab_status ddestab_matrix_get(const ddestab_matrix* m, int i, int j, double* re, double* im) {
  return guard([&] {
    require(m && i >= 0 && j >= 0 && i < m->m.rows() && j < m->m.cols(), "matrix_get: bad index");
    if (re) *re = m->m(i, j).real();
    if (im) *im = m->m(i, j).imag();
  });
}

void ddestab_matrix_free(ddestab_matrix* m) { delete m; }

ddestab_status ddestab_check(const ddestab_matrix* a, const ddestab_matrix* b, ddestab_scheme scheme,
                             const ddestab_check_options* options, ddestab_report** out) {
  return guard([&] {
    require(a && b && out, "check: null argument");
    driver::CheckOptions opts;
    if (options) {
      if (options->p_grid) opts.p_grid.assign(options->p_grid, options->p_grid + options->n_p);
      if (options->n_angles) opts.n_angles = options->n_angles;
      if (options->oracle_cap) opts.oracle_cap = options->oracle_cap;
    }
    require(!opts.p_grid.empty(), "check: empty p grid");
    *out = new ddestab_report{driver::check_system(a->m, b->m, to_scheme(scheme), opts)};
  });
}

ddestab_verdict ddestab_report_verdict(const ddestab_report* r) {
  if (!r) return DDESTAB_UNCERTIFIED;
  switch (r->report.verdict) {
    case stability::Verdict::UnconditionallyStable: return DDESTAB_UNCONDITIONALLY_STABLE;
    case stability::Verdict::StableForThisStep: return DDESTAB_STABLE_FOR_THIS_STEP;
    case stability::Verdict::CertifiedUnstable: return DDESTAB_CERTIFIED_UNSTABLE;
    case stability::Verdict::Uncertified: break;
  }
  return DDESTAB_UNCERTIFIED;
}

int ddestab_report_has_failure(const ddestab_report* r) {
  return r && r->report.failing_check ? 1 : 0;
}

ddestab_status ddestab_report_json(const ddestab_report* r, char** out) {
  return guard([&] {
    require(r && out, "report_json: null argument");
    *out = copy_out(io::report_to_json(r->report));
  });
}

void ddestab_report_free(ddestab_report* r) { delete r; }

ddestab_status ddestab_in_dy(double mu_re, double mu_im, double y, ddestab_scheme scheme, int* inside,
                             double* margin) {
  return guard([&] {
    const auto mem = stability::in_dy({mu_re, mu_im}, y, to_scheme(scheme));
    if (inside) *inside = mem.inside ? 1 : 0;
    if (margin) *margin = mem.margin;
  });
}

ddestab_status ddestab_spectral_radius_w(const ddestab_matrix* a, const ddestab_matrix* b,
                                         ddestab_scheme scheme, double* rho) {
  return guard([&] {
    require(a && b && rho, "spectral_radius_w: null argument");
    *rho = stability::oracle_stability(a->m, b->m, to_scheme(scheme)).rho;
  });
}

ddestab_status ddestab_numerical_radius(const ddestab_matrix* m, size_t n_angles, double* lower,
                                        double* upper) {
  return guard([&] {
    require(m, "numerical_radius: null argument");
    const auto boundary = fov::fov_boundary(m->m, n_angles ? n_angles : fov::kDefaultAngles);
    if (lower) *lower = boundary.inner_radius();
    if (upper) *upper = boundary.outer_radius();
  });
}

ddestab_status ddestab_region_csv(ddestab_scheme scheme, double y, size_t n, char** out) {
  return guard([&] {
    require(out, "region_csv: null argument");
    *out = copy_out(io::region_csv(stability::gamma_y(to_scheme(scheme), y, n)));
  });
}

ddestab_status ddestab_fov_csv(const ddestab_matrix* a, const ddestab_matrix* b, double p,
                               size_t n_angles, char** out) {
  return guard([&] {
    require(a && out, "fov_csv: null argument");
    const std::size_t n = n_angles ? n_angles : fov::kDefaultAngles;
    const auto boundary = b ? fov::transformed_fov(a->m, b->m, p, n) : fov::fov_boundary(a->m, n);
    *out = copy_out(io::fov_csv(boundary));
  });
}

ddestab_solve_options ddestab_solve_defaults(const char* problem) {
  const driver::SolveRequest r;
  ddestab_solve_options o{};
  o.problem = problem ? problem : "example1";
  o.grid_m = r.grid_m;
  o.lambda1 = r.lambda1;
  o.lambda2 = r.lambda2;
  o.l = r.l;
  o.lambda = r.lambda;
  o.reaction_mu = r.reaction_mu;
  o.tau = 0.0;
  o.theta = r.theta;
  o.u = r.u;
  o.m = r.m;
  o.t_end = 0.0;
  return o;
}

ddestab_status ddestab_solve_builtin(const ddestab_solve_options* options, ddestab_run** out) {
  return guard([&] {
    require(options && out, "solve_builtin: null argument");
    driver::SolveResult res = driver::solve_builtin(to_request(*options));
    std::string summary = driver::summary_json(res);
    *out = new ddestab_run{std::move(res.problem), std::move(res.trajectory), std::move(summary)};
  });
}

ddestab_status ddestab_solve_linear(const ddestab_matrix* a, const ddestab_matrix* b,
                                    ddestab_scheme scheme, double t_end, const double* history_re,
                                    const double* history_im, int keep_states, ddestab_run** out) {
  return guard([&] {
    require(a && b && history_re && out, "solve_linear: null argument");
    const Eigen::Index n = a->m.rows();
    numerics::CVector hist(n);
    for (Eigen::Index i = 0; i < n; ++i) hist(i) = {history_re[i], history_im ? history_im[i] : 0.0};
    solver::LinearDDE prob{a->m, b->m, scheme.tau, [hist](double) { return hist; }};
    solver::Trajectory traj =
        solver::solve_linear(prob, to_scheme(scheme), t_end, {keep_states != 0});
    std::string summary = "{\n  \"steps\": " + std::to_string(traj.steps()) +
                          ",\n  \"initial_norm\": " + io::format_double(traj.norms.front()) +
                          ",\n  \"final_norm\": " + io::format_double(traj.norms.back()) +
                          ",\n  \"diverged\": " + (traj.diverged ? "true" : "false") + "\n}\n";
    *out = new ddestab_run{std::nullopt, std::move(traj), std::move(summary)};
  });
}

ddestab_status ddestab_run_summary_json(const ddestab_run* run, char** out) {
  return guard([&] {
    require(run && out, "run_summary_json: null argument");
    *out = copy_out(run->summary);
  });
}

ddestab_status ddestab_run_trajectory_csv(const ddestab_run* run, int norm_only, char** out) {
  return guard([&] {
    require(run && out, "run_trajectory_csv: null argument");
    *out = copy_out(io::trajectory_csv(run->trajectory, norm_only != 0));
  });
}

ddestab_status ddestab_run_snapshot_csv(const ddestab_run* run, char** out) {
  return guard([&] {
    require(run && out, "run_snapshot_csv: null argument");
    require(run->problem.has_value(), "run_snapshot_csv: run has no spatial grid");
    *out = copy_out(io::snapshot_csv(run->trajectory, *run->problem));
  });
}

size_t ddestab_run_steps(const ddestab_run* run) { return run ? run->trajectory.steps() : 0; }

double ddestab_run_final_norm(const ddestab_run* run) {
  return run ? run->trajectory.norms.back() : 0.0;
}

int ddestab_run_diverged(const ddestab_run* run) { return run && run->trajectory.diverged ? 1 : 0; }

void ddestab_run_free(ddestab_run* run) { delete run; }

ddestab_status ddestab_problem_summary_json(const ddestab_solve_options* options, char** out) {
  return guard([&] {
    require(options && out, "problem_summary_json: null argument");
    *out = copy_out(io::problem_summary_json(driver::build_problem(to_request(*options))));
  });
}

ddestab_status ddestab_reproduce(const char* target, int full, const char* out_dir, char** table,
                                 int* passed) {
  return guard([&] {
    require(target && table && passed, "reproduce: null argument");
    const auto outcome = driver::reproduce(target, full != 0, out_dir ? out_dir : "");
    *table = copy_out(outcome.table());
    *passed = outcome.passed() ? 1 : 0;
  });
}

}  // extern "C"
