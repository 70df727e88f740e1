#include "ddestab/driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "ddestab/fov.hpp"
#include "ddestab/io.hpp"

namespace ddestab::driver {

using numerics::Complex;
using numerics::CVector;
using stability::Check;
using stability::Evidence;
using stability::StabilityReport;
using stability::ThetaScheme;
using stability::Verdict;

namespace {

constexpr double kPi = std::numbers::pi;

bool is_stable(Verdict v) {
  return v == Verdict::UnconditionallyStable || v == Verdict::StableForThisStep;
}

bool not_applicable(ErrorCode code) {
  return code == ErrorCode::ComplexSpectrum || code == ErrorCode::NotSimultaneouslyDiagonalizable ||
         code == ErrorCode::NotHermitian || code == ErrorCode::NotPositiveDefinite ||
         code == ErrorCode::UnsupportedScheme;
}

Evidence note_evidence(Check check, std::string note) {
  Evidence e;
  e.check = check;
  e.note = std::move(note);
  return e;
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream out;
  out << std::setprecision(digits) << v;
  return out.str();
}

void append(StabilityReport& into, const StabilityReport& from) {
  into.evidence.insert(into.evidence.end(), from.evidence.begin(), from.evidence.end());
}

}  // namespace

StabilityReport check_system(const CMatrix& a, const CMatrix& b, const ThetaScheme& scheme,
                             const CheckOptions& options) {
  if (a.rows() < 1 || a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    fail(ErrorCode::InvalidArgument, "check: A and B must be square matrices of equal size");
  }
  StabilityReport report{Verdict::Uncertified, {}, scheme, {}};

  // Runs one check; a numerical failure is recorded and the remaining checks go on.
  auto guarded = [&](Check check, auto&& body) {
    try {
      body();
    } catch (const Error& err) {
      if (err.code() == ErrorCode::InvalidArgument) throw;
      if (not_applicable(err.code())) {
        report.evidence.push_back(note_evidence(Check::NotApplicable,
                                                std::string(stability::to_string(check)) + ": " + err.what()));
        return;
      }
      report.evidence.push_back(note_evidence(check, err.what()));
      if (!report.failing_check) report.failing_check = stability::to_string(check);
    }
  };

  guarded(Check::PairMembership, [&] {
    const StabilityReport r = stability::simdiag_analysis(a, b, scheme);
    append(report, r);
    report.verdict = r.verdict;
  });

  if (report.verdict == Verdict::Uncertified) {
    guarded(Check::UnconditionalFov, [&] {
      const StabilityReport r =
          stability::unconditional_certificate(a, b, scheme, options.p_grid, options.n_angles);
      append(report, r);
      report.verdict = r.verdict;
    });
  }
  if (report.verdict == Verdict::Uncertified) {
    guarded(Check::StepFov, [&] {
      const StabilityReport r =
          stability::step_certificate(a, b, scheme, options.p_grid, options.n_angles);
      append(report, r);
      report.verdict = r.verdict;
    });
  }

  const auto dim = static_cast<std::size_t>(scheme.m() + 1) * static_cast<std::size_t>(a.rows());
  if (dim > options.oracle_cap) {
    report.evidence.push_back(note_evidence(
        Check::NotApplicable, "oracle skipped: (m+1)N = " + std::to_string(dim) + " exceeds the cap"));
    return report;
  }
  guarded(Check::Oracle, [&] {
    const stability::OracleResult oracle = stability::oracle_stability(a, b, scheme);
    Evidence e;
    e.check = Check::Oracle;
    e.passed = oracle.stable;
    e.margin = 1.0 - oracle.rho;
    e.note = "rho(W) = " + fixed(oracle.rho, 12);
    if (is_stable(report.verdict) && !oracle.stable) {
      e.note += "; contradicts the certificate, verdict withdrawn";
      report.verdict = Verdict::Uncertified;
    } else if (report.verdict == Verdict::CertifiedUnstable && !oracle.unstable) {
      e.note += "; contradicts the instability witness, verdict withdrawn";
      report.verdict = Verdict::Uncertified;
    } else if (report.verdict == Verdict::Uncertified && oracle.unstable) {
      report.verdict = Verdict::CertifiedUnstable;
    } else if (report.verdict == Verdict::Uncertified && oracle.stable) {
      report.verdict = Verdict::StableForThisStep;
    }
    report.evidence.push_back(std::move(e));
  });
  return report;
}

mol::MolProblem build_problem(const SolveRequest& r) {
  mol::MolProblem p;
  if (r.problem == "example1") {
    p = mol::build_example1(r.grid_m, r.lambda1, r.lambda2, r.l, r.tau > 0.0 ? r.tau : kPi / 2.0);
  } else if (r.problem == "example2") {
    p = mol::build_example2(r.grid_m, r.lambda, r.reaction_mu, r.tau > 0.0 ? r.tau : 1.0);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown problem '" + r.problem + "' (example1, example2)");
  }
  if (r.zero_history) {
    const CVector zero = CVector::Zero(p.unknowns());
    auto history = [zero](double) { return zero; };
    if (p.linear) p.linear->history = history;
    if (p.semilinear) p.semilinear->history = history;
  }
  return p;
}

SolveResult solve_builtin(const SolveRequest& request) {
  mol::MolProblem problem = build_problem(request);
  const double t_end = request.t_end > 0.0 ? request.t_end
                       : problem.kind == mol::ProblemKind::Example1 ? 10.0 * kPi
                                                                     : 10.0;
  const ThetaScheme scheme(request.theta, request.u, request.m, problem.tau);
  const solver::SolveOptions options{request.keep_states};
  solver::Trajectory traj = problem.linear
                                ? solver::solve_linear(*problem.linear, scheme, t_end, options)
                                : solver::solve_semilinear(*problem.semilinear, scheme, t_end, options);
  return {std::move(problem), std::move(traj), t_end};
}

std::string summary_json(const SolveResult& result) {
  using json = nlohmann::ordered_json;
  const auto& traj = result.trajectory;
  json doc;
  doc["problem"] = mol::to_string(result.problem.kind);
  doc["unknowns"] = result.problem.unknowns();
  doc["scheme"] = {{"theta", traj.scheme.theta()}, {"u", traj.scheme.u()}, {"m", traj.scheme.m()},
                   {"tau", traj.scheme.tau()}, {"h", traj.h()}};
  doc["steps"] = traj.steps();
  doc["t_final"] = traj.times.back();
  doc["initial_norm"] = traj.norms.front();
  doc["final_norm"] = traj.norms.back();
  doc["max_abs_max"] = *std::max_element(traj.max_abs.begin(), traj.max_abs.end());
  doc["max_norm_le_1"] = std::all_of(traj.max_abs.begin(), traj.max_abs.end(),
                                     [](double v) { return v <= 1.0; });
  doc["diverged"] = traj.diverged;
  if (result.problem.exact && !traj.diverged) {
    json errors = json::array();
    for (int c = 0; c < result.problem.components; ++c) {
      errors.push_back(mol::discrete_error(traj, result.problem, traj.times.back(), c));
    }
    doc["errors"] = errors;
  }
  return doc.dump(2) + "\n";
}

bool ReproduceOutcome::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const Comparison& c) { return c.passed; });
}

std::string ReproduceOutcome::table() const {
  std::size_t wt = 6, wi = 4, we = 8, wg = 3;
  for (const auto& c : rows) {
    wt = std::max(wt, c.target.size());
    wi = std::max(wi, c.item.size());
    we = std::max(we, c.expected.size());
    wg = std::max(wg, c.got.size());
  }
  std::ostringstream out;
  auto line = [&](const std::string& t, const std::string& i, const std::string& e,
                  const std::string& g, const std::string& s) {
    out << std::left << std::setw(static_cast<int>(wt)) << t << "  " << std::setw(static_cast<int>(wi))
        << i << "  " << std::setw(static_cast<int>(we)) << e << "  " << std::setw(static_cast<int>(wg))
        << g << "  " << s << '\n';
  };
  line("target", "item", "expected", "got", "status");
  for (const auto& c : rows) line(c.target, c.item, c.expected, c.got, c.passed ? "PASS" : "FAIL");
  out << (passed() ? "all comparisons passed\n" : "MISMATCH\n");
  return out.str();
}

CMatrix example31_a() {
  CMatrix a(3, 3);
  a << 29, -7, 1, 3, 27, -7, 3, 9, 11;
  return a;
}

CMatrix example31_b() {
  CMatrix b(3, 3);
  b << -30, -27, 33, -3, -96, 75, -3, -111, 90;
  return b;
}

namespace {

void write_if(const std::string& out_dir, const std::string& name, const std::string& text) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  io::write_text((std::filesystem::path(out_dir) / name).string(), text);
}

void within(ReproduceOutcome& out, const std::string& target, const std::string& item,
            double expected, double got, double rel_tol) {
  const bool ok = std::abs(got - expected) <= rel_tol * std::abs(expected);
  out.rows.push_back({target, item, fixed(expected) + " +-" + fixed(100.0 * rel_tol, 3) + "%",
                      fixed(got), ok});
}

void claim(ReproduceOutcome& out, const std::string& target, const std::string& item,
           const std::string& expected, const std::string& got, bool ok) {
  out.rows.push_back({target, item, expected, got, ok});
}

void reproduce_table1(ReproduceOutcome& out, bool full, const std::string& out_dir) {
  struct Row {
    int m;
    double v1, v2;
  };
  std::vector<Row> rows{{5, 0.018354, 0.196042},
                        {25, 0.006456, 0.055879},
                        {50, 0.003399, 0.029162},
                        {100, 0.001697, 0.014763}};
  if (full) rows.push_back({1000, 0.000416, 0.001122});

  std::ostringstream csv;
  csv << "m,h,error_v1,error_v2\n";
  for (const Row& row : rows) {
    SolveRequest req;
    req.m = row.m;
    const SolveResult res = solve_builtin(req);
    const double t = 10.0 * kPi;
    const double e1 = mol::discrete_error(res.trajectory, res.problem, t, 0);
    const double e2 = mol::discrete_error(res.trajectory, res.problem, t, 1);
    within(out, "table1", "m=" + std::to_string(row.m) + " v1", row.v1, e1, 0.05);
    within(out, "table1", "m=" + std::to_string(row.m) + " v2", row.v2, e2, 0.05);
    csv << row.m << ',' << io::format_double(res.trajectory.h()) << ',' << io::format_double(e1)
        << ',' << io::format_double(e2) << '\n';
  }
  write_if(out_dir, "table1.csv", csv.str());
}

void reproduce_example31(ReproduceOutcome& out, const std::string& out_dir) {
  const CMatrix a = example31_a(), b = example31_b();
  const std::vector<std::pair<double, double>> expected{{26, -27}, {23, -24}, {18, 15}};
  const auto pairs = stability::simultaneous_pairs(a, b);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const double dl = std::abs(pairs[i].lambda - Complex(expected[i].first));
    const double dg = std::abs(pairs[i].gamma - Complex(expected[i].second));
    claim(out, "example31", "pair " + std::to_string(i + 1),
          "(" + fixed(expected[i].first) + ", " + fixed(expected[i].second) + ") +-1e-8",
          "(" + fixed(pairs[i].lambda.real(), 12) + ", " + fixed(pairs[i].gamma.real(), 12) + ")",
          dl <= 1e-8 && dg <= 1e-8);
  }

  const ThetaScheme coarse(1.0, 0.0, 2, 1.0);
  const StabilityReport r2 = check_system(a, b, coarse);
  claim(out, "example31", "m=2 verdict", "stable", stability::to_string(r2.verdict),
        is_stable(r2.verdict));
  const double rho2 = stability::oracle_stability(a, b, coarse).rho;
  claim(out, "example31", "m=2 rho(W)", "< 1", fixed(rho2, 9), rho2 < 1.0);

  const ThetaScheme fine(1.0, 0.0, 50, 1.0);
  const double rho50 = stability::oracle_stability(a, b, fine).rho;
  claim(out, "example31", "m=50 rho(W)", ">= 1", fixed(rho50, 9), rho50 >= 1.0);
  const double y2 = -pairs[1].lambda.real() * fine.h();
  const stability::Membership mem = stability::in_dy(pairs[1].mu, y2, fine);
  claim(out, "example31", "m=50 mu2 in D_y2", "outside", "max|root| = " + fixed(1.0 - mem.margin, 9),
        !mem.inside && !mem.marginal);
  const StabilityReport r50 = check_system(a, b, fine);
  claim(out, "example31", "m=50 verdict", "CertifiedUnstable", stability::to_string(r50.verdict),
        r50.verdict == Verdict::CertifiedUnstable);
  write_if(out_dir, "example31_m2.json", io::report_to_json(r2));
  write_if(out_dir, "example31_m50.json", io::report_to_json(r50));
}

void reproduce_example2(ReproduceOutcome& out, const std::string& out_dir) {
  const auto cond = mol::example2_condition(100, 0.5, 3.0);
  claim(out, "example2-condition", "condition at (1/2, 3, 100)", "holds",
        cond.holds ? "holds" : "fails", cond.holds);
  within(out, "example2-condition", "margin", 0.044, cond.margin, 0.05);

  // Numeric cross-check at reduced size: the worst diagonal couplings allowed
  // by the slope bounds, certified through the symmetric transform.
  const int small = 16;
  const auto small_problem = mol::build_example2(small, 0.5, 3.0, 1.0);
  const CMatrix a = small_problem.stability_a();
  const auto n = static_cast<std::size_t>(a.rows());
  std::vector<double> slopes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 1.0;
    slopes[i] = (1.0 - 1e-9) * (cond.slope_low + t * (cond.slope_high - cond.slope_low));
  }
  const ThetaScheme scheme(1.0, 0.0, 10, 1.0);
  const StabilityReport cert =
      stability::unconditional_certificate(a, mol::example2_coupling(slopes), scheme, {1.0});
  claim(out, "example2-condition", "p=1 FOV certificate at M=16", "UnconditionallyStable",
        stability::to_string(cert.verdict), cert.verdict == Verdict::UnconditionallyStable);

  SolveRequest req;
  req.problem = "example2";
  req.grid_m = 30;
  req.tau = 1.0;
  req.m = 10;
  req.t_end = 10.0;
  const SolveResult res = solve_builtin(req);
  const double peak = *std::max_element(res.trajectory.max_abs.begin(), res.trajectory.max_abs.end());
  claim(out, "example2-condition", "M=30 run max-norm", "<= 1 every step", fixed(peak, 9),
        peak <= 1.0 && !res.trajectory.diverged);
  write_if(out_dir, "example2_M30_snapshot.csv", io::snapshot_csv(res.trajectory, res.problem));
}

void reproduce_figures(ReproduceOutcome& out, const std::string& out_dir) {
  for (int m : {2, 5}) {
    const ThetaScheme scheme(1.0, 0.0, m, 1.0);
    const auto region = stability::gamma_y(scheme, -2.0, 721);
    const std::size_t mid = region.samples.size() / 2;
    double asym = 0.0;
    for (std::size_t j = 0; j <= mid; ++j) {
      asym = std::max(asym, std::abs(region.samples[mid + j].mu - std::conj(region.samples[mid - j].mu)));
    }
    const Complex at0 = region.samples[mid].mu;
    claim(out, "figures", "Gamma_-2 m=" + std::to_string(m) + " at alpha=0", "1",
          fixed(at0.real(), 12), std::abs(at0 - 1.0) <= 1e-12);
    claim(out, "figures", "Gamma_-2 m=" + std::to_string(m) + " symmetric", "0", fixed(asym), asym == 0.0);
    write_if(out_dir, "gamma_y-2_m" + std::to_string(m) + ".csv", io::region_csv(region));
  }

  for (double l : {-0.1, 0.1}) {
    const auto problem = mol::build_example1(100, 1.0, 1.0, l, kPi / 2.0);
    const CMatrix t = fov::transformed_matrix(problem.stability_a(), problem.stability_b(), 0.0);
    const auto boundary = fov::fov_boundary(t);
    const std::string tag = l < 0 ? "l=-0.1" : "l=+0.1";
    const double r = l < 0 ? boundary.outer_radius() : boundary.inner_radius();
    claim(out, "figures", "r(A^-1 B) " + tag, l < 0 ? "< 1" : ">= 1", fixed(r, 9),
          l < 0 ? r < 1.0 : r >= 1.0);
    write_if(out_dir, std::string("fov_example1_") + (l < 0 ? "lneg" : "lpos") + ".csv",
             io::fov_csv(boundary));

    SolveRequest req;
    req.l = l;
    req.m = 5;
    const SolveResult res = solve_builtin(req);
    const double first = res.trajectory.norms.front(), last = res.trajectory.norms.back();
    claim(out, "figures", "m=5 run " + tag, l < 0 ? "decays" : "grows",
          fixed(first) + " -> " + fixed(last), l < 0 ? last < first : last > first);
  }
}

}  // namespace

ReproduceOutcome reproduce(const std::string& target, bool full, const std::string& out_dir) {
  if (target != "all" && std::find(kTargets.begin(), kTargets.end(), target) == kTargets.end()) {
    fail(ErrorCode::InvalidArgument, "unknown target '" + target + "'");
  }
  ReproduceOutcome out;
  const bool all = target == "all";
  if (all || target == "table1") reproduce_table1(out, full, out_dir);
  if (all || target == "example31") reproduce_example31(out, out_dir);
  if (all || target == "example2-condition") reproduce_example2(out, out_dir);
  if (all || target == "figures") reproduce_figures(out, out_dir);
  return out;
}

}  // namespace ddestab::driver
