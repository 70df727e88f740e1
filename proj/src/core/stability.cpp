#include "ddestab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ddestab/parallel.hpp"

namespace ddestab::stability {

using numerics::CVector;

namespace {

void require_pair(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.rows() < 1 || a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    fail(ErrorCode::InvalidArgument,
         std::string(op) + ": A and B must be square matrices of equal size");
  }
  if (!a.allFinite() || !b.allFinite()) {
    fail(ErrorCode::InvalidArgument, std::string(op) + ": non-finite entries");
  }
}

bool hermitian_positive_definite(const CMatrix& a) {
  if (!numerics::is_hermitian(a)) return false;
  const auto eig = numerics::hermitian_eigen(a);
  return eig.values.front().real() > numerics::kPositiveDefiniteTol * numerics::scale_norm(a);
}

double largest_eigenvalue(const CMatrix& hermitian) {
  return numerics::hermitian_eigen(hermitian).values.back().real();
}

Evidence make_evidence(Check check, bool passed, double margin, std::string note = {}) {
  Evidence e;
  e.check = check;
  e.passed = passed;
  e.margin = margin;
  e.note = std::move(note);
  return e;
}

StabilityReport out_of_scope(const ThetaScheme& scheme, std::string note) {
  StabilityReport report{Verdict::Uncertified, {}, scheme, {}};
  report.evidence.push_back(make_evidence(Check::SchemeOutOfScope, false,
                                          std::numeric_limits<double>::quiet_NaN(),
                                          std::move(note)));
  return report;
}

// Candidate points covering the circumscribed polygon's boundary: its
// vertices plus interior points of every edge.
std::vector<Complex> polygon_probe_points(const fov::FovBoundary& boundary) {
  constexpr int kPerEdge = 4;
  const std::vector<Complex> vertices = boundary.outer_vertices();
  std::vector<Complex> out;
  out.reserve(vertices.size() * kPerEdge);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const Complex a = vertices[k];
    const Complex b = vertices[(k + 1) % vertices.size()];
    for (int s = 0; s < kPerEdge; ++s) {
      out.push_back(a + (b - a) * (static_cast<double>(s) / kPerEdge));
    }
  }
  return out;
}

// Smallest membership margin over points, or -inf when one is outside.
double worst_membership_margin(const std::vector<Complex>& points, double y,
                               const ThetaScheme& scheme) {
  std::vector<double> margins(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const Membership mem = in_dy(points[i], y, scheme);
    margins[i] = mem.inside ? mem.margin : -std::numeric_limits<double>::infinity();
  });
  return margins.empty() ? 1.0 : *std::min_element(margins.begin(), margins.end());
}

}  // namespace

ThetaScheme::ThetaScheme(double theta, double u, int m, double tau)
    : theta_(theta), u_(u), m_(m), tau_(tau) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "theta must lie in [0, 1]");
  }
  if (!(u >= 0.0 && u < 1.0)) fail(ErrorCode::InvalidArgument, "u must lie in [0, 1)");
  if (m < 1) fail(ErrorCode::InvalidArgument, "m must be a positive integer");
  if (u > 0.0 && m < 3) fail(ErrorCode::InvalidArgument, "m >= 3 is required when u > 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    fail(ErrorCode::InvalidArgument, "tau must be positive and finite");
  }
}

StabilityPolynomial stability_polynomial(Complex mu, double y, const ThetaScheme& scheme) {
  if (!(y < 0.0)) fail(ErrorCode::InvalidArgument, "y must be negative (or -infinity)");
  const auto m = static_cast<std::size_t>(scheme.m());
  const double th = scheme.theta();
  const double u = scheme.u();

  std::vector<Complex> a(m + 2, 0.0), b(m + 2, 0.0), c(m + 2, 0.0);
  a[m + 1] += 1.0;
  a[m] -= 1.0;
  b[2] += th * u;
  b[1] += th * (1.0 - u) + (1.0 - th) * u;
  b[0] += (1.0 - th) * (1.0 - u);
  c[m + 1] += th;
  c[m] += 1.0 - th;

  StabilityPolynomial poly;
  poly.y = y;
  poly.mu = mu;
  poly.coefficients.resize(m + 2);
  if (std::isinf(y)) {
    for (std::size_t k = 0; k < m + 2; ++k) poly.coefficients[k] = c[k] - mu * b[k];
  } else {
    for (std::size_t k = 0; k < m + 2; ++k) {
      poly.coefficients[k] = a[k] - y * c[k] + y * mu * b[k];
    }
  }
  return poly;
}

Membership in_dy(Complex mu, double y, const ThetaScheme& scheme) {
  const StabilityPolynomial poly = stability_polynomial(mu, y, scheme);
  const std::vector<Complex> roots = numerics::poly_roots(poly.coefficients);
  Membership out;
  double worst = 0.0;
  for (const Complex& r : roots) {
    if (std::abs(r) >= worst) {
      worst = std::abs(r);
      out.worst_root = r;
    }
  }
  out.margin = 1.0 - worst;
  out.inside = worst < 1.0 - kRootTol;
  out.marginal = std::abs(worst - 1.0) <= kRootTol;
  return out;
}

Complex gamma_point(double alpha, double y, double theta, int m) {
  const Complex e = std::polar(1.0, alpha);
  const Complex blend = (1.0 - theta) + e * theta;
  return std::polar(1.0, static_cast<double>(m) * alpha) * (1.0 - e + y * blend) / (y * blend);
}

RegionBoundary gamma_y(const ThetaScheme& scheme, double y, std::size_t n_samples) {
  if (scheme.u() != 0.0) {
    fail(ErrorCode::UnsupportedScheme, "gamma_y: the boundary curve is only parametrised for u = 0");
  }
  if (!(y < 0.0) || std::isinf(y)) fail(ErrorCode::InvalidArgument, "gamma_y: y must be finite and negative");
  if (n_samples < 16) fail(ErrorCode::InvalidArgument, "gamma_y: need at least 16 samples");

  const std::size_t half = n_samples / 2;
  RegionBoundary out;
  out.y = y;
  out.theta = scheme.theta();
  out.u = scheme.u();
  out.m = scheme.m();
  out.samples.resize(2 * half + 1);

  for (std::size_t j = 0; j <= half; ++j) {
    const double alpha = std::numbers::pi * static_cast<double>(j) / static_cast<double>(half);
    const Complex mu = gamma_point(alpha, y, scheme.theta(), scheme.m());
    out.samples[half + j] = {alpha, mu};
    out.samples[half - j] = {-alpha, std::conj(mu)};
  }
  return out;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::UnconditionallyStable: return "UnconditionallyStable";
    case Verdict::StableForThisStep: return "StableForThisStep";
    case Verdict::Uncertified: return "Uncertified";
    case Verdict::CertifiedUnstable: return "CertifiedUnstable";
  }
  return "Uncertified";
}

const char* to_string(Check c) noexcept {
  switch (c) {
    case Check::UnconditionalFov: return "unconditional-fov";
    case Check::UnconditionalPairs: return "unconditional-pairs";
    case Check::StepFov: return "step-fov";
    case Check::StepPairs: return "step-pairs";
    case Check::PairMembership: return "pair-membership";
    case Check::UnstablePair: return "unstable-pair";
    case Check::SpectralObstruction: return "spectral-obstruction";
    case Check::SchemeOutOfScope: return "scheme-out-of-scope";
    case Check::NotApplicable: return "not-applicable";
    case Check::Oracle: return "oracle";
    case Check::InThout: return "inthout";
  }
  return "unknown";
}

bool is_unconditional_check(Check c) noexcept {
  return c == Check::UnconditionalFov || c == Check::UnconditionalPairs;
}

StabilityReport unconditional_certificate(const CMatrix& a, const CMatrix& b,
                                          const ThetaScheme& scheme,
                                          const std::vector<double>& p_grid,
                                          std::size_t n_angles) {
  require_pair(a, b, "unconditional_certificate");
  if (scheme.u() != 0.0 || !(scheme.theta() > 0.5)) {
    return out_of_scope(scheme,
                        "unconditional certificate needs u = 0 and theta > 1/2; "
                        "otherwise the unconditional region is empty");
  }

  StabilityReport report{Verdict::Uncertified, {}, scheme, {}};

  // Every A^{p/2-1} B A^{-p/2} is similar to A^{-1} B, so one spectrum decides
  // whether any p can work.
  const double rho = numerics::spectral_radius(numerics::solver_for(a).solve(b));
  if (rho >= 1.0) {
    report.evidence.push_back(make_evidence(
        Check::SpectralObstruction, false, 1.0 - rho,
        "rho(A^-1 B) >= 1: no field of values of the transformed matrices fits in the unit disk"));
    return report;
  }

  const bool hpd = hermitian_positive_definite(a);
  for (double p : p_grid) {
    if (!hpd && p != 0.0 && p != 2.0) {
      Evidence e = make_evidence(Check::NotApplicable, false,
                                 std::numeric_limits<double>::quiet_NaN(),
                                 "fractional powers need Hermitian positive definite A");
      e.p = p;
      report.evidence.push_back(std::move(e));
      continue;
    }
    const CMatrix t = fov::transformed_matrix(a, b, p);
    const double radius = fov::numerical_radius_bound(t, n_angles);
    const double margin = 1.0 - fov::containment_margin(t) - radius;
    Evidence e = make_evidence(Check::UnconditionalFov, margin > 0.0, margin,
                               "numerical radius bound " + std::to_string(radius));
    e.p = p;
    report.evidence.push_back(std::move(e));
    if (margin > 0.0) {
      report.verdict = Verdict::UnconditionallyStable;
      break;
    }
  }
  return report;
}

StabilityReport step_certificate(const CMatrix& a, const CMatrix& b, const ThetaScheme& scheme,
                                 const std::vector<double>& p_grid, std::size_t n_angles) {
  require_pair(a, b, "step_certificate");
  if (scheme.u() != 0.0 || scheme.theta() != 1.0) {
    return out_of_scope(scheme, "step certificate needs theta = 1 and u = 0");
  }
  StabilityReport report{Verdict::Uncertified, {}, scheme, {}};

  if (hermitian_positive_definite(a)) {
    const double y_worst = -scheme.h() * largest_eigenvalue(a);
    for (double p : p_grid) {
      const CMatrix t = fov::transformed_matrix(a, b, p);
      const fov::FovBoundary boundary = fov::fov_boundary(t, n_angles);
      const double eps = fov::containment_margin(t);
      const double worst = worst_membership_margin(polygon_probe_points(boundary), y_worst, scheme);
      const bool ok = worst >= eps;
      Evidence e = make_evidence(Check::StepFov, ok, worst,
                                 "y_j = " + std::to_string(y_worst));
      e.p = p;
      report.evidence.push_back(std::move(e));
      if (ok) {
        report.verdict = Verdict::StableForThisStep;
        break;
      }
    }
    return report;
  }

  std::vector<ModePair> pairs;
  try {
    pairs = simultaneous_pairs(a, b);
  } catch (const Error& err) {
    report.evidence.push_back(make_evidence(Check::NotApplicable, false,
                                            std::numeric_limits<double>::quiet_NaN(),
                                            std::string("step certificate: ") + err.what()));
    return report;
  }
  const double y_worst = -scheme.h() * pairs.front().lambda.real();
  double worst = 1.0;
  std::size_t worst_index = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Membership mem = in_dy(pairs[i].mu, y_worst, scheme);
    const double margin = mem.inside ? mem.margin : -std::abs(mem.margin);
    if (margin < worst) {
      worst = margin;
      worst_index = i;
    }
  }
  const bool ok = worst > kRootTol;
  Evidence e = make_evidence(Check::StepPairs, ok, worst, "y_j = " + std::to_string(y_worst));
  e.index = worst_index;
  report.evidence.push_back(std::move(e));
  if (ok) report.verdict = Verdict::StableForThisStep;
  return report;
}

std::vector<ModePair> simultaneous_pairs(const CMatrix& a, const CMatrix& b) {
  require_pair(a, b, "simultaneous_pairs");
  const double a_scale = std::max(numerics::scale_norm(a), 1e-300);
  numerics::EigenDecomposition eig = numerics::general_eigen(a);
  for (const Complex& l : eig.values) {
    if (std::abs(l.imag()) > 1e-8 * a_scale || !(l.real() > 0.0)) {
      fail(ErrorCode::ComplexSpectrum, "eigenvalues of A must be real and positive");
    }
  }

  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return eig.values[static_cast<std::size_t>(i)].real() > eig.values[static_cast<std::size_t>(j)].real();
  });
  CMatrix v(n, n);
  std::vector<double> lambdas(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    v.col(k) = eig.vectors.col(order[static_cast<std::size_t>(k)]);
    lambdas[static_cast<std::size_t>(k)] = eig.values[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])].real();
  }

  auto project = [&](const CMatrix& basis) {
    try {
      return CMatrix(numerics::solver_for(basis).solve(CMatrix(b * basis)));
    } catch (const Error&) {
      fail(ErrorCode::NotSimultaneouslyDiagonalizable, "A is not diagonalisable");
    }
  };

  // Repeated eigenvalues of A leave the basis inside each eigenspace free;
  // pick it so that it diagonalises the compressed B.
  CMatrix c = project(v);
  for (Eigen::Index start = 0; start < n;) {
    Eigen::Index end = start + 1;
    while (end < n && std::abs(lambdas[static_cast<std::size_t>(end)] -
                               lambdas[static_cast<std::size_t>(start)]) <= 1e-8 * a_scale) {
      ++end;
    }
    const Eigen::Index len = end - start;
    if (len > 1) {
      const numerics::EigenDecomposition inner =
          numerics::general_eigen(c.block(start, start, len, len));
      v.middleCols(start, len) = v.middleCols(start, len) * inner.vectors;
    }
    start = end;
  }
  c = project(v);

  const double c_scale = std::max(c.cwiseAbs().maxCoeff(), 1e-300);
  CMatrix off = c;
  off.diagonal().setZero();
  if (off.size() > 0 && off.cwiseAbs().maxCoeff() > 1e-8 * c_scale) {
    fail(ErrorCode::NotSimultaneouslyDiagonalizable,
         "eigenvectors of A do not diagonalise B");
  }

  std::vector<ModePair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex lambda = lambdas[static_cast<std::size_t>(k)];
    const Complex gamma = c(k, k);
    pairs.push_back({lambda, gamma, gamma / lambda});
  }
  return pairs;
}

StabilityReport simdiag_analysis(const CMatrix& a, const CMatrix& b, const ThetaScheme& scheme) {
  const std::vector<ModePair> pairs = simultaneous_pairs(a, b);
  StabilityReport report{Verdict::Uncertified, {}, scheme, {}};
  const bool implicit_euler = scheme.u() == 0.0 && scheme.theta() == 1.0;

  if (implicit_euler) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (pairs[i].mu.real() >= 1.0) {
        Evidence e = make_evidence(Check::UnstablePair, true, pairs[i].mu.real() - 1.0,
                                   "Re(mu_i) >= 1: unstable for every step size");
        e.index = i;
        report.evidence.push_back(std::move(e));
        report.verdict = Verdict::CertifiedUnstable;
        return report;
      }
    }
  }

  double max_mu = 0.0;
  std::size_t max_index = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (std::abs(pairs[i].mu) >= max_mu) {
      max_mu = std::abs(pairs[i].mu);
      max_index = i;
    }
  }
  if (scheme.u() == 0.0 && scheme.theta() > 0.5 && max_mu < 1.0 - kRootTol) {
    Evidence e = make_evidence(Check::UnconditionalPairs, true, 1.0 - max_mu, "max |mu_i| < 1");
    e.index = max_index;
    report.evidence.push_back(std::move(e));
    report.verdict = Verdict::UnconditionallyStable;
    return report;
  }

  bool all_inside = true;
  std::optional<std::size_t> witness;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double y = -pairs[i].lambda.real() * scheme.h();
    const Membership mem = in_dy(pairs[i].mu, y, scheme);
    Evidence e = make_evidence(Check::PairMembership, mem.inside, mem.margin,
                               "mu = (" + std::to_string(pairs[i].mu.real()) + ", " +
                                   std::to_string(pairs[i].mu.imag()) + "), y = " +
                                   std::to_string(y));
    e.index = i;
    report.evidence.push_back(std::move(e));
    all_inside = all_inside && mem.inside;
    // A root of a mode polynomial is an eigenvalue of W.
    if (!witness && mem.margin <= -kRootTol) witness = i;
  }
  if (witness) {
    report.verdict = Verdict::CertifiedUnstable;
  } else if (all_inside) {
    report.verdict = Verdict::StableForThisStep;
  }
  return report;
}

CMatrix build_w(const CMatrix& a, const CMatrix& b, const ThetaScheme& scheme) {
  require_pair(a, b, "build_w");
  const Eigen::Index n = a.rows();
  const int m = scheme.m();
  const Eigen::Index dim = (m + 1) * n;
  const double h = scheme.h();
  const double th = scheme.theta();
  const double u = scheme.u();
  const CMatrix id = CMatrix::Identity(n, n);

  CMatrix top = CMatrix::Zero(n, dim);
  auto add = [&](int block, const CMatrix& value) {
    if (block < 0) return;
    top.middleCols(block * n, n) += value;
  };
  add(0, id - (1.0 - th) * h * a);
  if (th * u != 0.0) add(m - 2, h * th * u * b);
  add(m - 1, h * (th * (1.0 - u) + (1.0 - th) * u) * b);
  add(m, h * (1.0 - th) * (1.0 - u) * b);

  CMatrix w = CMatrix::Zero(dim, dim);
  w.topRows(n) = numerics::solver_for(id + th * h * a).solve(top);
  for (int k = 1; k <= m; ++k) w.block(k * n, (k - 1) * n, n, n) = id;
  return w;
}

OracleResult oracle_stability(const CMatrix& a, const CMatrix& b, const ThetaScheme& scheme) {
  OracleResult out;
  out.rho = numerics::spectral_radius(build_w(a, b, scheme));
  out.stable = out.rho < 1.0 - kRootTol;
  out.unstable = out.rho >= 1.0 + kRootTol;
  return out;
}

InThoutResult inthout_condition(const CMatrix& a, const CMatrix& b, double omega_max,
                                std::size_t n_omega) {
  require_pair(a, b, "inthout_condition");
  if (n_omega < 3) fail(ErrorCode::InvalidArgument, "inthout_condition: need at least 3 samples");

  InThoutResult out;
  const std::vector<Complex> spectrum = numerics::general_eigenvalues(a);
  out.hurwitz = std::all_of(spectrum.begin(), spectrum.end(),
                            [](Complex l) { return l.real() < 0.0; });
  double smallest = std::numeric_limits<double>::infinity();
  for (const Complex& l : spectrum) smallest = std::min(smallest, std::abs(l));
  if (smallest == 0.0) fail(ErrorCode::Singular, "inthout_condition: A is singular");

  for (const Complex& l : numerics::general_eigenvalues(numerics::solver_for(a).solve(b))) {
    if (std::abs(l + 1.0) <= 1e-9) out.minus_one_in_spectrum = true;
  }

  const double a_norm = a.norm();
  const double b_norm = b.norm();
  out.omega_max = omega_max > 0.0 ? omega_max : 1e4 * numerics::scale_norm(a);
  const double omega_min = std::min(1e-3 * smallest, 1e-3 * out.omega_max);

  const std::size_t positive = (n_omega - 1) / 2;
  std::vector<double> omegas{0.0};
  for (std::size_t k = 0; k < positive; ++k) {
    const double frac = positive == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(positive - 1);
    const double w = omega_min * std::pow(out.omega_max / omega_min, frac);
    omegas.push_back(w);
    omegas.push_back(-w);
  }

  std::vector<double> rhos(omegas.size());
  const CMatrix id = CMatrix::Identity(a.rows(), a.cols());
  parallel_for(omegas.size(), [&](std::size_t k) {
    const Complex xi(0.0, omegas[k]);
    try {
      rhos[k] = numerics::spectral_radius(numerics::solver_for(xi * id - a).solve(b));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::Singular) throw;
      fail(ErrorCode::Singular, "inthout_condition: xi I - A singular at omega = " +
                                    std::to_string(omegas[k]));
    }
  });
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    if (rhos[k] > out.sup_rho) {
      out.sup_rho = rhos[k];
      out.omega_at_sup = omegas[k];
    }
  }

  out.tail_bound = out.omega_max > a_norm ? b_norm / (out.omega_max - a_norm)
                                          : std::numeric_limits<double>::infinity();
  out.satisfied = out.hurwitz && !out.minus_one_in_spectrum && out.sup_rho < 1.0 &&
                  out.tail_bound < 1.0;
  return out;
}

}  // namespace ddestab::stability
