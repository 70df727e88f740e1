#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ddestab/fov.hpp"
#include "ddestab/numerics.hpp"

namespace ddestab::stability {

using numerics::CMatrix;
using numerics::Complex;

/// Roots with 1 - kRootTol <= |xi| <= 1 + kRootTol are marginal: never a
/// stability claim, never an instability witness.
inline constexpr double kRootTol = 1e-9;

/// Marker for the y = -infinity region D_{-inf}.
inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

/// theta-method parameters on a constant delay tau = (m - u) h.
class ThetaScheme {
 public:
  /// Throws InvalidArgument unless theta in [0,1], u in [0,1), m >= 1,
  /// tau > 0, and m >= 3 whenever u > 0.
  ThetaScheme(double theta, double u, int m, double tau);

  double theta() const noexcept { return theta_; }
  double u() const noexcept { return u_; }
  int m() const noexcept { return m_; }
  double tau() const noexcept { return tau_; }
  double h() const noexcept { return tau_ / (static_cast<double>(m_) - u_); }

 private:
  double theta_;
  double u_;
  int m_;
  double tau_;
};

/// P(z) = a(z) - y c(z) + y mu b(z), coefficients constant term first, with
///   a(z) = z^{m+1} - z^m
///   b(z) = theta (u z^2 + (1-u) z) + (1-theta)(u z + (1-u))
///   c(z) = theta z^{m+1} + (1-theta) z^m.
/// For y = kMinusInfinity the reduced polynomial c(z) - mu b(z) is used.
struct StabilityPolynomial {
  std::vector<Complex> coefficients;
  double y = 0.0;
  Complex mu;
};

StabilityPolynomial stability_polynomial(Complex mu, double y, const ThetaScheme& scheme);

struct Membership {
  bool inside = false;    // every root has |xi| < 1 - kRootTol
  bool marginal = false;  // largest root within kRootTol of the unit circle
  double margin = 0.0;    // 1 - max |xi|
  Complex worst_root;
};

/// mu in D_y, decided by counting roots of the stability polynomial.
Membership in_dy(Complex mu, double y, const ThetaScheme& scheme);

/// mu(alpha, y): the point of Gamma_y traced by xi = e^{i alpha} (u = 0).
Complex gamma_point(double alpha, double y, double theta, int m);

struct RegionSample {
  double alpha;
  Complex mu;
};

struct RegionBoundary {
  double y = 0.0;
  double theta = 0.0;
  double u = 0.0;
  int m = 0;
  std::vector<RegionSample> samples;  // alpha ascending over [-pi, pi]
};

/// Samples Gamma_y on a grid symmetric about alpha = 0 that contains 0 and
/// +-pi; an even n_samples is rounded up to the next odd count. Negative-alpha
/// samples are exact conjugates of their mirrors. Requires u = 0, y < 0,
/// n_samples >= 16.
RegionBoundary gamma_y(const ThetaScheme& scheme, double y, std::size_t n_samples);

enum class Verdict { UnconditionallyStable, StableForThisStep, Uncertified, CertifiedUnstable };

const char* to_string(Verdict v) noexcept;

enum class Check {
  UnconditionalFov,     // F(A^{p/2-1} B A^{-p/2}) inside the unit disk
  UnconditionalPairs,   // every |mu_i| < 1 for simultaneously diagonalisable A, B
  StepFov,              // F(A^{p/2-1} B A^{-p/2}) inside D_{y_j}, y_j = -h lambda_max
  StepPairs,            // every mu_i inside D_{y_j}
  PairMembership,       // mu_i inside D_{y_i}
  UnstablePair,         // Re(mu_i) >= 1 with theta = 1, u = 0
  SpectralObstruction,  // rho(A^{-1}B) >= 1: no p can succeed
  SchemeOutOfScope,
  NotApplicable,
  Oracle,               // rho(W) of the companion matrix
  InThout,
};

const char* to_string(Check c) noexcept;

/// True for the checks that establish unconditional stability.
bool is_unconditional_check(Check c) noexcept;

struct Evidence {
  Check check;
  bool passed = false;
  std::optional<double> p;
  std::optional<std::size_t> index;
  double margin = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

struct StabilityReport {
  Verdict verdict = Verdict::Uncertified;
  std::vector<Evidence> evidence;
  ThetaScheme scheme;
  std::optional<std::string> failing_check;
};

inline const std::vector<double> kDefaultPGrid{0.0, 1.0, 2.0};

/// Sufficient test for unconditional stability (u = 0, theta > 1/2): some p
/// with the numerical radius of A^{p/2-1} B A^{-p/2} below 1 - eps_fov. The
/// circumscribed FOV polygon is used, so sweep discretisation can only make
/// the test more conservative.
StabilityReport unconditional_certificate(const CMatrix& a, const CMatrix& b,
                                          const ThetaScheme& scheme,
                                          const std::vector<double>& p_grid = kDefaultPGrid,
                                          std::size_t n_angles = fov::kDefaultAngles);

/// Step-size dependent test for theta = 1, u = 0: the transformed FOV inside
/// D_{y_j} with y_j = -h lambda_max(A). Because D_{y1} is contained in D_{y2}
/// for y1 < y2 < 0, the single worst y_j covers every y in -h F(A). Hermitian
/// positive definite A uses the FOV route; otherwise the eigen-pair route is
/// tried.
StabilityReport step_certificate(const CMatrix& a, const CMatrix& b, const ThetaScheme& scheme,
                                 const std::vector<double>& p_grid = kDefaultPGrid,
                                 std::size_t n_angles = fov::kDefaultAngles);

struct ModePair {
  Complex lambda;  // eigenvalue of A
  Complex gamma;   // eigenvalue of B on the same eigenvector
  Complex mu;      // gamma / lambda
};

/// Eigen-pairs of simultaneously diagonalisable A, B, ordered by descending
/// lambda. Throws ComplexSpectrum unless A has real positive eigenvalues and
/// NotSimultaneouslyDiagonalizable when A's eigenvectors do not diagonalise B.
std::vector<ModePair> simultaneous_pairs(const CMatrix& a, const CMatrix& b);

StabilityReport simdiag_analysis(const CMatrix& a, const CMatrix& b, const ThetaScheme& scheme);

/// One-step matrix of the theta-method on y' = -Ay + By(t - tau) acting on
/// Y_n = (y_n, y_{n-1}, ..., y_{n-m}); size (m+1)N.
CMatrix build_w(const CMatrix& a, const CMatrix& b, const ThetaScheme& scheme);

struct OracleResult {
  bool stable = false;    // rho < 1 - kRootTol
  bool unstable = false;  // rho >= 1 + kRootTol
  double rho = 0.0;
};

OracleResult oracle_stability(const CMatrix& a, const CMatrix& b, const ThetaScheme& scheme);

struct InThoutResult {
  bool satisfied = false;
  bool hurwitz = false;           // sigma(A) in the open left half-plane
  bool minus_one_in_spectrum = false;
  double sup_rho = 0.0;           // max over sampled xi = i omega
  double omega_at_sup = 0.0;
  double tail_bound = 0.0;        // |B|_F / (omega_max - |A|_F)
  double omega_max = 0.0;
};

/// Sampled check of sup_{Re xi = 0} rho((xi I - A)^{-1} B) < 1 and
/// -1 not in sigma(A^{-1} B). A is the Hurwitz matrix of y' = Ay + By(t - tau)
/// (the negation of the positive definite factor). A heuristic: a finite grid
/// of omega plus an analytic tail bound, not a proof. omega_max <= 0 selects
/// 1e4 * |A|.
InThoutResult inthout_condition(const CMatrix& a, const CMatrix& b, double omega_max = 0.0,
                                std::size_t n_omega = 401);

}  // namespace ddestab::stability
