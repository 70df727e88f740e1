#pragma once

// Randomised method-level property checks. Each returns the number of
// individual checks made and how many failed, so callers can report them as
// doctest assertions or as a single acceptance line.

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "ddestab/fov.hpp"
#include "ddestab/stability.hpp"
#include "oracles.hpp"

namespace props {

using ddestab::numerics::CMatrix;
using ddestab::numerics::Complex;
namespace fov = ddestab::fov;
namespace st = ddestab::stability;

struct Tally {
  std::string name;
  long checked = 0;
  long failed = 0;
  std::string first_failure;

  void record(bool ok, const std::string& what = {}) {
    ++checked;
    if (!ok) {
      if (failed == 0) first_failure = what;
      ++failed;
    }
  }
  bool ok() const { return checked > 0 && failed == 0; }
  std::string line() const {
    std::ostringstream os;
    os << name << ": " << (checked - failed) << "/" << checked;
    if (failed > 0) os << " (first failure: " << first_failure << ")";
    return os.str();
  }
};

inline double frob(const CMatrix& m) { return m.norm(); }

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// (a) convexity: random x*Mx inside the circumscribed polygon, and the
// inscribed points in convex position.
inline Tally fov_convexity(unsigned long long seed, int matrices) {
  Tally t{"fov (a) convexity"};
  oracle::Rng rng(seed);
  for (int k = 0; k < matrices; ++k) {
    const CMatrix m = rng.matrix(rng.integer(2, 6));
    const auto b = fov::fov_boundary(m);
    const auto outer = fov::convex_hull(b.outer_vertices());
    const auto inner = fov::convex_hull(b.points);
    const double tol = 1e-7 * (1.0 + frob(m));
    for (int j = 0; j < 500; ++j) {
      const auto x = rng.unit_vector(m.rows());
      const Complex z = x.dot(m * x);
      const double d = fov::signed_distance(outer, z);
      t.record(d <= tol, "x*Mx outside by " + fmt(d));
    }
    for (const Complex& p : b.points) {
      const double d = fov::signed_distance(inner, p);
      t.record(d >= -1e-9 * (1.0 + frob(m)) && d <= 1e-9 * (1.0 + frob(m)),
               "boundary point off its hull by " + fmt(d));
    }
  }
  return t;
}

// (b) spectrum inside F(M).
inline Tally fov_spectrum(unsigned long long seed, int matrices) {
  Tally t{"fov (b) spectrum"};
  oracle::Rng rng(seed);
  for (int k = 0; k < matrices; ++k) {
    const CMatrix m = rng.matrix(rng.integer(1, 8), k % 3 == 0);
    t.record(fov::spectrum_in_fov_check(m), "eigenvalue outside F(M)");
    // Also against eigenvalues computed independently of the library.
    const auto outer = fov::convex_hull(fov::fov_boundary(m).outer_vertices());
    for (const Complex& z : oracle::eigenvalues(m)) {
      t.record(fov::signed_distance(outer, z) <= 1e-7 * (1.0 + frob(m)), "oracle eigenvalue outside");
    }
  }
  return t;
}

// (c) F(A + B) inside F(A) + F(B).
inline Tally fov_subadditivity(unsigned long long seed, int pairs) {
  Tally t{"fov (c) subadditivity"};
  oracle::Rng rng(seed);
  for (int k = 0; k < pairs; ++k) {
    const auto n = rng.integer(2, 6);
    const CMatrix a = rng.matrix(n), b = rng.matrix(n);
    const auto sum = fov::minkowski_sum(fov::convex_hull(fov::fov_boundary(a).outer_vertices()),
                                        fov::convex_hull(fov::fov_boundary(b).outer_vertices()));
    for (const Complex& z : fov::fov_boundary(a + b).points) {
      const double d = fov::signed_distance(sum, z);
      t.record(d <= 1e-7, "F(A+B) point outside by " + fmt(d));
    }
  }
  return t;
}

// (d) F(alpha M) = alpha F(M). alpha's argument is a multiple of the sweep
// step so the angles line up.
inline Tally fov_scaling(unsigned long long seed, int matrices) {
  Tally t{"fov (d) scaling"};
  oracle::Rng rng(seed);
  const std::size_t n = fov::kDefaultAngles;
  for (int k = 0; k < matrices; ++k) {
    const CMatrix m = rng.matrix(rng.integer(2, 6));
    const std::size_t shift = static_cast<std::size_t>(rng.integer(0, static_cast<int>(n) - 1));
    const Complex alpha = std::polar(rng.uniform(0.2, 3.0), 2.0 * std::numbers::pi * shift / n);
    const auto base = fov::fov_boundary(m, n);
    const auto scaled = fov::fov_boundary(alpha * m, n);
    const double tol = 1e-9 * (1.0 + std::abs(alpha) * frob(m));
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t src = (j + shift) % n;
      // Support values are unique; boundary points too unless an edge is flat.
      t.record(std::abs(scaled.support[j] - std::abs(alpha) * base.support[src]) <= tol,
               "support mismatch");
      t.record(std::abs(scaled.points[j] - alpha * base.points[src]) <= 1e-7 * (1.0 + std::abs(alpha) * frob(m)),
               "point mismatch " + fmt(std::abs(scaled.points[j] - alpha * base.points[src])));
    }
  }
  return t;
}

// (f) normal M: hull of the boundary equals the hull of the spectrum.
inline Tally fov_normal(unsigned long long seed, int matrices) {
  Tally t{"fov (f) normal"};
  oracle::Rng rng(seed);
  for (int k = 0; k < matrices; ++k) {
    const auto n = rng.integer(1, 6);
    CMatrix d = CMatrix::Zero(n, n);
    std::vector<Complex> spectrum;
    for (Eigen::Index i = 0; i < n; ++i) {
      d(i, i) = rng.complex_in_disk(2.0);
      spectrum.push_back(d(i, i));
    }
    const CMatrix q = rng.matrix(n).householderQr().householderQ();
    const CMatrix m = q * d * q.adjoint();
    const double dist = fov::hausdorff_distance(fov::convex_hull(fov::fov_boundary(m, 256).points),
                                                fov::convex_hull(spectrum));
    t.record(dist <= 1e-7 * frob(m) + 1e-12, "Hausdorff distance " + fmt(dist));
  }
  return t;
}

// (g) Hermitian M: F(M) is a real segment.
inline Tally fov_hermitian(unsigned long long seed, int matrices) {
  Tally t{"fov (g) hermitian"};
  oracle::Rng rng(seed);
  for (int k = 0; k < matrices; ++k) {
    const CMatrix m = rng.hermitian(rng.integer(1, 8));
    double worst = 0.0;
    for (const Complex& z : fov::fov_boundary(m).points) worst = std::max(worst, std::abs(z.imag()));
    t.record(worst <= 1e-9 * frob(m) + 1e-15, "imaginary part " + fmt(worst));
    const auto ev = oracle::hermitian_eigenvalues(m);
    const auto hull = fov::convex_hull(fov::fov_boundary(m).points);
    double lo = hull.front().real(), hi = lo;
    for (const Complex& z : hull) {
      lo = std::min(lo, z.real());
      hi = std::max(hi, z.real());
    }
    t.record(std::abs(lo - ev.front()) <= 1e-8 * (1.0 + frob(m)) && std::abs(hi - ev.back()) <= 1e-8 * (1.0 + frob(m)),
             "segment endpoints differ from the extreme eigenvalues");
  }
  return t;
}

inline Tally unit_disk(unsigned long long seed) {
  Tally t{"unit-disk inclusion"};
  oracle::Rng rng(seed);
  for (double theta : {0.6, 0.75, 1.0}) {
    for (int m : {1, 2, 5, 10}) {
      const st::ThetaScheme s(theta, 0.0, m, 1.0);
      for (int k = 0; k < 200; ++k) {
        const Complex mu = rng.complex_in_disk(0.98);
        for (double y : {-0.01, -1.0, -100.0, st::kMinusInfinity}) {
          t.record(st::in_dy(mu, y, s).inside, "|mu|<0.98 outside D_y");
        }
        t.record(!st::in_dy(rng.complex_in_annulus(1.02, 4.0), st::kMinusInfinity, s).inside,
                 "|mu|>1.02 inside D_-inf");
      }
    }
  }
  return t;
}

// D_{y1} inside D_{y2} for y1 < y2 < 0, checked on Gamma_{y1} shrunk by
// 0.999. Parts of Gamma_{y1} that bound outer loops rather than D_{y1} itself
// (the shrunk point is not even in D_{y1}) are counted separately in *skipped.
inline Tally monotonicity(std::size_t samples = 400, long* skipped = nullptr) {
  Tally t{"D_y monotonicity"};
  long off_boundary = 0;
  const std::vector<double> ys{-10.0, -2.0, -0.5, -0.05};
  for (int m : {1, 2, 5}) {
    const st::ThetaScheme s(1.0, 0.0, m, 1.0);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const auto region = st::gamma_y(s, ys[i], samples);
      for (std::size_t j = i + 1; j < ys.size(); ++j) {
        for (const auto& sample : region.samples) {
          if (!st::in_dy(0.999 * sample.mu, ys[i], s).inside) {
            ++off_boundary;
            continue;
          }
          t.record(st::in_dy(0.999 * sample.mu, ys[j], s).inside,
                   "m=" + std::to_string(m) + " y1=" + fmt(ys[i]) + " y2=" + fmt(ys[j]) +
                       " alpha=" + fmt(sample.alpha));
        }
      }
    }
  }
  if (skipped) *skipped = off_boundary;
  return t;
}

inline Tally modulus_monotonicity() {
  Tally t{"modulus monotonicity"};
  for (int m : {1, 2, 5, 10}) {
    for (double y : {-50.0, -10.0, -1.0, -0.1, -0.01}) {
      double prev = std::abs(st::gamma_point(0.0, y, 1.0, m));
      for (int k = 1; k <= 200; ++k) {
        const double alpha = std::numbers::pi * k / 200.0;
        const double cur = std::abs(st::gamma_point(alpha, y, 1.0, m));
        t.record(cur > prev, "not increasing at alpha=" + fmt(alpha));
        t.record(std::abs(std::abs(st::gamma_point(-alpha, y, 1.0, m)) - cur) <= 1e-14 * cur, "asymmetric");
        prev = cur;
      }
    }
  }
  return t;
}

// in_dy(b/a, -ha) against rho(W) for random scalar problems.
inline Tally scalar_equivalence(unsigned long long seed, int cases = 200) {
  Tally t{"scalar oracle equivalence"};
  oracle::Rng rng(seed);
  for (int k = 0; k < cases; ++k) {
    const double a = rng.uniform(0.05, 5.0);
    const Complex b = k % 2 == 0 ? Complex(rng.uniform(-2.0 * a, 2.0 * a))
                                 : Complex(rng.uniform(-2.0 * a, 2.0 * a), rng.uniform(-a, a));
    const int m = rng.integer(1, 6);
    const double tau = rng.uniform(0.05, 5.0);
    const st::ThetaScheme s(1.0, 0.0, m, tau);
    const auto w = st::oracle_stability(CMatrix::Constant(1, 1, a), CMatrix::Constant(1, 1, b), s);
    if (std::abs(w.rho - 1.0) <= st::kRootTol) continue;
    const auto mem = st::in_dy(b / a, -s.h() * a, s);
    t.record(mem.inside == w.stable, "a=" + fmt(a) + " b=" + fmt(b.real()) + " m=" + std::to_string(m));
  }
  return t;
}

// Every system either certificate accepts must pass the companion-matrix oracle.
inline Tally certificate_soundness(unsigned long long seed, int systems = 100, int* certified = nullptr) {
  Tally t{"certificate soundness"};
  oracle::Rng rng(seed);
  int count = 0;
  for (int k = 0; k < systems; ++k) {
    const auto n = rng.integer(1, 4);
    const bool hermitian = k % 4 != 3;
    CMatrix a = hermitian ? rng.spd(n, 0.2) : CMatrix(rng.matrix(n) + 3.0 * CMatrix::Identity(n, n));
    const double scale = rng.uniform(0.05, 1.5) * rng.uniform(0.2, 1.0);
    const CMatrix b = scale * a.norm() * rng.matrix(n) / static_cast<double>(n * n);
    const st::ThetaScheme s(rng.uniform() < 0.7 ? 1.0 : rng.uniform(0.55, 1.0), 0.0, rng.integer(1, 6),
                            rng.uniform(0.1, 3.0));
    bool claimed = false;
    try {
      claimed = st::unconditional_certificate(a, b, s, st::kDefaultPGrid, 128).verdict ==
                st::Verdict::UnconditionallyStable;
      if (!claimed && s.theta() == 1.0) {
        claimed = st::step_certificate(a, b, s, st::kDefaultPGrid, 128).verdict == st::Verdict::StableForThisStep;
      }
    } catch (const ddestab::Error&) {
      claimed = false;
    }
    if (!claimed) continue;
    ++count;
    const auto w = st::oracle_stability(a, b, s);
    t.record(w.stable, "certified system has rho(W)=" + fmt(w.rho));
  }
  if (certified) *certified = count;
  return t;
}

}  // namespace props
