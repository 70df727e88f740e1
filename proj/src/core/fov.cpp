#include "ddestab/fov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ddestab/parallel.hpp"

namespace ddestab::fov {

namespace {

double cross(Complex o, Complex a, Complex b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) -
         (a.imag() - o.imag()) * (b.real() - o.real());
}

double segment_distance(Complex z, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  double t = ((z - a) * std::conj(ab)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

}  // namespace

std::vector<Complex> FovBoundary::outer_vertices() const {
  const std::size_t n = angles.size();
  std::vector<Complex> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = (k + 1) % n;
    const double c1 = std::cos(angles[k]), s1 = std::sin(angles[k]);
    const double c2 = std::cos(angles[j]), s2 = std::sin(angles[j]);
    const double det = s1 * c2 - c1 * s2;
    const double x = (s1 * support[j] - s2 * support[k]) / det;
    const double y = (c1 * support[j] - c2 * support[k]) / det;
    out.emplace_back(x, y);
  }
  return out;
}

double FovBoundary::inner_radius() const {
  double r = 0.0;
  for (const Complex& z : points) r = std::max(r, std::abs(z));
  return r;
}

double FovBoundary::outer_radius() const {
  double r = 0.0;
  for (const Complex& z : outer_vertices()) r = std::max(r, std::abs(z));
  return r;
}

FovBoundary fov_boundary(const CMatrix& m, std::size_t n_angles) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    fail(ErrorCode::InvalidArgument, "fov_boundary: matrix must be square");
  }
  if (n_angles < kMinAngles) {
    fail(ErrorCode::InvalidArgument, "fov_boundary: need at least 8 sweep angles");
  }
  if (!m.allFinite()) fail(ErrorCode::InvalidArgument, "fov_boundary: non-finite entries");

  FovBoundary out;
  out.source_dim = static_cast<std::size_t>(m.rows());
  out.angles.resize(n_angles);
  out.points.resize(n_angles);
  out.support.resize(n_angles);

  const CMatrix adj = m.adjoint();
  parallel_for(n_angles, [&](std::size_t k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) /
                       static_cast<double>(n_angles);
    const Complex rot = std::polar(1.0, phi);
    CMatrix h = 0.5 * (rot * m + std::conj(rot) * adj);
    h = 0.5 * (h + h.adjoint()).eval();
    auto [top, x] = numerics::hermitian_top_eigenpair(h);
    out.angles[k] = phi;
    out.points[k] = x.dot(m * x);  // dot conjugates the first argument
    out.support[k] = top;
  });
  return out;
}

double numerical_radius(const CMatrix& m, std::size_t n_angles) {
  return fov_boundary(m, n_angles).inner_radius();
}

double numerical_radius_bound(const CMatrix& m, std::size_t n_angles) {
  return fov_boundary(m, n_angles).outer_radius();
}

CMatrix transformed_matrix(const CMatrix& a, const CMatrix& b, double p) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    fail(ErrorCode::InvalidArgument, "transformed_matrix: A and B must be square and equal size");
  }
  if (p == 0.0) return numerics::solver_for(a).solve(b);
  if (p == 2.0) {
    const CMatrix badj = b.adjoint();
    return numerics::solver_for(a.adjoint()).solve(badj).adjoint();
  }
  const CMatrix left = numerics::fractional_power(a, 0.5 * p - 1.0);
  const CMatrix right = numerics::fractional_power(a, -0.5 * p);
  return left * b * right;
}

FovBoundary transformed_fov(const CMatrix& a, const CMatrix& b, double p, std::size_t n_angles) {
  return fov_boundary(transformed_matrix(a, b, p), n_angles);
}

double containment_margin(const CMatrix& m) {
  return 1e-7 * (1.0 + numerics::scale_norm(m));
}

bool spectrum_in_fov_check(const CMatrix& m, std::size_t n_angles) {
  const FovBoundary boundary = fov_boundary(m, n_angles);
  const std::vector<Complex> hull = convex_hull(boundary.points);
  const double tol = containment_margin(m);
  for (const Complex& ev : numerics::general_eigenvalues(m)) {
    if (!hull_contains(hull, ev, tol)) return false;
  }
  return true;
}

std::vector<Complex> convex_hull(std::vector<Complex> pts) {
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  // Monotone chain; a tiny relative epsilon folds numerically collinear
  // points into the edges.
  double scale = 0.0;
  for (const Complex& z : pts) scale = std::max(scale, std::abs(z));
  const double eps = 1e-14 * std::max(scale * scale, 1e-300);

  std::vector<Complex> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Complex& z : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], z) <= eps) --k;
    hull[k++] = z;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double signed_distance(const std::vector<Complex>& hull, Complex z) {
  if (hull.empty()) return std::numeric_limits<double>::infinity();
  if (hull.size() == 1) return std::abs(z - hull[0]);
  if (hull.size() == 2) return segment_distance(z, hull[0], hull[1]);

  bool inside = true;
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Complex a = hull[i];
    const Complex b = hull[(i + 1) % hull.size()];
    if (cross(a, b, z) < 0.0) inside = false;
    nearest = std::min(nearest, segment_distance(z, a, b));
  }
  return inside ? -nearest : nearest;
}

bool hull_contains(const std::vector<Complex>& hull, Complex z, double tol) {
  return signed_distance(hull, z) <= tol;
}

double hausdorff_distance(const std::vector<Complex>& hull_a,
                          const std::vector<Complex>& hull_b) {
  // For convex polygons the one-sided distance is attained at a vertex.
  double d = 0.0;
  for (const Complex& z : hull_a) d = std::max(d, std::max(0.0, signed_distance(hull_b, z)));
  for (const Complex& z : hull_b) d = std::max(d, std::max(0.0, signed_distance(hull_a, z)));
  return d;
}

std::vector<Complex> minkowski_sum(const std::vector<Complex>& hull_a,
                                   const std::vector<Complex>& hull_b) {
  std::vector<Complex> sums;
  sums.reserve(hull_a.size() * hull_b.size());
  for (const Complex& a : hull_a) {
    for (const Complex& b : hull_b) sums.push_back(a + b);
  }
  return convex_hull(std::move(sums));
}

}  // namespace ddestab::fov
