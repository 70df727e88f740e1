#pragma once

#include <cstddef>
#include <vector>

#include "ddestab/numerics.hpp"

namespace ddestab::fov {

using numerics::CMatrix;
using numerics::Complex;

inline constexpr std::size_t kDefaultAngles = 256;
inline constexpr std::size_t kMinAngles = 8;

/// Samples of the boundary of the field of values F(M) = { x*Mx : |x| = 1 }.
///
/// For each sweep angle phi_k = 2*pi*k/n the Hermitian part
/// H(phi) = (e^{i phi} M + e^{-i phi} M*) / 2 is diagonalised; a unit
/// eigenvector x of its top eigenvalue gives the boundary point x*Mx, and the
/// top eigenvalue itself is the support value of F(M) along e^{-i phi}.
/// The points span an inscribed polygon; the support lines bound a
/// circumscribed one (outer_vertices), so F(M) is sandwiched between both.
struct FovBoundary {
  std::vector<double> angles;
  std::vector<Complex> points;
  std::vector<double> support;
  std::size_t source_dim = 0;

  std::size_t n_angles() const { return angles.size(); }

  /// Vertices of the circumscribed polygon: intersections of consecutive
  /// support lines Re(e^{i phi_k} z) = support[k].
  std::vector<Complex> outer_vertices() const;

  /// max |z| over the inscribed points (a lower bound on the numerical radius).
  double inner_radius() const;
  /// max |z| over the circumscribed vertices (an upper bound).
  double outer_radius() const;
};

FovBoundary fov_boundary(const CMatrix& m, std::size_t n_angles = kDefaultAngles);

/// r(M) = max |z| over F(M), estimated from the inscribed boundary points.
double numerical_radius(const CMatrix& m, std::size_t n_angles = kDefaultAngles);

/// Guaranteed upper bound on r(M) from the circumscribed polygon.
double numerical_radius_bound(const CMatrix& m, std::size_t n_angles = kDefaultAngles);

/// A^{p/2-1} B A^{-p/2}. p = 0 and p = 2 only need A nonsingular
/// (A^{-1}B and BA^{-1}); other p need A Hermitian positive definite.
CMatrix transformed_matrix(const CMatrix& a, const CMatrix& b, double p);

FovBoundary transformed_fov(const CMatrix& a, const CMatrix& b, double p,
                            std::size_t n_angles = kDefaultAngles);

/// True iff every eigenvalue of M lies in the hull of its sampled boundary,
/// up to 1e-7 * (1 + |M|).
bool spectrum_in_fov_check(const CMatrix& m, std::size_t n_angles = kDefaultAngles);

/// Containment slack eps_fov = 1e-7 * (1 + |M|) used by the certificates.
double containment_margin(const CMatrix& m);

// Planar convex geometry on complex numbers.

/// Counter-clockwise convex hull. Collinear and duplicate points are dropped,
/// so a segment comes back as its two endpoints and a point as one.
std::vector<Complex> convex_hull(std::vector<Complex> points);

/// Euclidean distance from z to the hull; negative inside (minus the distance
/// to the nearest edge).
double signed_distance(const std::vector<Complex>& hull, Complex z);

bool hull_contains(const std::vector<Complex>& hull, Complex z, double tol);

double hausdorff_distance(const std::vector<Complex>& hull_a,
                          const std::vector<Complex>& hull_b);

std::vector<Complex> minkowski_sum(const std::vector<Complex>& hull_a,
                                   const std::vector<Complex>& hull_b);

}  // namespace ddestab::fov
