#pragma once

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ddestab/error.hpp"

namespace ddestab::numerics {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using RSparse = Eigen::SparseMatrix<double>;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPositiveDefiniteTol = 1e-12;
inline constexpr double kSingularPivotTol = 1e-14;
inline constexpr double kLeadingTrimTol = 1e-14;

/// Scale-free matrix size: largest entry modulus times the dimension.
double scale_norm(const CMatrix& m);

bool is_real(const CMatrix& m);
bool is_real(const CVector& v);
bool is_hermitian(const CMatrix& m, double rel_tol = kHermitianTol);

enum class EigenKind { Hermitian, General };

struct EigenDecomposition {
  std::vector<Complex> values;
  CMatrix vectors;  // column k belongs to values[k]
  EigenKind kind = EigenKind::General;
};

/// Eigenvalues ascending, orthonormal eigenvectors. Rejects matrices that are
/// not Hermitian to kHermitianTol (relative to the largest entry).
EigenDecomposition hermitian_eigen(const CMatrix& m);

/// Largest eigenvalue and a unit eigenvector of a Hermitian matrix. Skips the
/// symmetry check; callers construct the matrix Hermitian.
std::pair<double, CVector> hermitian_top_eigenpair(const CMatrix& h);

std::vector<Complex> general_eigenvalues(const CMatrix& m);

/// Eigenvalues with (unnormalised) eigenvectors for a diagonalisable matrix.
EigenDecomposition general_eigen(const CMatrix& m);

double spectral_radius(const CMatrix& m);

/// Roots of sum_k coeffs[k] z^k (constant term first). Leading coefficients
/// below kLeadingTrimTol * max|coeff| are trimmed; exact zero low-order
/// coefficients are returned as roots at the origin.
std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs);

/// M^s for Hermitian positive definite M.
CMatrix fractional_power(const CMatrix& m, double s);

/// Reusable LU factorisation; real input takes a real factorisation.
class LinearSolver {
 public:
  explicit LinearSolver(const CMatrix& m);

  std::size_t size() const noexcept { return size_; }
  bool is_real() const noexcept { return real_; }

  CVector solve(const CVector& b) const;
  RVector solve(const RVector& b) const;
  CMatrix solve(const CMatrix& b) const;

 private:
  std::size_t size_;
  bool real_;
  Eigen::PartialPivLU<RMatrix> real_lu_;
  Eigen::PartialPivLU<CMatrix> complex_lu_;
};

LinearSolver solver_for(const CMatrix& m);

/// A dense complex matrix or a sparse real one. The sparse form carries the
/// large method-of-lines operators.
class SystemMatrix {
 public:
  SystemMatrix() = default;
  SystemMatrix(CMatrix dense) : storage_(std::move(dense)) {}  // NOLINT
  SystemMatrix(RSparse sparse) : storage_(std::move(sparse)) {}  // NOLINT

  Eigen::Index rows() const;
  bool is_sparse() const { return std::holds_alternative<RSparse>(storage_); }
  bool is_real() const;

  const CMatrix& dense() const { return std::get<CMatrix>(storage_); }
  const RSparse& sparse() const { return std::get<RSparse>(storage_); }
  CMatrix to_dense() const;

 private:
  std::variant<CMatrix, RSparse> storage_;
};

}  // namespace ddestab::numerics
