#include "ddestab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ddestab::numerics {

namespace {

void require_square(const CMatrix& m, const char* op) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    fail(ErrorCode::InvalidArgument,
         std::string(op) + ": matrix must be square and non-empty, got " +
             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Parlett-Reinsch diagonal balancing with powers of two, in place.
template <class Mat>
void balance(Mat& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace

double scale_norm(const CMatrix& m) {
  return max_abs(m) * static_cast<double>(std::max(m.rows(), m.cols()));
}

bool is_real(const CMatrix& m) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0;
}

bool is_real(const CVector& v) {
  return v.size() == 0 || v.imag().cwiseAbs().maxCoeff() == 0.0;
}

bool is_hermitian(const CMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = max_abs(m);
  if (scale == 0.0) return true;
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  return asym <= rel_tol * scale;
}

EigenDecomposition hermitian_eigen(const CMatrix& m) {
  require_square(m, "hermitian_eigen");
  if (!m.allFinite()) fail(ErrorCode::InvalidArgument, "hermitian_eigen: non-finite entries");
  if (!is_hermitian(m)) {
    fail(ErrorCode::NotHermitian, "hermitian_eigen: matrix is not Hermitian within tolerance");
  }
  EigenDecomposition out;
  out.kind = EigenKind::Hermitian;
  if (is_real(m)) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m.real());
    if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "hermitian_eigen: no convergence");
    out.values.assign(es.eigenvalues().begin(), es.eigenvalues().end());
    out.vectors = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "hermitian_eigen: no convergence");
    out.values.assign(es.eigenvalues().begin(), es.eigenvalues().end());
    out.vectors = es.eigenvectors();
  }
  return out;
}

std::pair<double, CVector> hermitian_top_eigenpair(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "hermitian eigensolver: no convergence");
  const Eigen::Index last = h.rows() - 1;
  return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

std::vector<Complex> general_eigenvalues(const CMatrix& m) {
  require_square(m, "general_eigenvalues");
  if (!m.allFinite()) fail(ErrorCode::InvalidArgument, "general_eigenvalues: non-finite entries");
  std::vector<Complex> out;
  if (is_real(m)) {
    Eigen::EigenSolver<RMatrix> es(m.real(), false);
    if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "general_eigenvalues: no convergence");
    out.assign(es.eigenvalues().begin(), es.eigenvalues().end());
  } else {
    Eigen::ComplexEigenSolver<CMatrix> es(m, false);
    if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "general_eigenvalues: no convergence");
    out.assign(es.eigenvalues().begin(), es.eigenvalues().end());
  }
  return out;
}

EigenDecomposition general_eigen(const CMatrix& m) {
  require_square(m, "general_eigen");
  Eigen::ComplexEigenSolver<CMatrix> es(m, true);
  if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "general_eigen: no convergence");
  EigenDecomposition out;
  out.values.assign(es.eigenvalues().begin(), es.eigenvalues().end());
  out.vectors = es.eigenvectors();
  return out;
}

double spectral_radius(const CMatrix& m) {
  double rho = 0.0;
  for (const Complex& v : general_eigenvalues(m)) rho = std::max(rho, std::abs(v));
  return rho;
}

std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs) {
  double biggest = 0.0;
  for (const Complex& c : coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      fail(ErrorCode::InvalidArgument, "poly_roots: non-finite coefficient");
    }
    biggest = std::max(biggest, std::abs(c));
  }
  if (biggest == 0.0) fail(ErrorCode::ZeroPolynomial, "poly_roots: all coefficients vanish");

  std::size_t top = coeffs.size();
  while (top > 0 && std::abs(coeffs[top - 1]) <= kLeadingTrimTol * biggest) --top;
  if (top <= 1) {
    if (coeffs.size() == 1) return {};
    fail(ErrorCode::DegenerateLeading, "poly_roots: trimming left a constant polynomial");
  }

  std::size_t low = 0;
  while (coeffs[low] == Complex(0.0)) ++low;

  std::vector<Complex> roots(low, Complex(0.0));
  const std::size_t degree = top - 1 - low;
  if (degree == 0) return roots;

  const Complex lead = coeffs[top - 1];
  if (degree == 1) {
    roots.push_back(-coeffs[low] / lead);
    return roots;
  }

  bool real = true;
  for (std::size_t k = low; k < top; ++k) real = real && coeffs[k].imag() == 0.0;

  const auto n = static_cast<Eigen::Index>(degree);
  if (real) {
    RMatrix comp = RMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      comp(0, j) = -(coeffs[top - 2 - j] / lead).real();
    }
    for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    balance(comp);
    Eigen::EigenSolver<RMatrix> es(comp, false);
    if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "poly_roots: no convergence");
    roots.insert(roots.end(), es.eigenvalues().begin(), es.eigenvalues().end());
  } else {
    CMatrix comp = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) comp(0, j) = -coeffs[top - 2 - j] / lead;
    for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    balance(comp);
    Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
    if (es.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "poly_roots: no convergence");
    roots.insert(roots.end(), es.eigenvalues().begin(), es.eigenvalues().end());
  }
  return roots;
}

CMatrix fractional_power(const CMatrix& m, double s) {
  const EigenDecomposition eig = hermitian_eigen(m);
  const double floor = kPositiveDefiniteTol * scale_norm(m);
  if (eig.values.front().real() <= floor) {
    fail(ErrorCode::NotPositiveDefinite, "fractional_power: smallest eigenvalue " +
                                             std::to_string(eig.values.front().real()) +
                                             " is not positive");
  }
  CVector scaled(static_cast<Eigen::Index>(eig.values.size()));
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    scaled(static_cast<Eigen::Index>(k)) = std::pow(eig.values[k].real(), s);
  }
  return eig.vectors * scaled.asDiagonal() * eig.vectors.adjoint();
}

LinearSolver::LinearSolver(const CMatrix& m)
    : size_(static_cast<std::size_t>(m.rows())), real_(numerics::is_real(m)) {
  require_square(m, "solver_for");
  if (!m.allFinite()) fail(ErrorCode::InvalidArgument, "solver_for: non-finite entries");
  const double floor = kSingularPivotTol * scale_norm(m);
  double smallest = 0.0;
  if (real_) {
    real_lu_.compute(m.real());
    smallest = real_lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
  } else {
    complex_lu_.compute(m);
    smallest = complex_lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
  }
  if (!(smallest > floor)) {
    fail(ErrorCode::Singular, "solver_for: pivot " + std::to_string(smallest) +
                                  " below singularity threshold");
  }
}

CVector LinearSolver::solve(const CVector& b) const {
  if (static_cast<std::size_t>(b.size()) != size_) {
    fail(ErrorCode::InvalidArgument, "solve: right-hand side has wrong length");
  }
  if (real_) {
    CVector x(b.size());
    x.real() = real_lu_.solve(RVector(b.real()));
    x.imag() = real_lu_.solve(RVector(b.imag()));
    return x;
  }
  return complex_lu_.solve(b);
}

RVector LinearSolver::solve(const RVector& b) const {
  if (static_cast<std::size_t>(b.size()) != size_) {
    fail(ErrorCode::InvalidArgument, "solve: right-hand side has wrong length");
  }
  if (real_) return real_lu_.solve(b);
  return complex_lu_.solve(b.cast<Complex>()).real();
}

CMatrix LinearSolver::solve(const CMatrix& b) const {
  if (static_cast<std::size_t>(b.rows()) != size_) {
    fail(ErrorCode::InvalidArgument, "solve: right-hand side has wrong row count");
  }
  if (real_) {
    CMatrix x(b.rows(), b.cols());
    x.real() = real_lu_.solve(RMatrix(b.real()));
    x.imag() = real_lu_.solve(RMatrix(b.imag()));
    return x;
  }
  return complex_lu_.solve(b);
}

LinearSolver solver_for(const CMatrix& m) { return LinearSolver(m); }

Eigen::Index SystemMatrix::rows() const {
  return std::visit([](const auto& m) { return m.rows(); }, storage_);
}

bool SystemMatrix::is_real() const {
  return is_sparse() || numerics::is_real(dense());
}

CMatrix SystemMatrix::to_dense() const {
  if (is_sparse()) return RMatrix(sparse()).cast<Complex>();
  return dense();
}

}  // namespace ddestab::numerics
