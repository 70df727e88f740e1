#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "ddestab/numerics.hpp"
#include "ddestab/stability.hpp"

namespace ddestab::solver {

using numerics::CMatrix;
using numerics::Complex;
using numerics::CVector;
using numerics::RVector;
using numerics::SystemMatrix;
using stability::ThetaScheme;

/// State for t <= 0.
using History = std::function<CVector(double)>;

inline constexpr double kOverflowGuard = 1e100;

/// y'(t) = -A y(t) + B y(t - tau); A is the positive definite factor.
struct LinearDDE {
  CMatrix a;
  CMatrix b;
  double tau = 0.0;
  History history;
};

/// z'(t) = M z(t) + g(z(t - tau)). g_real, when set, is used on the real
/// fast path.
struct SemilinearDDE {
  SystemMatrix linear;
  std::function<CVector(const CVector&)> g;
  std::function<RVector(const RVector&)> g_real;
  double tau = 0.0;
  History history;
};

struct SolveOptions {
  bool keep_states = false;
};

struct Trajectory {
  ThetaScheme scheme;
  std::vector<double> times;     // t_n = n h
  std::vector<double> norms;     // |y_n|_2
  std::vector<double> max_abs;   // max_i |y_n,i|
  std::vector<CVector> states;   // every y_n when retained, else empty
  CVector final_state;
  bool diverged = false;
  bool is_real = false;

  double h() const { return scheme.h(); }
  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }

  /// Grid index of t. Throws TimeOffGrid when t is not a computed grid time.
  std::size_t index_of(double t) const;
  /// Throws StateNotRetained for interior steps of a run without keep_states.
  const CVector& state(std::size_t n) const;
  const CVector& state_at(double t) const { return state(index_of(t)); }
};

/// Steps needed to reach t_end: ceil(t_end / h) with a 1e-6 slack so that
/// t_end on the grid is hit exactly.
std::size_t step_count(double t_end, double h);

Trajectory solve_linear(const LinearDDE& prob, const ThetaScheme& scheme, double t_end,
                        const SolveOptions& options = {});

Trajectory solve_semilinear(const SemilinearDDE& prob, const ThetaScheme& scheme, double t_end,
                            const SolveOptions& options = {});

using ErrorNorm = std::function<double(const CVector& numerical, double t)>;

struct OrderStudy {
  std::vector<int> m;
  std::vector<double> h;
  std::vector<double> errors;
  double slope = 0.0;
};

/// Least-squares slope of log(error at t_end) against log(h) for u = 0 and
/// each m in m_list. error(y, t) measures the deviation of y from the exact
/// solution at t.
OrderStudy observed_order(const LinearDDE& prob, double theta, const std::vector<int>& m_list,
                          double t_end, const ErrorNorm& error);

}  // namespace ddestab::solver
