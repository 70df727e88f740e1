#include "ddestab/theta_solver.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseLU>

namespace ddestab::solver {

using numerics::RMatrix;
using numerics::RSparse;

namespace {

template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// The last m+2 states y_{n-m-1} .. y_n, indexed by step number k >= -m.
template <typename S>
class HistoryRing {
 public:
  HistoryRing(int m, std::size_t dim) : m_(m), slots_(static_cast<std::size_t>(m) + 2, Vec<S>::Zero(static_cast<Eigen::Index>(dim))) {}

  Vec<S>& operator[](long long k) { return slots_[slot(k)]; }
  const Vec<S>& operator[](long long k) const { return slots_[slot(k)]; }

 private:
  std::size_t slot(long long k) const {
    return static_cast<std::size_t>((k + m_) % static_cast<long long>(slots_.size()));
  }
  long long m_;
  std::vector<Vec<S>> slots_;
};

struct DelayWeights {
  double w0, w1, w2;  // multipliers of y_{n-m}, y_{n-m+1}, y_{n-m+2}
};

DelayWeights delay_weights(const ThetaScheme& s) {
  const double h = s.h(), th = s.theta(), u = s.u();
  return {h * (1.0 - th) * (1.0 - u), h * ((1.0 - th) * u + th * (1.0 - u)), h * th * u};
}

void require_history(const History& history, const char* op) {
  if (!history) fail(ErrorCode::InvalidArgument, std::string(op) + ": history is not set");
}

std::vector<CVector> sample_history(const History& history, const ThetaScheme& scheme,
                                    Eigen::Index dim) {
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(scheme.m()) + 1);
  for (int k = 0; k <= scheme.m(); ++k) {
    CVector v = history(-static_cast<double>(k) * scheme.h());
    if (v.size() != dim) fail(ErrorCode::InvalidArgument, "history returned a vector of wrong length");
    if (!v.allFinite()) fail(ErrorCode::InvalidArgument, "history returned non-finite values");
    out.push_back(std::move(v));
  }
  return out;
}

bool all_real(const std::vector<CVector>& vs) {
  for (const CVector& v : vs) {
    if (!numerics::is_real(v)) return false;
  }
  return true;
}

template <typename S>
Vec<S> convert(const CVector& v) {
  if constexpr (std::is_same_v<S, double>) {
    return v.real();
  } else {
    return v;
  }
}

template <typename S>
CVector to_complex(const Vec<S>& v) {
  if constexpr (std::is_same_v<S, double>) {
    return v.template cast<Complex>();
  } else {
    return v;
  }
}

// Drives the recurrence: advance(ring, n) returns y_{n+1}.
template <typename S, typename Advance>
Trajectory integrate(const ThetaScheme& scheme, const std::vector<CVector>& hist, double t_end,
                     const SolveOptions& options, Advance&& advance) {
  const double h = scheme.h();
  if (!(t_end >= h * (1.0 - 1e-12))) {
    fail(ErrorCode::InvalidArgument, "t_end must be at least one step h");
  }
  const std::size_t n_steps = step_count(t_end, h);
  const auto dim = static_cast<std::size_t>(hist.front().size());

  HistoryRing<S> ring(scheme.m(), dim);
  for (int k = 0; k <= scheme.m(); ++k) ring[-k] = convert<S>(hist[static_cast<std::size_t>(k)]);

  Trajectory traj{scheme, {}, {}, {}, {}, {}, false, std::is_same_v<S, double>};
  traj.times.reserve(n_steps + 1);
  traj.norms.reserve(n_steps + 1);
  traj.max_abs.reserve(n_steps + 1);
  auto record = [&](long long n, const Vec<S>& y) {
    traj.times.push_back(static_cast<double>(n) * h);
    traj.norms.push_back(y.norm());
    traj.max_abs.push_back(y.size() ? y.cwiseAbs().maxCoeff() : 0.0);
    if (options.keep_states) traj.states.push_back(to_complex<S>(y));
  };
  record(0, ring[0]);

  for (std::size_t n = 0; n < n_steps; ++n) {
    const auto k = static_cast<long long>(n);
    Vec<S> next = advance(ring, k);
    ring[k + 1] = std::move(next);
    record(k + 1, ring[k + 1]);
    const double norm = traj.norms.back();
    if (!std::isfinite(norm) || norm > kOverflowGuard) {
      traj.diverged = true;
      break;
    }
  }
  traj.final_state = to_complex<S>(ring[static_cast<long long>(traj.steps())]);
  return traj;
}

template <typename S>
Vec<S> delayed_combination(const HistoryRing<S>& ring, long long n, int m, const DelayWeights& w) {
  Vec<S> d = w.w1 * ring[n - m + 1];
  if (w.w0 != 0.0) d += w.w0 * ring[n - m];
  if (w.w2 != 0.0) d += w.w2 * ring[n - m + 2];
  return d;
}

template <typename S>
Trajectory linear_run(const LinearDDE& prob, const ThetaScheme& scheme, double t_end,
                      const SolveOptions& options, const std::vector<CVector>& hist) {
  const double h = scheme.h(), th = scheme.theta();
  const Eigen::Index n = prob.a.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const numerics::LinearSolver lhs(id + th * h * prob.a);
  const DelayWeights w = delay_weights(scheme);
  const int m = scheme.m();

  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> explicit_part, b;
  if constexpr (std::is_same_v<S, double>) {
    explicit_part = (id - (1.0 - th) * h * prob.a).real();
    b = prob.b.real();
  } else {
    explicit_part = id - (1.0 - th) * h * prob.a;
    b = prob.b;
  }
  return integrate<S>(scheme, hist, t_end, options, [&](const HistoryRing<S>& ring, long long k) {
    const Vec<S> rhs = explicit_part * ring[k] + b * delayed_combination(ring, k, m, w);
    return Vec<S>(lhs.solve(rhs));
  });
}

// Solves (I - h theta M) x = rhs, sparse or dense.
template <typename S>
class ImplicitSolver {
 public:
  ImplicitSolver(const SystemMatrix& linear, double scale) {
    if constexpr (std::is_same_v<S, double>) {
      if (linear.is_sparse()) {
        RSparse id(linear.rows(), linear.rows());
        id.setIdentity();
        RSparse lhs = id - scale * linear.sparse();
        lhs.makeCompressed();
        sparse_.compute(lhs);
        if (sparse_.info() != Eigen::Success) {
          fail(ErrorCode::Singular, "sparse factorisation of I - h theta M failed");
        }
        sparse_mode_ = true;
        return;
      }
    }
    const CMatrix m = linear.to_dense();
    dense_.emplace(CMatrix::Identity(m.rows(), m.cols()) - scale * m);
  }

  Vec<S> solve(const Vec<S>& rhs) const {
    if constexpr (std::is_same_v<S, double>) {
      if (sparse_mode_) return sparse_.solve(rhs);
    }
    return dense_->solve(rhs);
  }

 private:
  bool sparse_mode_ = false;
  mutable Eigen::SparseLU<RSparse> sparse_;
  std::optional<numerics::LinearSolver> dense_;
};

template <typename S>
Trajectory semilinear_run(const SemilinearDDE& prob, const ThetaScheme& scheme, double t_end,
                          const SolveOptions& options, const std::vector<CVector>& hist) {
  const double h = scheme.h(), th = scheme.theta(), u = scheme.u();
  const int m = scheme.m();
  const ImplicitSolver<S> lhs(prob.linear, h * th);

  std::function<Vec<S>(const Vec<S>&)> apply_m;
  std::function<Vec<S>(const Vec<S>&)> g;
  if constexpr (std::is_same_v<S, double>) {
    if (prob.linear.is_sparse()) {
      apply_m = [&](const Vec<S>& z) { return Vec<S>(prob.linear.sparse() * z); };
    } else {
      const RMatrix dense = prob.linear.dense().real();
      apply_m = [dense](const Vec<S>& z) { return Vec<S>(dense * z); };
    }
    g = prob.g_real;
  } else {
    const CMatrix dense = prob.linear.to_dense();
    apply_m = [dense](const Vec<S>& z) { return Vec<S>(dense * z); };
    g = prob.g;
  }
  auto delayed = [&](const HistoryRing<S>& ring, long long j) {
    // Linear interpolation between y_j and y_{j+1}; u = 0 needs only y_j.
    if (u == 0.0) return Vec<S>(ring[j]);
    return Vec<S>((1.0 - u) * ring[j] + u * ring[j + 1]);
  };

  return integrate<S>(scheme, hist, t_end, options, [&](const HistoryRing<S>& ring, long long k) {
    Vec<S> rhs = ring[k];
    if (th != 1.0) {
      rhs += h * (1.0 - th) * (apply_m(ring[k]) + g(delayed(ring, k - m)));
    }
    if (th != 0.0) rhs += h * th * g(delayed(ring, k - m + 1));
    return lhs.solve(rhs);
  });
}

}  // namespace

std::size_t Trajectory::index_of(double t) const {
  const double h = scheme.h();
  const double k = std::round(t / h);
  if (!(k >= 0.0) || std::abs(k * h - t) > 1e-9 * std::max(1.0, std::abs(t)) ||
      k > static_cast<double>(steps())) {
    fail(ErrorCode::TimeOffGrid, "time " + std::to_string(t) + " is not on the computed grid");
  }
  return static_cast<std::size_t>(k);
}

const CVector& Trajectory::state(std::size_t n) const {
  if (n < states.size()) return states[n];
  if (n == steps()) return final_state;
  fail(ErrorCode::StateNotRetained,
       "state " + std::to_string(n) + " was not retained; rerun with keep_states");
}

std::size_t step_count(double t_end, double h) {
  if (!(h > 0.0) || !(t_end >= 0.0)) fail(ErrorCode::InvalidArgument, "step_count: bad inputs");
  return static_cast<std::size_t>(std::max(0.0, std::ceil(t_end / h - 1e-6)));
}

Trajectory solve_linear(const LinearDDE& prob, const ThetaScheme& scheme, double t_end,
                        const SolveOptions& options) {
  const Eigen::Index n = prob.a.rows();
  if (n < 1 || prob.a.cols() != n || prob.b.rows() != n || prob.b.cols() != n) {
    fail(ErrorCode::InvalidArgument, "solve_linear: A and B must be square of equal size");
  }
  if (!prob.a.allFinite() || !prob.b.allFinite()) {
    fail(ErrorCode::InvalidArgument, "solve_linear: non-finite matrix entries");
  }
  if (std::abs(prob.tau - scheme.tau()) > 1e-12 * prob.tau) {
    fail(ErrorCode::InvalidArgument, "solve_linear: scheme delay differs from the problem's");
  }
  require_history(prob.history, "solve_linear");
  const std::vector<CVector> hist = sample_history(prob.history, scheme, n);
  if (numerics::is_real(prob.a) && numerics::is_real(prob.b) && all_real(hist)) {
    return linear_run<double>(prob, scheme, t_end, options, hist);
  }
  return linear_run<Complex>(prob, scheme, t_end, options, hist);
}

Trajectory solve_semilinear(const SemilinearDDE& prob, const ThetaScheme& scheme, double t_end,
                            const SolveOptions& options) {
  const Eigen::Index n = prob.linear.rows();
  if (n < 1) fail(ErrorCode::InvalidArgument, "solve_semilinear: empty linear part");
  if (std::abs(prob.tau - scheme.tau()) > 1e-12 * prob.tau) {
    fail(ErrorCode::InvalidArgument, "solve_semilinear: scheme delay differs from the problem's");
  }
  if (!prob.g && !prob.g_real) fail(ErrorCode::InvalidArgument, "solve_semilinear: g is not set");
  require_history(prob.history, "solve_semilinear");
  const std::vector<CVector> hist = sample_history(prob.history, scheme, n);
  if (prob.linear.is_real() && prob.g_real && all_real(hist)) {
    return semilinear_run<double>(prob, scheme, t_end, options, hist);
  }
  if (!prob.g) {
    fail(ErrorCode::InvalidArgument, "solve_semilinear: complex states need the complex g");
  }
  return semilinear_run<Complex>(prob, scheme, t_end, options, hist);
}

OrderStudy observed_order(const LinearDDE& prob, double theta, const std::vector<int>& m_list,
                          double t_end, const ErrorNorm& error) {
  if (m_list.size() < 3) fail(ErrorCode::InvalidArgument, "observed_order: need at least 3 step sizes");
  if (!error) fail(ErrorCode::InvalidArgument, "observed_order: error measure is not set");
  OrderStudy out;
  for (int m : m_list) {
    const ThetaScheme scheme(theta, 0.0, m, prob.tau);
    const Trajectory traj = solve_linear(prob, scheme, t_end);
    if (traj.diverged) fail(ErrorCode::NoConvergence, "observed_order: run diverged");
    const double t = traj.times.back();
    if (std::abs(t - t_end) > 1e-9 * std::max(1.0, t_end)) {
      fail(ErrorCode::TimeOffGrid, "observed_order: t_end is not a multiple of h for m = " +
                                       std::to_string(m));
    }
    out.m.push_back(m);
    out.h.push_back(scheme.h());
    out.errors.push_back(error(traj.final_state, t));
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto k = static_cast<double>(out.h.size());
  for (std::size_t i = 0; i < out.h.size(); ++i) {
    const double x = std::log(out.h[i]);
    const double y = std::log(out.errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return out;
}

}  // namespace ddestab::solver
