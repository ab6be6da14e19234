#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <utility>

#include "wgf/errors.hpp"
#include "wgf/grid.hpp"

namespace wgf {

/// Tridiagonal matrix: lower[i] = A(i+1, i), diag[i] = A(i, i), upper[i] = A(i, i+1).
template <typename Scalar>
struct BasicTridiagonal {
  VectorX<Scalar> lower, diag, upper;

  static BasicTridiagonal zero(Eigen::Index n) {
    BasicTridiagonal t;
    t.diag = VectorX<Scalar>::Zero(n);
    t.lower = VectorX<Scalar>::Zero(n > 0 ? n - 1 : 0);
    t.upper = VectorX<Scalar>::Zero(n > 0 ? n - 1 : 0);
    return t;
  }

  Eigen::Index size() const { return diag.size(); }

  VectorX<Scalar> operator*(const VectorX<Scalar>& v) const {
    const Eigen::Index n = size();
    VectorX<Scalar> out = diag.cwiseProduct(v);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      out[i] += upper[i] * v[i + 1];
      out[i + 1] += lower[i] * v[i];
    }
    return out;
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_dense() const {
    const Eigen::Index n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> A =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) A(i, i) = diag[i];
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      A(i, i + 1) = upper[i];
      A(i + 1, i) = lower[i];
    }
    return A;
  }

  BasicTridiagonal& operator+=(const BasicTridiagonal& o) {
    lower += o.lower;
    diag += o.diag;
    upper += o.upper;
    return *this;
  }
  BasicTridiagonal& operator*=(Scalar s) {
    lower *= s;
    diag *= s;
    upper *= s;
    return *this;
  }
};

using Tridiagonal = BasicTridiagonal<double>;

/// Thomas elimination without pivoting.
template <typename Scalar>
VectorX<Scalar> solve_tridiagonal(const VectorX<Scalar>& lower, const VectorX<Scalar>& diag,
                                  const VectorX<Scalar>& upper, const VectorX<Scalar>& rhs) {
  const Eigen::Index n = diag.size();
  if (rhs.size() != n || lower.size() != std::max<Eigen::Index>(n - 1, 0) ||
      upper.size() != std::max<Eigen::Index>(n - 1, 0))
    throw ValidationError("tridiagonal", "inconsistent band sizes");
  VectorX<Scalar> c(n), d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar pivot = diag[i];
    Scalar r = rhs[i];
    if (i > 0) {
      pivot -= lower[i - 1] * c[i - 1];
      r -= lower[i - 1] * d[i - 1];
    }
    if (pivot == Scalar(0) || !std::isfinite(static_cast<double>(pivot)))
      throw Error(ErrorKind::ZeroPivot, "zero pivot at row " + std::to_string(i));
    c[i] = i + 1 < n ? upper[i] / pivot : Scalar(0);
    d[i] = r / pivot;
  }
  VectorX<Scalar> x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) x[i] = d[i] - (i + 1 < n ? c[i] * x[i + 1] : Scalar(0));
  return x;
}

template <typename Scalar>
VectorX<Scalar> solve_tridiagonal(const BasicTridiagonal<Scalar>& A, const VectorX<Scalar>& rhs) {
  return solve_tridiagonal(A.lower, A.diag, A.upper, rhs);
}

// Linear-solve dispatch used by damped_newton. Failures surface as SingularJacobian.

template <typename Scalar>
VectorX<Scalar> solve_linear(const BasicTridiagonal<Scalar>& A, const VectorX<Scalar>& rhs) {
  try {
    return solve_tridiagonal(A, rhs);
  } catch (const Error& e) {
    throw Error(ErrorKind::SingularJacobian, e.what());
  }
}

template <typename Scalar>
VectorX<Scalar> solve_linear(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
                             const VectorX<Scalar>& rhs) {
  Eigen::FullPivLU<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> lu(A);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularJacobian, "dense Jacobian is singular");
  VectorX<Scalar> x = lu.solve(rhs);
  if (!x.allFinite()) throw Error(ErrorKind::SingularJacobian, "dense solve produced non-finite values");
  return x;
}

template <typename Scalar>
VectorX<Scalar> solve_linear(const Eigen::SparseMatrix<Scalar>& A, const VectorX<Scalar>& rhs) {
  Eigen::SparseLU<Eigen::SparseMatrix<Scalar>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw Error(ErrorKind::SingularJacobian, "sparse factorization failed");
  VectorX<Scalar> x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw Error(ErrorKind::SingularJacobian, "sparse solve failed");
  return x;
}

struct NewtonConfig {
  double alpha = 0.8;
  int max_iters = 100;
  double residual_tol = 1e-10;
  double step_tol = 1e-15;
  bool line_search = true;

  bool operator==(const NewtonConfig&) const = default;
};

struct NewtonReport {
  int iterations = 0;
  double final_residual_norm = 0;
  bool converged = false;
  int admissibility_rejections = 0;
};

inline constexpr int kMaxAdmissibilityHalvings = 60;
inline constexpr int kMaxLineSearchHalvings = 30;

/// Damped Newton: x <- x + lambda * dx with lambda starting at cfg.alpha.
/// lambda is halved until the trial point is admissible and, with line search
/// on, until the residual max-norm decreases. Returns the best iterate seen;
/// non-convergence is reported, not thrown.
template <typename Scalar, typename ResidualFn, typename JacobianFn, typename AdmissibleFn>
std::pair<VectorX<Scalar>, NewtonReport> damped_newton(ResidualFn&& residual, JacobianFn&& jacobian,
                                                       VectorX<Scalar> x, const NewtonConfig& cfg,
                                                       AdmissibleFn&& admissible) {
  if (!(cfg.alpha > 0 && cfg.alpha <= 1)) throw ValidationError("alpha", "must lie in (0, 1]");
  if (!admissible(x)) throw Error(ErrorKind::NonAdmissibleMap, "Newton initial guess is not admissible");

  NewtonReport report;
  VectorX<Scalar> r = residual(x);
  double rn = static_cast<double>(r.template lpNorm<Eigen::Infinity>());
  VectorX<Scalar> best = x;
  double best_rn = rn;

  while (rn > cfg.residual_tol && report.iterations < cfg.max_iters) {
    const VectorX<Scalar> dx = solve_linear(jacobian(x), VectorX<Scalar>(-r));
    Scalar lambda = static_cast<Scalar>(cfg.alpha);
    int adm_halvings = 0, ls_halvings = 0;
    VectorX<Scalar> xt, rt;
    double rtn = 0;
    bool fallback = false;
    for (;;) {
      xt = x + lambda * dx;
      if (!admissible(xt)) {
        ++report.admissibility_rejections;
        if (++adm_halvings > kMaxAdmissibilityHalvings)
          throw Error(ErrorKind::AdmissibilityStall, "damping could not restore admissibility");
        lambda /= 2;
        continue;
      }
      rt = residual(xt);
      rtn = static_cast<double>(rt.template lpNorm<Eigen::Infinity>());
      if (!cfg.line_search || rtn < rn || fallback) break;
      if (++ls_halvings > kMaxLineSearchHalvings) {
        // No decrease found along dx; take the undamped trial so the loop keeps moving.
        lambda = static_cast<Scalar>(cfg.alpha);
        fallback = true;
        continue;
      }
      lambda /= 2;
    }
    const double step = static_cast<double>((lambda * dx).template lpNorm<Eigen::Infinity>());
    x = std::move(xt);
    r = std::move(rt);
    rn = rtn;
    ++report.iterations;
    if (rn < best_rn) {
      best = x;
      best_rn = rn;
    }
    if (step <= cfg.step_tol && rn > cfg.residual_tol) break;  // stagnated
  }

  report.converged = best_rn <= cfg.residual_tol;
  report.final_residual_norm = best_rn;
  return {best, report};
}

/// Solves (diag - lap_coeff * Lap_h) u = rhs on interior nodes with u = 0 on
/// the boundary, by Jacobi-preconditioned conjugate gradients. Boundary
/// entries of diag and rhs are ignored.
Field2D screened_laplacian_solve(const Field2D& diag, double lap_coeff, const Field2D& rhs,
                                 const RefGrid2D& grid);

/// Dense direct path of the same operator, kept as an oracle for small grids.
Field2D screened_laplacian_solve_dense(const Field2D& diag, double lap_coeff, const Field2D& rhs,
                                       const RefGrid2D& grid);

/// Applies (diag - lap_coeff * Lap_h) to u at interior nodes (boundary of u taken as given).
Field2D screened_laplacian_apply(const Field2D& diag, double lap_coeff, const Field2D& u,
                                 const RefGrid2D& grid);

/// Operator (rho0 / kappa) I - kappa Lap_h applied independently to both coordinates.
std::pair<Field2D, Field2D> solve_screened_laplacian_2d(const Field2D& rho0, double kappa,
                                                        const Field2D& rhs_x, const Field2D& rhs_y,
                                                        const RefGrid2D& grid);

}  // namespace wgf
