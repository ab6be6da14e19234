#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wgf/solver.hpp"

using namespace wgf;

namespace {

using Vec1 = Eigen::Matrix<double, Eigen::Dynamic, 1>;

NewtonReport newton_sqrt4(double alpha, bool line_search) {
  NewtonConfig cfg;
  cfg.alpha = alpha;
  cfg.line_search = line_search;
  cfg.residual_tol = 1e-12;
  auto r = [](const Vec1& x) { return Vec1::Constant(1, x[0] * x[0] - 4); };
  auto J = [](const Vec1& x) { return Eigen::MatrixXd(Eigen::MatrixXd::Constant(1, 1, 2 * x[0])); };
  auto [x, rep] = damped_newton<double>(r, J, Vec1::Constant(1, 1.0), cfg, [](const Vec1& v) { return v[0] > 0; });
  EXPECT_NEAR(x[0], 2, 1e-12);
  return rep;
}

}  // namespace

TEST(Tridiagonal, MatchesDenseLU) {
  for (unsigned seed = 1; seed <= 5; ++seed)
    for (Eigen::Index n : {1, 2, 7, 64, 500}) EXPECT_LE(oracle::tridiagonal_vs_dense(n, seed), 1e-10) << n;
}

TEST(Tridiagonal, ProductAndDenseAgree) {
  Tridiagonal A = Tridiagonal::zero(4);
  A.diag << 4, 5, 6, 7;
  A.lower << 1, 2, 3;
  A.upper << -1, -2, -3;
  const Vec v = (Vec(4) << 1, -2, 3, 0.5).finished();
  EXPECT_LE(((A * v) - A.to_dense() * v).norm(), 1e-14);
}

TEST(Tridiagonal, Errors) {
  Tridiagonal A = Tridiagonal::zero(3);
  A.diag << 0, 1, 1;
  try {
    solve_tridiagonal(A, Vec(Vec::Ones(3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroPivot);
  }
  try {
    solve_linear(A, Vec(Vec::Ones(3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularJacobian);
  }
  EXPECT_THROW(solve_tridiagonal(A, Vec(Vec::Ones(2))), ValidationError);
}

TEST(DenseSolve, SingularIsReported) {
  Eigen::MatrixXd A(2, 2);
  A << 1, 2, 2, 4;
  try {
    solve_linear(A, Vec(Vec::Ones(2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularJacobian);
  }
}

TEST(Newton, QuadraticFullStepIsFast) {
  const NewtonReport full = newton_sqrt4(1.0, false);
  EXPECT_TRUE(full.converged);
  EXPECT_LE(full.iterations, 7);
  const NewtonReport damped = newton_sqrt4(0.5, false);
  EXPECT_TRUE(damped.converged);
  EXPECT_GE(damped.iterations, full.iterations);
}

TEST(Newton, LinearSystemConvergesInOneStep) {
  Eigen::MatrixXd A(3, 3);
  A << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const Vec b = (Vec(3) << 1, 2, 3).finished();
  NewtonConfig cfg;
  cfg.alpha = 1;
  auto [x, rep] = damped_newton<double>([&](const Vec& v) { return Vec(A * v - b); },
                                        [&](const Vec&) { return A; }, Vec(Vec::Zero(3)), cfg,
                                        [](const Vec&) { return true; });
  EXPECT_EQ(rep.iterations, 1);
  EXPECT_TRUE(rep.converged);
  EXPECT_LE((A * x - b).norm(), 1e-12);
}

TEST(Newton, AdmissibilityDampsTheStep) {
  // Root at x = -1 is outside x > 0; the constrained iteration must stay positive.
  NewtonConfig cfg;
  cfg.alpha = 1;
  cfg.max_iters = 20;
  auto r = [](const Vec1& x) { return Vec1::Constant(1, x[0] + 1); };
  auto J = [](const Vec1&) { return Eigen::MatrixXd(Eigen::MatrixXd::Constant(1, 1, 1.0)); };
  auto [x, rep] = damped_newton<double>(r, J, Vec1::Constant(1, 1.0), cfg, [](const Vec1& v) { return v[0] > 0; });
  EXPECT_GT(x[0], 0);
  EXPECT_FALSE(rep.converged);
  EXPECT_GT(rep.admissibility_rejections, 0);
}

TEST(Newton, ErrorKinds) {
  NewtonConfig cfg;
  auto r = [](const Vec1& x) { return Vec1::Constant(1, x[0] - 3); };
  auto J = [](const Vec1&) { return Eigen::MatrixXd(Eigen::MatrixXd::Constant(1, 1, 1.0)); };
  try {
    damped_newton<double>(r, J, Vec1::Constant(1, 1.0), cfg, [](const Vec1&) { return false; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonAdmissibleMap);
  }
  try {
    damped_newton<double>(r, J, Vec1::Constant(1, 1.0), cfg, [](const Vec1& v) { return v[0] == 1.0; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AdmissibilityStall);
  }
  cfg.alpha = 1.5;
  EXPECT_THROW(damped_newton<double>(r, J, Vec1::Constant(1, 1.0), cfg, [](const Vec1&) { return true; }),
               ValidationError);
}

TEST(Newton, NonConvergenceIsReportedNotThrown) {
  NewtonConfig cfg;
  cfg.max_iters = 3;
  cfg.alpha = 0.1;
  cfg.line_search = false;
  auto r = [](const Vec1& x) { return Vec1::Constant(1, x[0] - 3); };
  auto J = [](const Vec1&) { return Eigen::MatrixXd(Eigen::MatrixXd::Constant(1, 1, 1.0)); };
  auto [x, rep] = damped_newton<double>(r, J, Vec1::Constant(1, 1.0), cfg, [](const Vec1&) { return true; });
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.iterations, 3);
  EXPECT_NEAR(rep.final_residual_norm, 2 * 0.9 * 0.9 * 0.9, 1e-14);
}

TEST(ScreenedLaplacian, ConjugateGradientMatchesDense) {
  for (unsigned seed = 1; seed <= 3; ++seed)
    for (Eigen::Index m : {2, 5, 12}) {
      EXPECT_LE(oracle::screened_laplacian_vs_dense(m, seed), 1e-10) << m;
      EXPECT_LE(oracle::screened_laplacian_residual(m, seed), 1e-10) << m;
    }
}

TEST(ScreenedLaplacian, BothCoordinates) {
  const RefGrid2D g = RefGrid2D::make(1, 1, 6, 6);
  const Field2D rho0 = Field2D::Constant(g.rows(), g.cols(), 2.0);
  Field2D rx = Field2D::Zero(g.rows(), g.cols()), ry = rx;
  rx(3, 3) = 1;
  ry(2, 4) = -1;
  const double kappa = 0.1;
  const auto [ux, uy] = solve_screened_laplacian_2d(rho0, kappa, rx, ry, g);
  const Field2D diag = rho0 / kappa;
  EXPECT_LE((ux - screened_laplacian_solve_dense(diag, kappa, rx, g)).abs().maxCoeff(), 1e-12);
  EXPECT_LE((uy - screened_laplacian_solve_dense(diag, kappa, ry, g)).abs().maxCoeff(), 1e-12);
  EXPECT_EQ(ux(0, 3), 0);
}
