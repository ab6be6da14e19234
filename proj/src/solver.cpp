#include "wgf/solver.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <vector>

namespace wgf {
namespace {

struct InteriorIndex {
  Eigen::Index mx, my;
  Eigen::Index size() const { return (mx - 1) * (my - 1); }
  Eigen::Index operator()(Eigen::Index i, Eigen::Index j) const { return (i - 1) * (mx - 1) + (j - 1); }
};

Eigen::SparseMatrix<double> assemble(const Field2D& diag, double lap_coeff, const RefGrid2D& g) {
  const InteriorIndex idx{g.m_x, g.m_y};
  const double cx = lap_coeff / (g.h_x() * g.h_x());
  const double cy = lap_coeff / (g.h_y() * g.h_y());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(idx.size()) * 5);
  for (Eigen::Index i = 1; i < g.m_y; ++i)
    for (Eigen::Index j = 1; j < g.m_x; ++j) {
      const Eigen::Index p = idx(i, j);
      t.emplace_back(p, p, diag(i, j) + 2 * cx + 2 * cy);
      if (j > 1) t.emplace_back(p, idx(i, j - 1), -cx);
      if (j + 1 < g.m_x) t.emplace_back(p, idx(i, j + 1), -cx);
      if (i > 1) t.emplace_back(p, idx(i - 1, j), -cy);
      if (i + 1 < g.m_y) t.emplace_back(p, idx(i + 1, j), -cy);
    }
  Eigen::SparseMatrix<double> A(idx.size(), idx.size());
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

Vec gather(const Field2D& f, const RefGrid2D& g) {
  const InteriorIndex idx{g.m_x, g.m_y};
  Vec v(idx.size());
  for (Eigen::Index i = 1; i < g.m_y; ++i)
    for (Eigen::Index j = 1; j < g.m_x; ++j) v[idx(i, j)] = f(i, j);
  return v;
}

Field2D scatter(const Vec& v, const RefGrid2D& g) {
  const InteriorIndex idx{g.m_x, g.m_y};
  Field2D f = Field2D::Zero(g.rows(), g.cols());
  for (Eigen::Index i = 1; i < g.m_y; ++i)
    for (Eigen::Index j = 1; j < g.m_x; ++j) f(i, j) = v[idx(i, j)];
  return f;
}

void check_shapes(const Field2D& diag, const Field2D& rhs, const RefGrid2D& g) {
  if (diag.rows() != g.rows() || diag.cols() != g.cols() || rhs.rows() != g.rows() ||
      rhs.cols() != g.cols())
    throw ValidationError("screened_laplacian", "array shape does not match the grid");
}

}  // namespace

Field2D screened_laplacian_apply(const Field2D& diag, double lap_coeff, const Field2D& u,
                                 const RefGrid2D& g) {
  const double hx2 = g.h_x() * g.h_x(), hy2 = g.h_y() * g.h_y();
  Field2D out = Field2D::Zero(g.rows(), g.cols());
  for (Eigen::Index i = 1; i < g.m_y; ++i)
    for (Eigen::Index j = 1; j < g.m_x; ++j) {
      const double lap = (u(i, j + 1) - 2 * u(i, j) + u(i, j - 1)) / hx2 +
                         (u(i + 1, j) - 2 * u(i, j) + u(i - 1, j)) / hy2;
      out(i, j) = diag(i, j) * u(i, j) - lap_coeff * lap;
    }
  return out;
}

Field2D screened_laplacian_solve(const Field2D& diag, double lap_coeff, const Field2D& rhs,
                                 const RefGrid2D& g) {
  check_shapes(diag, rhs, g);
  const Vec b = gather(rhs, g);
  const double bnorm = b.lpNorm<Eigen::Infinity>();
  if (bnorm == 0) return Field2D::Zero(g.rows(), g.cols());

  const Eigen::SparseMatrix<double> A = assemble(diag, lap_coeff, g);
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setMaxIterations(10 * g.m_x * g.m_y);
  cg.setTolerance(1e-14);
  cg.compute(A);
  const Vec u = cg.solve(b);

  const double limit = 1e-9 * (bnorm + 1);
  const double res = (A * u - b).lpNorm<Eigen::Infinity>();
  if (!u.allFinite() || res > limit)
    throw Error(ErrorKind::SolverBreakdown, "CG residual " + std::to_string(res) + " after " +
                                                std::to_string(cg.iterations()) + " iterations");
  return scatter(u, g);
}

Field2D screened_laplacian_solve_dense(const Field2D& diag, double lap_coeff, const Field2D& rhs,
                                       const RefGrid2D& g) {
  check_shapes(diag, rhs, g);
  const Eigen::MatrixXd A = Eigen::MatrixXd(assemble(diag, lap_coeff, g));
  const Vec u = A.partialPivLu().solve(gather(rhs, g));
  return scatter(u, g);
}

std::pair<Field2D, Field2D> solve_screened_laplacian_2d(const Field2D& rho0, double kappa,
                                                        const Field2D& rhs_x, const Field2D& rhs_y,
                                                        const RefGrid2D& grid) {
  if (!(kappa > 0)) throw ValidationError("kappa", "must be positive");
  const Field2D diag = rho0 / kappa;
  return {screened_laplacian_solve(diag, kappa, rhs_x, grid),
          screened_laplacian_solve(diag, kappa, rhs_y, grid)};
}

}  // namespace wgf
