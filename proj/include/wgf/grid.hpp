#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "wgf/errors.hpp"

namespace wgf {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Node-centred 2D field. Row i indexes Y, column j indexes X.
template <typename Scalar>
using NodeArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// ---------------------------------------------------------------------------
// 1D
// ---------------------------------------------------------------------------

template <typename Scalar>
struct BasicRefGrid1D {
  Scalar x_left{-1};
  Scalar x_right{1};
  Eigen::Index n_cells{2};

  static BasicRefGrid1D make(Scalar left, Scalar right, Eigen::Index cells) {
    if (cells < 2) throw ValidationError("n_cells", "must be at least 2");
    if (!(right > left)) throw ValidationError("x_right", "must exceed x_left");
    return {left, right, cells};
  }

  Scalar delta_X() const { return (x_right - x_left) / static_cast<Scalar>(n_cells); }
  Scalar node(Eigen::Index j) const { return x_left + static_cast<Scalar>(j) * delta_X(); }
  Scalar cell_center(Eigen::Index j) const {
    return x_left + (static_cast<Scalar>(j) + Scalar(0.5)) * delta_X();
  }

  VectorX<Scalar> nodes() const {
    VectorX<Scalar> X(n_cells + 1);
    for (Eigen::Index j = 0; j <= n_cells; ++j) X[j] = node(j);
    return X;
  }
  VectorX<Scalar> cell_centers() const {
    VectorX<Scalar> X(n_cells);
    for (Eigen::Index j = 0; j < n_cells; ++j) X[j] = cell_center(j);
    return X;
  }

  bool operator==(const BasicRefGrid1D&) const = default;
};

/// Particle positions x_j = x(X_j) on a fixed reference grid.
template <typename Scalar>
struct BasicFlowMap1D {
  BasicRefGrid1D<Scalar> ref;
  VectorX<Scalar> positions;

  static BasicFlowMap1D identity(const BasicRefGrid1D<Scalar>& grid) { return {grid, grid.nodes()}; }

  Eigen::Index n_cells() const { return ref.n_cells; }
  Scalar cell_length(Eigen::Index j) const { return positions[j + 1] - positions[j]; }
  Scalar midpoint(Eigen::Index j) const { return Scalar(0.5) * (positions[j] + positions[j + 1]); }
};

template <typename Scalar>
bool admissible_1d(const BasicFlowMap1D<Scalar>& map) {
  const auto& x = map.positions;
  if (x.size() != map.ref.n_cells + 1) return false;
  for (Eigen::Index j = 0; j + 1 < x.size(); ++j)
    if (!(x[j + 1] > x[j])) return false;
  return true;
}

/// Cell densities rho_{j+1/2} = rho0_{j+1/2} * dX / (x_{j+1} - x_j).
template <typename Scalar>
VectorX<Scalar> density_from_map_1d(const BasicFlowMap1D<Scalar>& map, const VectorX<Scalar>& rho0) {
  const Eigen::Index n = map.n_cells();
  if (rho0.size() != n) throw ValidationError("rho0", "size must equal n_cells");
  const Scalar dX = map.ref.delta_X();
  VectorX<Scalar> rho(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar len = map.cell_length(j);
    if (!(len > 0))
      throw Error(ErrorKind::NonAdmissibleMap, "cell " + std::to_string(j) + " has non-positive length");
    rho[j] = rho0[j] * dX / len;
  }
  return rho;
}

// ---------------------------------------------------------------------------
// 2D
// ---------------------------------------------------------------------------

template <typename Scalar>
struct BasicRefGrid2D {
  Scalar x_extent{1};  // L_x, domain [-L_x, L_x]
  Scalar y_extent{1};
  Eigen::Index m_x{2};
  Eigen::Index m_y{2};

  static BasicRefGrid2D make(Scalar lx, Scalar ly, Eigen::Index mx, Eigen::Index my) {
    if (mx < 2 || my < 2) throw ValidationError("m_x", "cell counts must be at least 2");
    if (!(lx > 0) || !(ly > 0)) throw ValidationError("x_extent", "extents must be positive");
    return {lx, ly, mx, my};
  }

  Scalar h_x() const { return 2 * x_extent / static_cast<Scalar>(m_x); }
  Scalar h_y() const { return 2 * y_extent / static_cast<Scalar>(m_y); }
  Scalar X(Eigen::Index j) const { return -x_extent + static_cast<Scalar>(j) * h_x(); }
  Scalar Y(Eigen::Index i) const { return -y_extent + static_cast<Scalar>(i) * h_y(); }
  Eigen::Index rows() const { return m_y + 1; }
  Eigen::Index cols() const { return m_x + 1; }
  bool is_boundary(Eigen::Index i, Eigen::Index j) const {
    return i == 0 || j == 0 || i == m_y || j == m_x;
  }

  NodeArray<Scalar> X_nodes() const {
    NodeArray<Scalar> a(rows(), cols());
    for (Eigen::Index i = 0; i < rows(); ++i)
      for (Eigen::Index j = 0; j < cols(); ++j) a(i, j) = X(j);
    return a;
  }
  NodeArray<Scalar> Y_nodes() const {
    NodeArray<Scalar> a(rows(), cols());
    for (Eigen::Index i = 0; i < rows(); ++i)
      for (Eigen::Index j = 0; j < cols(); ++j) a(i, j) = Y(i);
    return a;
  }

  /// Trapezoid weight of a node: 1 inside, 1/2 on edges, 1/4 at corners.
  Scalar node_weight(Eigen::Index i, Eigen::Index j) const {
    Scalar w = 1;
    if (i == 0 || i == m_y) w *= Scalar(0.5);
    if (j == 0 || j == m_x) w *= Scalar(0.5);
    return w;
  }

  bool operator==(const BasicRefGrid2D&) const = default;
};

template <typename Scalar>
struct BasicFlowMap2D {
  BasicRefGrid2D<Scalar> ref;
  NodeArray<Scalar> x;
  NodeArray<Scalar> y;

  static BasicFlowMap2D identity(const BasicRefGrid2D<Scalar>& grid) {
    return {grid, grid.X_nodes(), grid.Y_nodes()};
  }
};

/// Entries of the discrete deformation gradient at one node.
/// a = dx/dX, b = dy/dX, c = dx/dY, d = dy/dY.
/// Interior nodes use central differences. Boundary nodes use the one-sided
/// difference in the direction that leaves the domain.
template <typename Scalar>
struct JacobianStencil {
  Eigen::Index jl, jr, il, ir;  // neighbours used for d/dX (jl, jr) and d/dY (il, ir)
  Scalar dx, dy;                // stencil widths
  Scalar a, b, c, d;
  Scalar det() const { return a * d - b * c; }
};

template <typename Scalar>
JacobianStencil<Scalar> jacobian_stencil_2d(const BasicFlowMap2D<Scalar>& map, Eigen::Index i,
                                            Eigen::Index j) {
  const auto& g = map.ref;
  JacobianStencil<Scalar> s{};
  s.jl = j == 0 ? 0 : j - 1;
  s.jr = j == g.m_x ? g.m_x : j + 1;
  s.il = i == 0 ? 0 : i - 1;
  s.ir = i == g.m_y ? g.m_y : i + 1;
  s.dx = static_cast<Scalar>(s.jr - s.jl) * g.h_x();
  s.dy = static_cast<Scalar>(s.ir - s.il) * g.h_y();
  s.a = (map.x(i, s.jr) - map.x(i, s.jl)) / s.dx;
  s.b = (map.y(i, s.jr) - map.y(i, s.jl)) / s.dx;
  s.c = (map.x(s.ir, j) - map.x(s.il, j)) / s.dy;
  s.d = (map.y(s.ir, j) - map.y(s.il, j)) / s.dy;
  return s;
}

/// Central-difference Jacobian determinant at an interior node.
template <typename Scalar>
Scalar det_jacobian_2d(const BasicFlowMap2D<Scalar>& map, Eigen::Index i, Eigen::Index j) {
  const auto& g = map.ref;
  if (i <= 0 || j <= 0 || i >= g.m_y || j >= g.m_x)
    throw Error(ErrorKind::OutOfRange,
                "node (" + std::to_string(i) + ", " + std::to_string(j) + ") is not interior");
  return jacobian_stencil_2d(map, i, j).det();
}

/// Determinants at every node (one-sided stencils on the boundary).
template <typename Scalar>
NodeArray<Scalar> det_field_2d(const BasicFlowMap2D<Scalar>& map) {
  NodeArray<Scalar> det(map.ref.rows(), map.ref.cols());
  for (Eigen::Index i = 0; i < det.rows(); ++i)
    for (Eigen::Index j = 0; j < det.cols(); ++j) det(i, j) = jacobian_stencil_2d(map, i, j).det();
  return det;
}

/// True iff every node determinant exceeds det_floor. Interior nodes use the
/// central stencil; boundary nodes the one-sided stencil, which on a pinned
/// frame reduces to the normal spacing of the first interior layer.
template <typename Scalar>
bool admissible_2d(const BasicFlowMap2D<Scalar>& map, Scalar det_floor = Scalar(1e-10)) {
  if (map.x.rows() != map.ref.rows() || map.x.cols() != map.ref.cols()) return false;
  if (map.y.rows() != map.ref.rows() || map.y.cols() != map.ref.cols()) return false;
  for (Eigen::Index i = 0; i < map.ref.rows(); ++i)
    for (Eigen::Index j = 0; j < map.ref.cols(); ++j)
      if (!(jacobian_stencil_2d(map, i, j).det() > det_floor)) return false;
  return true;
}

/// Interior rho = rho0 / det; boundary values are copied from rho0.
template <typename Scalar>
NodeArray<Scalar> density_from_map_2d(const BasicFlowMap2D<Scalar>& map, const NodeArray<Scalar>& rho0,
                                      Scalar det_floor = Scalar(1e-10)) {
  const auto& g = map.ref;
  NodeArray<Scalar> rho = rho0;
  for (Eigen::Index i = 1; i < g.m_y; ++i)
    for (Eigen::Index j = 1; j < g.m_x; ++j) {
      const Scalar det = det_jacobian_2d(map, i, j);
      if (!(det > det_floor)) throw MapDistortedError(i, j, static_cast<double>(det));
      rho(i, j) = rho0(i, j) / det;
    }
  return rho;
}

using RefGrid1D = BasicRefGrid1D<double>;
using FlowMap1D = BasicFlowMap1D<double>;
using RefGrid2D = BasicRefGrid2D<double>;
using FlowMap2D = BasicFlowMap2D<double>;
using Vec = VectorX<double>;
using Field2D = NodeArray<double>;

}  // namespace wgf
