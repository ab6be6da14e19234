#include <array>
#include <cmath>
#include <vector>

#include "wgf/energy.hpp"

namespace wgf {
namespace {

// Unknown numbering: x of interior node (i, j) first, then y, row-major.
struct Unknowns {
  Eigen::Index mx, my;
  Eigen::Index n_int() const { return (mx - 1) * (my - 1); }
  bool pinned(Eigen::Index i, Eigen::Index j) const { return i == 0 || j == 0 || i == my || j == mx; }
  Eigen::Index x(Eigen::Index i, Eigen::Index j) const { return (i - 1) * (mx - 1) + (j - 1); }
  Eigen::Index y(Eigen::Index i, Eigen::Index j) const { return n_int() + x(i, j); }
};

enum Entry { A, B, C, D };  // a = dx/dX, b = dy/dX, c = dx/dY, d = dy/dY

/// One node coordinate entering a stencil entry linearly with weight coef.
struct Dep {
  bool is_y;
  Eigen::Index i, j;
  Entry entry;
  double coef;
};

std::array<Dep, 8> stencil_deps(const JacobianStencil<double>& s, Eigen::Index i, Eigen::Index j) {
  return {{{false, i, s.jr, A, 1 / s.dx},
           {false, i, s.jl, A, -1 / s.dx},
           {true, i, s.jr, B, 1 / s.dx},
           {true, i, s.jl, B, -1 / s.dx},
           {false, s.ir, j, C, 1 / s.dy},
           {false, s.il, j, C, -1 / s.dy},
           {true, s.ir, j, D, 1 / s.dy},
           {true, s.il, j, D, -1 / s.dy}}};
}

/// d det / d entry.
double det_partial(const JacobianStencil<double>& s, Entry e) {
  switch (e) {
    case A: return s.d;
    case B: return -s.c;
    case C: return -s.b;
    case D: return s.a;
  }
  return 0;
}

/// d^2 det / d e1 d e2 for det = a d - b c.
double det_second(Entry e1, Entry e2) {
  if ((e1 == A && e2 == D) || (e1 == D && e2 == A)) return 1;
  if ((e1 == B && e2 == C) || (e1 == C && e2 == B)) return -1;
  return 0;
}

double internal_weight(const EnergyModel& model) {
  return model.kind == ModelKind::PorousMedium2D ? 1.0 : model.nu;
}

void require_2d(const FlowMap2D& map, const Field2D& rho0, const EnergyModel& model) {
  if (!model.is_2d()) throw ValidationError("kind", "not a 2D model");
  const auto& g = map.ref;
  if (rho0.rows() != g.rows() || rho0.cols() != g.cols())
    throw ValidationError("rho0", "shape does not match the grid");
  if (map.x.rows() != g.rows() || map.x.cols() != g.cols() || map.y.rows() != g.rows() ||
      map.y.cols() != g.cols())
    throw ValidationError("map", "shape does not match the grid");
}

JacobianStencil<double> checked_stencil(const FlowMap2D& map, Eigen::Index i, Eigen::Index j,
                                        double det_floor) {
  const auto s = jacobian_stencil_2d(map, i, j);
  if (!(s.det() > det_floor)) throw MapDistortedError(i, j, s.det());
  return s;
}

/// F(s) det with s = rho0 / det, and its first two derivatives in det.
struct NodeInternal {
  InternalEnergy u;
  double m;
  double value(double r0, double det) const {
    if (r0 == 0 || u == InternalEnergy::None) return 0;
    return internal_density(u, m, r0 / det) * det;
  }
  double d1(double r0, double det) const { return r0 == 0 ? 0.0 : -internal_pressure(u, m, r0 / det); }
  double d2(double r0, double det) const {
    if (r0 == 0) return 0;
    const double s = r0 / det;
    switch (u) {
      case InternalEnergy::None: return 0;
      case InternalEnergy::Power: return m * std::pow(s, m) / det;
      case InternalEnergy::Log: return s / det;
    }
    return 0;
  }
};

double quad_area(const FlowMap2D& map, Eigen::Index i, Eigen::Index j) {
  const double x1 = map.x(i, j), y1 = map.y(i, j);
  const double x2 = map.x(i, j + 1), y2 = map.y(i, j + 1);
  const double x3 = map.x(i + 1, j + 1), y3 = map.y(i + 1, j + 1);
  const double x4 = map.x(i + 1, j), y4 = map.y(i + 1, j);
  return 0.5 * ((x3 - x1) * (y4 - y2) - (y3 - y1) * (x4 - x2));
}

}  // namespace

Field2D control_volumes_2d(const FlowMap2D& map) {
  const auto& g = map.ref;
  Field2D cells(g.m_y, g.m_x);
  for (Eigen::Index i = 0; i < g.m_y; ++i)
    for (Eigen::Index j = 0; j < g.m_x; ++j) cells(i, j) = quad_area(map, i, j);
  Field2D v = Field2D::Constant(g.rows(), g.cols(), g.h_x() * g.h_y());
  for (Eigen::Index i = 1; i < g.m_y; ++i)
    for (Eigen::Index j = 1; j < g.m_x; ++j)
      v(i, j) = 0.25 * (cells(i - 1, j - 1) + cells(i - 1, j) + cells(i, j - 1) + cells(i, j));
  return v;
}

double internal_energy_2d(const FlowMap2D& map, const Field2D& rho0, const EnergyModel& model,
                          double det_floor) {
  require_2d(map, rho0, model);
  const auto& g = map.ref;
  const double area = g.h_x() * g.h_y();
  const NodeInternal f{model.internal(), model.m};
  const double nu = internal_weight(model);

  double e = 0;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double det = checked_stencil(map, i, j, det_floor).det();
      e += g.node_weight(i, j) * nu * f.value(rho0(i, j), det) * area;
    }
  return e;
}

double energy_2d(const FlowMap2D& map, const Field2D& rho0, const EnergyModel& model, double det_floor) {
  const double e = internal_energy_2d(map, rho0, model, det_floor);
  if (!model.has_interaction()) return e;

  const auto& g = map.ref;
  const Field2D mu = density_from_map_2d(map, rho0, det_floor) * control_volumes_2d(map);
  const Eigen::Index n = g.rows() * g.cols();
  double w = 0;
  for (Eigen::Index p = 0; p < n; ++p) {
    if (mu(p) == 0) continue;
    for (Eigen::Index q = p + 1; q < n; ++q) {
      if (mu(q) == 0) continue;
      const double dx = map.x(p) - map.x(q), dy = map.y(p) - map.y(q);
      w += kernel_value_2d(model.kernel, dx * dx + dy * dy) * mu(p) * mu(q);
    }
  }
  return e + w;  // pairs counted once, i.e. one half of the ordered double sum
}

std::pair<Field2D, Field2D> interaction_gradient_2d(const PrevState2D& prev, const Field2D& rho0,
                                                    KernelKind kernel) {
  const FlowMap2D& mk = prev.map;
  const auto& g = mk.ref;
  if (prev.rho.rows() != g.rows() || prev.rho.cols() != g.cols() || rho0.rows() != g.rows() ||
      rho0.cols() != g.cols())
    throw ValidationError("prev", "level-k state does not match the grid");
  const Field2D mu = prev.rho * control_volumes_2d(mk);
  const Eigen::Index n = g.rows() * g.cols();
  Field2D gx = Field2D::Zero(g.rows(), g.cols());
  Field2D gy = Field2D::Zero(g.rows(), g.cols());
  for (Eigen::Index j = 1; j < g.m_x; ++j)
    for (Eigen::Index i = 1; i < g.m_y; ++i) {
      if (rho0(i, j) == 0) continue;
      const Eigen::Index p = j * g.rows() + i;  // column-major linear index
      double sx = 0, sy = 0;
      for (Eigen::Index q = 0; q < n; ++q) {
        if (q == p || mu(q) == 0) continue;
        const double dx = mk.x(p) - mk.x(q), dy = mk.y(p) - mk.y(q);
        const double fac = kernel_grad_factor_2d(kernel, dx * dx + dy * dy) * mu(q);
        sx += fac * dx;
        sy += fac * dy;
      }
      gx(i, j) = rho0(i, j) * sx;
      gy(i, j) = rho0(i, j) * sy;
    }
  return {gx, gy};
}

std::pair<Field2D, Field2D> internal_gradient_2d(const FlowMap2D& map, const Field2D& rho0,
                                                 const EnergyModel& model, double det_floor) {
  require_2d(map, rho0, model);
  const auto& g = map.ref;
  const Unknowns u{g.m_x, g.m_y};
  const NodeInternal f{model.internal(), model.m};
  const double nu = internal_weight(model);

  Field2D gx = Field2D::Zero(g.rows(), g.cols());
  Field2D gy = Field2D::Zero(g.rows(), g.cols());
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const auto s = checked_stencil(map, i, j, det_floor);
      const double dE = g.node_weight(i, j) * nu * f.d1(rho0(i, j), s.det());
      if (dE == 0) continue;
      for (const Dep& dep : stencil_deps(s, i, j)) {
        if (u.pinned(dep.i, dep.j)) continue;
        (dep.is_y ? gy : gx)(dep.i, dep.j) += dE * dep.coef * det_partial(s, dep.entry);
      }
    }
  return {gx, gy};
}

std::pair<Field2D, Field2D> energy_gradient_2d(const FlowMap2D& map, const Field2D& rho0,
                                               const EnergyModel& model, const PrevState2D* prev,
                                               double det_floor) {
  auto [gx, gy] = internal_gradient_2d(map, rho0, model, det_floor);
  if (!model.has_interaction()) return {gx, gy};
  if (prev == nullptr)
    throw Error(ErrorKind::MissingPrevState, "2D interaction needs the level-k state");
  const auto [ix, iy] = interaction_gradient_2d(*prev, rho0, model.kernel);
  gx += ix;
  gy += iy;
  return {gx, gy};
}

Eigen::SparseMatrix<double> energy_hessian_2d(const FlowMap2D& map, const Field2D& rho0,
                                              const EnergyModel& model, double det_floor) {
  require_2d(map, rho0, model);
  const auto& g = map.ref;
  const Unknowns u{g.m_x, g.m_y};
  const NodeInternal f{model.internal(), model.m};
  const double nu = internal_weight(model);

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(g.rows() * g.cols()) * 64);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      const double r0 = rho0(i, j);
      if (r0 == 0) continue;
      const auto s = checked_stencil(map, i, j, det_floor);
      const double w = g.node_weight(i, j) * nu;
      const double e1 = w * f.d1(r0, s.det()), e2 = w * f.d2(r0, s.det());
      const auto deps = stencil_deps(s, i, j);
      for (const Dep& p : deps) {
        if (u.pinned(p.i, p.j)) continue;
        const Eigen::Index row = p.is_y ? u.y(p.i, p.j) : u.x(p.i, p.j);
        const double gp = p.coef * det_partial(s, p.entry);
        for (const Dep& q : deps) {
          if (u.pinned(q.i, q.j)) continue;
          const Eigen::Index col = q.is_y ? u.y(q.i, q.j) : u.x(q.i, q.j);
          const double gq = q.coef * det_partial(s, q.entry);
          const double v = e2 * gp * gq + e1 * p.coef * q.coef * det_second(p.entry, q.entry);
          if (v != 0) t.emplace_back(row, col, v);
        }
      }
    }
  Eigen::SparseMatrix<double> H(2 * u.n_int(), 2 * u.n_int());
  H.setFromTriplets(t.begin(), t.end());
  return H;
}

}  // namespace wgf
