#include "wgf/scheme2d.hpp"

#include <algorithm>
#include <limits>
#include <tuple>
#include <string>
#include <vector>

namespace wgf {

std::string_view to_string(Mode2D m) { return m == Mode2D::Explicit ? "explicit" : "implicit"; }

Mode2D parse_mode_2d(std::string_view s) {
  if (s == "explicit") return Mode2D::Explicit;
  if (s == "implicit") return Mode2D::Implicit;
  throw ValidationError("mode", "unknown value '" + std::string(s) + "'");
}

void SchemeConfig2D::validate(const EnergyModel& model) const {
  if (!(dt > 0)) throw ValidationError("dt", "must be positive");
  if (!(epsilon >= 0)) throw ValidationError("epsilon", "must be non-negative");
  if (!(det_floor >= 0)) throw ValidationError("det_floor", "must be non-negative");
  if (!(newton.alpha > 0 && newton.alpha <= 1)) throw ValidationError("alpha", "must lie in (0, 1]");
  if (!model.is_2d()) throw ValidationError("kind", "1D model in a 2D scheme");
  model.validate();
}

StepState2D make_state_2d(const RefGrid2D& grid, const InitialCondition2D& ic) {
  StepState2D s;
  s.map = FlowMap2D::identity(grid);
  s.rho0 = sample_nodes(ic, grid);
  s.rho = s.rho0;
  return s;
}

namespace {

double eps_of(const SchemeConfig2D& cfg, const RefGrid2D& g) {
  return cfg.regularization == Regularization::None ? 0.0 : cfg.eps(g.h_x());
}

/// Lap_h u at interior nodes, zero on the boundary.
Field2D laplacian(const Field2D& u, const RefGrid2D& g) {
  return screened_laplacian_apply(Field2D::Zero(g.rows(), g.cols()), -1.0, u, g);
}

void check_all_dets(const FlowMap2D& map, double floor) {
  for (Eigen::Index i = 0; i < map.ref.rows(); ++i)
    for (Eigen::Index j = 0; j < map.ref.cols(); ++j) {
      const double d = jacobian_stencil_2d(map, i, j).det();
      if (!(d > floor)) throw MapDistortedError(i, j, d);
    }
}

StepState2D finish(const StepState2D& s, FlowMap2D map, const SchemeConfig2D& cfg) {
  check_all_dets(map, cfg.det_floor);
  StepState2D next;
  next.rho = density_from_map_2d(map, s.rho0, cfg.det_floor);
  next.map = std::move(map);
  next.rho0 = s.rho0;
  next.time = s.time + cfg.dt;
  return next;
}

struct Interior {
  Eigen::Index mx, my;
  Eigen::Index n() const { return (mx - 1) * (my - 1); }
  Eigen::Index operator()(Eigen::Index i, Eigen::Index j) const { return (i - 1) * (mx - 1) + (j - 1); }

  Vec gather(const Field2D& fx, const Field2D& fy) const {
    Vec v(2 * n());
    for (Eigen::Index i = 1; i < my; ++i)
      for (Eigen::Index j = 1; j < mx; ++j) {
        v[(*this)(i, j)] = fx(i, j);
        v[n() + (*this)(i, j)] = fy(i, j);
      }
    return v;
  }
  FlowMap2D scatter(const Vec& v, const FlowMap2D& frame) const {
    FlowMap2D m = frame;
    for (Eigen::Index i = 1; i < my; ++i)
      for (Eigen::Index j = 1; j < mx; ++j) {
        m.x(i, j) = v[(*this)(i, j)];
        m.y(i, j) = v[n() + (*this)(i, j)];
      }
    return m;
  }
};

}  // namespace

StepState2D step_explicit_2d(const StepState2D& s, const EnergyModel& model, const SchemeConfig2D& cfg) {
  cfg.validate(model);
  const auto& g = s.map.ref;
  const double eps = eps_of(cfg, g);
  const PrevState2D prev{s.map, s.rho};
  const auto [gx, gy] = energy_gradient_2d(s.map, s.rho0, model, &prev, cfg.det_floor);

  Field2D rx = -gx, ry = -gy;
  if (cfg.regularization == Regularization::LaplacianOfX && eps > 0) {
    rx += eps * laplacian(s.map.x, g);
    ry += eps * laplacian(s.map.y, g);
  }
  const Field2D diag = s.rho0 / cfg.dt;
  FlowMap2D next = s.map;
  next.x += screened_laplacian_solve(diag, eps, rx, g);
  next.y += screened_laplacian_solve(diag, eps, ry, g);
  return finish(s, std::move(next), cfg);
}

std::pair<StepState2D, NewtonReport> step_implicit_2d(const StepState2D& s, const EnergyModel& model,
                                                      const SchemeConfig2D& cfg) {
  cfg.validate(model);
  const auto& g = s.map.ref;
  const Interior idx{g.m_x, g.m_y};
  const double eps = eps_of(cfg, g);
  const PrevState2D prev{s.map, s.rho};
  // Internal part at the unknown level; the interaction force is frozen at level k.
  Field2D fx = Field2D::Zero(g.rows(), g.cols()), fy = fx;
  if (model.has_interaction()) std::tie(fx, fy) = interaction_gradient_2d(prev, s.rho0, model.kernel);

  const Field2D diag = s.rho0 / cfg.dt;
  auto residual = [&](const Vec& u) {
    const FlowMap2D m = idx.scatter(u, s.map);
    const Field2D bx = cfg.regularization == Regularization::LaplacianOfIncrement ? Field2D(m.x - s.map.x) : m.x;
    const Field2D by = cfg.regularization == Regularization::LaplacianOfIncrement ? Field2D(m.y - s.map.y) : m.y;
    const auto [gx, gy] = internal_gradient_2d(m, s.rho0, model, cfg.det_floor);
    Field2D rx = diag * (m.x - s.map.x) - eps * laplacian(bx, g) + gx + fx;
    Field2D ry = diag * (m.y - s.map.y) - eps * laplacian(by, g) + gy + fy;
    return idx.gather(rx, ry);
  };

  // Transport and regularization block, identical for x and y.
  std::vector<Eigen::Triplet<double>> base;
  const double cx = eps / (g.h_x() * g.h_x()), cy = eps / (g.h_y() * g.h_y());
  for (int c = 0; c < 2; ++c) {
    const Eigen::Index off = c * idx.n();
    for (Eigen::Index i = 1; i < g.m_y; ++i)
      for (Eigen::Index j = 1; j < g.m_x; ++j) {
        const Eigen::Index p = off + idx(i, j);
        base.emplace_back(p, p, diag(i, j) + 2 * cx + 2 * cy);
        if (j > 1) base.emplace_back(p, off + idx(i, j - 1), -cx);
        if (j + 1 < g.m_x) base.emplace_back(p, off + idx(i, j + 1), -cx);
        if (i > 1) base.emplace_back(p, off + idx(i - 1, j), -cy);
        if (i + 1 < g.m_y) base.emplace_back(p, off + idx(i + 1, j), -cy);
      }
  }
  Eigen::SparseMatrix<double> B(2 * idx.n(), 2 * idx.n());
  B.setFromTriplets(base.begin(), base.end());

  auto jacobian = [&](const Vec& u) {
    Eigen::SparseMatrix<double> J = energy_hessian_2d(idx.scatter(u, s.map), s.rho0, model, cfg.det_floor);
    J += B;
    return J;
  };
  auto admissible = [&](const Vec& u) { return admissible_2d(idx.scatter(u, s.map), cfg.det_floor); };

  const auto [u, rep] =
      damped_newton<double>(residual, jacobian, idx.gather(s.map.x, s.map.y), cfg.newton, admissible);
  if (!rep.converged)
    throw Error(ErrorKind::NoConvergence, "2D Newton stopped at residual " + std::to_string(rep.final_residual_norm));
  return {finish(s, idx.scatter(u, s.map), cfg), rep};
}

std::pair<StepState2D, NewtonReport> step_2d(const StepState2D& s, const EnergyModel& model,
                                             const SchemeConfig2D& cfg) {
  if (cfg.mode == Mode2D::Implicit) return step_implicit_2d(s, model, cfg);
  NewtonReport rep;
  rep.converged = true;
  return {step_explicit_2d(s, model, cfg), rep};
}

double implicit_objective_2d(const FlowMap2D& m, const StepState2D& s, const EnergyModel& model,
                             const SchemeConfig2D& cfg) {
  const auto& g = s.map.ref;
  const double hx = g.h_x(), hy = g.h_y(), area = hx * hy;
  const double eps = eps_of(cfg, g);
  const bool inc = cfg.regularization == Regularization::LaplacianOfIncrement;
  const Field2D ux = inc ? Field2D(m.x - s.map.x) : m.x;
  const Field2D uy = inc ? Field2D(m.y - s.map.y) : m.y;

  double transport = 0;
  for (Eigen::Index i = 1; i < g.m_y; ++i)
    for (Eigen::Index j = 1; j < g.m_x; ++j) {
      const double dx = m.x(i, j) - s.map.x(i, j), dy = m.y(i, j) - s.map.y(i, j);
      transport += s.rho0(i, j) / (2 * cfg.dt) * (dx * dx + dy * dy) * area;
    }
  double reg = 0;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      if (j + 1 < g.cols()) {
        const double a = ux(i, j + 1) - ux(i, j), b = uy(i, j + 1) - uy(i, j);
        reg += 0.5 * eps * (a * a + b * b) / (hx * hx) * area;
      }
      if (i + 1 < g.rows()) {
        const double a = ux(i + 1, j) - ux(i, j), b = uy(i + 1, j) - uy(i, j);
        reg += 0.5 * eps * (a * a + b * b) / (hy * hy) * area;
      }
    }
  // Internal energy at the candidate map; interaction linearized at level k.
  const double internal = internal_energy_2d(m, s.rho0, model, cfg.det_floor);
  double linear = 0;
  if (model.has_interaction()) {
    const auto [fx, fy] = interaction_gradient_2d(PrevState2D{s.map, s.rho}, s.rho0, model.kernel);
    linear = ((fx * m.x).sum() + (fy * m.y).sum()) * area;
  }
  return transport + reg + internal + linear;
}

double mass_2d(const StepState2D& s) {
  const auto& g = s.map.ref;
  double mass = 0;
  for (Eigen::Index i = 1; i < g.m_y; ++i)
    for (Eigen::Index j = 1; j < g.m_x; ++j) mass += s.rho(i, j) * det_jacobian_2d(s.map, i, j);
  return mass * g.h_x() * g.h_y();
}

StabilityBounds stability_bounds(const StepState2D& s, double m, const StabilityConstants& c, bool need_tau) {
  const auto& g = s.map.ref;
  const double hx = g.h_x(), hy = g.h_y();
  double norm = 0;
  for (Eigen::Index i = 0; i < g.m_y; ++i)
    for (Eigen::Index j = 0; j < g.m_x; ++j) {
      const double xa = (s.map.x(i, j + 1) - s.map.x(i, j)) / hx, xc = (s.map.x(i + 1, j) - s.map.x(i, j)) / hy;
      const double ya = (s.map.y(i, j + 1) - s.map.y(i, j)) / hx, yc = (s.map.y(i + 1, j) - s.map.y(i, j)) / hy;
      norm = std::max({norm, std::hypot(xa, xc), std::hypot(ya, yc)});
    }
  double delta0 = c.delta0;
  if (!(delta0 > 0)) {
    delta0 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < g.m_y; ++i)
      for (Eigen::Index j = 1; j < g.m_x; ++j) delta0 = std::min(delta0, det_jacobian_2d(s.map, i, j));
  }
  StabilityBounds b;
  b.grad_norm = norm;
  b.delta0 = delta0;
  const double n2 = norm * norm, dp = std::pow(delta0, m + 1), h = std::min(hx, hy);
  b.eps_min = c.C0 * n2 / dp;
  const double rmin = s.rho0.minCoeff();
  if (rmin <= 0) {
    if (need_tau) throw Error(ErrorKind::ZeroDensity, "min rho0 is zero; no positive step bound");
    b.tau_min = 0;
  } else {
    b.tau_min = rmin * dp * h * h / (2 * c.C1 * c.C0 * n2);
  }
  return b;
}

}  // namespace wgf
