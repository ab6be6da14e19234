#include "wgf/scheme1d.hpp"

#include <string>

namespace wgf {

namespace {

template <typename E, std::size_t N>
E lookup(std::string_view s, const std::pair<std::string_view, E> (&table)[N], const char* field) {
  for (const auto& [name, value] : table)
    if (name == s) return value;
  throw ValidationError(field, "unknown value '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(E e, const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, value] : table)
    if (value == e) return name;
  return "unknown";
}

const std::pair<std::string_view, Regularization> kRegNames[] = {
    {"none", Regularization::None},
    {"laplacian_x", Regularization::LaplacianOfX},
    {"laplacian_increment", Regularization::LaplacianOfIncrement},
};
const std::pair<std::string_view, EpsilonScaling> kScalingNames[] = {
    {"absolute", EpsilonScaling::Absolute},
    {"dt", EpsilonScaling::Dt},
    {"h2", EpsilonScaling::H2},
};
const std::pair<std::string_view, Boundary1D> kBoundaryNames[] = {
    {"dirichlet", Boundary1D::Dirichlet},
    {"free_pme", Boundary1D::FreeBoundaryPME},
    {"free_fp", Boundary1D::FreeBoundaryFP},
};
const std::pair<std::string_view, TimeOrder> kOrderNames[] = {
    {"first", TimeOrder::First},
    {"crank_nicolson", TimeOrder::CrankNicolson},
};

}  // namespace

std::string_view to_string(Regularization r) { return name_of(r, kRegNames); }
std::string_view to_string(EpsilonScaling s) { return name_of(s, kScalingNames); }
std::string_view to_string(Boundary1D b) { return name_of(b, kBoundaryNames); }
std::string_view to_string(TimeOrder t) { return name_of(t, kOrderNames); }
Regularization parse_regularization(std::string_view s) { return lookup(s, kRegNames, "regularization"); }
EpsilonScaling parse_epsilon_scaling(std::string_view s) { return lookup(s, kScalingNames, "epsilon_scaling"); }
Boundary1D parse_boundary(std::string_view s) { return lookup(s, kBoundaryNames, "boundary"); }
TimeOrder parse_time_order(std::string_view s) { return lookup(s, kOrderNames, "time_order"); }

double effective_epsilon(double epsilon, EpsilonScaling scaling, double dt, double h) {
  switch (scaling) {
    case EpsilonScaling::Absolute: return epsilon;
    case EpsilonScaling::Dt: return epsilon * dt;
    case EpsilonScaling::H2: return epsilon * h * h;
  }
  return epsilon;
}

void SchemeConfig1D::validate(const EnergyModel& model) const {
  if (!(dt > 0)) throw ValidationError("dt", "must be positive");
  if (!(epsilon >= 0)) throw ValidationError("epsilon", "must be non-negative");
  if (!(newton.alpha > 0 && newton.alpha <= 1)) throw ValidationError("alpha", "must lie in (0, 1]");
  if (newton.max_iters <= 0) throw ValidationError("max_iters", "must be positive");
  if (!(newton.residual_tol > 0) || !(newton.step_tol > 0))
    throw ValidationError("residual_tol", "tolerances must be positive");
  if (model.is_2d()) throw ValidationError("kind", "2D model in a 1D scheme");
  if (boundary == Boundary1D::FreeBoundaryPME && model.kind != ModelKind::PorousMedium)
    throw ValidationError("boundary", "free_pme needs the porous_medium model");
  if (boundary == Boundary1D::FreeBoundaryFP && model.kind != ModelKind::NonlinearFP)
    throw ValidationError("boundary", "free_fp needs the nonlinear_fp model");
  model.validate();
}

StepState1D make_state_1d(const RefGrid1D& grid, const InitialCondition1D& ic) {
  StepState1D s;
  s.map = FlowMap1D::identity(grid);
  s.rho0 = sample_cells(ic, grid);
  s.rho0_nodes.resize(grid.n_cells + 1);
  for (Eigen::Index j = 0; j <= grid.n_cells; ++j) s.rho0_nodes[j] = ic.rho(grid.node(j));
  s.rho = s.rho0;
  return s;
}

double dirichlet_energy_1d(const Vec& x, double delta_X, double eps) {
  const Eigen::Index n = x.size() - 1;
  const Vec d = x.tail(n) - x.head(n);
  return 0.5 * eps * d.squaredNorm() / delta_X;
}

namespace {

/// Tridiagonal of (eps/dX) * sum_j (x_{j+1} - x_j)^2 / 2 over all nodes.
Tridiagonal dirichlet_hessian(Eigen::Index nodes, double coef) {
  Tridiagonal t = Tridiagonal::zero(nodes);
  for (Eigen::Index j = 0; j + 1 < nodes; ++j) {
    t.diag[j] += coef;
    t.diag[j + 1] += coef;
    t.upper[j] -= coef;
    t.lower[j] -= coef;
  }
  return t;
}

Tridiagonal interior_of(const Tridiagonal& f) {
  const Eigen::Index n = f.size() - 2;
  Tridiagonal t;
  t.diag = f.diag.segment(1, n);
  t.lower = f.lower.segment(1, n - 1);
  t.upper = f.upper.segment(1, n - 1);
  return t;
}

bool increasing(const Vec& x) {
  for (Eigen::Index j = 0; j + 1 < x.size(); ++j)
    if (!(x[j + 1] > x[j])) return false;
  return true;
}

/// Free-boundary law lag * (x_b - x_b^k)/dt + lag * V'(x_b) + K / (+-(x_n - x_b)) = 0
/// at one end, with the level-k lag ((x_1^k - x_0^k)/dX)^(m-1).
struct BoundaryLaw {
  double lag = 0, K = 0, xk = 0, dt = 0;
  PotentialKind v = PotentialKind::None;
  bool left = true;

  static BoundaryLaw make(const StepState1D& s, double m, double dt, PotentialKind v, bool left) {
    const Eigen::Index n = s.map.n_cells();
    const double dX = s.map.ref.delta_X();
    if (s.rho0_nodes.size() != n + 1)
      throw ValidationError("rho0_nodes", "free boundary needs the nodal reference density");
    const Vec& x = s.map.positions;
    const double len = left ? x[1] - x[0] : x[n] - x[n - 1];
    if (!(len > 0)) throw Error(ErrorKind::DegenerateStencil, "boundary cell has zero length at level k");
    const double pa = std::pow(s.rho0_nodes[left ? 0 : n - 1], m - 1);
    const double pb = std::pow(s.rho0_nodes[left ? 1 : n], m - 1);
    BoundaryLaw b;
    b.lag = std::pow(len / dX, m - 1);
    b.K = m / (m - 1) * (pb - pa);  // (m/(m-1)) * D * dX
    b.xk = left ? x[0] : x[n];
    b.dt = dt;
    b.v = v;
    b.left = left;
    return b;
  }
  // xb: boundary node, xn: its neighbour.
  double value(double xb, double xn) const {
    const double len = left ? xn - xb : xb - xn;
    return lag * ((xb - xk) / dt + potential_d1(v, xb)) + K / len;
  }
  double d_xb(double xb, double xn) const {
    const double len = left ? xn - xb : xb - xn;
    return lag * (1 / dt + potential_d2(v, xb)) + (left ? K : -K) / (len * len);
  }
  double d_xn(double xb, double xn) const {
    const double len = left ? xn - xb : xb - xn;
    return (left ? -K : K) / (len * len);
  }
};

class StepProblem {
 public:
  StepProblem(const StepState1D& s, const EnergyModel& model, const SchemeConfig1D& cfg, bool cn)
      : s_(s), model_(model), cfg_(cfg), cn_(cn), n_(s.map.n_cells()), dX_(s.map.ref.delta_X()),
        eps_(cfg.regularization == Regularization::None ? 0.0 : cfg.eps(dX_)),
        free_(cfg.boundary != Boundary1D::Dirichlet), prev_{s.map.positions, s.rho} {
    cfg.validate(model);
    if (s.rho0.size() != n_ || s.rho.size() != n_) throw ValidationError("rho0", "size must equal n_cells");
    if (!admissible_1d(s.map)) throw Error(ErrorKind::NonAdmissibleMap, "level-k map is not admissible");
    if (cn_) g_k_ = energy_gradient_1d_full(s.map, s.rho0, model, prevp());
    if (free_) {
      left_ = BoundaryLaw::make(s, model.m, cfg.dt, model.potential, true);
      right_ = BoundaryLaw::make(s, model.m, cfg.dt, model.potential, false);
    }
  }

  bool tridiagonal() const { return jacobian_is_tridiagonal(model_); }

  Vec full(const Vec& u) const {
    if (free_) return u;
    Vec x(n_ + 1);
    x[0] = s_.map.positions[0];
    x[n_] = s_.map.positions[n_];
    x.segment(1, n_ - 1) = u;
    return x;
  }
  Vec unknowns(const Vec& x) const { return free_ ? x : Vec(x.segment(1, n_ - 1)); }
  bool admissible(const Vec& u) const { return increasing(full(u)); }

  Vec residual(const Vec& u) const {
    const Vec x = full(u);
    const FlowMap1D map{s_.map.ref, x};
    const Vec& xk = s_.map.positions;
    const double c = dX_ / (2 * cfg_.dt);
    Vec r = Vec::Zero(n_ + 1);
    for (Eigen::Index j = 0; j < n_; ++j) {
      const double t = c * s_.rho0[j] * 0.5 * ((x[j] + x[j + 1]) - (xk[j] + xk[j + 1]));
      r[j] += t;
      r[j + 1] += t;
    }
    if (eps_ > 0) {
      const Vec base = cfg_.regularization == Regularization::LaplacianOfIncrement ? Vec(x - xk) : x;
      r += dirichlet_hessian(n_ + 1, eps_ / dX_) * base;
    }
    const Vec g = energy_gradient_1d_full(map, s_.rho0, model_, prevp());
    r += cn_ ? Vec(0.5 * (g + g_k_)) : g;
    if (!free_) return r.segment(1, n_ - 1);
    r[0] = left_.value(x[0], x[1]);
    r[n_] = right_.value(x[n_], x[n_ - 1]);
    return r;
  }

  Tridiagonal jacobian_tri(const Vec& u) const {
    const Vec x = full(u);
    Tridiagonal J = local_part();
    Tridiagonal H = energy_hessian_1d_full(FlowMap1D{s_.map.ref, x}, s_.rho0, model_, prevp());
    if (cn_) H *= 0.5;
    J += H;
    if (!free_) return interior_of(J);
    J.diag[0] = left_.d_xb(x[0], x[1]);
    J.upper[0] = left_.d_xn(x[0], x[1]);
    J.diag[n_] = right_.d_xb(x[n_], x[n_ - 1]);
    J.lower[n_ - 1] = right_.d_xn(x[n_], x[n_ - 1]);
    return J;
  }

  Eigen::MatrixXd jacobian_dense(const Vec& u) const {
    const Vec x = full(u);
    Eigen::MatrixXd J = local_part().to_dense();
    J += (cn_ ? 0.5 : 1.0) *
         energy_jacobian_1d_full_dense(FlowMap1D{s_.map.ref, x}, s_.rho0, model_, prevp());
    if (!free_) return J.block(1, 1, n_ - 1, n_ - 1);
    J.row(0).setZero();
    J.row(n_).setZero();
    J(0, 0) = left_.d_xb(x[0], x[1]);
    J(0, 1) = left_.d_xn(x[0], x[1]);
    J(n_, n_) = right_.d_xb(x[n_], x[n_ - 1]);
    J(n_, n_ - 1) = right_.d_xn(x[n_], x[n_ - 1]);
    return J;
  }

  const PrevState1D* prevp() const { return model_.has_interaction() ? &prev_ : nullptr; }

 private:
  // Transport and regularization parts of the Jacobian, over all nodes.
  Tridiagonal local_part() const {
    const double c = dX_ / (4 * cfg_.dt);
    Tridiagonal t = Tridiagonal::zero(n_ + 1);
    for (Eigen::Index j = 0; j < n_; ++j) {
      const double w = c * s_.rho0[j];
      t.diag[j] += w;
      t.diag[j + 1] += w;
      t.upper[j] += w;
      t.lower[j] += w;
    }
    if (eps_ > 0) t += dirichlet_hessian(n_ + 1, eps_ / dX_);
    return t;
  }

  const StepState1D& s_;
  const EnergyModel& model_;
  const SchemeConfig1D& cfg_;
  bool cn_;
  Eigen::Index n_;
  double dX_, eps_;
  bool free_;
  PrevState1D prev_;
  Vec g_k_;
  BoundaryLaw left_, right_;
};

std::pair<StepState1D, NewtonReport> advance(const StepState1D& s, const EnergyModel& model,
                                             const SchemeConfig1D& cfg, bool cn) {
  const StepProblem p(s, model, cfg, cn);
  auto res = [&](const Vec& u) { return p.residual(u); };
  auto adm = [&](const Vec& u) { return p.admissible(u); };
  const Vec u0 = p.unknowns(s.map.positions);

  std::pair<Vec, NewtonReport> out;
  if (p.tridiagonal())
    out = damped_newton<double>(res, [&](const Vec& u) { return p.jacobian_tri(u); }, u0, cfg.newton, adm);
  else
    out = damped_newton<double>(res, [&](const Vec& u) { return p.jacobian_dense(u); }, u0, cfg.newton, adm);

  const NewtonReport& rep = out.second;
  if (!rep.converged)
    throw Error(ErrorKind::NoConvergence, "Newton stopped at residual " + std::to_string(rep.final_residual_norm) +
                                              " after " + std::to_string(rep.iterations) + " iterations (t = " +
                                              std::to_string(s.time + cfg.dt) + ")");
  StepState1D next = s;
  next.map.positions = p.full(out.first);
  next.rho = density_from_map_1d(next.map, s.rho0);
  next.time = s.time + cfg.dt;
  return {std::move(next), rep};
}

std::pair<double, double> boundary_only(const StepState1D& s, double m, double dt, PotentialKind v) {
  if (!(m > 1)) throw ValidationError("m", "m must exceed 1");
  if (!(dt > 0)) throw ValidationError("dt", "must be positive");
  const Eigen::Index n = s.map.n_cells();
  const Vec& x = s.map.positions;
  NewtonConfig nc;
  nc.alpha = 1;
  auto solve = [&](bool left) {
    const BoundaryLaw law = BoundaryLaw::make(s, m, dt, v, left);
    const double xn = left ? x[1] : x[n - 1];
    auto res = [&](const Vec& u) { return Vec::Constant(1, law.value(u[0], xn)); };
    auto jac = [&](const Vec& u) { return Eigen::MatrixXd(Eigen::MatrixXd::Constant(1, 1, law.d_xb(u[0], xn))); };
    auto adm = [&](const Vec& u) { return left ? u[0] < xn : u[0] > xn; };
    const auto [u, rep] = damped_newton<double>(res, jac, Vec::Constant(1, law.xk), nc, adm);
    if (!rep.converged) throw Error(ErrorKind::NoConvergence, "boundary equation did not converge");
    return u[0];
  };
  return {solve(true), solve(false)};
}

}  // namespace

std::pair<StepState1D, NewtonReport> step_first_order(const StepState1D& state, const EnergyModel& model,
                                                      const SchemeConfig1D& cfg) {
  return advance(state, model, cfg, false);
}

std::pair<StepState1D, NewtonReport> step_crank_nicolson(const StepState1D& state, const EnergyModel& model,
                                                         const SchemeConfig1D& cfg) {
  return advance(state, model, cfg, true);
}

std::pair<StepState1D, NewtonReport> step_1d(const StepState1D& state, const EnergyModel& model,
                                             const SchemeConfig1D& cfg) {
  return advance(state, model, cfg, cfg.time_order == TimeOrder::CrankNicolson);
}

std::pair<double, double> free_boundary_step_pme(const StepState1D& state, double m, double dt) {
  return boundary_only(state, m, dt, PotentialKind::None);
}

std::pair<double, double> free_boundary_step_fp(const StepState1D& state, double m, double dt,
                                                PotentialKind drift) {
  return boundary_only(state, m, dt, drift);
}

Vec step_residual_1d(const Vec& positions, const StepState1D& state, const EnergyModel& model,
                     const SchemeConfig1D& cfg) {
  const StepProblem p(state, model, cfg, cfg.time_order == TimeOrder::CrankNicolson);
  return p.residual(p.unknowns(positions));
}

double step_objective_1d(const Vec& x, const StepState1D& s, const EnergyModel& model,
                         const SchemeConfig1D& cfg) {
  const Eigen::Index n = s.map.n_cells();
  const double dX = s.map.ref.delta_X();
  const Vec& xk = s.map.positions;
  double transport = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double dm = 0.5 * ((x[j] + x[j + 1]) - (xk[j] + xk[j + 1]));
    transport += dX * s.rho0[j] / (2 * cfg.dt) * dm * dm;
  }
  double reg = 0;
  if (cfg.regularization == Regularization::LaplacianOfX) reg = dirichlet_energy_1d(x, dX, cfg.eps(dX));
  if (cfg.regularization == Regularization::LaplacianOfIncrement)
    reg = dirichlet_energy_1d(x - xk, dX, cfg.eps(dX));
  const PrevState1D prev{xk, s.rho};
  return transport + reg + discrete_energy_1d(FlowMap1D{s.map.ref, x}, s.rho0, model, &prev);
}

double regularized_energy_1d(const StepState1D& state, const EnergyModel& model, const SchemeConfig1D& cfg) {
  double e = free_energy_1d(state.map, state.rho0, model);
  if (cfg.regularization == Regularization::LaplacianOfX)
    e += dirichlet_energy_1d(state.map.positions, state.map.ref.delta_X(), cfg.eps(state.map.ref.delta_X()));
  return e;
}

}  // namespace wgf
