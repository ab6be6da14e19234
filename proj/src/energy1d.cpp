#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wgf/energy.hpp"

namespace wgf {
namespace {

void require_admissible(const FlowMap1D& map, const Vec& rho0) {
  if (rho0.size() != map.n_cells()) throw ValidationError("rho0", "size must equal n_cells");
  if (!admissible_1d(map)) throw Error(ErrorKind::NonAdmissibleMap, "flow map is not strictly increasing");
}

const PrevState1D& require_prev(const EnergyModel& model, const PrevState1D* prev, Eigen::Index n) {
  if (prev == nullptr)
    throw Error(ErrorKind::MissingPrevState,
                std::string(to_string(model.coupling)) + " coupling needs the level-k state");
  if (prev->positions.size() != n + 1 || prev->rho.size() != n)
    throw ValidationError("prev", "level-k state does not match the grid");
  return *prev;
}

PotentialKind drift_of(const EnergyModel& model) {
  switch (model.kind) {
    case ModelKind::Drift:
    case ModelKind::LinearFPLog:
    case ModelKind::NonlinearFP: return model.potential;
    default: return PotentialKind::None;
  }
}

/// Cell contribution g(d) = F(q/d) d of the internal energy and its first two
/// derivatives in the cell length d, for cell mass q.
struct CellInternal {
  InternalEnergy u;
  double m;
  double g(double q, double d) const {
    if (q == 0) return 0;
    switch (u) {
      case InternalEnergy::None: return 0;
      case InternalEnergy::Power: return std::pow(q, m) * std::pow(d, 1 - m) / (m - 1);
      case InternalEnergy::Log: return q * std::log(q / d);
    }
    return 0;
  }
  double g1(double q, double d) const {
    if (q == 0) return 0;
    switch (u) {
      case InternalEnergy::None: return 0;
      case InternalEnergy::Power: return -std::pow(q / d, m);
      case InternalEnergy::Log: return -q / d;
    }
    return 0;
  }
  double g2(double q, double d) const {
    if (q == 0) return 0;
    switch (u) {
      case InternalEnergy::None: return 0;
      case InternalEnergy::Power: return m * std::pow(q / d, m) / d;
      case InternalEnergy::Log: return q / (d * d);
    }
    return 0;
  }
};

enum class KernelPart { Antiderivative, Value, Derivative };

void guard_separation(const Eigen::ArrayXd& t) {
  if (t.size() && t.abs().minCoeff() < kKernelSingularityTol)
    throw Error(ErrorKind::KernelSingularity, "logarithmic kernel evaluated at coincident points");
}

/// sum_l c_l f(t_l) for the kernel, its derivative or its antiderivative.
/// The logarithmic kernels are evaluated with Eigen's vectorized log.
double kernel_sum(KernelKind k, KernelPart part, const Eigen::ArrayXd& t, const Eigen::ArrayXd& c) {
  constexpr double inv_two_pi = 0.5 * std::numbers::inv_pi;
  // t log|t| with the t = 0 limit; clamping keeps the expression vectorizable.
  auto t_log_t = [&] { return t * t.abs().max(std::numeric_limits<double>::min()).log(); };
  switch (k) {
    case KernelKind::QuadraticMinusLog:
      switch (part) {
        case KernelPart::Antiderivative: return (c * (t.cube() / 6 - (t_log_t() - t))).sum();
        case KernelPart::Value: guard_separation(t); return (c * (0.5 * t.square() - t.abs().log())).sum();
        case KernelPart::Derivative: guard_separation(t); return (c * (t - t.inverse())).sum();
      }
      break;
    case KernelKind::LogNewtonian1D:
    case KernelKind::LogNewtonian2D:
      switch (part) {
        case KernelPart::Antiderivative: return inv_two_pi * (c * (t_log_t() - t)).sum();
        case KernelPart::Value: guard_separation(t); return inv_two_pi * (c * t.abs().log()).sum();
        case KernelPart::Derivative: guard_separation(t); return inv_two_pi * (c * t.inverse()).sum();
      }
      break;
    case KernelKind::GaussianAttraction2D: break;
  }
  double s = 0;
  for (Eigen::Index l = 0; l < t.size(); ++l) {
    switch (part) {
      case KernelPart::Antiderivative: s += c[l] * kernel_antiderivative(k, t[l]); break;
      case KernelPart::Value: s += c[l] * kernel_value(k, t[l]); break;
      case KernelPart::Derivative: s += c[l] * kernel_d1(k, t[l]); break;
    }
  }
  return s;
}

/// Source cells of the interaction: node positions y and per-cell weights w
/// (cell densities). Jumps w_n - w_{n-1} with zero padding turn the cell sums
/// into node sums; only nodes with a nonzero jump are kept for the sums.
struct Sources {
  const Vec& y;
  Vec jump;
  Eigen::ArrayXd y_active, jump_active;

  Sources(const Vec& nodes, const Vec& w) : y(nodes), jump(nodes.size()) {
    const Eigen::Index n = w.size();
    for (Eigen::Index l = 0; l <= n; ++l) jump[l] = (l < n ? w[l] : 0.0) - (l > 0 ? w[l - 1] : 0.0);
    const Eigen::Index active = (jump.array() != 0).count();
    y_active.resize(active);
    jump_active.resize(active);
    for (Eigen::Index l = 0, k = 0; l <= n; ++l)
      if (jump[l] != 0) {
        y_active[k] = y[l];
        jump_active[k++] = jump[l];
      }
  }

  /// Sum over cells of w_j * integral of W(a - s) for s in [y_j, y_{j+1}],
  /// where w are the weights the jumps were built from.
  double cell_integral(KernelKind k, double a) const {
    return kernel_sum(k, KernelPart::Antiderivative, a - y_active, jump_active);
  }
  /// d/da of cell_integral.
  double g1(KernelKind k, double a) const { return kernel_sum(k, KernelPart::Value, a - y_active, jump_active); }
  /// d^2/da^2 of cell_integral.
  double g2(KernelKind k, double a) const {
    return kernel_sum(k, KernelPart::Derivative, a - y_active, jump_active);
  }
};

Vec midpoints(const Vec& x) {
  const Eigen::Index n = x.size() - 1;
  return 0.5 * (x.head(n) + x.tail(n));
}

Vec cell_masses(const FlowMap1D& map, const Vec& rho0) { return rho0 * map.ref.delta_X(); }

double local_energy(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model) {
  const CellInternal cell{model.internal(), model.m};
  const PotentialKind v = drift_of(model);
  const Vec q = cell_masses(map, rho0);
  double e = 0;
  for (Eigen::Index j = 0; j < map.n_cells(); ++j) {
    e += cell.g(q[j], map.cell_length(j));
    if (v != PotentialKind::None) e += q[j] * potential_value(v, map.midpoint(j));
  }
  return e;
}

Vec local_gradient(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model) {
  const CellInternal cell{model.internal(), model.m};
  const PotentialKind v = drift_of(model);
  const Vec q = cell_masses(map, rho0);
  const Eigen::Index n = map.n_cells();
  Vec g = Vec::Zero(n + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d1 = cell.g1(q[j], map.cell_length(j));
    g[j + 1] += d1;
    g[j] -= d1;
    if (v != PotentialKind::None) {
      const double f = 0.5 * q[j] * potential_d1(v, map.midpoint(j));
      g[j] += f;
      g[j + 1] += f;
    }
  }
  return g;
}

Tridiagonal local_hessian(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model) {
  const CellInternal cell{model.internal(), model.m};
  const PotentialKind v = drift_of(model);
  const Vec q = cell_masses(map, rho0);
  const Eigen::Index n = map.n_cells();
  Tridiagonal h = Tridiagonal::zero(n + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double c = cell.g2(q[j], map.cell_length(j));
    h.diag[j] += c;
    h.diag[j + 1] += c;
    h.upper[j] -= c;
    h.lower[j] -= c;
    if (v != PotentialKind::None) {
      const double s = 0.25 * q[j] * potential_d2(v, map.midpoint(j));
      h.diag[j] += s;
      h.diag[j + 1] += s;
      h.upper[j] += s;
      h.lower[j] += s;
    }
  }
  return h;
}

/// Spreads per-cell values f_i (a derivative at midpoint i) onto the nodes:
/// out_l = (f_l + f_{l-1}) / 2.
Vec spread_to_nodes(const Vec& f) {
  const Eigen::Index n = f.size();
  Vec out = Vec::Zero(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] += 0.5 * f[i];
    out[i + 1] += 0.5 * f[i];
  }
  return out;
}

/// Interaction gradient with targets at midpoints of `targets` and sources
/// from `src`: node l receives (q_l G1(a_l) + q_{l-1} G1(a_{l-1})) / 2.
Vec interaction_gradient(const Vec& targets, const Sources& src, const Vec& q, KernelKind k) {
  const Vec a = midpoints(targets);
  Vec f(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) f[i] = q[i] * src.g1(k, a[i]);
  return spread_to_nodes(f);
}

double interaction_energy(const Vec& targets, const Sources& src, const Vec& q, KernelKind k) {
  const Vec a = midpoints(targets);
  double e = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) e += q[i] * src.cell_integral(k, a[i]);
  return e;
}

/// Midpoint-curvature part: cell i adds q_i G2(a_i) / 4 on the block (i, i+1).
void add_midpoint_curvature(Tridiagonal& h, const Vec& targets, const Sources& src, const Vec& q,
                            KernelKind k) {
  const Vec a = midpoints(targets);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double s = 0.25 * q[i] * src.g2(k, a[i]);
    h.diag[i] += s;
    h.diag[i + 1] += s;
    h.upper[i] += s;
    h.lower[i] += s;
  }
}

Tridiagonal interior_block(const Tridiagonal& full) {
  const Eigen::Index n = full.size() - 2;
  Tridiagonal t;
  t.diag = full.diag.segment(1, n);
  t.upper = full.upper.segment(1, n - 1);
  t.lower = full.lower.segment(1, n - 1);
  return t;
}

}  // namespace

bool jacobian_is_tridiagonal(const EnergyModel& model) {
  return !model.has_interaction() || model.coupling == Coupling::ImplicitExplicit ||
         model.coupling == Coupling::FullyExplicit;
}

double discrete_energy_1d(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model,
                          const PrevState1D* prev) {
  require_admissible(map, rho0);
  double e = local_energy(map, rho0, model);
  if (!model.has_interaction()) return e;

  const PrevState1D& p = require_prev(model, prev, map.n_cells());
  const Vec q = cell_masses(map, rho0);
  const Vec& x = map.positions;
  const KernelKind k = model.kernel;
  switch (model.coupling) {
    case Coupling::ImplicitExplicit:
      return e + interaction_energy(x, Sources(p.positions, p.rho), q, k);
    case Coupling::ExplicitImplicit:
      return e + interaction_energy(p.positions, Sources(x, p.rho), q, k);
    case Coupling::ImplicitImplicit:
      return e + interaction_energy(x, Sources(x, p.rho), q, k);
    case Coupling::FullyExplicit: {
      const Sources src(p.positions, p.rho);
      const double e0 = interaction_energy(p.positions, src, q, k);
      const Vec g0 = interaction_gradient(p.positions, src, q, k);
      return e + e0 + g0.dot(x - p.positions);
    }
  }
  return e;
}

Vec energy_gradient_1d_full(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model,
                            const PrevState1D* prev) {
  require_admissible(map, rho0);
  Vec g = local_gradient(map, rho0, model);
  if (!model.has_interaction()) return g;

  const PrevState1D& p = require_prev(model, prev, map.n_cells());
  const Vec q = cell_masses(map, rho0);
  const Vec& x = map.positions;
  const KernelKind k = model.kernel;
  switch (model.coupling) {
    case Coupling::ImplicitExplicit: g += interaction_gradient(x, Sources(p.positions, p.rho), q, k); break;
    case Coupling::ExplicitImplicit: g += interaction_gradient(p.positions, Sources(x, p.rho), q, k); break;
    case Coupling::ImplicitImplicit: g += interaction_gradient(x, Sources(x, p.rho), q, k); break;
    case Coupling::FullyExplicit:
      g += interaction_gradient(p.positions, Sources(p.positions, p.rho), q, k);
      break;
  }
  return g;
}

Tridiagonal energy_hessian_1d_full(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model,
                                   const PrevState1D* prev) {
  require_admissible(map, rho0);
  if (!jacobian_is_tridiagonal(model))
    throw ValidationError("coupling", "this coupling has a dense Jacobian; use the dense path");
  Tridiagonal h = local_hessian(map, rho0, model);
  if (model.has_interaction() && model.coupling == Coupling::ImplicitExplicit) {
    const PrevState1D& p = require_prev(model, prev, map.n_cells());
    add_midpoint_curvature(h, map.positions, Sources(p.positions, p.rho), cell_masses(map, rho0),
                           model.kernel);
  } else if (model.has_interaction()) {
    require_prev(model, prev, map.n_cells());
  }
  return h;
}

Eigen::MatrixXd energy_jacobian_1d_full_dense(const FlowMap1D& map, const Vec& rho0,
                                              const EnergyModel& model, const PrevState1D* prev) {
  require_admissible(map, rho0);
  if (jacobian_is_tridiagonal(model)) return energy_hessian_1d_full(map, rho0, model, prev).to_dense();

  Eigen::MatrixXd J = local_hessian(map, rho0, model).to_dense();
  const PrevState1D& p = require_prev(model, prev, map.n_cells());
  const Vec q = cell_masses(map, rho0);
  const Vec& x = map.positions;
  const KernelKind k = model.kernel;
  const Sources src(x, p.rho);
  const Vec a = midpoints(model.coupling == Coupling::ExplicitImplicit ? p.positions : x);
  const Eigen::Index n = map.n_cells();

  // Source dependence: d G1(a; y) / d y_l = -W'(a - y_l) * jump_l.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index l = 0; l <= n; ++l) {
      if (src.jump[l] == 0) continue;
      const double c = -0.5 * q[i] * kernel_d1(k, a[i] - x[l]) * src.jump[l];
      J(i, l) += c;
      J(i + 1, l) += c;
    }
  if (model.coupling == Coupling::ImplicitImplicit) {
    Tridiagonal t = Tridiagonal::zero(n + 1);
    add_midpoint_curvature(t, x, src, q, k);
    J += t.to_dense();
  }
  return J;
}

Vec energy_gradient_1d(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model,
                       const PrevState1D* prev) {
  const Vec g = energy_gradient_1d_full(map, rho0, model, prev);
  return g.segment(1, g.size() - 2);
}

Tridiagonal energy_hessian_1d(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model,
                              const PrevState1D* prev) {
  return interior_block(energy_hessian_1d_full(map, rho0, model, prev));
}

double free_energy_1d(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model) {
  require_admissible(map, rho0);
  double e = local_energy(map, rho0, model);
  if (!model.has_interaction()) return e;
  const Vec rho = density_from_map_1d(map, rho0);
  const Sources src(map.positions, rho);
  return e + 0.5 * interaction_energy(map.positions, src, cell_masses(map, rho0), model.kernel);
}

}  // namespace wgf
