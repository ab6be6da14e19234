#pragma once

#include <Eigen/Sparse>

#include <string>
#include <string_view>
#include <utility>

#include "wgf/grid.hpp"
#include "wgf/solver.hpp"

namespace wgf {

enum class PotentialKind { None, OneWell, DoubleWell };
enum class KernelKind { QuadraticMinusLog, LogNewtonian1D, GaussianAttraction2D, LogNewtonian2D };

/// Time level of the self-interaction arguments: "ImplicitExplicit" evaluates
/// the target point at the unknown level and the source cells at level k.
enum class Coupling { ImplicitExplicit, ExplicitImplicit, ImplicitImplicit, FullyExplicit };

enum class ModelKind {
  Zero,  // F = 0
  Drift,  // potential energy only
  PorousMedium,
  LinearFPLog,
  NonlinearFP,
  Aggregation1D,
  KellerSegel1D,
  PorousMedium2D,
  AggregationDiffusion2D,
  KellerSegel2D,
};

enum class InternalEnergy { None, Power, Log };

struct EnergyModel {
  ModelKind kind = ModelKind::PorousMedium;
  double m = 2;   // internal-energy exponent; m = 1 means s log s
  double nu = 1;  // diffusion weight of the 2D aggregation-diffusion family
  PotentialKind potential = PotentialKind::None;
  KernelKind kernel = KernelKind::QuadraticMinusLog;
  Coupling coupling = Coupling::ImplicitExplicit;

  static EnergyModel zero() { return {ModelKind::Zero, 2, 1, PotentialKind::None}; }
  static EnergyModel drift(PotentialKind v) { return {ModelKind::Drift, 2, 1, v}; }
  static EnergyModel porous_medium(double m) { return {ModelKind::PorousMedium, m}; }
  static EnergyModel linear_fp_log(PotentialKind v) { return {ModelKind::LinearFPLog, 1, 1, v}; }
  static EnergyModel nonlinear_fp(double m, PotentialKind v) { return {ModelKind::NonlinearFP, m, 1, v}; }
  static EnergyModel aggregation_1d(KernelKind k, Coupling c) {
    return {ModelKind::Aggregation1D, 2, 1, PotentialKind::None, k, c};
  }
  static EnergyModel keller_segel_1d(Coupling c = Coupling::ImplicitExplicit) {
    return {ModelKind::KellerSegel1D, 1, 1, PotentialKind::None, KernelKind::LogNewtonian1D, c};
  }
  static EnergyModel porous_medium_2d(double m) { return {ModelKind::PorousMedium2D, m}; }
  static EnergyModel aggregation_diffusion_2d(double m, double nu, KernelKind k) {
    return {ModelKind::AggregationDiffusion2D, m, nu, PotentialKind::None, k};
  }
  static EnergyModel keller_segel_2d(double m, double nu) {
    return {ModelKind::KellerSegel2D, m, nu, PotentialKind::None, KernelKind::LogNewtonian2D};
  }

  InternalEnergy internal() const;
  bool has_interaction() const;
  bool is_2d() const;
  /// Throws ValidationError naming the offending field.
  void validate() const;

  bool operator==(const EnergyModel&) const = default;
};

std::string_view to_string(ModelKind k);
std::string_view to_string(PotentialKind k);
std::string_view to_string(KernelKind k);
std::string_view to_string(Coupling k);
ModelKind parse_model_kind(std::string_view s);
PotentialKind parse_potential(std::string_view s);
KernelKind parse_kernel(std::string_view s);
Coupling parse_coupling(std::string_view s);

// Pointwise ingredients -------------------------------------------------------

double potential_value(PotentialKind v, double x);
double potential_d1(PotentialKind v, double x);
double potential_d2(PotentialKind v, double x);

/// Internal energy density U(s) and pressure P(s) = s U'(s) - U(s).
double internal_density(InternalEnergy u, double m, double s);
double internal_pressure(InternalEnergy u, double m, double s);

/// 1D kernel W(t), its derivative, and the antiderivative Phi with Phi' = W.
double kernel_value(KernelKind k, double t);
double kernel_d1(KernelKind k, double t);
double kernel_antiderivative(KernelKind k, double t);

/// 2D kernel W(|r|) and the scalar factor f with grad W(r) = f(|r|^2) r.
double kernel_value_2d(KernelKind k, double r2);
double kernel_grad_factor_2d(KernelKind k, double r2);

/// Singularity guard for the logarithmic terms.
inline constexpr double kKernelSingularityTol = 1e-14;

// 1D ---------------------------------------------------------------------------

/// Level-k data for interaction models: node positions and cell densities.
struct PrevState1D {
  Vec positions;
  Vec rho;
};

/// Discrete energy E_h at the unknown level. For interaction models the
/// arguments frozen at level k come from prev (required).
double discrete_energy_1d(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model,
                          const PrevState1D* prev = nullptr);

/// Gradient at interior nodes (length N - 1).
Vec energy_gradient_1d(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model,
                       const PrevState1D* prev = nullptr);

/// Hessian at interior nodes. Only available when the Jacobian of the
/// gradient is tridiagonal (see jacobian_is_tridiagonal).
Tridiagonal energy_hessian_1d(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model,
                              const PrevState1D* prev = nullptr);

/// True unless the coupling puts source nodes at the unknown level.
bool jacobian_is_tridiagonal(const EnergyModel& model);

/// Gradient and Jacobian over all N + 1 nodes, used by the free-boundary scheme.
Vec energy_gradient_1d_full(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model,
                            const PrevState1D* prev);
Tridiagonal energy_hessian_1d_full(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model,
                                   const PrevState1D* prev);
Eigen::MatrixXd energy_jacobian_1d_full_dense(const FlowMap1D& map, const Vec& rho0,
                                              const EnergyModel& model, const PrevState1D* prev);

/// Lyapunov functional of the dynamics: internal + drift + one half of the
/// self-interaction with sources at the same level as targets.
double free_energy_1d(const FlowMap1D& map, const Vec& rho0, const EnergyModel& model);

// 2D ---------------------------------------------------------------------------

struct PrevState2D {
  FlowMap2D map;
  Field2D rho;
};

/// Control volume of each node: mean area of the adjacent level-k cells in
/// the interior, h_x h_y on the boundary.
Field2D control_volumes_2d(const FlowMap2D& map);

/// Internal part sum_p w_p nu U(rho0/det_p) det_p h_x h_y over all nodes with
/// trapezoid weights w_p (nu = 1 for the porous medium model).
double internal_energy_2d(const FlowMap2D& map, const Field2D& rho0, const EnergyModel& model,
                          double det_floor = 1e-10);
std::pair<Field2D, Field2D> internal_gradient_2d(const FlowMap2D& map, const Field2D& rho0,
                                                 const EnergyModel& model, double det_floor = 1e-10);

/// Internal part plus, for interaction models, one half of the pairwise
/// interaction sum over control-volume masses.
double energy_2d(const FlowMap2D& map, const Field2D& rho0, const EnergyModel& model,
                 double det_floor = 1e-10);

/// Gradient per unit reference area (exact gradient of the internal part
/// divided by h_x h_y, plus the level-k interaction force). Full-size arrays
/// with zeros on the pinned boundary.
std::pair<Field2D, Field2D> energy_gradient_2d(const FlowMap2D& map, const Field2D& rho0,
                                               const EnergyModel& model, const PrevState2D* prev,
                                               double det_floor = 1e-10);

/// Level-k interaction force per unit area at interior nodes:
/// rho0_ij sum_{pq != ij} rho^k_pq V_pq grad W(x^k_ij - x^k_pq).
std::pair<Field2D, Field2D> interaction_gradient_2d(const PrevState2D& prev, const Field2D& rho0,
                                                    KernelKind kernel);

/// Hessian of the internal part per unit area over the interior unknowns
/// ordered [x interior; y interior], row-major within each block.
Eigen::SparseMatrix<double> energy_hessian_2d(const FlowMap2D& map, const Field2D& rho0,
                                              const EnergyModel& model, double det_floor = 1e-10);

}  // namespace wgf
