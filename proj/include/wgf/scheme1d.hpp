#pragma once

#include <string_view>
#include <utility>

#include "wgf/energy.hpp"
#include "wgf/exact.hpp"
#include "wgf/solver.hpp"

namespace wgf {

enum class Regularization { None, LaplacianOfX, LaplacianOfIncrement };
/// Unit of SchemeConfig::epsilon: the effective coefficient is epsilon times 1, dt or h^2.
enum class EpsilonScaling { Absolute, Dt, H2 };
enum class Boundary1D { Dirichlet, FreeBoundaryPME, FreeBoundaryFP };
enum class TimeOrder { First, CrankNicolson };

std::string_view to_string(Regularization r);
std::string_view to_string(EpsilonScaling s);
std::string_view to_string(Boundary1D b);
std::string_view to_string(TimeOrder t);
Regularization parse_regularization(std::string_view s);
EpsilonScaling parse_epsilon_scaling(std::string_view s);
Boundary1D parse_boundary(std::string_view s);
TimeOrder parse_time_order(std::string_view s);

/// Effective regularization coefficient for the given step and mesh width.
double effective_epsilon(double epsilon, EpsilonScaling scaling, double dt, double h);

struct SchemeConfig1D {
  double dt = 0.01;
  Regularization regularization = Regularization::LaplacianOfX;
  double epsilon = 1;
  EpsilonScaling epsilon_scaling = EpsilonScaling::Dt;
  Boundary1D boundary = Boundary1D::Dirichlet;
  TimeOrder time_order = TimeOrder::First;
  NewtonConfig newton;

  double eps(double delta_X) const { return effective_epsilon(epsilon, epsilon_scaling, dt, delta_X); }
  /// Throws ValidationError naming the offending field.
  void validate(const EnergyModel& model) const;
  bool operator==(const SchemeConfig1D&) const = default;
};

struct StepState1D {
  FlowMap1D map;
  Vec rho;         // current cell densities
  Vec rho0;        // reference cell densities rho(X_{j+1/2}, 0)
  Vec rho0_nodes;  // reference density at the nodes, used by the free boundary
  double time = 0;
};

/// Identity map on the grid with rho0 sampled from the initial condition.
StepState1D make_state_1d(const RefGrid1D& grid, const InitialCondition1D& ic);

std::pair<StepState1D, NewtonReport> step_first_order(const StepState1D& state, const EnergyModel& model,
                                                      const SchemeConfig1D& cfg);
std::pair<StepState1D, NewtonReport> step_crank_nicolson(const StepState1D& state, const EnergyModel& model,
                                                         const SchemeConfig1D& cfg);
/// Dispatches on cfg.time_order.
std::pair<StepState1D, NewtonReport> step_1d(const StepState1D& state, const EnergyModel& model,
                                             const SchemeConfig1D& cfg);

/// Boundary update alone with the neighbours x_1 and x_{N-1} held at level k.
/// Returns the new (x_0, x_N).
std::pair<double, double> free_boundary_step_pme(const StepState1D& state, double m, double dt);
std::pair<double, double> free_boundary_step_fp(const StepState1D& state, double m, double dt,
                                                PotentialKind drift);

/// Discrete objective whose interior stationarity conditions form the
/// first-order Dirichlet step: transport cost + regularization + E_h.
double step_objective_1d(const Vec& positions, const StepState1D& state, const EnergyModel& model,
                         const SchemeConfig1D& cfg);

/// Residual of the step equations at the given full node vector, in the
/// unknown ordering used by the solver (interior nodes, or all nodes with a
/// free boundary).
Vec step_residual_1d(const Vec& positions, const StepState1D& state, const EnergyModel& model,
                     const SchemeConfig1D& cfg);

/// (eps/2) sum |(x_{j+1} - x_j)/dX|^2 dX, the discrete Dirichlet energy of the map.
double dirichlet_energy_1d(const Vec& positions, double delta_X, double eps);

/// Monitored energy E_h plus, for LaplacianOfX regularization, the Dirichlet term.
double regularized_energy_1d(const StepState1D& state, const EnergyModel& model, const SchemeConfig1D& cfg);

}  // namespace wgf
