#pragma once

#include <string_view>
#include <utility>

#include "wgf/energy.hpp"
#include "wgf/exact.hpp"
#include "wgf/scheme1d.hpp"
#include "wgf/solver.hpp"

namespace wgf {

enum class Mode2D { Explicit, Implicit };
std::string_view to_string(Mode2D m);
Mode2D parse_mode_2d(std::string_view s);

struct SchemeConfig2D {
  double dt = 0.01;
  Regularization regularization = Regularization::LaplacianOfX;
  double epsilon = 0.1;
  EpsilonScaling epsilon_scaling = EpsilonScaling::Dt;
  Mode2D mode = Mode2D::Explicit;
  NewtonConfig newton{0.8, 100, 1e-8, 1e-15, true};
  double det_floor = 1e-10;

  /// Mesh width for H2 scaling is h_x.
  double eps(double h) const { return effective_epsilon(epsilon, epsilon_scaling, dt, h); }
  void validate(const EnergyModel& model) const;
  bool operator==(const SchemeConfig2D&) const = default;
};

struct StepState2D {
  FlowMap2D map;
  Field2D rho;
  Field2D rho0;
  double time = 0;
};

StepState2D make_state_2d(const RefGrid2D& grid, const InitialCondition2D& ic);

/// Linear step: per coordinate (rho0/dt)(x^{k+1} - x^k) - eps Lap_h(.) + dE/dx(x^k) = 0.
/// Throws MapDistortedError when a node determinant drops to det_floor.
StepState2D step_explicit_2d(const StepState2D& state, const EnergyModel& model, const SchemeConfig2D& cfg);

/// Newton on the stationarity conditions of implicit_objective_2d.
std::pair<StepState2D, NewtonReport> step_implicit_2d(const StepState2D& state, const EnergyModel& model,
                                                      const SchemeConfig2D& cfg);

/// Dispatches on cfg.mode; explicit steps report zero Newton iterations.
std::pair<StepState2D, NewtonReport> step_2d(const StepState2D& state, const EnergyModel& model,
                                             const SchemeConfig2D& cfg);

/// J_k(x) = sum (rho0/2dt)|x - x^k|^2 h^2 + regularization + E_bar(x) + level-k interaction
/// force dotted with x. Its gradient divided by h_x h_y is the implicit residual.
double implicit_objective_2d(const FlowMap2D& candidate, const StepState2D& state, const EnergyModel& model,
                             const SchemeConfig2D& cfg);

/// sum over interior nodes of rho det h_x h_y.
double mass_2d(const StepState2D& state);

struct StabilityConstants {
  double C0 = 1, C1 = 1, C2 = 1;
  double delta0 = 0;  // <= 0 selects the current minimum interior determinant
};

struct StabilityBounds {
  double tau_min = 0;
  double eps_min = 0;
  double grad_norm = 0;  // discrete ||grad_X x||_inf
  double delta0 = 0;
};

/// Advisory step and regularization bounds. Throws ZeroDensity when min rho0 is
/// zero and the step bound is requested.
StabilityBounds stability_bounds(const StepState2D& state, double m, const StabilityConstants& c = {},
                                 bool need_tau = true);

}  // namespace wgf
