#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wgf/scheme1d.hpp"
#include "wgf/scheme2d.hpp"

namespace wgf {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TraceRow {
  int step = 0;
  double time = 0;
  double mass = 0;
  double energy = 0;             // monitored E_h
  double regularized_energy = 0; // E_h plus the Dirichlet term when it is part of the scheme
  double rho_min = 0, rho_max = 0;
  double det_min = 0;  // 2D: min node determinant; 1D: min (x_{j+1} - x_j) / dX
  double x_left = kNaN, x_right = kNaN;  // 1D boundary nodes
  int newton_iterations = 0;
};

struct DiagnosticsTrace {
  std::vector<TraceRow> rows;
};

double mass_1d(const StepState1D& s);

TraceRow observe_1d(const StepState1D& s, const EnergyModel& model, const SchemeConfig1D& cfg, int step,
                    int newton_iterations = 0);
TraceRow observe_2d(const StepState2D& s, const EnergyModel& model, const SchemeConfig2D& cfg, int step,
                    int newton_iterations = 0);

using Observer1D = std::function<void(const StepState1D&)>;
using Observer2D = std::function<void(const StepState2D&)>;

/// Advances n_steps, appending the initial row and one row per accepted step
/// to *trace when given. Errors propagate; rows recorded so far stay in *trace.
StepState1D simulate_1d(StepState1D state, const EnergyModel& model, const SchemeConfig1D& cfg, int n_steps,
                        DiagnosticsTrace* trace = nullptr, const Observer1D& on_step = {});
StepState2D simulate_2d(StepState2D state, const EnergyModel& model, const SchemeConfig2D& cfg, int n_steps,
                        DiagnosticsTrace* trace = nullptr, const Observer2D& on_step = {});

/// Number of steps of size dt reaching t_end; throws ValidationError unless
/// t_end / dt is an integer up to rounding.
int step_count(double t_end, double dt);

// Error norms ----------------------------------------------------------------

/// sqrt(sum_j w_j (a_j - b_j)^2).
double l2h_error(const Vec& a, const Vec& b, const Vec& weights);
double l2h_error(const Vec& a, const Vec& b, double weight);
double linf_error(const Vec& a, const Vec& b);
/// log(e_coarse / e_fine) / log(ratio).
double observed_order(double e_coarse, double e_fine, double ratio = 2);

/// Cell-centre density interpolated linearly at physical point x (constant
/// extension beyond the first and last cell centres, zero outside the support).
double probe_density_1d(const StepState1D& s, double x);

// Waiting time ---------------------------------------------------------------

/// The one-sided boundary law lets a resting edge creep at O(delta_X) per unit
/// time, so the default sits a decade above that creep for delta_t ~ delta_X.
inline double default_velocity_tol(double delta_X, double dt) { return 1e-2 * delta_X / dt; }

/// First trace time at which either boundary speed |dx_b/dt| exceeds velocity_tol;
/// +infinity if it never does. Throws EmptyTrace with fewer than two rows.
double detect_waiting_time(const DiagnosticsTrace& trace, double velocity_tol);

// Convergence harness ----------------------------------------------------------

enum class Reference { SelfFine, Exact };

struct Level {
  Eigen::Index M = 0;
  double dt = 0;
  bool operator==(const Level&) const = default;
};

struct Problem1D {
  EnergyModel model;
  InitialCondition1D ic;
  SchemeConfig1D cfg;  // dt is taken from the ladder
  double t_end = 0;
  std::function<double(double)> exact_density;  // at t_end, for Reference::Exact
  double probe_x = 0;
};

struct Problem2D {
  EnergyModel model;
  InitialCondition2D ic;
  SchemeConfig2D cfg;
  double t_end = 0;
  std::function<double(double, double)> exact_density;
};

struct ConvergenceRow {
  Eigen::Index M = 0;
  double dt = 0;
  double l2_x = kNaN, linf_x = kNaN;
  double l2_rho = kNaN, linf_rho = kNaN;
  double probe_rho = kNaN;
  double order_l2_x = kNaN, order_linf_x = kNaN;
  double order_l2_rho = kNaN, order_linf_rho = kNaN, order_probe = kNaN;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
};

/// SelfFine compares trajectories and densities with a reference run by
/// Lagrangian label (reference must be nested); Exact compares densities with
/// problem.exact_density at the physical cell midpoints plus the probe point.
ConvergenceReport convergence_study_1d(const Problem1D& problem, const std::vector<Level>& ladder,
                                       Reference reference, std::optional<Level> fine = std::nullopt,
                                       int threads = 1);
/// 2D: densities at interior nodes against problem.exact_density (Exact only).
/// Level::M is the cell count per direction.
ConvergenceReport convergence_study_2d(const Problem2D& problem, const std::vector<Level>& ladder,
                                       int threads = 1);

/// Fills the order columns from consecutive rows with refinement ratio M_{k+1}/M_k.
void fill_orders(ConvergenceReport& report);

// Structure checks -------------------------------------------------------------

struct StructureOptions {
  double mass_rel_tol = 1e-11;
  bool check_positivity = true;    // det_min > 0 and rho_min >= 0
  bool check_energy = false;       // regularized energy nonincreasing
  double energy_abs_tol = 1e-9;
};

struct StructureCheck {
  std::string name;
  bool passed = true;
  double worst = 0;   // largest violation magnitude
  int step = -1;      // where the worst violation happened
};

struct StructureReport {
  std::vector<StructureCheck> checks;
  bool all_passed() const;
};

StructureReport assert_structure(const DiagnosticsTrace& trace, const StructureOptions& options = {});

/// Least-squares rate r in value ~ C exp(-r t), using the samples with value in [lo, hi].
double fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& values, double lo,
                            double hi);

}  // namespace wgf
