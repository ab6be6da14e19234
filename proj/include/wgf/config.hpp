#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wgf/diagnostics.hpp"
#include "wgf/energy.hpp"
#include "wgf/exact.hpp"
#include "wgf/scheme1d.hpp"
#include "wgf/scheme2d.hpp"

namespace wgf {

struct GridSpec {
  Eigen::Index cells = 100;   // 1D cell count, or M_x in 2D
  Eigen::Index cells_y = 0;   // 2D only; 0 means equal to cells
  std::optional<double> x_left, x_right;  // 1D domain override
  std::optional<double> extent;           // 2D half-width override

  bool operator==(const GridSpec&) const = default;
};

/// Scheme settings shared by both dimensions; 1D-only and 2D-only keys are
/// ignored by the other dimension.
struct SchemeSpec {
  double dt = 0.01;
  Regularization regularization = Regularization::LaplacianOfX;
  double epsilon = 1;
  EpsilonScaling epsilon_scaling = EpsilonScaling::Dt;
  Boundary1D boundary = Boundary1D::Dirichlet;
  TimeOrder time_order = TimeOrder::First;
  Mode2D mode = Mode2D::Explicit;
  double det_floor = 1e-10;
  NewtonConfig newton;

  bool operator==(const SchemeSpec&) const = default;
};

/// Closed-form references: Barenblatt profiles at t_end, or the Fokker-Planck
/// steady state with the initial mass.
enum class ExactSolution { None, Barenblatt1D, Barenblatt2D, FokkerPlanckSteady };
std::string_view to_string(ExactSolution e);
ExactSolution parse_exact_solution(std::string_view s);
std::string_view to_string(Reference r);
Reference parse_reference(std::string_view s);

struct ConvergenceSpec {
  std::vector<Level> ladder;
  Reference reference = Reference::SelfFine;
  std::optional<Level> fine;
  ExactSolution exact = ExactSolution::None;
  double probe_x = 0;

  bool operator==(const ConvergenceSpec&) const = default;
};

struct RunSpec {
  std::string preset;       // empty when not built from a preset
  std::string description;
  EnergyModel model;
  std::string initial = "cos";
  IcParams ic;
  GridSpec grid;
  SchemeSpec scheme;
  double t_end = 1;
  std::vector<double> snapshots;  // extra output times; t_end is always written
  std::string out_dir = "out";
  int threads = 1;
  ConvergenceSpec convergence;
  double velocity_tol = 0;  // waiting-time threshold; 0 selects the default

  bool is_2d() const { return model.is_2d(); }
  SchemeConfig1D scheme_1d() const;
  SchemeConfig2D scheme_2d() const;
  RefGrid1D grid_1d() const;
  RefGrid2D grid_2d() const;
  InitialCondition1D initial_1d() const;
  InitialCondition2D initial_2d() const;

  /// Throws ValidationError naming the first offending field.
  void validate() const;
  bool operator==(const RunSpec&) const = default;
};

/// Parses INI-style text with sections [run] [model] [initial] [grid] [scheme]
/// [newton] [convergence]. A `preset` key in [run] seeds the spec from the
/// catalog before the remaining keys are applied. The result is validated.
RunSpec parse_config(std::string_view text);
RunSpec load_config(const std::string& path);

/// Writes every field; parse_config(serialize(s)) == s.
std::string serialize(const RunSpec& spec);

struct PresetInfo {
  std::string name;
  std::string description;
};
std::vector<PresetInfo> list_presets();
/// Throws ValidationError for an unknown name.
RunSpec preset(std::string_view name);

}  // namespace wgf
