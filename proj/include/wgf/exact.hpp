#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wgf/energy.hpp"

namespace wgf {

// Barenblatt solutions of rho_t = Lap rho^m.

double barenblatt_1d(double x, double t, double m);
/// Right end r_m(t) of the 1D support; the left end is -r_m(t).
double barenblatt_interface_1d(double t, double m);

/// Radial 2D profile with exponent kappa = 1/m, including the (t+1)^(-kappa)
/// amplitude that keeps the mass constant.
double barenblatt_2d(double x, double y, double t, double m, double c_b2);
double support_radius_2d(double t, double m, double c_b2);

/// Aronson-Caffarelli-Vazquez waiting time for the sin^2/sin^4 data.
double waiting_time_exact(double m, double theta);

/// Constant C in rho_inf = (C - (m-1)/m V)_+^(1/(m-1)) matching the given mass.
double fp_steady_constant(PotentialKind v, double m, double mass);
double fp_steady_state(double x, PotentialKind v, double m, double mass);

/// Equilibrium (C/pi) sqrt((2 - x^2)_+) of the aggregation equation with
/// W = |x|^2/2 - ln|x|. Its mass equals C.
double aggregation_steady_state(double x, double mass);

/// Integral of f over [a, b] by tanh-sinh quadrature; tolerant of integrable
/// endpoint singularities such as (b - x)^p with p > -1.
double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b);

// Initial conditions ---------------------------------------------------------

struct IcParams {
  double m = 2;          // exponent for waiting_time and barenblatt
  double theta = 0.25;   // waiting_time mixing weight, in [0, 0.25]
  double sigma = 1;      // width for gaussian and double_well
  double amplitude = 1;  // C_g, C_ks, C_2d or C_B2 depending on the family
  bool operator==(const IcParams&) const = default;
};

struct InitialCondition1D {
  std::string name;
  double x_left, x_right;  // domain on which the family is defined
  std::function<double(double)> rho;
};

struct InitialCondition2D {
  std::string name;
  double x_extent, y_extent;  // domain [-x_extent, x_extent] x [-y_extent, y_extent]
  std::function<double(double, double)> rho;
};

/// Throws ValidationError for unknown names.
InitialCondition1D initial_condition_1d(std::string_view name, const IcParams& p = {});
InitialCondition2D initial_condition_2d(std::string_view name, const IcParams& p = {});
std::vector<std::string_view> initial_condition_names_1d();
std::vector<std::string_view> initial_condition_names_2d();

/// rho0 sampled at cell centres (1D) or nodes (2D).
Vec sample_cells(const InitialCondition1D& ic, const RefGrid1D& grid);
Field2D sample_nodes(const InitialCondition2D& ic, const RefGrid2D& grid);

}  // namespace wgf
