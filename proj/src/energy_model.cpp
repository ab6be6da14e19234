#include <cmath>
#include <numbers>
#include <string>

#include "wgf/energy.hpp"

namespace wgf {

InternalEnergy EnergyModel::internal() const {
  switch (kind) {
    case ModelKind::Zero:
    case ModelKind::Drift:
    case ModelKind::Aggregation1D: return InternalEnergy::None;
    case ModelKind::PorousMedium:
    case ModelKind::NonlinearFP:
    case ModelKind::PorousMedium2D: return InternalEnergy::Power;
    case ModelKind::LinearFPLog:
    case ModelKind::KellerSegel1D: return InternalEnergy::Log;
    case ModelKind::AggregationDiffusion2D:
    case ModelKind::KellerSegel2D: return m == 1 ? InternalEnergy::Log : InternalEnergy::Power;
  }
  return InternalEnergy::None;
}

bool EnergyModel::has_interaction() const {
  return kind == ModelKind::Aggregation1D || kind == ModelKind::KellerSegel1D ||
         kind == ModelKind::AggregationDiffusion2D || kind == ModelKind::KellerSegel2D;
}

bool EnergyModel::is_2d() const {
  return kind == ModelKind::PorousMedium2D || kind == ModelKind::AggregationDiffusion2D ||
         kind == ModelKind::KellerSegel2D;
}

void EnergyModel::validate() const {
  switch (kind) {
    case ModelKind::PorousMedium:
    case ModelKind::NonlinearFP:
    case ModelKind::PorousMedium2D:
      if (!(m > 1)) throw ValidationError("m", "m must exceed 1");
      break;
    case ModelKind::AggregationDiffusion2D:
    case ModelKind::KellerSegel2D:
      if (!(m >= 1)) throw ValidationError("m", "m must be at least 1");
      if (!(nu >= 0)) throw ValidationError("nu", "nu must be non-negative");
      break;
    default: break;
  }
  if (kind == ModelKind::KellerSegel1D && kernel != KernelKind::LogNewtonian1D)
    throw ValidationError("kernel", "Keller-Segel 1D uses the 1D logarithmic kernel");
  if (kind == ModelKind::KellerSegel2D && kernel != KernelKind::LogNewtonian2D)
    throw ValidationError("kernel", "Keller-Segel 2D uses the 2D logarithmic kernel");
  if (is_2d() && coupling != Coupling::ImplicitExplicit)
    throw ValidationError("coupling", "2D interaction is always evaluated at level k");
}

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view s, const std::pair<std::string_view, E> (&table)[N], const char* field) {
  for (const auto& [name, value] : table)
    if (name == s) return value;
  throw ValidationError(field, "unknown value '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view enum_name(E e, const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [name, value] : table)
    if (value == e) return name;
  return "unknown";
}

const std::pair<std::string_view, ModelKind> kModelNames[] = {
    {"zero", ModelKind::Zero},
    {"drift", ModelKind::Drift},
    {"porous_medium", ModelKind::PorousMedium},
    {"linear_fp_log", ModelKind::LinearFPLog},
    {"nonlinear_fp", ModelKind::NonlinearFP},
    {"aggregation_1d", ModelKind::Aggregation1D},
    {"keller_segel_1d", ModelKind::KellerSegel1D},
    {"porous_medium_2d", ModelKind::PorousMedium2D},
    {"aggregation_diffusion_2d", ModelKind::AggregationDiffusion2D},
    {"keller_segel_2d", ModelKind::KellerSegel2D},
};
const std::pair<std::string_view, PotentialKind> kPotentialNames[] = {
    {"none", PotentialKind::None},
    {"one_well", PotentialKind::OneWell},
    {"double_well", PotentialKind::DoubleWell},
};
const std::pair<std::string_view, KernelKind> kKernelNames[] = {
    {"quadratic_minus_log", KernelKind::QuadraticMinusLog},
    {"log_newtonian_1d", KernelKind::LogNewtonian1D},
    {"gaussian_attraction_2d", KernelKind::GaussianAttraction2D},
    {"log_newtonian_2d", KernelKind::LogNewtonian2D},
};
const std::pair<std::string_view, Coupling> kCouplingNames[] = {
    {"implicit_explicit", Coupling::ImplicitExplicit},
    {"explicit_implicit", Coupling::ExplicitImplicit},
    {"implicit_implicit", Coupling::ImplicitImplicit},
    {"fully_explicit", Coupling::FullyExplicit},
};

void guard_log(double t) {
  if (std::abs(t) < kKernelSingularityTol)
    throw Error(ErrorKind::KernelSingularity, "logarithmic kernel evaluated at separation " + std::to_string(t));
}

void guard_log_sq(double r2) {
  if (r2 < kKernelSingularityTol * kKernelSingularityTol)
    throw Error(ErrorKind::KernelSingularity, "logarithmic kernel evaluated at coincident nodes");
}

double t_log_abs_t(double t) { return t == 0 ? 0.0 : t * std::log(std::abs(t)); }

constexpr double kInvTwoPi = 0.5 * std::numbers::inv_pi;

}  // namespace

std::string_view to_string(ModelKind k) { return enum_name(k, kModelNames); }
std::string_view to_string(PotentialKind k) { return enum_name(k, kPotentialNames); }
std::string_view to_string(KernelKind k) { return enum_name(k, kKernelNames); }
std::string_view to_string(Coupling k) { return enum_name(k, kCouplingNames); }
ModelKind parse_model_kind(std::string_view s) { return parse_enum(s, kModelNames, "kind"); }
PotentialKind parse_potential(std::string_view s) { return parse_enum(s, kPotentialNames, "potential"); }
KernelKind parse_kernel(std::string_view s) { return parse_enum(s, kKernelNames, "kernel"); }
Coupling parse_coupling(std::string_view s) { return parse_enum(s, kCouplingNames, "coupling"); }

double potential_value(PotentialKind v, double x) {
  switch (v) {
    case PotentialKind::None: return 0;
    case PotentialKind::OneWell: return 0.5 * x * x;
    case PotentialKind::DoubleWell: return 0.25 * x * x * x * x - 0.5 * x * x;
  }
  return 0;
}

double potential_d1(PotentialKind v, double x) {
  switch (v) {
    case PotentialKind::None: return 0;
    case PotentialKind::OneWell: return x;
    case PotentialKind::DoubleWell: return x * x * x - x;
  }
  return 0;
}

double potential_d2(PotentialKind v, double x) {
  switch (v) {
    case PotentialKind::None: return 0;
    case PotentialKind::OneWell: return 1;
    case PotentialKind::DoubleWell: return 3 * x * x - 1;
  }
  return 0;
}

double internal_density(InternalEnergy u, double m, double s) {
  switch (u) {
    case InternalEnergy::None: return 0;
    case InternalEnergy::Power: return std::pow(s, m) / (m - 1);
    case InternalEnergy::Log: return s > 0 ? s * std::log(s) : 0.0;
  }
  return 0;
}

double internal_pressure(InternalEnergy u, double m, double s) {
  switch (u) {
    case InternalEnergy::None: return 0;
    case InternalEnergy::Power: return std::pow(s, m);
    case InternalEnergy::Log: return s;
  }
  return 0;
}

double kernel_value(KernelKind k, double t) {
  switch (k) {
    case KernelKind::QuadraticMinusLog: guard_log(t); return 0.5 * t * t - std::log(std::abs(t));
    case KernelKind::LogNewtonian1D:
    case KernelKind::LogNewtonian2D: guard_log(t); return kInvTwoPi * std::log(std::abs(t));
    case KernelKind::GaussianAttraction2D: return -std::numbers::inv_pi * std::exp(-t * t);
  }
  return 0;
}

double kernel_d1(KernelKind k, double t) {
  switch (k) {
    case KernelKind::QuadraticMinusLog: guard_log(t); return t - 1 / t;
    case KernelKind::LogNewtonian1D:
    case KernelKind::LogNewtonian2D: guard_log(t); return kInvTwoPi / t;
    case KernelKind::GaussianAttraction2D: return 2 * std::numbers::inv_pi * t * std::exp(-t * t);
  }
  return 0;
}

double kernel_antiderivative(KernelKind k, double t) {
  switch (k) {
    case KernelKind::QuadraticMinusLog: return t * t * t / 6 - (t_log_abs_t(t) - t);
    case KernelKind::LogNewtonian1D:
    case KernelKind::LogNewtonian2D: return kInvTwoPi * (t_log_abs_t(t) - t);
    case KernelKind::GaussianAttraction2D: return -0.5 * std::numbers::inv_sqrtpi * std::erf(t);
  }
  return 0;
}

double kernel_value_2d(KernelKind k, double r2) {
  switch (k) {
    case KernelKind::QuadraticMinusLog: guard_log_sq(r2); return 0.5 * r2 - 0.5 * std::log(r2);
    case KernelKind::LogNewtonian1D:
    case KernelKind::LogNewtonian2D: guard_log_sq(r2); return 0.5 * kInvTwoPi * std::log(r2);
    case KernelKind::GaussianAttraction2D: return -std::numbers::inv_pi * std::exp(-r2);
  }
  return 0;
}

double kernel_grad_factor_2d(KernelKind k, double r2) {
  switch (k) {
    case KernelKind::QuadraticMinusLog: guard_log_sq(r2); return 1 - 1 / r2;
    case KernelKind::LogNewtonian1D:
    case KernelKind::LogNewtonian2D: guard_log_sq(r2); return kInvTwoPi / r2;
    case KernelKind::GaussianAttraction2D: return 2 * std::numbers::inv_pi * std::exp(-r2);
  }
  return 0;
}

}  // namespace wgf
