#include <fmt/format.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "wgf/config.hpp"

namespace wgf {

namespace {

using std::numbers::pi;

RunSpec base(std::string_view name, std::string description, EnergyModel model, std::string initial,
             Eigen::Index cells, double dt, double t_end) {
  RunSpec s;
  s.preset = name;
  s.description = std::move(description);
  s.model = model;
  s.initial = std::move(initial);
  s.ic.m = model.m;
  s.grid.cells = cells;
  s.scheme.dt = dt;
  s.t_end = t_end;
  s.out_dir = "out/" + std::string(name);
  return s;
}

// The 1D porous-medium and Fokker-Planck runs carry no regularization.
RunSpec unregularized(RunSpec s, Boundary1D b = Boundary1D::Dirichlet) {
  s.scheme.regularization = Regularization::None;
  s.scheme.boundary = b;
  return s;
}

RunSpec regularized(RunSpec s, double eps, EpsilonScaling scaling = EpsilonScaling::Dt) {
  s.scheme.regularization = Regularization::LaplacianOfX;
  s.scheme.epsilon = eps;
  s.scheme.epsilon_scaling = scaling;
  if (s.is_2d()) s.scheme.newton.residual_tol = 1e-8;
  return s;
}

// dt = 1/M^2 scaled to the base level M = 100, dt = 1/100.
std::vector<Level> ladder_h2(std::initializer_list<Eigen::Index> ms) {
  std::vector<Level> out;
  for (Eigen::Index m : ms) out.push_back({m, 100.0 / static_cast<double>(m * m)});
  return out;
}

RunSpec smooth_pme(std::string_view name) {
  RunSpec s = unregularized(base(name,
                                 "porous medium m=2 from cos data with fixed ends; trajectory and density "
                                 "convergence at T=0.5 against a nested fine run",
                                 EnergyModel::porous_medium(2), "cos", 100, 0.01, 0.5));
  s.convergence.ladder = ladder_h2({100, 200, 400, 800});
  s.convergence.fine = Level{3200, 1.0 / 102400};
  return s;
}

RunSpec barenblatt_ladder(std::string_view name, double m) {
  RunSpec s = unregularized(
      base(name,
           fmt::format("porous medium m={} from the Barenblatt profile with free boundaries; density "
                       "convergence against the exact profile at T=0.5, probe at x=0",
                       m),
           EnergyModel::porous_medium(m), "barenblatt", 100, 0.01, 0.5),
      Boundary1D::FreeBoundaryPME);
  s.convergence.ladder = ladder_h2({100, 200, 400, 800});
  s.convergence.reference = Reference::Exact;
  s.convergence.exact = ExactSolution::Barenblatt1D;
  return s;
}

RunSpec fp_convergence(std::string_view name) {
  RunSpec s = unregularized(base(name,
                                 "nonlinear Fokker-Planck m=2 with one-well potential from tent data; density "
                                 "convergence against the steady state at T=10",
                                 EnergyModel::nonlinear_fp(2, PotentialKind::OneWell), "tent", 100, 0.01, 10),
                            Boundary1D::FreeBoundaryFP);
  s.convergence.ladder = ladder_h2({100, 200, 400});
  s.convergence.reference = Reference::Exact;
  s.convergence.exact = ExactSolution::FokkerPlanckSteady;
  return s;
}

RunSpec waiting_time(std::string_view name, Eigen::Index M) {
  RunSpec s = unregularized(base(name,
                                 fmt::format("porous medium m=2 waiting-time data, theta=0.25, M={}, dt=1/{}; "
                                             "free boundaries start moving near t=2/9",
                                             M, M),
                                 EnergyModel::porous_medium(2), "waiting_time", M, 1.0 / static_cast<double>(M),
                                 0.3),
                            Boundary1D::FreeBoundaryPME);
  s.ic.theta = 0.25;
  return s;
}

RunSpec barenblatt_2d_ladder(std::string_view name, double m) {
  RunSpec s = regularized(
      base(name,
           fmt::format("2D porous medium m={} from the Barenblatt profile C_B2=0.1 on [-2,2]^2, explicit "
                       "scheme with eps=h_x^2; density convergence at T=0.1 with N_t=M",
                       m),
           EnergyModel::porous_medium_2d(m), "barenblatt_2d", 64, 0.1 / 64, 0.1),
      1, EpsilonScaling::H2);
  s.ic.amplitude = 0.1;
  for (Eigen::Index M : {16, 32, 64, 128}) s.convergence.ladder.push_back({M, 0.1 / static_cast<double>(M)});
  s.convergence.reference = Reference::Exact;
  s.convergence.exact = ExactSolution::Barenblatt2D;
  return s;
}

RunSpec fp_run(std::string_view name, std::string description, PotentialKind v, std::string initial) {
  return unregularized(base(name, std::move(description), EnergyModel::nonlinear_fp(2, v), std::move(initial),
                            800, 1.0 / 800, 10),
                       Boundary1D::FreeBoundaryFP);
}

RunSpec aggregation(std::string_view name, Coupling c, double eps, double sigma) {
  RunSpec s = regularized(
      base(name,
           fmt::format("1D aggregation with the |x|^2/2 - ln|x| kernel, {} coupling, Gaussian data sigma={}, "
                       "eps={}*dt, N=200, dt=1/200",
                       to_string(c), sigma, eps),
           EnergyModel::aggregation_1d(KernelKind::QuadraticMinusLog, c), "gaussian", 200, 1.0 / 200, 10),
      eps);
  s.ic.sigma = sigma;
  s.ic.amplitude = 1;
  s.scheme.newton.alpha = 1;
  return s;
}

RunSpec keller_segel_1d(std::string_view name, std::string initial, double c, std::string label) {
  std::string description = fmt::format("1D Keller-Segel, {} data with C_ks={}, M=800, dt=1/800", initial, label);
  RunSpec s = unregularized(
      base(name, std::move(description), EnergyModel::keller_segel_1d(), std::move(initial), 800, 1.0 / 800, 5));
  s.ic.amplitude = c;
  s.scheme.newton.alpha = 1;
  return s;
}

RunSpec pme_2d(std::string_view name, std::string description, double m, double eps, EpsilonScaling sc,
               std::string initial, double dt, double t_end, Regularization reg = Regularization::LaplacianOfX) {
  RunSpec s = regularized(base(name, std::move(description), EnergyModel::porous_medium_2d(m), std::move(initial),
                               64, dt, t_end),
                          eps, sc);
  s.scheme.regularization = reg;
  return s;
}

RunSpec keller_segel_2d(std::string_view name, double m, double c) {
  RunSpec s = regularized(base(name,
                               fmt::format("2D Keller-Segel m={}, nu=1, Gaussian data C_2d={}, 64^2, dt=0.001, "
                                           "eps=0.1*dt; expected to stop with a distorted map",
                                           m, c),
                               EnergyModel::keller_segel_2d(m, 1), "gaussian_2d", 64, 0.001, 0.2),
                          0.1);
  s.ic.amplitude = c;
  return s;
}

struct Entry {
  std::string_view name;
  std::function<RunSpec(std::string_view)> make;
};

const std::vector<Entry>& catalog() {
  static const std::vector<Entry> entries = {
      {"table1", smooth_pme},
      {"table2", [](std::string_view n) { return barenblatt_ladder(n, 2); }},
      {"table3", fp_convergence},
      {"table4", [](std::string_view n) { return barenblatt_ladder(n, 2.5); }},
      {"table5", [](std::string_view n) { return waiting_time(n, 1000); }},
      {"table6", [](std::string_view n) { return barenblatt_2d_ladder(n, 2); }},
      {"table6_m2.5", [](std::string_view n) { return barenblatt_2d_ladder(n, 2.5); }},
      {"pme_smooth",
       [](std::string_view n) {
         RunSpec s = smooth_pme(n);
         s.description = "porous medium m=2 from cos data, M=800, dt=1/6400; energy and mass history";
         s.grid.cells = 800;
         s.scheme.dt = 1.0 / 6400;
         return s;
       }},
      {"pme_barenblatt",
       [](std::string_view n) {
         RunSpec s = barenblatt_ladder(n, 2);
         s.description = "Barenblatt m=2 with free boundaries, M=800, dt=1/6400; density, energy and mass";
         s.grid.cells = 800;
         s.scheme.dt = 1.0 / 6400;
         return s;
       }},
      {"pme_waiting_time",
       [](std::string_view n) {
         RunSpec s = waiting_time(n, 800);
         s.snapshots = {0.1, 0.2, 0.25};
         return s;
       }},
      {"fp_one_well",
       [](std::string_view n) {
         return fp_run(n, "nonlinear Fokker-Planck m=2, one-well potential, tent data, M=800, dt=1/800, T=10",
                       PotentialKind::OneWell, "tent");
       }},
      {"fp_double_well_data_one_well_potential",
       [](std::string_view n) {
         return fp_run(n, "nonlinear Fokker-Planck m=2, one-well potential from double-well data",
                       PotentialKind::OneWell, "double_well");
       }},
      {"fp_double_well_data_double_well_potential",
       [](std::string_view n) {
         return fp_run(n, "nonlinear Fokker-Planck m=2, double-well potential from double-well data",
                       PotentialKind::DoubleWell, "double_well");
       }},
      {"fp_one_well_data_double_well_potential",
       [](std::string_view n) {
         return fp_run(n, "nonlinear Fokker-Planck m=2, double-well potential from 1-x^2 data",
                       PotentialKind::DoubleWell, "parabola");
       }},
      {"fp_linear_log",
       [](std::string_view n) {
         RunSpec s = unregularized(base(n,
                                        "linear Fokker-Planck, s log s with one-well potential, Gaussian data "
                                        "on [-5,5], M=800, dt=1/800",
                                        EnergyModel::linear_fp_log(PotentialKind::OneWell), "gaussian", 800,
                                        1.0 / 800, 5));
         return s;
       }},
      {"aggregation_ie", [](std::string_view n) { return aggregation(n, Coupling::ImplicitExplicit, 1e-4, 1); }},
      {"aggregation_ie_sigma0.1",
       [](std::string_view n) { return aggregation(n, Coupling::ImplicitExplicit, 1e-4, 0.1); }},
      {"aggregation_fe", [](std::string_view n) { return aggregation(n, Coupling::FullyExplicit, 1e-2, 1); }},
      {"aggregation_ei", [](std::string_view n) { return aggregation(n, Coupling::ExplicitImplicit, 1e-4, 1); }},
      {"aggregation_ii", [](std::string_view n) { return aggregation(n, Coupling::ImplicitImplicit, 1e-2, 1); }},
      {"ks1d_one_well_c1", [](std::string_view n) { return keller_segel_1d(n, "ks_one_well", 1, "1"); }},
      {"ks1d_one_well_c5pi", [](std::string_view n) { return keller_segel_1d(n, "ks_one_well", 5 * pi, "5pi"); }},
      {"ks1d_double_well_c1", [](std::string_view n) { return keller_segel_1d(n, "ks_double_well", 1, "1"); }},
      {"ks1d_double_well_c5pi",
       [](std::string_view n) { return keller_segel_1d(n, "ks_double_well", 5 * pi, "5pi"); }},
      {"pme2d_barenblatt_m2",
       [](std::string_view n) {
         RunSpec s = pme_2d(n, "2D Barenblatt m=2, C_B2=0.1, 64^2, dt=0.01, eps=1e-3*dt", 2, 1e-3,
                            EpsilonScaling::Dt, "barenblatt_2d", 0.01, 4);
         s.ic.amplitude = 0.1;
         s.snapshots = {1, 2};
         return s;
       }},
      {"pme2d_barenblatt_m5",
       [](std::string_view n) {
         RunSpec s = pme_2d(n, "2D Barenblatt m=5, C_B2=0.1, 64^2, dt=0.01, eps=0.1*dt", 5, 0.1, EpsilonScaling::Dt,
                            "barenblatt_2d", 0.01, 4);
         s.ic.amplitude = 0.1;
         s.snapshots = {1, 2};
         return s;
       }},
      {"pme2d_energy_x",
       [](std::string_view n) {
         RunSpec s = pme_2d(n, "2D Barenblatt m=2, eps=h_x^2 on the map; energy and determinant history", 2, 1,
                            EpsilonScaling::H2, "barenblatt_2d", 0.01, 4);
         s.ic.amplitude = 0.1;
         return s;
       }},
      {"pme2d_energy_increment",
       [](std::string_view n) {
         RunSpec s = pme_2d(n, "2D Barenblatt m=2, eps_k=0.1 on the increment; energy and determinant history", 2,
                            0.1, EpsilonScaling::Absolute, "barenblatt_2d", 0.01, 4,
                            Regularization::LaplacianOfIncrement);
         s.ic.amplitude = 0.1;
         return s;
       }},
      {"pme2d_donut",
       [](std::string_view n) {
         RunSpec s = pme_2d(n, "2D porous medium m=3 from non-radial annular data on [-1.5,1.5]^2, 64^2, dt=0.001",
                            3, 0.1, EpsilonScaling::Dt, "donut", 0.001, 0.5);
         s.snapshots = {0.1, 0.2};
         return s;
       }},
      {"pme2d_offset_gaussian",
       [](std::string_view n) {
         RunSpec s = pme_2d(n, "2D porous medium m=2 from an off-centre Gaussian on [-2,2]^2, 64^2, dt=0.01", 2,
                            0.1, EpsilonScaling::Dt, "offset_gaussian", 0.01, 5);
         s.snapshots = {0.5, 1};
         return s;
       }},
      {"aggregation_2d",
       [](std::string_view n) {
         RunSpec s = regularized(base(n,
                                      "2D aggregation with the |x|^2/2 - ln|x| kernel, nu=0, Gaussian data C_2d=1 "
                                      "on [-2,2]^2, 64^2, dt=0.01",
                                      EnergyModel::aggregation_diffusion_2d(2, 0, KernelKind::QuadraticMinusLog),
                                      "gaussian_2d", 64, 0.01, 1),
                                 0.1);
         return s;
       }},
      {"aggregation_diffusion_2d",
       [](std::string_view n) {
         return regularized(base(n,
                                 "2D aggregation-diffusion, Gaussian attraction kernel, m=3, nu=0.1, indicator "
                                 "data on [-3,3]^2, 32^2, dt=0.01",
                                 EnergyModel::aggregation_diffusion_2d(3, 0.1, KernelKind::GaussianAttraction2D),
                                 "indicator_2d", 32, 0.01, 5),
                            0.1);
       }},
      {"ks2d_m1_c1", [](std::string_view n) { return keller_segel_2d(n, 1, 1); }},
      {"ks2d_m1_c20", [](std::string_view n) { return keller_segel_2d(n, 1, 20); }},
      {"ks2d_m2_c20", [](std::string_view n) { return keller_segel_2d(n, 2, 20); }},
  };
  return entries;
}

}  // namespace

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (const Entry& e : catalog()) out.push_back({std::string(e.name), e.make(e.name).description});
  return out;
}

RunSpec preset(std::string_view name) {
  for (const Entry& e : catalog())
    if (e.name == name) return e.make(e.name);
  throw ValidationError("preset", "unknown preset '" + std::string(name) + "'");
}

}  // namespace wgf
