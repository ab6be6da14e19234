#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wgf/diagnostics.hpp"

using namespace wgf;

namespace {

SchemeConfig1D config_1d(double dt, Regularization reg = Regularization::LaplacianOfX) {
  SchemeConfig1D c;
  c.dt = dt;
  c.regularization = reg;
  c.newton.alpha = 1;
  c.newton.residual_tol = 1e-12;
  return c;
}

StepState1D cos_state(Eigen::Index cells) {
  return make_state_1d(RefGrid1D::make(-1, 1, cells), initial_condition_1d("cos"));
}

}  // namespace

TEST(IdentityFixedPoint, OneDimensional) {
  for (const EnergyModel& m : {EnergyModel::zero(), EnergyModel::porous_medium(2), EnergyModel::porous_medium(3.5)}) {
    EXPECT_LE(oracle::identity_drift_1d(m, config_1d(0.01)), 1e-13);
    EXPECT_LE(oracle::identity_drift_1d(m, config_1d(0.01, Regularization::None)), 1e-13);
    SchemeConfig1D cn = config_1d(0.01, Regularization::LaplacianOfIncrement);
    cn.time_order = TimeOrder::CrankNicolson;
    EXPECT_LE(oracle::identity_drift_1d(m, cn), 1e-13);
  }
}

TEST(IdentityFixedPoint, TwoDimensional) {
  SchemeConfig2D cfg;
  cfg.dt = 0.01;
  for (Mode2D mode : {Mode2D::Explicit, Mode2D::Implicit}) {
    cfg.mode = mode;
    for (double m : {2.0, 3.0}) EXPECT_LE(oracle::identity_drift_2d(EnergyModel::porous_medium_2d(m), cfg), 1e-13);
  }
}

TEST(Scheme1D, StepKeepsMassAndOrder) {
  StepState1D s = cos_state(40);
  const double m0 = mass_1d(s);
  for (int k = 0; k < 20; ++k) {
    auto [next, rep] = step_1d(s, EnergyModel::porous_medium(2), config_1d(0.005));
    EXPECT_TRUE(rep.converged);
    s = std::move(next);
    ASSERT_TRUE(admissible_1d(s.map));
  }
  EXPECT_NEAR(mass_1d(s), m0, 1e-13 * m0);
  EXPECT_NEAR(s.time, 0.1, 1e-14);
  // Diffusion flattens the cos profile: the peak density decreases.
  EXPECT_LT(s.rho.maxCoeff(), cos_state(40).rho.maxCoeff());
}

TEST(Scheme1D, StepSatisfiesItsResidual) {
  const StepState1D s = cos_state(30);
  const SchemeConfig1D cfg = config_1d(0.01);
  const auto [next, rep] = step_1d(s, EnergyModel::porous_medium(2), cfg);
  EXPECT_LE(step_residual_1d(next.map.positions, s, EnergyModel::porous_medium(2), cfg).lpNorm<Eigen::Infinity>(),
            1e-12);
}

TEST(Scheme1D, FirstOrderDecreasesRegularizedEnergy) {
  StepState1D s = cos_state(50);
  const SchemeConfig1D cfg = config_1d(0.01);
  const EnergyModel m = EnergyModel::porous_medium(2);
  double e = regularized_energy_1d(s, m, cfg);
  for (int k = 0; k < 10; ++k) {
    s = step_1d(s, m, cfg).first;
    const double e1 = regularized_energy_1d(s, m, cfg);
    EXPECT_LE(e1, e + 1e-12);
    e = e1;
  }
}

TEST(Scheme1D, CrankNicolsonIsSecondOrderInTime) {
  // Time-only refinement at fixed M against a fine-step run of the same scheme.
  const EnergyModel m = EnergyModel::porous_medium(2);
  auto run = [&](TimeOrder order, double dt) {
    SchemeConfig1D cfg = config_1d(dt, order == TimeOrder::First ? Regularization::None
                                                                   : Regularization::LaplacianOfIncrement);
    cfg.time_order = order;
    cfg.epsilon = 0;
    cfg.epsilon_scaling = EpsilonScaling::Absolute;
    return simulate_1d(cos_state(40), m, cfg, step_count(0.2, dt)).map.positions;
  };
  for (TimeOrder order : {TimeOrder::First, TimeOrder::CrankNicolson}) {
    const Vec ref = run(order, 0.2 / 640);
    const double e1 = (run(order, 0.2 / 10) - ref).lpNorm<Eigen::Infinity>();
    const double e2 = (run(order, 0.2 / 20) - ref).lpNorm<Eigen::Infinity>();
    const double p = observed_order(e1, e2);
    if (order == TimeOrder::First)
      EXPECT_NEAR(p, 1, 0.2);
    else
      EXPECT_NEAR(p, 2, 0.2);
  }
}

TEST(Scheme1D, FreeBoundarySpreadsBarenblatt) {
  IcParams p;
  p.m = 2;
  const InitialCondition1D ic = initial_condition_1d("barenblatt", p);
  StepState1D s = make_state_1d(RefGrid1D::make(ic.x_left, ic.x_right, 100), ic);
  SchemeConfig1D cfg = config_1d(0.01, Regularization::None);
  cfg.boundary = Boundary1D::FreeBoundaryPME;
  const double left0 = s.map.positions[0], right0 = s.map.positions[100];
  s = simulate_1d(s, EnergyModel::porous_medium(2), cfg, 20);
  // The exact interface at t = 0.2 is r_m(0.2); the discrete edge tracks it.
  EXPECT_NEAR(s.map.positions[100], barenblatt_interface_1d(0.2, 2), 5e-3);
  EXPECT_NEAR(s.map.positions[0], -barenblatt_interface_1d(0.2, 2), 5e-3);
  EXPECT_GT(s.map.positions[100], right0);
  EXPECT_LT(s.map.positions[0], left0);
}

TEST(Scheme1D, FreeBoundaryLawAlone) {
  IcParams p;
  const InitialCondition1D ic = initial_condition_1d("barenblatt", p);
  const StepState1D s = make_state_1d(RefGrid1D::make(ic.x_left, ic.x_right, 50), ic);
  const auto [l, r] = free_boundary_step_pme(s, 2, 0.01);
  EXPECT_LT(l, s.map.positions[0]);
  EXPECT_GT(r, s.map.positions[50]);
  EXPECT_NEAR(l, -r, 1e-12);  // symmetric data
}

TEST(Scheme1D, InvalidConfigurationIsRejected) {
  SchemeConfig1D cfg;
  cfg.dt = -1;
  EXPECT_THROW(step_1d(cos_state(10), EnergyModel::porous_medium(2), cfg), ValidationError);
  cfg = SchemeConfig1D{};
  cfg.boundary = Boundary1D::FreeBoundaryPME;
  EXPECT_THROW(step_1d(cos_state(10), EnergyModel::keller_segel_1d(), cfg), ValidationError);
}

TEST(Scheme1D, EffectiveEpsilon) {
  EXPECT_DOUBLE_EQ(effective_epsilon(2, EpsilonScaling::Absolute, 0.1, 0.5), 2);
  EXPECT_DOUBLE_EQ(effective_epsilon(2, EpsilonScaling::Dt, 0.1, 0.5), 0.2);
  EXPECT_DOUBLE_EQ(effective_epsilon(2, EpsilonScaling::H2, 0.1, 0.5), 0.5);
}

TEST(Scheme2D, ExplicitStepConservesMass) {
  const RefGrid2D g = RefGrid2D::make(2, 2, 16, 16);
  IcParams p;
  p.amplitude = 0.1;
  StepState2D s = make_state_2d(g, initial_condition_2d("barenblatt_2d", p));
  SchemeConfig2D cfg;
  cfg.dt = 0.005;
  cfg.epsilon = 1;
  cfg.epsilon_scaling = EpsilonScaling::H2;
  const double m0 = mass_2d(s);
  for (int k = 0; k < 10; ++k) s = step_explicit_2d(s, EnergyModel::porous_medium_2d(2), cfg);
  EXPECT_NEAR(mass_2d(s), m0, 1e-12 * m0);
  EXPECT_TRUE(admissible_2d(s.map));
}

TEST(Scheme2D, ImplicitStepConvergesAndConservesMass) {
  const RefGrid2D g = RefGrid2D::make(2, 2, 12, 12);
  IcParams p;
  p.amplitude = 0.1;
  StepState2D s = make_state_2d(g, initial_condition_2d("barenblatt_2d", p));
  SchemeConfig2D cfg;
  cfg.dt = 0.01;
  cfg.mode = Mode2D::Implicit;
  const double m0 = mass_2d(s);
  const double obj0 = implicit_objective_2d(s.map, s, EnergyModel::porous_medium_2d(2), cfg);
  const auto [next, rep] = step_2d(s, EnergyModel::porous_medium_2d(2), cfg);
  EXPECT_TRUE(rep.converged);
  EXPECT_NEAR(mass_2d(next), m0, 1e-12 * m0);
  // The step minimizes its objective, so it cannot exceed the value at the old map.
  EXPECT_LE(implicit_objective_2d(next.map, s, EnergyModel::porous_medium_2d(2), cfg), obj0);
}

TEST(Scheme2D, DistortionRaisesMapDistorted) {
  const RefGrid2D g = RefGrid2D::make(2, 2, 16, 16);
  IcParams p;
  p.amplitude = 20;
  StepState2D s = make_state_2d(g, initial_condition_2d("gaussian_2d", p));
  SchemeConfig2D cfg;
  cfg.dt = 0.05;
  cfg.epsilon = 1e-3;
  bool distorted = false;
  try {
    simulate_2d(s, EnergyModel::keller_segel_2d(1, 1), cfg, 200);
  } catch (const MapDistortedError&) {
    distorted = true;
  }
  EXPECT_TRUE(distorted);
}

TEST(Stability, IdentityGradientNormAndZeroDensity) {
  const RefGrid2D g = RefGrid2D::make(1, 1, 8, 8);
  const StepState2D s = make_state_2d(g, InitialCondition2D{"flat", 1, 1, [](double, double) { return 2.0; }});
  const StabilityBounds b = stability_bounds(s, 2);
  EXPECT_NEAR(b.grad_norm, 1, 1e-14);
  EXPECT_NEAR(b.delta0, 1, 1e-14);
  EXPECT_GT(b.tau_min, 0);
  const StepState2D z = make_state_2d(g, initial_condition_2d("indicator_2d"));
  if (z.rho0.minCoeff() == 0) {
    try {
      stability_bounds(z, 2);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ZeroDensity);
    }
    EXPECT_NO_THROW(stability_bounds(z, 2, {}, false));
  }
}
