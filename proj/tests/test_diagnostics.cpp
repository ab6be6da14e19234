#include <gtest/gtest.h>

#include <cmath>

#include "wgf/diagnostics.hpp"

using namespace wgf;

namespace {

DiagnosticsTrace boundary_trace(const std::vector<double>& right, double dt) {
  DiagnosticsTrace tr;
  for (std::size_t k = 0; k < right.size(); ++k) {
    TraceRow r;
    r.step = static_cast<int>(k);
    r.time = dt * static_cast<double>(k);
    r.x_left = -1;
    r.x_right = right[k];
    tr.rows.push_back(r);
  }
  return tr;
}

}  // namespace

TEST(Norms, ErrorsAndOrders) {
  const Vec a = (Vec(3) << 1, 2, 3).finished();
  const Vec b = (Vec(3) << 1, 2.5, 2).finished();
  EXPECT_NEAR(l2h_error(a, b, 0.5), std::sqrt(0.5 * (0.25 + 1)), 1e-15);
  EXPECT_NEAR(l2h_error(a, b, Vec::Constant(3, 0.5)), l2h_error(a, b, 0.5), 1e-15);
  EXPECT_DOUBLE_EQ(linf_error(a, b), 1);
  EXPECT_NEAR(observed_order(4e-2, 1e-2), 2, 1e-14);
  EXPECT_NEAR(observed_order(9, 1, 3), 2, 1e-14);
}

TEST(Orders, FillFromConsecutiveRows) {
  ConvergenceReport rep;
  for (auto [M, e] : {std::pair{10, 1e-2}, std::pair{20, 2.5e-3}, std::pair{40, 6.25e-4}}) {
    ConvergenceRow r;
    r.M = M;
    r.l2_rho = e;
    r.linf_rho = 2 * e;
    rep.rows.push_back(r);
  }
  fill_orders(rep);
  EXPECT_TRUE(std::isnan(rep.rows[0].order_l2_rho));
  EXPECT_NEAR(rep.rows[1].order_l2_rho, 2, 1e-13);
  EXPECT_NEAR(rep.rows[2].order_linf_rho, 2, 1e-13);
  EXPECT_TRUE(std::isnan(rep.rows[2].order_l2_x));
}

TEST(WaitingTimeDetection, FirstFastBoundaryRow) {
  const DiagnosticsTrace tr = boundary_trace({1, 1, 1.0001, 1.0002, 1.1, 1.3}, 0.1);
  EXPECT_NEAR(detect_waiting_time(tr, 0.5), 0.4, 1e-15);
  EXPECT_TRUE(std::isinf(detect_waiting_time(tr, 100)));
  try {
    detect_waiting_time(boundary_trace({1}, 0.1), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyTrace);
  }
  EXPECT_DOUBLE_EQ(default_velocity_tol(0.01, 0.02), 5e-3);
}

TEST(Fits, ExponentialRate) {
  std::vector<double> t, v;
  for (int k = 0; k <= 50; ++k) {
    t.push_back(0.1 * k);
    v.push_back(3 * std::exp(-6 * 0.1 * k));
  }
  EXPECT_NEAR(fit_exponential_rate(t, v, 1e-12, 10), 6, 1e-10);
  EXPECT_NEAR(fit_exponential_rate(t, v, 1e-3, 1), 6, 1e-10);
  EXPECT_THROW(fit_exponential_rate(t, v, 100, 200), Error);
}

TEST(Structure, FlagsViolations) {
  DiagnosticsTrace tr;
  for (int k = 0; k < 4; ++k) {
    TraceRow r;
    r.step = k;
    r.mass = 1;
    r.det_min = r.rho_min = 1;
    r.regularized_energy = 1.0 - 0.1 * k;
    tr.rows.push_back(r);
  }
  StructureOptions opt;
  opt.check_energy = true;
  EXPECT_TRUE(assert_structure(tr, opt).all_passed());

  tr.rows[2].mass = 1 + 1e-9;
  tr.rows[3].regularized_energy = 2;
  tr.rows[1].det_min = -0.5;
  const StructureReport rep = assert_structure(tr, opt);
  EXPECT_FALSE(rep.all_passed());
  for (const auto& c : rep.checks) {
    EXPECT_FALSE(c.passed) << c.name;
    if (c.name == "mass") EXPECT_EQ(c.step, 2);
    if (c.name == "positivity") EXPECT_EQ(c.step, 1);
    if (c.name == "energy") EXPECT_EQ(c.step, 3);
  }
  EXPECT_THROW(assert_structure(DiagnosticsTrace{}), Error);

  // Vacuum outside a compact support is fine; a collapsed cell is not.
  DiagnosticsTrace vac;
  for (int k = 0; k < 3; ++k) {
    TraceRow r;
    r.step = k;
    r.mass = 1;
    r.det_min = 1;
    r.rho_min = 0;
    vac.rows.push_back(r);
  }
  EXPECT_TRUE(assert_structure(vac).all_passed());
  vac.rows[2].det_min = 0;
  EXPECT_FALSE(assert_structure(vac).all_passed());
}

TEST(Probe, LinearInterpolationInsideSupport) {
  const RefGrid1D g = RefGrid1D::make(0, 1, 4);
  StepState1D s;
  s.map = FlowMap1D::identity(g);
  s.rho = (Vec(4) << 1, 2, 3, 4).finished();
  EXPECT_NEAR(probe_density_1d(s, 0.5), 2.5, 1e-15);
  EXPECT_NEAR(probe_density_1d(s, 0.05), 1, 1e-15);
  EXPECT_EQ(probe_density_1d(s, 1.5), 0);
}

TEST(Steps, CountMustDivide) {
  EXPECT_EQ(step_count(0.5, 1.0 / 1600), 800);
  EXPECT_EQ(step_count(0.3, 0.001), 300);
  EXPECT_THROW(step_count(0.5, 0.3), ValidationError);
  EXPECT_THROW(step_count(-1, 0.1), ValidationError);
}

TEST(Simulate, TraceRowsAndObserver) {
  StepState1D s = make_state_1d(RefGrid1D::make(-1, 1, 20), initial_condition_1d("cos"));
  SchemeConfig1D cfg;
  cfg.dt = 0.01;
  DiagnosticsTrace tr;
  int calls = 0;
  s = simulate_1d(s, EnergyModel::porous_medium(2), cfg, 5, &tr, [&](const StepState1D&) { ++calls; });
  EXPECT_EQ(calls, 5);
  ASSERT_EQ(tr.rows.size(), 6u);
  EXPECT_EQ(tr.rows.back().step, 5);
  EXPECT_NEAR(tr.rows.back().time, 0.05, 1e-15);
  EXPECT_GT(tr.rows.back().newton_iterations, 0);
  EXPECT_NEAR(tr.rows.back().mass, tr.rows.front().mass, 1e-14);
  EXPECT_GT(tr.rows.front().regularized_energy, tr.rows.back().regularized_energy);
}

TEST(Convergence, SelfFineOrdersOnSmoothPorousMedium) {
  Problem1D pb;
  pb.model = EnergyModel::porous_medium(2);
  pb.ic = initial_condition_1d("cos");
  pb.cfg.regularization = Regularization::None;
  pb.t_end = 0.1;
  const std::vector<Level> ladder = {{20, 0.1 / 4}, {40, 0.1 / 16}, {80, 0.1 / 64}};
  const ConvergenceReport rep = convergence_study_1d(pb, ladder, Reference::SelfFine, Level{320, 0.1 / 1024});
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_NEAR(rep.rows[2].order_l2_x, 2, 0.3);
  EXPECT_LT(rep.rows[2].l2_x, rep.rows[0].l2_x);
  try {
    convergence_study_1d(pb, ladder, Reference::SelfFine, Level{90, 0.1 / 1024});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonNestedGrids);
  }
  EXPECT_THROW(convergence_study_1d(pb, ladder, Reference::Exact), Error);
}

TEST(Convergence, ThreadsGiveIdenticalRows) {
  Problem1D pb;
  pb.model = EnergyModel::porous_medium(2);
  pb.ic = initial_condition_1d("cos");
  pb.t_end = 0.05;
  const std::vector<Level> ladder = {{10, 0.05 / 5}, {20, 0.05 / 10}};
  const auto a = convergence_study_1d(pb, ladder, Reference::SelfFine, Level{40, 0.05 / 20}, 1);
  const auto b = convergence_study_1d(pb, ladder, Reference::SelfFine, Level{40, 0.05 / 20}, 3);
  for (std::size_t k = 0; k < a.rows.size(); ++k) EXPECT_EQ(a.rows[k].l2_x, b.rows[k].l2_x);
}
