// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Pass criterion numbers as arguments to
// run a subset.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "wgf/config.hpp"
#include "wgf/runner.hpp"

using namespace wgf;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> check;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

std::string orders(const ConvergenceReport& rep, double ConvergenceRow::*col) {
  std::string s;
  for (std::size_t k = 1; k < rep.rows.size(); ++k) s += fmt::format("{}{:.4f}", k > 1 ? ", " : "", rep.rows[k].*col);
  return s;
}

bool orders_within(const ConvergenceReport& rep, double ConvergenceRow::*col, double lo, double hi) {
  for (std::size_t k = 1; k < rep.rows.size(); ++k)
    if (!within(rep.rows[k].*col, lo, hi)) return false;
  return rep.rows.size() >= 2;
}

StepState1D final_state_1d(const RunSpec& spec, DiagnosticsTrace* trace = nullptr) {
  return simulate_1d(make_state_1d(spec.grid_1d(), spec.initial_1d()), spec.model, spec.scheme_1d(),
                     step_count(spec.t_end, spec.scheme.dt), trace);
}

// 1 ----------------------------------------------------------------------------
Outcome smooth_pme_trajectory_order() {
  const auto t0 = std::chrono::steady_clock::now();
  RunSpec s = preset("table1");
  s.convergence.ladder = {{100, 1.0 / 100}, {200, 1.0 / 400}, {400, 1.0 / 1600}};
  s.convergence.fine = Level{1600, 1.0 / 25600};
  const ConvergenceReport rep = run_convergence(s);
  const double secs = seconds_since(t0);
  return {orders_within(rep, &ConvergenceRow::order_l2_x, 1.85, 2.25) && secs <= 60,
          fmt::format("trajectory L2 orders [{}], {:.1f} s", orders(rep, &ConvergenceRow::order_l2_x), secs)};
}

// 2 ----------------------------------------------------------------------------
Outcome barenblatt_m2_order() {
  RunSpec s = preset("table2");
  s.convergence.ladder.resize(3);
  const ConvergenceReport rep = run_convergence(s);
  return {orders_within(rep, &ConvergenceRow::order_l2_rho, 1.8, 2.2),
          fmt::format("density L2 orders [{}]", orders(rep, &ConvergenceRow::order_l2_rho))};
}

// 3 ----------------------------------------------------------------------------
Outcome barenblatt_m25_orders() {
  const ConvergenceReport rep = run_convergence(preset("table4"));
  const bool probe = orders_within(rep, &ConvergenceRow::order_probe, 1.9, 2.1);
  const bool global = orders_within(rep, &ConvergenceRow::order_l2_rho, 1.0, 1.2);
  return {probe && global, fmt::format("probe orders [{}], density L2 orders [{}]",
                                       orders(rep, &ConvergenceRow::order_probe),
                                       orders(rep, &ConvergenceRow::order_l2_rho))};
}

// 4 ----------------------------------------------------------------------------
Outcome waiting_time_detection() {
  const WaitingTimeResult r = run_waiting_time(preset("table5"));
  return {within(r.t_w, 0.215, 0.235), fmt::format("t_w = {:.4f} (exact {:.4f})", r.t_w, r.t_exact)};
}

// 5 ----------------------------------------------------------------------------
Outcome structure_1d() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  int runs = 0, energy_runs = 0;
  double worst_mass = 0, worst_rise = 0;
  std::string failures;
  for (const PresetInfo& p : list_presets()) {
    RunSpec s = preset(p.name);
    if (s.is_2d()) continue;
    s.t_end = 200 * s.scheme.dt;
    s.snapshots.clear();
    const SchemeConfig1D cfg = s.scheme_1d();
    DiagnosticsTrace trace;
    bool monotone = true;
    simulate_1d(make_state_1d(s.grid_1d(), s.initial_1d()), s.model, cfg, 200, &trace,
                [&](const StepState1D& cur) { monotone = monotone && admissible_1d(cur.map); });
    StructureOptions opt;
    opt.mass_rel_tol = 1e-11;
    opt.check_energy = cfg.time_order == TimeOrder::First && cfg.regularization == Regularization::LaplacianOfX;
    opt.energy_abs_tol = 10 * cfg.newton.residual_tol;
    const StructureReport rep = assert_structure(trace, opt);
    ++runs;
    energy_runs += opt.check_energy;
    for (const StructureCheck& c : rep.checks) {
      if (c.name == "mass") worst_mass = std::max(worst_mass, c.worst);
      if (c.name == "energy") worst_rise = std::max(worst_rise, c.worst);
      if (!c.passed) failures += fmt::format(" {}:{}({:.2e}@{})", p.name, c.name, c.worst, c.step);
    }
    if (!monotone) failures += fmt::format(" {}:order", p.name);
    ok = ok && rep.all_passed() && monotone;
  }
  const double secs = seconds_since(t0);
  return {ok && secs <= 30,
          fmt::format("{} presets x 200 steps, max mass drift {:.2e}, energy checked on {} with max rise {:.2e}, "
                      "{:.1f} s{}",
                      runs, worst_mass, energy_runs, worst_rise, secs, failures)};
}

// 6 ----------------------------------------------------------------------------
Outcome fokker_planck_steady_state() {
  RunSpec s = preset("fp_one_well");
  s.grid.cells = 400;
  s.scheme.dt = 1.0 / 400;
  DiagnosticsTrace trace;
  const StepState1D end = final_state_1d(s, &trace);
  const double c = std::pow(3.0 / 8.0, 2.0 / 3.0);
  double dist = 0;
  for (Eigen::Index j = 0; j < end.map.n_cells(); ++j) {
    const double x = end.map.midpoint(j);
    dist = std::max(dist, std::abs(end.rho[j] - std::max(c - x * x / 4, 0.0)));
  }
  // Relative energy E(t) - E(T) fitted on 1 <= t <= 3, before it reaches round-off.
  const double e_inf = trace.rows.back().energy;
  std::vector<double> t, v;
  for (const TraceRow& r : trace.rows)
    if (r.time >= 1 && r.time <= 3) {
      t.push_back(r.time);
      v.push_back(r.energy - e_inf);
    }
  const double rate = fit_exponential_rate(t, v, 1e-300, 1e300);
  return {dist <= 5e-4 && within(rate, 5, 7),
          fmt::format("max-norm distance {:.2e}, energy decay rate {:.2f}", dist, rate)};
}

// 7 ----------------------------------------------------------------------------
Outcome aggregation_equilibrium() {
  const RunSpec s = preset("aggregation_ie");
  const StepState1D end = final_state_1d(s);
  // Equilibrium for this kernel with the data's mass 1/sqrt(2).
  const double mass = 1 / std::sqrt(2.0);
  auto rho_inf = [&](double x) { return x * x < 2 ? mass / std::numbers::pi * std::sqrt(2 - x * x) : 0.0; };
  double sq = 0;
  for (Eigen::Index j = 0; j < end.map.n_cells(); ++j) {
    const double d = end.rho[j] - rho_inf(end.map.midpoint(j));
    sq += d * d * end.map.cell_length(j);
  }
  const double l2 = std::sqrt(sq);
  const double at0 = probe_density_1d(end, 0.0);
  const double gap = std::abs(at0 - 1 / std::numbers::pi);
  return {l2 <= 2e-2 && gap <= 5e-3,
          fmt::format("L2_h distance {:.2e}, rho(0) = {:.5f} (|rho(0) - 1/pi| = {:.2e})", l2, at0, gap)};
}

// 8 ----------------------------------------------------------------------------
Outcome keller_segel_dichotomy() {
  auto peak_history = [](const std::string& name, double& ratio, double& t_end, double& t_10x, std::string& status) {
    RunSpec s = preset(name);
    s.grid.cells = 400;
    s.scheme.dt = 1.0 / 400;
    DiagnosticsTrace trace;
    try {
      final_state_1d(s, &trace);
      status = "ok";
    } catch (const Error& e) {
      status = std::string(to_string(e.kind()));
    }
    const double m0 = trace.rows.front().rho_max;
    ratio = 0;
    t_10x = INFINITY;
    for (const TraceRow& r : trace.rows) {
      ratio = std::max(ratio, r.rho_max / m0);
      if (r.rho_max > 10 * m0 && std::isinf(t_10x)) t_10x = r.time;
    }
    t_end = trace.rows.back().time;
  };
  double r1, te1, tx1, r2, te2, tx2;
  std::string st1, st2;
  peak_history("ks1d_one_well_c1", r1, te1, tx1, st1);
  peak_history("ks1d_one_well_c5pi", r2, te2, tx2, st2);
  const bool sub = st1 == "ok" && std::abs(te1 - 5) < 1e-9 && r1 <= 2;
  const bool super = tx2 < 5;
  return {sub && super, fmt::format("C=1: reached t={:.3f}, peak ratio {:.3f}; C=5pi: 10x at t={:.4f}, peak ratio "
                                    "{:.1f}, stopped at t={:.4f} ({})",
                                    te1, r1, tx2, r2, te2, st2)};
}

// 9 ----------------------------------------------------------------------------
Outcome barenblatt_2d_order() {
  const auto t0 = std::chrono::steady_clock::now();
  RunSpec s = preset("table6");
  s.convergence.ladder.resize(3);
  const ConvergenceReport rep = run_convergence(s);
  const double secs = seconds_since(t0);
  return {orders_within(rep, &ConvergenceRow::order_l2_rho, 0.8, 1.2) && secs <= 180,
          fmt::format("density L2 orders [{}], {:.1f} s", orders(rep, &ConvergenceRow::order_l2_rho), secs)};
}

// 10 ---------------------------------------------------------------------------
Outcome structure_2d() {
  bool ok = true;
  int runs = 0;
  double worst_mass = 0, worst_rise = 0, min_det = INFINITY;
  std::string failures, ks;
  for (const PresetInfo& p : list_presets()) {
    RunSpec s = preset(p.name);
    if (!s.is_2d()) continue;
    s.grid.cells = 32;
    s.grid.cells_y = 0;
    s.snapshots.clear();
    if (s.model.kind == ModelKind::KellerSegel2D) {
      s.out_dir = (std::filesystem::temp_directory_path() / ("wgf_acceptance_" + p.name)).string();
      const RunOutcome r = run(s);
      const bool clean = r.status == "ok" || (r.status == "MapDistorted" && r.exit_code == 3 &&
                                              std::filesystem::exists(std::filesystem::path(s.out_dir) / "manifest.txt"));
      ks += fmt::format(" {}={}@t{:.3f}", p.name, r.status, r.trace.rows.back().time);
      ok = ok && clean;
      std::filesystem::remove_all(s.out_dir);
      continue;
    }
    const SchemeConfig2D cfg = s.scheme_2d();
    DiagnosticsTrace trace;
    try {
      simulate_2d(make_state_2d(s.grid_2d(), s.initial_2d()), s.model, cfg, 100, &trace);
    } catch (const MapDistortedError& e) {
      failures += fmt::format(" {}:fold(det {:.3f}@step {})", p.name, e.det(), trace.rows.size());
      ok = false;
      continue;
    }
    StructureOptions opt;
    opt.mass_rel_tol = 1e-9;
    opt.check_energy = true;
    opt.energy_abs_tol = cfg.newton.residual_tol;
    const StructureReport rep = assert_structure(trace, opt);
    ++runs;
    for (const TraceRow& r : trace.rows) min_det = std::min(min_det, r.det_min);
    for (const StructureCheck& c : rep.checks) {
      if (c.name == "mass") worst_mass = std::max(worst_mass, c.worst);
      if (c.name == "energy") worst_rise = std::max(worst_rise, c.worst);
      if (!c.passed) failures += fmt::format(" {}:{}({:.2e}@{})", p.name, c.name, c.worst, c.step);
    }
    ok = ok && rep.all_passed();
  }
  return {ok, fmt::format("{} presets at 32^2 x 100 steps, max mass drift {:.2e}, min det {:.3f}, max energy rise "
                          "{:.2e};{}{}",
                          runs, worst_mass, min_det, worst_rise, ks, failures)};
}

// 11 ---------------------------------------------------------------------------
Outcome oracle_suites() {
  double grad = 0, jac = 0, hess = 0, grad2 = 0, hess2 = 0, tri = 0, cg = 0, anti = 0, ident = 0;
  for (const auto& nm : oracle::models_1d())
    for (unsigned seed : {11u, 12u, 13u}) {
      const auto f = oracle::fixture_1d(14, seed);
      if (nm.force_is_gradient) grad = std::max(grad, oracle::gradient_vs_fd_1d(nm.model, f));
      jac = std::max(jac, oracle::jacobian_vs_fd_1d(nm.model, f));
      if (jacobian_is_tridiagonal(nm.model)) hess = std::max(hess, oracle::hessian_vs_fd_1d(nm.model, f));
    }
  for (const auto& nm : oracle::models_2d())
    for (unsigned seed : {11u, 12u}) {
      const auto f = oracle::fixture_2d(6, seed);
      grad2 = std::max(grad2, oracle::gradient_vs_fd_2d(nm.model, f));
      hess2 = std::max(hess2, oracle::hessian_vs_fd_2d(nm.model, f));
    }
  for (unsigned seed = 1; seed <= 4; ++seed) {
    for (Eigen::Index n : {3, 50, 400}) tri = std::max(tri, oracle::tridiagonal_vs_dense(n, seed));
    for (Eigen::Index m : {4, 10}) {
      cg = std::max(cg, oracle::screened_laplacian_vs_dense(m, seed));
      cg = std::max(cg, oracle::screened_laplacian_residual(m, seed));
    }
  }
  for (KernelKind k : {KernelKind::QuadraticMinusLog, KernelKind::LogNewtonian1D, KernelKind::GaussianAttraction2D})
    for (auto [a, b] : {std::pair{0.2, 1.7}, std::pair{-1.5, 0.8}, std::pair{-3.0, -0.1}})
      anti = std::max(anti, oracle::antiderivative_vs_quadrature(k, a, b));
  SchemeConfig1D c1;
  c1.dt = 0.01;
  SchemeConfig2D c2;
  c2.dt = 0.01;
  for (const EnergyModel& m : {EnergyModel::zero(), EnergyModel::porous_medium(2), EnergyModel::porous_medium(3)})
    ident = std::max(ident, oracle::identity_drift_1d(m, c1));
  for (Mode2D mode : {Mode2D::Explicit, Mode2D::Implicit}) {
    c2.mode = mode;
    ident = std::max(ident, oracle::identity_drift_2d(EnergyModel::porous_medium_2d(2), c2));
  }
  const bool ok = grad <= 1e-5 && grad2 <= 1e-5 && jac <= 1e-4 && hess <= 1e-4 && hess2 <= 1e-4 && tri <= 1e-10 &&
                  cg <= 1e-10 && anti <= 1e-10 && ident <= 1e-13;
  return {ok, fmt::format("gradient {:.1e}/{:.1e}, Hessian {:.1e}/{:.1e}/{:.1e}, tridiagonal {:.1e}, screened "
                          "Laplacian {:.1e}, antiderivative {:.1e}, identity drift {:.1e}",
                          grad, grad2, jac, hess, hess2, tri, cg, anti, ident)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "smooth porous medium trajectory order", smooth_pme_trajectory_order},
      {2, "Barenblatt m=2 density order", barenblatt_m2_order},
      {3, "Barenblatt m=2.5 probe and global orders", barenblatt_m25_orders},
      {4, "waiting time", waiting_time_detection},
      {5, "1D structure suite", structure_1d},
      {6, "Fokker-Planck one-well steady state", fokker_planck_steady_state},
      {7, "aggregation steady state", aggregation_equilibrium},
      {8, "Keller-Segel 1D dichotomy", keller_segel_dichotomy},
      {9, "2D Barenblatt density order", barenblatt_2d_order},
      {10, "2D structure suite", structure_2d},
      {11, "oracle suites", oracle_suites},
  };
  std::set<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(std::stoi(argv[k]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    fmt::print("{} [{:>2}] {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail,
               seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
