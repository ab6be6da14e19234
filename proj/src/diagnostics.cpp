#include "wgf/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace wgf {

double mass_1d(const StepState1D& s) {
  const Vec& x = s.map.positions;
  const Eigen::Index n = s.map.n_cells();
  return s.rho.dot(x.tail(n) - x.head(n));
}

TraceRow observe_1d(const StepState1D& s, const EnergyModel& model, const SchemeConfig1D& cfg, int step,
                    int newton_iterations) {
  TraceRow r;
  r.step = step;
  r.time = s.time;
  r.mass = mass_1d(s);
  r.energy = free_energy_1d(s.map, s.rho0, model);
  r.regularized_energy = r.energy;
  if (cfg.regularization == Regularization::LaplacianOfX)
    r.regularized_energy +=
        dirichlet_energy_1d(s.map.positions, s.map.ref.delta_X(), cfg.eps(s.map.ref.delta_X()));
  r.rho_min = s.rho.minCoeff();
  r.rho_max = s.rho.maxCoeff();
  const Vec& x = s.map.positions;
  const Eigen::Index n = s.map.n_cells();
  r.det_min = (x.tail(n) - x.head(n)).minCoeff() / s.map.ref.delta_X();
  r.x_left = x[0];
  r.x_right = x[n];
  r.newton_iterations = newton_iterations;
  return r;
}

namespace {

double dirichlet_energy_2d(const FlowMap2D& m, double eps) {
  const auto& g = m.ref;
  const double hx = g.h_x(), hy = g.h_y();
  double e = 0;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      if (j + 1 < g.cols()) {
        const double a = m.x(i, j + 1) - m.x(i, j), b = m.y(i, j + 1) - m.y(i, j);
        e += (a * a + b * b) * hy / hx;
      }
      if (i + 1 < g.rows()) {
        const double a = m.x(i + 1, j) - m.x(i, j), b = m.y(i + 1, j) - m.y(i, j);
        e += (a * a + b * b) * hx / hy;
      }
    }
  return 0.5 * eps * e;
}

}  // namespace

TraceRow observe_2d(const StepState2D& s, const EnergyModel& model, const SchemeConfig2D& cfg, int step,
                    int newton_iterations) {
  TraceRow r;
  r.step = step;
  r.time = s.time;
  r.mass = mass_2d(s);
  r.energy = energy_2d(s.map, s.rho0, model, cfg.det_floor);
  r.regularized_energy = r.energy;
  if (cfg.regularization == Regularization::LaplacianOfX)
    r.regularized_energy += dirichlet_energy_2d(s.map, cfg.eps(s.map.ref.h_x()));
  r.rho_min = s.rho.minCoeff();
  r.rho_max = s.rho.maxCoeff();
  r.det_min = det_field_2d(s.map).minCoeff();
  r.newton_iterations = newton_iterations;
  return r;
}

int step_count(double t_end, double dt) {
  if (!(t_end > 0) || !(dt > 0)) throw ValidationError("t_end", "end time and dt must be positive");
  const double n = t_end / dt;
  const double rounded = std::round(n);
  if (rounded < 1 || std::abs(n - rounded) > 1e-8 * std::max(1.0, n))
    throw ValidationError("t_end", "must be an integer multiple of dt");
  return static_cast<int>(rounded);
}

StepState1D simulate_1d(StepState1D state, const EnergyModel& model, const SchemeConfig1D& cfg, int n_steps,
                        DiagnosticsTrace* trace, const Observer1D& on_step) {
  const double t0 = state.time;
  if (trace) trace->rows.push_back(observe_1d(state, model, cfg, 0));
  for (int k = 1; k <= n_steps; ++k) {
    auto [next, rep] = step_1d(state, model, cfg);
    state = std::move(next);
    state.time = t0 + k * cfg.dt;  // avoid drift from repeated addition
    if (trace) trace->rows.push_back(observe_1d(state, model, cfg, k, rep.iterations));
    if (on_step) on_step(state);
  }
  return state;
}

StepState2D simulate_2d(StepState2D state, const EnergyModel& model, const SchemeConfig2D& cfg, int n_steps,
                        DiagnosticsTrace* trace, const Observer2D& on_step) {
  const double t0 = state.time;
  if (trace) trace->rows.push_back(observe_2d(state, model, cfg, 0));
  for (int k = 1; k <= n_steps; ++k) {
    auto [next, rep] = step_2d(state, model, cfg);
    state = std::move(next);
    state.time = t0 + k * cfg.dt;
    if (trace) trace->rows.push_back(observe_2d(state, model, cfg, k, rep.iterations));
    if (on_step) on_step(state);
  }
  return state;
}

double l2h_error(const Vec& a, const Vec& b, const Vec& w) {
  if (a.size() != b.size() || a.size() != w.size()) throw ValidationError("l2h_error", "size mismatch");
  return std::sqrt((w.array() * (a - b).array().square()).sum());
}

double l2h_error(const Vec& a, const Vec& b, double w) {
  if (a.size() != b.size()) throw ValidationError("l2h_error", "size mismatch");
  return std::sqrt(w * (a - b).squaredNorm());
}

double linf_error(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw ValidationError("linf_error", "size mismatch");
  return a.size() == 0 ? 0.0 : (a - b).lpNorm<Eigen::Infinity>();
}

double observed_order(double e_coarse, double e_fine, double ratio) {
  return std::log(e_coarse / e_fine) / std::log(ratio);
}

double probe_density_1d(const StepState1D& s, double x) {
  const Vec& p = s.map.positions;
  const Eigen::Index n = s.map.n_cells();
  if (x < p[0] || x > p[n]) return 0;
  const Vec mid = 0.5 * (p.head(n) + p.tail(n));
  if (x <= mid[0]) return s.rho[0];
  if (x >= mid[n - 1]) return s.rho[n - 1];
  const Eigen::Index k = std::upper_bound(mid.data(), mid.data() + n, x) - mid.data() - 1;
  const double t = (x - mid[k]) / (mid[k + 1] - mid[k]);
  return (1 - t) * s.rho[k] + t * s.rho[k + 1];
}

double detect_waiting_time(const DiagnosticsTrace& trace, double tol) {
  const auto& r = trace.rows;
  if (r.size() < 2) throw Error(ErrorKind::EmptyTrace, "waiting-time detection needs at least two rows");
  for (std::size_t k = 1; k < r.size(); ++k) {
    const double dt = r[k].time - r[k - 1].time;
    const double v = std::max(std::abs(r[k].x_left - r[k - 1].x_left), std::abs(r[k].x_right - r[k - 1].x_right)) / dt;
    if (v > tol) return r[k].time;
  }
  return std::numeric_limits<double>::infinity();
}

namespace {

/// Runs f(i) for i in [0, n) on up to `threads` workers; results stay in index
/// order and the first failure (by index) is rethrown.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t t = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

StepState1D run_level_1d(const Problem1D& pb, const Level& lv) {
  const RefGrid1D grid = RefGrid1D::make(pb.ic.x_left, pb.ic.x_right, lv.M);
  SchemeConfig1D cfg = pb.cfg;
  cfg.dt = lv.dt;
  return simulate_1d(make_state_1d(grid, pb.ic), pb.model, cfg, step_count(pb.t_end, lv.dt));
}

Vec cell_lengths(const StepState1D& s) {
  const Eigen::Index n = s.map.n_cells();
  return s.map.positions.tail(n) - s.map.positions.head(n);
}

}  // namespace

void fill_orders(ConvergenceReport& rep) {
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    auto& c = rep.rows[k - 1];
    auto& f = rep.rows[k];
    const double ratio = static_cast<double>(f.M) / static_cast<double>(c.M);
    const double r = ratio == 1 ? c.dt / f.dt : ratio;
    f.order_l2_x = observed_order(c.l2_x, f.l2_x, r);
    f.order_linf_x = observed_order(c.linf_x, f.linf_x, r);
    f.order_l2_rho = observed_order(c.l2_rho, f.l2_rho, r);
    f.order_linf_rho = observed_order(c.linf_rho, f.linf_rho, r);
    f.order_probe = observed_order(c.probe_rho, f.probe_rho, r);
  }
}

ConvergenceReport convergence_study_1d(const Problem1D& pb, const std::vector<Level>& ladder, Reference ref,
                                       std::optional<Level> fine, int threads) {
  if (ladder.empty()) throw ValidationError("ladder", "must not be empty");
  for (std::size_t k = 1; k < ladder.size(); ++k)
    if (!(ladder[k].M > ladder[k - 1].M || ladder[k].dt < ladder[k - 1].dt))
      throw ValidationError("ladder", "levels must strictly refine");
  if (ref == Reference::SelfFine) {
    if (!fine) throw ValidationError("reference", "self-fine mode needs a reference level");
    for (const Level& lv : ladder)
      if (fine->M % lv.M != 0)
        throw Error(ErrorKind::NonNestedGrids,
                    "reference M = " + std::to_string(fine->M) + " is not a multiple of " + std::to_string(lv.M));
  } else if (!pb.exact_density) {
    throw ValidationError("exact_density", "exact mode needs an exact density");
  }

  std::vector<Level> jobs = ladder;
  if (ref == Reference::SelfFine) jobs.push_back(*fine);
  std::vector<StepState1D> out(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) { out[i] = run_level_1d(pb, jobs[i]); });

  ConvergenceReport rep;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const StepState1D& s = out[k];
    const Eigen::Index n = s.map.n_cells();
    ConvergenceRow row;
    row.M = ladder[k].M;
    row.dt = ladder[k].dt;
    const Vec len = cell_lengths(s);
    if (ref == Reference::SelfFine) {
      const StepState1D& f = out.back();
      const Eigen::Index r = fine->M / row.M;
      Vec xf(n + 1), rf(n);
      for (Eigen::Index j = 0; j <= n; ++j) xf[j] = f.map.positions[r * j];
      for (Eigen::Index j = 0; j < n; ++j) {
        // Coarse centre label in fine cell-centre index units.
        const double t = static_cast<double>(r * j) + 0.5 * static_cast<double>(r) - 0.5;
        const auto k0 = static_cast<Eigen::Index>(std::floor(t));
        const double w = t - static_cast<double>(k0);
        rf[j] = w == 0 ? f.rho[k0] : (1 - w) * f.rho[k0] + w * f.rho[k0 + 1];
      }
      row.l2_x = l2h_error(s.map.positions, xf, s.map.ref.delta_X());
      row.linf_x = linf_error(s.map.positions, xf);
      row.l2_rho = l2h_error(s.rho, rf, len);
      row.linf_rho = linf_error(s.rho, rf);
      row.probe_rho = std::abs(probe_density_1d(s, pb.probe_x) - probe_density_1d(f, pb.probe_x));
    } else {
      Vec ex(n);
      for (Eigen::Index j = 0; j < n; ++j) ex[j] = pb.exact_density(s.map.midpoint(j));
      row.l2_rho = l2h_error(s.rho, ex, len);
      row.linf_rho = linf_error(s.rho, ex);
      row.probe_rho = std::abs(probe_density_1d(s, pb.probe_x) - pb.exact_density(pb.probe_x));
    }
    rep.rows.push_back(row);
  }
  fill_orders(rep);
  return rep;
}

ConvergenceReport convergence_study_2d(const Problem2D& pb, const std::vector<Level>& ladder, int threads) {
  if (ladder.empty()) throw ValidationError("ladder", "must not be empty");
  if (!pb.exact_density) throw ValidationError("exact_density", "2D study needs an exact density");
  std::vector<StepState2D> out(ladder.size());
  parallel_for(ladder.size(), threads, [&](std::size_t i) {
    const RefGrid2D g = RefGrid2D::make(pb.ic.x_extent, pb.ic.y_extent, ladder[i].M, ladder[i].M);
    SchemeConfig2D cfg = pb.cfg;
    cfg.dt = ladder[i].dt;
    out[i] = simulate_2d(make_state_2d(g, pb.ic), pb.model, cfg, step_count(pb.t_end, ladder[i].dt));
  });

  ConvergenceReport rep;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const StepState2D& s = out[k];
    const auto& g = s.map.ref;
    const Eigen::Index n = (g.m_x - 1) * (g.m_y - 1);
    Vec a(n), b(n), w(n);
    Eigen::Index p = 0;
    for (Eigen::Index i = 1; i < g.m_y; ++i)
      for (Eigen::Index j = 1; j < g.m_x; ++j, ++p) {
        a[p] = s.rho(i, j);
        b[p] = pb.exact_density(s.map.x(i, j), s.map.y(i, j));
        w[p] = det_jacobian_2d(s.map, i, j) * g.h_x() * g.h_y();
      }
    ConvergenceRow row;
    row.M = ladder[k].M;
    row.dt = ladder[k].dt;
    row.l2_rho = l2h_error(a, b, w);
    row.linf_rho = linf_error(a, b);
    rep.rows.push_back(row);
  }
  fill_orders(rep);
  return rep;
}

bool StructureReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const StructureCheck& c) { return c.passed; });
}

StructureReport assert_structure(const DiagnosticsTrace& trace, const StructureOptions& opt) {
  const auto& r = trace.rows;
  if (r.empty()) throw Error(ErrorKind::EmptyTrace, "structure check on an empty trace");
  StructureReport rep;

  StructureCheck mass{"mass"};
  const double m0 = r.front().mass;
  for (const auto& row : r) {
    const double d = std::abs(row.mass - m0) / std::max(std::abs(m0), 1e-300);
    if (d > mass.worst) {
      mass.worst = d;
      mass.step = row.step;
    }
  }
  mass.passed = mass.worst <= opt.mass_rel_tol;
  rep.checks.push_back(mass);

  if (opt.check_positivity) {
    StructureCheck pos{"positivity"};
    for (const auto& row : r) {
      // rho = rho0 / det vanishes wherever rho0 does, so only det must stay strictly positive.
      const bool ok = row.det_min > 0 && row.rho_min >= 0;
      const double v = std::min(row.det_min, row.rho_min);
      if (!ok && -v >= pos.worst) {
        pos.worst = -v;
        pos.step = row.step;
        pos.passed = false;
      }
    }
    rep.checks.push_back(pos);
  }

  if (opt.check_energy) {
    StructureCheck en{"energy"};
    for (std::size_t k = 1; k < r.size(); ++k) {
      const double rise = r[k].regularized_energy - r[k - 1].regularized_energy;
      if (rise > en.worst) {
        en.worst = rise;
        en.step = r[k].step;
      }
    }
    en.passed = en.worst <= opt.energy_abs_tol;
    rep.checks.push_back(en);
  }
  return rep;
}

double fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& v, double lo, double hi) {
  if (t.size() != v.size()) throw ValidationError("fit", "size mismatch");
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(v[k] >= lo && v[k] <= hi)) continue;
    const double y = std::log(v[k]);
    n += 1;
    st += t[k];
    sy += y;
    stt += t[k] * t[k];
    sty += t[k] * y;
  }
  if (n < 2) throw Error(ErrorKind::EmptyTrace, "fewer than two samples inside the fitting window");
  return -(n * sty - st * sy) / (n * stt - st * st);
}

}  // namespace wgf
