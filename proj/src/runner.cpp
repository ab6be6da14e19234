#include "wgf/runner.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#ifndef WGF_VERSION
#define WGF_VERSION "0.1.0"
#endif

namespace wgf {

namespace fs = std::filesystem;

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  return out;
}

void finish_file(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

void log(LogLevel want, LogLevel have, const std::string& msg) {
  if (static_cast<int>(want) <= static_cast<int>(have)) fmt::print(stderr, "[wgf] {}\n", msg);
}

std::string snapshot_name(int step, double t) { return fmt::format("snapshot_{:06d}_t{:.6f}.csv", step, t); }

std::set<int> snapshot_steps(const RunSpec& spec, int n_steps) {
  std::set<int> steps{0, n_steps};
  for (double t : spec.snapshots) steps.insert(step_count(t, spec.scheme.dt));
  return steps;
}

double integrate_initial_mass(const InitialCondition1D& ic, double a, double b) {
  // Piecewise integration keeps kinks of the tabulated families on panel edges.
  constexpr int kPanels = 8;
  const double h = (b - a) / kPanels;
  double mass = 0;
  for (int k = 0; k < kPanels; ++k) mass += integrate_tanh_sinh(ic.rho, a + k * h, a + (k + 1) * h);
  return mass;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError: return 2;
    case ErrorKind::IoError: return 4;
    default: return 3;
  }
}

LogLevel log_level_from_env() {
  const char* v = std::getenv("WGF_LOG");
  if (!v) return LogLevel::Info;
  const std::string s(v);
  if (s == "error") return LogLevel::Error;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

void write_trace_csv(const DiagnosticsTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "step,time,mass,energy,regularized_energy,rho_min,rho_max,det_min,x_left,x_right,newton_iterations\n";
  for (const TraceRow& r : trace.rows)
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.step, num(r.time), num(r.mass), num(r.energy),
                       num(r.regularized_energy), num(r.rho_min), num(r.rho_max), num(r.det_min), num(r.x_left),
                       num(r.x_right), r.newton_iterations);
  finish_file(out, path);
}

void write_convergence_csv(const ConvergenceReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "M,dt,l2_x,order_l2_x,linf_x,order_linf_x,l2_rho,order_l2_rho,linf_rho,order_linf_rho,probe_rho,"
         "order_probe\n";
  for (const ConvergenceRow& r : report.rows)
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.M, num(r.dt), num(r.l2_x), num(r.order_l2_x),
                       num(r.linf_x), num(r.order_linf_x), num(r.l2_rho), num(r.order_l2_rho), num(r.linf_rho),
                       num(r.order_linf_rho), num(r.probe_rho), num(r.order_probe));
  finish_file(out, path);
}

void write_snapshot_1d(const StepState1D& s, const std::string& path) {
  auto out = open_out(path);
  out << "X,x,rho\n";
  for (Eigen::Index j = 0; j < s.map.n_cells(); ++j)
    out << fmt::format("{},{},{}\n", num(s.map.ref.cell_center(j)), num(s.map.midpoint(j)), num(s.rho[j]));
  finish_file(out, path);
}

void write_snapshot_2d(const StepState2D& s, const std::string& path) {
  auto out = open_out(path);
  out << "X,Y,x,y,rho\n";
  const RefGrid2D& g = s.map.ref;
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      out << fmt::format("{},{},{},{},{}\n", num(g.X(j)), num(g.Y(i)), num(s.map.x(i, j)), num(s.map.y(i, j)),
                         num(s.rho(i, j)));
  finish_file(out, path);
}

RunOutcome run(const RunSpec& spec, LogLevel level) {
  RunOutcome res;
  std::error_code ec;
  fs::create_directories(spec.out_dir, ec);
  if (ec) {
    res.exit_code = 4;
    res.status = std::string(to_string(ErrorKind::IoError));
    res.message = "cannot create '" + spec.out_dir + "': " + ec.message();
    return res;
  }
  const fs::path dir(spec.out_dir);
  const int n_steps = step_count(spec.t_end, spec.scheme.dt);
  const std::set<int> wanted = snapshot_steps(spec, n_steps);
  int step = 0;
  auto snapshot = [&](auto writer, const auto& state) {
    if (!wanted.count(step)) return;
    const std::string p = (dir / snapshot_name(step, state.time)).string();
    writer(state, p);
    res.files.push_back(p);
  };

  log(LogLevel::Info, level, fmt::format("run {} ({} steps)", spec.preset.empty() ? "config" : spec.preset, n_steps));
  try {
    if (spec.is_2d()) {
      const SchemeConfig2D cfg = spec.scheme_2d();
      StepState2D s = make_state_2d(spec.grid_2d(), spec.initial_2d());
      snapshot(write_snapshot_2d, s);
      simulate_2d(s, spec.model, cfg, n_steps, &res.trace, [&](const StepState2D& cur) {
        ++step;
        snapshot(write_snapshot_2d, cur);
        log(LogLevel::Debug, level, fmt::format("step {} t={}", step, cur.time));
      });
    } else {
      const SchemeConfig1D cfg = spec.scheme_1d();
      StepState1D s = make_state_1d(spec.grid_1d(), spec.initial_1d());
      snapshot(write_snapshot_1d, s);
      simulate_1d(s, spec.model, cfg, n_steps, &res.trace, [&](const StepState1D& cur) {
        ++step;
        snapshot(write_snapshot_1d, cur);
        log(LogLevel::Debug, level, fmt::format("step {} t={}", step, cur.time));
      });
    }
  } catch (const Error& e) {
    res.exit_code = exit_code_for(e.kind());
    res.status = std::string(to_string(e.kind()));
    res.message = e.what();
    log(LogLevel::Error, level, res.message);
  }

  try {
    const std::string trace_path = (dir / "diagnostics.csv").string();
    write_trace_csv(res.trace, trace_path);
    res.files.push_back(trace_path);

    const std::string manifest_path = (dir / "manifest.txt").string();
    auto out = open_out(manifest_path);
    out << "[manifest]\n"
        << "version = " << WGF_VERSION << "\n"
        << "status = " << res.status << "\n"
        << "exit_code = " << res.exit_code << "\n"
        << "message = " << res.message << "\n"
        << "steps_completed = " << (res.trace.rows.empty() ? 0 : res.trace.rows.back().step) << "\n"
        << "final_time = " << num(res.trace.rows.empty() ? 0.0 : res.trace.rows.back().time) << "\n\n"
        << serialize(spec);
    finish_file(out, manifest_path);
    res.files.push_back(manifest_path);
  } catch (const Error& e) {
    res.exit_code = 4;
    res.status = std::string(to_string(e.kind()));
    res.message = e.what();
  }
  return res;
}

Problem1D make_problem_1d(const RunSpec& spec) {
  Problem1D pb;
  pb.model = spec.model;
  pb.ic = spec.initial_1d();
  const RefGrid1D g = spec.grid_1d();
  pb.ic.x_left = g.x_left;
  pb.ic.x_right = g.x_right;
  pb.cfg = spec.scheme_1d();
  pb.t_end = spec.t_end;
  pb.probe_x = spec.convergence.probe_x;
  switch (spec.convergence.exact) {
    case ExactSolution::Barenblatt1D:
      pb.exact_density = [t = spec.t_end, m = spec.model.m](double x) { return barenblatt_1d(x, t, m); };
      break;
    case ExactSolution::FokkerPlanckSteady: {
      const double mass = integrate_initial_mass(pb.ic, g.x_left, g.x_right);
      const double c = fp_steady_constant(spec.model.potential, spec.model.m, mass);
      pb.exact_density = [c, v = spec.model.potential, m = spec.model.m](double x) {
        const double b = c - (m - 1) / m * potential_value(v, x);
        return b > 0 ? std::pow(b, 1 / (m - 1)) : 0.0;
      };
      break;
    }
    default: break;
  }
  return pb;
}

Problem2D make_problem_2d(const RunSpec& spec) {
  Problem2D pb;
  pb.model = spec.model;
  pb.ic = spec.initial_2d();
  if (spec.grid.extent) pb.ic.x_extent = pb.ic.y_extent = *spec.grid.extent;
  pb.cfg = spec.scheme_2d();
  pb.t_end = spec.t_end;
  if (spec.convergence.exact == ExactSolution::Barenblatt2D)
    pb.exact_density = [t = spec.t_end, m = spec.model.m, c = spec.ic.amplitude](double x, double y) {
      return barenblatt_2d(x, y, t, m, c);
    };
  return pb;
}

ConvergenceReport run_convergence(const RunSpec& spec) {
  if (spec.convergence.ladder.empty()) throw ValidationError("ladder", "no convergence ladder configured");
  if (spec.is_2d()) return convergence_study_2d(make_problem_2d(spec), spec.convergence.ladder, spec.threads);
  return convergence_study_1d(make_problem_1d(spec), spec.convergence.ladder, spec.convergence.reference,
                              spec.convergence.fine, spec.threads);
}

WaitingTimeResult run_waiting_time(const RunSpec& spec) {
  if (spec.model.kind != ModelKind::PorousMedium) throw ValidationError("kind", "waiting time needs porous_medium");
  if (spec.scheme.boundary != Boundary1D::FreeBoundaryPME)
    throw ValidationError("boundary", "waiting time needs free_pme boundaries");
  WaitingTimeResult res;
  const RefGrid1D grid = spec.grid_1d();
  res.velocity_tol = spec.velocity_tol > 0 ? spec.velocity_tol : default_velocity_tol(grid.delta_X(), spec.scheme.dt);
  simulate_1d(make_state_1d(grid, spec.initial_1d()), spec.model, spec.scheme_1d(),
              step_count(spec.t_end, spec.scheme.dt), &res.trace);
  res.t_w = detect_waiting_time(res.trace, res.velocity_tol);
  res.t_exact = waiting_time_exact(spec.model.m, spec.ic.theta);
  return res;
}

}  // namespace wgf
