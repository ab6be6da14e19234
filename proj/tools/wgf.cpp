#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <optional>

#include "wgf/config.hpp"
#include "wgf/runner.hpp"

namespace {

struct Common {
  std::string config, preset, out;
  std::optional<int> threads;
  std::optional<double> m, theta, dt, epsilon;
  std::optional<long> M;
  std::string reg;
};

void add_common(CLI::App* cmd, Common& o) {
  cmd->add_option("--config", o.config, "INI run configuration");
  cmd->add_option("--preset", o.preset, "named preset (see list-presets)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--threads", o.threads, "worker threads for ladder runs")->check(CLI::PositiveNumber);
  cmd->add_option("--m", o.m, "internal-energy exponent (model and initial data)");
  cmd->add_option("--theta", o.theta, "waiting-time data parameter");
  cmd->add_option("--M", o.M, "cell count (per direction in 2D)");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--epsilon", o.epsilon, "regularization coefficient in its configured unit");
  cmd->add_option("--reg", o.reg, "regularization")->check(CLI::IsMember({"x", "increment", "none"}));
}

wgf::RunSpec resolve(const Common& o, const char* fallback_preset) {
  wgf::RunSpec s;
  if (!o.config.empty() && !o.preset.empty())
    throw wgf::ValidationError("preset", "give either --config or --preset, not both");
  if (!o.config.empty())
    s = wgf::load_config(o.config);
  else if (!o.preset.empty())
    s = wgf::preset(o.preset);
  else if (fallback_preset)
    s = wgf::preset(fallback_preset);
  else
    throw wgf::ValidationError("config", "one of --config or --preset is required");

  if (!o.out.empty()) s.out_dir = o.out;
  if (o.threads) s.threads = *o.threads;
  if (o.m) s.model.m = s.ic.m = *o.m;
  if (o.theta) s.ic.theta = *o.theta;
  if (o.M) s.grid.cells = *o.M;
  if (o.dt) s.scheme.dt = *o.dt;
  if (o.epsilon) s.scheme.epsilon = *o.epsilon;
  if (o.reg == "x") s.scheme.regularization = wgf::Regularization::LaplacianOfX;
  if (o.reg == "increment") s.scheme.regularization = wgf::Regularization::LaplacianOfIncrement;
  if (o.reg == "none") s.scheme.regularization = wgf::Regularization::None;
  return s;
}

std::string cell(double v) { return std::isnan(v) ? std::string("-") : fmt::format("{:.4e}", v); }
std::string order(double v) { return std::isnan(v) ? std::string("-") : fmt::format("{:.4f}", v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized Lagrangian solver for Wasserstein gradient flows"};
  app.require_subcommand(1);
  Common run_opt, conv_opt, wait_opt;
  std::optional<double> velocity_tol;

  auto* run_cmd = app.add_subcommand("run", "run one simulation and write snapshots, diagnostics and a manifest");
  add_common(run_cmd, run_opt);
  auto* conv_cmd = app.add_subcommand("convergence", "run a refinement ladder and write convergence.csv");
  add_common(conv_cmd, conv_opt);
  auto* wait_cmd = app.add_subcommand(
      "waiting-time", "detect the waiting time of free-boundary PME data (defaults to preset table5; --M alone "
                      "also sets dt = 1/M)");
  add_common(wait_cmd, wait_opt);
  wait_cmd->add_option("--velocity-tol", velocity_tol, "boundary speed threshold");
  auto* list_cmd = app.add_subcommand("list-presets", "print the preset catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const wgf::LogLevel level = wgf::log_level_from_env();
  try {
    if (list_cmd->parsed()) {
      for (const auto& p : wgf::list_presets()) fmt::print("{:<44} {}\n", p.name, p.description);
      return 0;
    }
    if (run_cmd->parsed()) {
      wgf::RunSpec spec = resolve(run_opt, nullptr);
      spec.validate();
      const wgf::RunOutcome r = wgf::run(spec, level);
      fmt::print("status: {}\n", r.status);
      if (!r.message.empty()) fmt::print(stderr, "{}\n", r.message);
      for (const auto& f : r.files)
        if (level == wgf::LogLevel::Debug) fmt::print("wrote {}\n", f);
      fmt::print("output: {}\n", spec.out_dir);
      return r.exit_code;
    }
    if (conv_cmd->parsed()) {
      wgf::RunSpec spec = resolve(conv_opt, nullptr);
      spec.validate();
      const wgf::ConvergenceReport rep = wgf::run_convergence(spec);
      std::filesystem::create_directories(spec.out_dir);
      const std::string path = (std::filesystem::path(spec.out_dir) / "convergence.csv").string();
      wgf::write_convergence_csv(rep, path);
      fmt::print("{:>6} {:>12} {:>11} {:>7} {:>11} {:>7} {:>11} {:>7}\n", "M", "dt", "L2(x)", "order", "L2(rho)",
                 "order", "probe", "order");
      for (const auto& row : rep.rows)
        fmt::print("{:>6} {:>12.6g} {:>11} {:>7} {:>11} {:>7} {:>11} {:>7}\n", row.M, row.dt, cell(row.l2_x),
                   order(row.order_l2_x), cell(row.l2_rho), order(row.order_l2_rho), cell(row.probe_rho),
                   order(row.order_probe));
      fmt::print("wrote {}\n", path);
      return 0;
    }
    if (wait_cmd->parsed()) {
      wgf::RunSpec spec = resolve(wait_opt, "table5");
      if (wait_opt.M && !wait_opt.dt) spec.scheme.dt = 1.0 / static_cast<double>(*wait_opt.M);
      if (velocity_tol) spec.velocity_tol = *velocity_tol;
      spec.validate();
      const wgf::WaitingTimeResult r = wgf::run_waiting_time(spec);
      fmt::print("t_w = {:.6f}\nt_w_exact = {:.6f}\nvelocity_tol = {:.6g}\n", r.t_w, r.t_exact, r.velocity_tol);
      return 0;
    }
  } catch (const wgf::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return wgf::exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 4;
  }
  return 0;
}
