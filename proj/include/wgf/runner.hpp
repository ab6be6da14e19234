#pragma once

#include <string>
#include <vector>

#include "wgf/config.hpp"
#include "wgf/diagnostics.hpp"

namespace wgf {

/// Process exit status: 0 success, 2 configuration, 3 numerical, 4 I/O.
int exit_code_for(ErrorKind kind);

enum class LogLevel { Error, Info, Debug };
/// Reads WGF_LOG (error, info, debug); defaults to info.
LogLevel log_level_from_env();

struct RunOutcome {
  int exit_code = 0;
  std::string status = "ok";  // "ok" or the ErrorKind name
  std::string message;
  DiagnosticsTrace trace;
  std::vector<std::string> files;
};

/// Runs spec to t_end and writes into spec.out_dir: snapshot_*.csv at step 0,
/// each snapshot time and t_end, diagnostics.csv and manifest.txt. Library
/// errors are caught; the trace up to the failure and the manifest are still
/// written.
RunOutcome run(const RunSpec& spec, LogLevel level = LogLevel::Error);

Problem1D make_problem_1d(const RunSpec& spec);
Problem2D make_problem_2d(const RunSpec& spec);

/// Runs the ladder in spec.convergence with spec.threads workers.
ConvergenceReport run_convergence(const RunSpec& spec);

struct WaitingTimeResult {
  double t_w = 0;
  double t_exact = 0;
  double velocity_tol = 0;
  DiagnosticsTrace trace;
};

/// Free-boundary PME run on the waiting_time initial data; t_w from
/// detect_waiting_time with spec.velocity_tol (0 selects the default).
WaitingTimeResult run_waiting_time(const RunSpec& spec);

void write_trace_csv(const DiagnosticsTrace& trace, const std::string& path);
void write_convergence_csv(const ConvergenceReport& report, const std::string& path);
void write_snapshot_1d(const StepState1D& state, const std::string& path);
void write_snapshot_2d(const StepState2D& state, const std::string& path);

}  // namespace wgf
