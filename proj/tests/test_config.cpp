#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wgf/config.hpp"
#include "wgf/runner.hpp"

using namespace wgf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wgf_test_" + name);
  fs::remove_all(p);
  return p;
}

constexpr const char* kSmall = R"(# small smooth porous-medium run
[run]
t_end = 0.05
snapshots = 0.02
[model]
kind = porous_medium
m = 2
[initial]
name = cos
[grid]
cells = 20
[scheme]
dt = 0.01
regularization = none
)";

}  // namespace

TEST(Config, ParsesKeysAndComments) {
  const RunSpec s = parse_config(kSmall);
  EXPECT_EQ(s.model.kind, ModelKind::PorousMedium);
  EXPECT_EQ(s.grid.cells, 20);
  EXPECT_DOUBLE_EQ(s.scheme.dt, 0.01);
  EXPECT_EQ(s.scheme.regularization, Regularization::None);
  ASSERT_EQ(s.snapshots.size(), 1u);
  EXPECT_DOUBLE_EQ(s.snapshots[0], 0.02);
  EXPECT_FALSE(s.is_2d());
}

TEST(Config, EveryPresetRoundTrips) {
  for (const PresetInfo& p : list_presets()) {
    const RunSpec s = preset(p.name);
    EXPECT_NO_THROW(s.validate()) << p.name;
    const RunSpec back = parse_config(serialize(s));
    EXPECT_EQ(back, s) << p.name;
    EXPECT_EQ(serialize(back), serialize(s)) << p.name;
  }
}

TEST(Config, PresetLadders) {
  const RunSpec t1 = preset("table1");
  EXPECT_EQ(t1.convergence.ladder.size(), 4u);
  EXPECT_EQ(t1.convergence.reference, Reference::SelfFine);
  EXPECT_TRUE(t1.convergence.fine.has_value());
  EXPECT_EQ(preset("table2").convergence.exact, ExactSolution::Barenblatt1D);
  EXPECT_TRUE(preset("table6").is_2d());
  EXPECT_THROW(preset("table99"), ValidationError);
}

TEST(Config, PresetKeyIsAppliedBeforeOverrides) {
  const RunSpec s = parse_config("[scheme]\ndt = 0.002\n[run]\npreset = table5\n");
  EXPECT_EQ(s.preset, "table5");
  EXPECT_DOUBLE_EQ(s.scheme.dt, 0.002);
  EXPECT_EQ(s.grid.cells, preset("table5").grid.cells);
}

TEST(Config, SubUnitExponentIsRejected) {
  try {
    parse_config("[model]\nkind = porous_medium\nm = 0.5\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ValidationError);
    EXPECT_EQ(e.field(), "m");
  }
}

TEST(Config, UnknownKeyReportsLineAndColumn) {
  try {
    parse_config("[run]\nt_end = 1\n[scheme]\n  dtt = 0.1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.column(), 3u);
  }
}

TEST(Config, MalformedInput) {
  auto kind_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;  // sentinel: no error raised
  };
  EXPECT_EQ(kind_of("[grid]\ncells = 1x\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("[nope]\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("[grid\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("cells = 3\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("[grid]\ncells\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("[scheme]\nregularization = sideways\n"), ErrorKind::ValidationError);
  EXPECT_EQ(kind_of("[run]\nt_end = 0.55\n[scheme]\ndt = 0.1\n"), ErrorKind::ValidationError);
  EXPECT_EQ(kind_of("[run]\nsnapshots = 2\nt_end = 1\n"), ErrorKind::ValidationError);
  EXPECT_EQ(kind_of("[convergence]\nladder = 10:0.1\nreference = exact\n"), ErrorKind::ValidationError);
  try {
    parse_config("[grid]\ncells = abc\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 9u);
  }
}

TEST(Config, MissingFileIsIoError) {
  try {
    load_config("/nonexistent/wgf.ini");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}

TEST(Runner, ExitCodes) {
  EXPECT_EQ(exit_code_for(ErrorKind::ParseError), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::ValidationError), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::MapDistorted), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::NoConvergence), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::IoError), 4);
}

TEST(Runner, WritesOutputsAndRerunsBitIdentically) {
  RunSpec s = parse_config(kSmall);
  const fs::path a = scratch("a"), b = scratch("b");
  s.out_dir = a.string();
  const RunOutcome ra = run(s);
  s.out_dir = b.string();
  const RunOutcome rb = run(s);
  EXPECT_EQ(ra.exit_code, 0);
  EXPECT_EQ(ra.status, "ok");

  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  const std::vector<std::string> expected = {"diagnostics.csv", "manifest.txt", "snapshot_000000_t0.000000.csv",
                                             "snapshot_000002_t0.020000.csv", "snapshot_000005_t0.050000.csv"};
  EXPECT_EQ(names, expected);
  for (const auto& n : names) {
    if (n == "manifest.txt") continue;  // records out_dir
    EXPECT_EQ(slurp(a / n), slurp(b / n)) << n;
  }
  const std::string manifest = slurp(a / "manifest.txt");
  EXPECT_NE(manifest.find("status = ok"), std::string::npos);
  EXPECT_NE(manifest.find("steps_completed = 5"), std::string::npos);

  // The manifest embeds a configuration that reproduces the run.
  const auto cfg_at = manifest.find("[run]");
  ASSERT_NE(cfg_at, std::string::npos);
  RunSpec again = parse_config(manifest.substr(cfg_at));
  again.out_dir = s.out_dir;
  EXPECT_EQ(again, s);
  // The status block is skipped, so the whole file is a valid config.
  RunSpec whole = parse_config(manifest);
  whole.out_dir = s.out_dir;
  EXPECT_EQ(whole, s);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Runner, NumericalFailureStillWritesManifest) {
  RunSpec s = preset("ks2d_m1_c20");
  s.grid.cells = 16;
  s.scheme.dt = 0.05;
  s.scheme.epsilon = 1e-3;
  s.t_end = 10;
  s.snapshots.clear();
  const fs::path dir = scratch("fail");
  s.out_dir = dir.string();
  const RunOutcome r = run(s);
  EXPECT_EQ(r.status, "MapDistorted");
  EXPECT_EQ(r.exit_code, 3);
  const std::string manifest = slurp(dir / "manifest.txt");
  EXPECT_NE(manifest.find("status = MapDistorted"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "diagnostics.csv"));
  fs::remove_all(dir);
}

TEST(Runner, UnwritableOutputIsIoError) {
  RunSpec s = parse_config(kSmall);
  s.out_dir = "/proc/wgf_cannot_create";
  EXPECT_EQ(run(s).exit_code, 4);
}

TEST(Runner, ConvergenceAndWaitingTimeEntryPoints) {
  RunSpec s = preset("table2");
  s.convergence.ladder = {{50, 0.5 / 25}, {100, 0.5 / 100}};
  const ConvergenceReport rep = run_convergence(s);
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_NEAR(rep.rows[1].order_l2_rho, 2, 0.3);

  RunSpec w = preset("table5");
  w.grid.cells = 200;
  w.scheme.dt = 1.0 / 200;
  const WaitingTimeResult r = run_waiting_time(w);
  EXPECT_NEAR(r.t_exact, 2.0 / 9.0, 1e-15);
  EXPECT_GT(r.t_w, 0.15);
  EXPECT_LT(r.t_w, 0.3);
  EXPECT_THROW(run_waiting_time(preset("table1")), ValidationError);
}
