#include "wgf/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace wgf {

namespace {

constexpr std::pair<std::string_view, ExactSolution> kExactNames[] = {
    {"none", ExactSolution::None},
    {"barenblatt_1d", ExactSolution::Barenblatt1D},
    {"barenblatt_2d", ExactSolution::Barenblatt2D},
    {"fp_steady", ExactSolution::FokkerPlanckSteady},
};
constexpr std::pair<std::string_view, Reference> kReferenceNames[] = {
    {"self_fine", Reference::SelfFine},
    {"exact", Reference::Exact},
};

template <typename E, std::size_t N>
std::string_view name_of(E e, const std::pair<std::string_view, E> (&table)[N]) {
  for (const auto& [n, v] : table)
    if (v == e) return n;
  return "unknown";
}

template <typename E, std::size_t N>
E value_of(std::string_view s, const std::pair<std::string_view, E> (&table)[N], const char* field) {
  for (const auto& [n, v] : table)
    if (n == s) return v;
  throw ValidationError(field, "unknown value '" + std::string(s) + "'");
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Position of a value inside its line, for error reporting.
struct Cursor {
  std::size_t line = 0, column = 0;
};

double to_double(std::string_view s, Cursor at) {
  s = trim(s);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(at.line, at.column, "expected a number, got '" + std::string(s) + "'");
  return v;
}

long long to_int(std::string_view s, Cursor at) {
  s = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(at.line, at.column, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

bool to_bool(std::string_view s, Cursor at) {
  s = trim(s);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError(at.line, at.column, "expected true or false, got '" + std::string(s) + "'");
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

Level to_level(std::string_view s, Cursor at) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw ParseError(at.line, at.column, "expected M:dt, got '" + std::string(trim(s)) + "'");
  return {static_cast<Eigen::Index>(to_int(parts[0], at)), to_double(parts[1], at)};
}

std::string fmt_level(const Level& l) { return fmt::format("{}:{}", l.M, fmt_double(l.dt)); }

std::optional<double> to_optional_double(std::string_view s, Cursor at) {
  if (trim(s).empty()) return std::nullopt;
  return to_double(s, at);
}
std::string fmt_optional(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

struct Field {
  std::string_view section;
  std::string_view key;
  std::function<void(RunSpec&, std::string_view, Cursor)> set;
  std::function<std::string(const RunSpec&)> get;
};

#define WGF_DOUBLE(sec, name, expr)                                                           \
  Field {                                                                                     \
    sec, name, [](RunSpec& s, std::string_view v, Cursor c) { s.expr = to_double(v, c); },    \
        [](const RunSpec& s) { return fmt_double(s.expr); }                                   \
  }
#define WGF_ENUM(sec, name, expr, parse)                                                      \
  Field {                                                                                     \
    sec, name, [](RunSpec& s, std::string_view v, Cursor) { s.expr = parse(trim(v)); },       \
        [](const RunSpec& s) { return std::string(to_string(s.expr)); }                       \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      // [run]
      {"run", "description", [](RunSpec& s, std::string_view v, Cursor) { s.description = trim(v); },
       [](const RunSpec& s) { return s.description; }},
      WGF_DOUBLE("run", "t_end", t_end),
      {"run", "snapshots",
       [](RunSpec& s, std::string_view v, Cursor c) {
         s.snapshots.clear();
         for (auto part : split(v, ',')) s.snapshots.push_back(to_double(part, c));
       },
       [](const RunSpec& s) {
         std::string out;
         for (std::size_t k = 0; k < s.snapshots.size(); ++k)
           out += (k ? ", " : "") + fmt_double(s.snapshots[k]);
         return out;
       }},
      {"run", "out", [](RunSpec& s, std::string_view v, Cursor) { s.out_dir = trim(v); },
       [](const RunSpec& s) { return s.out_dir; }},
      {"run", "threads",
       [](RunSpec& s, std::string_view v, Cursor c) { s.threads = static_cast<int>(to_int(v, c)); },
       [](const RunSpec& s) { return std::to_string(s.threads); }},
      WGF_DOUBLE("run", "velocity_tol", velocity_tol),
      // [model]
      WGF_ENUM("model", "kind", model.kind, parse_model_kind),
      WGF_DOUBLE("model", "m", model.m),
      WGF_DOUBLE("model", "nu", model.nu),
      WGF_ENUM("model", "potential", model.potential, parse_potential),
      WGF_ENUM("model", "kernel", model.kernel, parse_kernel),
      WGF_ENUM("model", "coupling", model.coupling, parse_coupling),
      // [initial]
      {"initial", "name", [](RunSpec& s, std::string_view v, Cursor) { s.initial = trim(v); },
       [](const RunSpec& s) { return s.initial; }},
      WGF_DOUBLE("initial", "m", ic.m),
      WGF_DOUBLE("initial", "theta", ic.theta),
      WGF_DOUBLE("initial", "sigma", ic.sigma),
      WGF_DOUBLE("initial", "amplitude", ic.amplitude),
      // [grid]
      {"grid", "cells",
       [](RunSpec& s, std::string_view v, Cursor c) { s.grid.cells = static_cast<Eigen::Index>(to_int(v, c)); },
       [](const RunSpec& s) { return std::to_string(s.grid.cells); }},
      {"grid", "cells_y",
       [](RunSpec& s, std::string_view v, Cursor c) { s.grid.cells_y = static_cast<Eigen::Index>(to_int(v, c)); },
       [](const RunSpec& s) { return std::to_string(s.grid.cells_y); }},
      {"grid", "x_left", [](RunSpec& s, std::string_view v, Cursor c) { s.grid.x_left = to_optional_double(v, c); },
       [](const RunSpec& s) { return fmt_optional(s.grid.x_left); }},
      {"grid", "x_right",
       [](RunSpec& s, std::string_view v, Cursor c) { s.grid.x_right = to_optional_double(v, c); },
       [](const RunSpec& s) { return fmt_optional(s.grid.x_right); }},
      {"grid", "extent", [](RunSpec& s, std::string_view v, Cursor c) { s.grid.extent = to_optional_double(v, c); },
       [](const RunSpec& s) { return fmt_optional(s.grid.extent); }},
      // [scheme]
      WGF_DOUBLE("scheme", "dt", scheme.dt),
      WGF_ENUM("scheme", "regularization", scheme.regularization, parse_regularization),
      WGF_DOUBLE("scheme", "epsilon", scheme.epsilon),
      WGF_ENUM("scheme", "epsilon_scaling", scheme.epsilon_scaling, parse_epsilon_scaling),
      WGF_ENUM("scheme", "boundary", scheme.boundary, parse_boundary),
      WGF_ENUM("scheme", "time_order", scheme.time_order, parse_time_order),
      WGF_ENUM("scheme", "mode", scheme.mode, parse_mode_2d),
      WGF_DOUBLE("scheme", "det_floor", scheme.det_floor),
      // [newton]
      WGF_DOUBLE("newton", "alpha", scheme.newton.alpha),
      {"newton", "max_iters",
       [](RunSpec& s, std::string_view v, Cursor c) { s.scheme.newton.max_iters = static_cast<int>(to_int(v, c)); },
       [](const RunSpec& s) { return std::to_string(s.scheme.newton.max_iters); }},
      WGF_DOUBLE("newton", "residual_tol", scheme.newton.residual_tol),
      WGF_DOUBLE("newton", "step_tol", scheme.newton.step_tol),
      {"newton", "line_search",
       [](RunSpec& s, std::string_view v, Cursor c) { s.scheme.newton.line_search = to_bool(v, c); },
       [](const RunSpec& s) { return std::string(s.scheme.newton.line_search ? "true" : "false"); }},
      // [convergence]
      {"convergence", "ladder",
       [](RunSpec& s, std::string_view v, Cursor c) {
         s.convergence.ladder.clear();
         for (auto part : split(v, ',')) s.convergence.ladder.push_back(to_level(part, c));
       },
       [](const RunSpec& s) {
         std::string out;
         for (std::size_t k = 0; k < s.convergence.ladder.size(); ++k)
           out += (k ? ", " : "") + fmt_level(s.convergence.ladder[k]);
         return out;
       }},
      {"convergence", "reference",
       [](RunSpec& s, std::string_view v, Cursor) { s.convergence.reference = parse_reference(trim(v)); },
       [](const RunSpec& s) { return std::string(to_string(s.convergence.reference)); }},
      {"convergence", "fine",
       [](RunSpec& s, std::string_view v, Cursor c) {
         if (trim(v).empty())
           s.convergence.fine.reset();
         else
           s.convergence.fine = to_level(v, c);
       },
       [](const RunSpec& s) { return s.convergence.fine ? fmt_level(*s.convergence.fine) : std::string(); }},
      {"convergence", "exact",
       [](RunSpec& s, std::string_view v, Cursor) { s.convergence.exact = parse_exact_solution(trim(v)); },
       [](const RunSpec& s) { return std::string(to_string(s.convergence.exact)); }},
      WGF_DOUBLE("convergence", "probe_x", convergence.probe_x),
  };
  return table;
}

#undef WGF_DOUBLE
#undef WGF_ENUM

constexpr std::string_view kSections[] = {"run", "model", "initial", "grid", "scheme", "newton", "convergence"};

struct Entry {
  std::string_view section, key, value;
  Cursor key_at, value_at;
};

void check_time_grid(double t, double dt, const char* field) {
  try {
    (void)step_count(t, dt);
  } catch (const ValidationError&) {
    throw ValidationError(field, "must be a multiple of dt");
  }
}

}  // namespace

std::string_view to_string(ExactSolution e) { return name_of(e, kExactNames); }
ExactSolution parse_exact_solution(std::string_view s) { return value_of(s, kExactNames, "exact"); }
std::string_view to_string(Reference r) { return name_of(r, kReferenceNames); }
Reference parse_reference(std::string_view s) { return value_of(s, kReferenceNames, "reference"); }

SchemeConfig1D RunSpec::scheme_1d() const {
  SchemeConfig1D c;
  c.dt = scheme.dt;
  c.regularization = scheme.regularization;
  c.epsilon = scheme.epsilon;
  c.epsilon_scaling = scheme.epsilon_scaling;
  c.boundary = scheme.boundary;
  c.time_order = scheme.time_order;
  c.newton = scheme.newton;
  return c;
}

SchemeConfig2D RunSpec::scheme_2d() const {
  SchemeConfig2D c;
  c.dt = scheme.dt;
  c.regularization = scheme.regularization;
  c.epsilon = scheme.epsilon;
  c.epsilon_scaling = scheme.epsilon_scaling;
  c.mode = scheme.mode;
  c.newton = scheme.newton;
  c.det_floor = scheme.det_floor;
  return c;
}

InitialCondition1D RunSpec::initial_1d() const { return initial_condition_1d(initial, ic); }
InitialCondition2D RunSpec::initial_2d() const { return initial_condition_2d(initial, ic); }

RefGrid1D RunSpec::grid_1d() const {
  const InitialCondition1D f = initial_1d();
  return RefGrid1D::make(grid.x_left.value_or(f.x_left), grid.x_right.value_or(f.x_right), grid.cells);
}

RefGrid2D RunSpec::grid_2d() const {
  const InitialCondition2D f = initial_2d();
  return RefGrid2D::make(grid.extent.value_or(f.x_extent), grid.extent.value_or(f.y_extent), grid.cells,
                         grid.cells_y > 0 ? grid.cells_y : grid.cells);
}

void RunSpec::validate() const {
  model.validate();
  if (is_2d()) {
    (void)grid_2d();
    scheme_2d().validate(model);
  } else {
    (void)grid_1d();
    scheme_1d().validate(model);
  }
  if (!(t_end > 0)) throw ValidationError("t_end", "must be positive");
  check_time_grid(t_end, scheme.dt, "t_end");
  for (double t : snapshots) {
    if (!(t > 0 && t <= t_end)) throw ValidationError("snapshots", "times must lie in (0, t_end]");
    check_time_grid(t, scheme.dt, "snapshots");
  }
  if (threads < 1) throw ValidationError("threads", "must be at least 1");
  if (out_dir.empty()) throw ValidationError("out", "must not be empty");
  if (!(velocity_tol >= 0)) throw ValidationError("velocity_tol", "must be non-negative");

  const ConvergenceSpec& c = convergence;
  auto check_level = [&](const Level& l) {
    if (l.M < 2) throw ValidationError("ladder", "cell counts must be at least 2");
    if (!(l.dt > 0)) throw ValidationError("ladder", "dt must be positive");
    check_time_grid(t_end, l.dt, "ladder");
  };
  for (const Level& l : c.ladder) check_level(l);
  if (c.fine) check_level(*c.fine);
  if (!c.ladder.empty()) {
    if (c.reference == Reference::SelfFine && !c.fine && !is_2d())
      throw ValidationError("fine", "self-fine reference needs a fine level");
    if ((c.reference == Reference::Exact || is_2d()) && c.exact == ExactSolution::None)
      throw ValidationError("exact", "an exact solution is required for this reference");
  }
  if (c.exact == ExactSolution::Barenblatt1D && model.kind != ModelKind::PorousMedium)
    throw ValidationError("exact", "barenblatt_1d needs the porous_medium model");
  if (c.exact == ExactSolution::Barenblatt2D && model.kind != ModelKind::PorousMedium2D)
    throw ValidationError("exact", "barenblatt_2d needs the porous_medium_2d model");
  if (c.exact == ExactSolution::FokkerPlanckSteady &&
      (model.kind != ModelKind::NonlinearFP || model.potential == PotentialKind::None))
    throw ValidationError("exact", "fp_steady needs the nonlinear_fp model with a potential");
}

RunSpec parse_config(std::string_view text) {
  std::vector<Entry> entries;
  std::string_view section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    const std::string_view raw = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    const std::size_t col = raw.find_first_not_of(" \t") + 1;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, col, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      // A run manifest opens with its status block; skipping it makes manifests reusable as configs.
      if (section == "manifest") continue;
      if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections))
        throw ParseError(line_no, col + 1, "unknown section '" + std::string(section) + "'");
      continue;
    }
    if (section == "manifest") continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, col, "expected key = value");
    if (section.empty()) throw ParseError(line_no, col, "key outside of a section");
    const std::string_view key = trim(raw.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, col, "empty key");
    const std::string_view value = raw.substr(eq + 1);
    const std::size_t vcol = eq + 2 + (value.find_first_not_of(" \t") == std::string_view::npos
                                           ? 0
                                           : value.find_first_not_of(" \t"));
    const bool known = (section == "run" && key == "preset") ||
                       std::any_of(fields().begin(), fields().end(),
                                   [&](const Field& f) { return f.section == section && f.key == key; });
    if (!known)
      throw ParseError(line_no, col, "unknown key '" + std::string(key) + "' in [" + std::string(section) + "]");
    entries.push_back({section, key, value, {line_no, col}, {line_no, vcol}});
  }

  RunSpec spec;
  for (const Entry& e : entries)
    if (e.section == "run" && e.key == "preset") spec = preset(trim(e.value));
  for (const Entry& e : entries) {
    if (e.section == "run" && e.key == "preset") continue;
    for (const Field& f : fields())
      if (f.section == e.section && f.key == e.key) f.set(spec, e.value, e.value_at);
  }
  spec.validate();
  return spec;
}

RunSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const RunSpec& spec) {
  std::string out;
  std::string_view current;
  if (!spec.preset.empty()) out += "[run]\npreset = " + spec.preset + "\n";
  for (const Field& f : fields()) {
    if (f.section != current) {
      if (!(f.section == "run" && !spec.preset.empty())) out += (out.empty() ? "[" : "\n[") + std::string(f.section) + "]\n";
      current = f.section;
    }
    out += std::string(f.key) + " = " + f.get(spec) + "\n";
  }
  return out;
}

}  // namespace wgf
