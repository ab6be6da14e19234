#include "wgf/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace wgf {

using std::numbers::pi;

double barenblatt_1d(double x, double t, double m) {
  const double k = 1 / (m + 1);
  const double s = std::pow(t + 1, k);
  const double bracket = 1 - k * (m - 1) / (2 * m) * x * x / (s * s);
  return bracket > 0 ? std::pow(bracket, 1 / (m - 1)) / s : 0.0;
}

double barenblatt_interface_1d(double t, double m) {
  const double k = 1 / (m + 1);
  return std::sqrt(2 * m / (k * (m - 1))) * std::pow(t + 1, k);
}

double barenblatt_2d(double x, double y, double t, double m, double c_b2) {
  const double kappa = 1 / m;
  const double s = std::pow(t + 1, kappa);
  const double bracket = c_b2 - kappa * (m - 1) / (4 * m) * (x * x + y * y) / s;
  return bracket > 0 ? std::pow(bracket, 1 / (m - 1)) / s : 0.0;
}

double support_radius_2d(double t, double m, double c_b2) {
  const double kappa = 1 / m;
  return std::sqrt(4 * m * c_b2 / (kappa * (m - 1))) * std::pow(t + 1, kappa / 2);
}

double waiting_time_exact(double m, double theta) { return 1 / (2 * (m + 1) * (1 - theta)); }

double integrate_tanh_sinh(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0;
  const double r = 0.5 * (b - a);
  // Nodes x = tanh(pi/2 sinh t). The distance to the nearer end is computed
  // directly so that it does not round to zero near the endpoints.
  auto term = [&](double t) {
    const double u = 0.5 * pi * std::sinh(t);
    const double w = 0.5 * pi * std::cosh(t) / (std::cosh(u) * std::cosh(u));
    const double gap = 1 / (std::exp(2 * std::abs(u)) + 1) * 2;  // 1 - |tanh u|
    if (gap == 0 || w < 1e-300) return 0.0;
    const double left = t < 0 ? a + r * gap : b - r * gap;
    return w * f(left);
  };
  double h = 0.5, prev = 0;
  double sum = term(0);
  for (int k = 1; k * h <= 4.0; ++k) sum += term(k * h) + term(-k * h);
  double est = sum * h;
  for (int level = 0; level < 10; ++level) {
    prev = est;
    h /= 2;
    for (int k = 1; k * h <= 4.0; k += 2) sum += term(k * h) + term(-k * h);
    est = sum * h;
    if (std::abs(est - prev) <= 1e-14 * std::abs(est) + 1e-300) break;
  }
  return est * r;
}

namespace {

/// Support intervals of (C - (m-1)/m V)_+ for the supported potentials.
std::vector<std::pair<double, double>> fp_support(PotentialKind v, double m, double C) {
  const double c = C * m / (m - 1);  // support is V(x) < c
  switch (v) {
    case PotentialKind::OneWell: {
      if (c <= 0) return {};
      const double a = std::sqrt(2 * c);
      return {{-a, a}};
    }
    case PotentialKind::DoubleWell: {
      // x^4 - 2 x^2 - 4c < 0  <=>  x^2 in (1 - sqrt(1+4c), 1 + sqrt(1+4c)).
      if (1 + 4 * c <= 0) return {};
      const double root = std::sqrt(1 + 4 * c);
      const double outer = std::sqrt(1 + root);
      if (1 - root <= 0) return {{-outer, outer}};
      const double inner = std::sqrt(1 - root);
      return {{-outer, -inner}, {inner, outer}};
    }
    case PotentialKind::None: break;
  }
  throw ValidationError("potential", "steady state needs a confining potential");
}

double fp_profile(double x, PotentialKind v, double m, double C) {
  const double b = C - (m - 1) / m * potential_value(v, x);
  return b > 0 ? std::pow(b, 1 / (m - 1)) : 0.0;
}

double fp_mass(PotentialKind v, double m, double C) {
  double mass = 0;
  for (const auto& [a, b] : fp_support(v, m, C))
    mass += integrate_tanh_sinh([&](double x) { return fp_profile(x, v, m, C); }, a, b);
  return mass;
}

}  // namespace

double fp_steady_constant(PotentialKind v, double m, double mass) {
  if (!(m > 1)) throw ValidationError("m", "m must exceed 1");
  if (!(mass > 0)) throw ValidationError("mass", "must be positive");
  // Mass is increasing in C; below lo the support is empty.
  double lo = v == PotentialKind::DoubleWell ? -(m - 1) / (4 * m) : 0.0;
  double hi = std::max(lo, 0.0) + 1;
  while (fp_mass(v, m, hi) < mass) hi = 2 * hi;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (fp_mass(v, m, mid) < mass ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double fp_steady_state(double x, PotentialKind v, double m, double mass) {
  return fp_profile(x, v, m, fp_steady_constant(v, m, mass));
}

double aggregation_steady_state(double x, double mass) {
  const double b = 2 - x * x;
  return b > 0 ? mass / pi * std::sqrt(b) : 0.0;
}

// Initial conditions ---------------------------------------------------------

namespace {

double donut(double x, double y) {
  constexpr double q = 0.25 * 0.25;
  const double r = std::hypot(x, y);
  auto bump = [](double d2) { return d2 < q ? 25 * std::pow(q - d2, 1.5) : 0.0; };
  if (r >= 0.5 && r <= 1 && (x < 0 || y < 0)) return bump((r - 0.75) * (r - 0.75));
  if (x >= 0 && x * x + (y - 0.75) * (y - 0.75) <= q) return bump(x * x + (y - 0.75) * (y - 0.75));
  if (y >= 0 && (x - 0.75) * (x - 0.75) + y * y <= q) return bump((x - 0.75) * (x - 0.75) + y * y);
  return 0;
}

constexpr std::string_view kNames1D[] = {"cos",      "waiting_time", "tent",        "parabola",
                                         "double_well", "gaussian",  "ks_one_well", "ks_double_well",
                                         "barenblatt"};
constexpr std::string_view kNames2D[] = {"gaussian_2d", "indicator_2d", "donut", "offset_gaussian",
                                         "barenblatt_2d"};

}  // namespace

std::vector<std::string_view> initial_condition_names_1d() {
  return {std::begin(kNames1D), std::end(kNames1D)};
}
std::vector<std::string_view> initial_condition_names_2d() {
  return {std::begin(kNames2D), std::end(kNames2D)};
}

InitialCondition1D initial_condition_1d(std::string_view name, const IcParams& p) {
  const std::string n(name);
  if (name == "cos")
    return {n, -1, 1, [](double x) { return std::max(std::cos(pi * x / 2), 0.0); }};
  if (name == "waiting_time") {
    if (!(p.m > 1)) throw ValidationError("m", "m must exceed 1");
    if (p.theta < 0 || p.theta > 0.25) throw ValidationError("theta", "must lie in [0, 0.25]");
    return {n, -pi, 0, [m = p.m, th = p.theta](double x) {
              const double s2 = std::sin(x) * std::sin(x);
              return std::pow((m - 1) / m * ((1 - th) * s2 + th * s2 * s2), 1 / (m - 1));
            }};
  }
  if (name == "tent") return {n, -1, 1, [](double x) { return std::max(1 - std::abs(x), 0.0); }};
  if (name == "parabola") return {n, -1, 1, [](double x) { return std::max(1 - x * x, 0.0); }};
  if (name == "double_well")
    return {n, -1, 1, [s = p.sigma](double x) {
              return (x * x + 1e-6 * std::exp(-x * x / (2 * s * s))) * std::max(1 - x * x, 0.0);
            }};
  if (name == "gaussian") {
    if (!(p.sigma > 0)) throw ValidationError("sigma", "must be positive");
    return {n, -5, 5, [c = p.amplitude, s = p.sigma](double x) {
              return c / std::sqrt(2 * pi) * std::exp(-x * x / s);
            }};
  }
  if (name == "ks_one_well")
    return {n, -15, 15,
            [c = p.amplitude](double x) { return c / std::sqrt(2 * pi) * std::exp(-x * x / 2) + 1e-8; }};
  if (name == "ks_double_well")
    return {n, -15, 15, [c = p.amplitude](double x) {
              return c / std::sqrt(pi) * (std::exp(-4 * (x + 2) * (x + 2)) + std::exp(-4 * (x - 2) * (x - 2))) +
                     1e-8;
            }};
  if (name == "barenblatt") {
    if (!(p.m > 1)) throw ValidationError("m", "m must exceed 1");
    const double r = barenblatt_interface_1d(0, p.m);
    return {n, -r, r, [m = p.m](double x) { return barenblatt_1d(x, 0, m); }};
  }
  throw ValidationError("initial", "unknown 1D initial condition '" + n + "'");
}

InitialCondition2D initial_condition_2d(std::string_view name, const IcParams& p) {
  const std::string n(name);
  if (name == "gaussian_2d")
    return {n, 2, 2, [c = p.amplitude](double x, double y) { return c * std::exp(-x * x - y * y); }};
  if (name == "indicator_2d")
    return {n, 3, 3, [](double x, double y) {
              return std::abs(x) <= 2.5 && std::abs(y) <= 2.5 ? 0.5 : 0.0;
            }};
  if (name == "donut") return {n, 1.5, 1.5, donut};
  if (name == "offset_gaussian")
    return {n, 2, 2, [](double x, double y) {
              return std::exp(-20 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
            }};
  if (name == "barenblatt_2d") {
    if (!(p.m > 1)) throw ValidationError("m", "m must exceed 1");
    if (!(p.amplitude > 0)) throw ValidationError("amplitude", "C_B2 must be positive");
    return {n, 2, 2, [m = p.m, c = p.amplitude](double x, double y) { return barenblatt_2d(x, y, 0, m, c); }};
  }
  throw ValidationError("initial", "unknown 2D initial condition '" + n + "'");
}

Vec sample_cells(const InitialCondition1D& ic, const RefGrid1D& grid) {
  Vec r(grid.n_cells);
  for (Eigen::Index j = 0; j < grid.n_cells; ++j) r[j] = ic.rho(grid.cell_center(j));
  return r;
}

Field2D sample_nodes(const InitialCondition2D& ic, const RefGrid2D& grid) {
  Field2D r(grid.rows(), grid.cols());
  for (Eigen::Index i = 0; i < grid.rows(); ++i)
    for (Eigen::Index j = 0; j < grid.cols(); ++j) r(i, j) = ic.rho(grid.X(j), grid.Y(i));
  return r;
}

}  // namespace wgf
