#include "stochmech/competitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "stochmech/array_io.hpp"

namespace stochmech {

namespace {

// Standard C-infinity bump on (-1, 1).
double bump(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

// Periodic eighth-order central difference. Its samples sum to exactly zero,
// so the perturbation carries no discrete mass however coarse the bumps are.
std::vector<double> periodic_difference(const std::vector<double>& f, double dx) {
  static constexpr double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t m = 0; m < 4; ++m) out[i] += c[m] * (f[(i + m + 1) % n] - f[(i + n - m - 1) % n]);
  for (auto& v : out) v /= dx;
  return out;
}

struct Mode {
  double center;
  double radius;
  double weight;
};

std::vector<Mode> draw_modes(const PerturbationSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  const double half_width = 0.5 * (spec.support_hi - spec.support_lo);
  std::vector<Mode> modes(spec.modes);
  for (auto& m : modes) {
    m.radius = half_width * (0.3 + 0.5 * unit(rng));
    const double lo = spec.support_lo + m.radius;
    const double hi = spec.support_hi - m.radius;
    m.center = lo + (hi - lo) * unit(rng);
    m.weight = normal(rng);
  }
  return modes;
}

}  // namespace

void PerturbationSpec::validate(const GridSpec& grid) const {
  require(grid.x_min < support_lo && support_lo < support_hi && support_hi < grid.x_max,
          ErrorCode::InvalidArgument, "perturbation support must lie strictly inside the box");
  require(0.0 < window_lo && window_lo < window_hi && window_hi < 1.0, ErrorCode::InvalidArgument,
          "perturbation time window must lie strictly inside (0, 1)");
  require(std::isfinite(amplitude) && amplitude >= 0.0, ErrorCode::InvalidArgument,
          "perturbation amplitude must be nonnegative");
  require(amplitude < 1.0, ErrorCode::AmplitudeInfeasible,
          "amplitude >= 1 drives rho + y g to zero or below for some |y| <= 1");
  require(modes >= 1, ErrorCode::InvalidArgument, "perturbation needs at least one mode");
}

Perturbation build_perturbation(const PerturbationSpec& spec, const FluidCouple& base) {
  const GridSpec& grid = base.grid();
  spec.validate(grid);
  require(grid.d == 1, ErrorCode::Unsupported, "perturbations support d = 1 only");
  const auto modes = draw_modes(spec);
  const double t_center = 0.5 * (spec.window_lo + spec.window_hi);
  const double t_radius = 0.5 * (spec.window_hi - spec.window_lo);

  std::vector<double> G(grid.n_x);
  for (std::size_t k = 0; k < grid.n_x; ++k) {
    G[k] = 0.0;
    for (const auto& m : modes) G[k] += m.weight * bump((grid.x(k) - m.center) / m.radius);
  }
  const auto dG = periodic_difference(G, grid.dx());

  const std::size_t nodes = grid.time_nodes();
  std::vector<double> w(nodes);
  for (std::size_t j = 0; j < nodes; ++j) w[j] = bump((grid.t(j) - t_center) / t_radius);
  // Same centered difference that time_derivative applies to g, so that
  // g_t + (g v + u)_x vanishes identically at the discrete level.
  std::vector<double> window_rate(nodes, 0.0);
  for (std::size_t j = 1; j + 1 < nodes; ++j) window_rate[j] = (w[j + 1] - w[j - 1]) / (2.0 * grid.dt());

  std::vector<double> g(nodes * grid.n_x, 0.0);
  double worst_ratio = 0.0;
  for (std::size_t j = 0; j < nodes; ++j) {
    if (w[j] == 0.0) continue;
    for (std::size_t k = 0; k < grid.n_x; ++k) {
      const double value = w[j] * dG[k];
      g[j * grid.n_x + k] = value;
      worst_ratio = std::max(worst_ratio, std::abs(value) / base.rho()(j, k));
    }
  }

  const double amplitude = std::min(spec.amplitude, PerturbationSpec::kMaxAmplitude);
  const double scale = worst_ratio > 0.0 ? amplitude / worst_ratio : 0.0;
  for (auto& v : g) v *= scale;

  std::vector<double> u(g.size());
  for (std::size_t j = 0; j < grid.time_nodes(); ++j)
    for (std::size_t k = 0; k < grid.n_x; ++k) {
      const std::size_t i = j * grid.n_x + k;
      u[i] = -(scale * window_rate[j] * G[k] + g[i] * base.v()(j, k));
    }
  return {ScalarField(grid, std::move(g)), VectorField(grid, std::move(u))};
}

ScalarField make_perturbation(const PerturbationSpec& spec, const FluidCouple& base) {
  return build_perturbation(spec, base).g;
}

VectorField correction_flux(const FluidCouple& base, const ScalarField& g) {
  const GridSpec& grid = base.grid();
  require(g.grid() == grid, ErrorCode::InvalidArgument, "perturbation lives on a different grid");
  const std::size_t n = grid.n_x;
  const double dx = grid.dx();
  std::vector<double> u(grid.time_nodes() * n, 0.0);
  std::vector<double> gv(n), F(n);
  double worst_residual = 0.0;
  std::size_t worst_node = 0;
  for (std::size_t j = 0; j < grid.time_nodes(); ++j) {
    const auto gj = g.slice(j);
    const auto v = base.v().slice(j);
    for (std::size_t k = 0; k < n; ++k) gv[k] = gj[k] * v[k];
    auto s = stencil_derivative(gv, dx);
    const auto g_t = time_derivative(g, j);
    for (std::size_t k = 0; k < n; ++k) s[k] += g_t[k];

    std::size_t first = n, last = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (s[k] != 0.0) {
        first = std::min(first, k);
        last = k;
      }
    if (first == n) continue;

    const auto m = static_cast<std::ptrdiff_t>(n);
    auto at = [&](std::ptrdiff_t k) { return k < 0 || k >= m ? 0.0 : s[static_cast<std::size_t>(k)]; };
    F[0] = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const auto i = static_cast<std::ptrdiff_t>(k);
      F[k + 1] = F[k] + dx / 24.0 * (-at(i - 1) + 13.0 * at(i) + 13.0 * at(i + 1) - at(i + 2));
    }
    const double residual = std::abs(F[n - 1] + dx / 24.0 * (-s[n - 2] + 13.0 * s[n - 1]));
    if (residual > worst_residual) {
      worst_residual = residual;
      worst_node = j;
    }
    for (std::size_t k = first; k <= last; ++k) u[j * n + k] = -F[k];
  }
  double peak = 0.0;
  for (double a : u) peak = std::max(peak, std::abs(a));
  if (worst_residual > 1e-8 * peak && worst_residual > 1e-14)
    raise(ErrorCode::SupportLeak, "divergence integrand has nonzero mass " + format_double(worst_residual) +
                                      " at time node " + std::to_string(worst_node));
  return VectorField(grid, std::move(u));
}

VectorField solve_velocity_correction(const FluidCouple& base, const ScalarField& g, double y) {
  const auto u = correction_flux(base, g);
  const GridSpec& grid = base.grid();
  std::vector<double> X(u.values().size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double density = base.rho().values()[i] + y * g.values()[i];
    require(density > 0.0, ErrorCode::AmplitudeInfeasible, "rho + y g is not positive");
    X[i] = y * u.values()[i] / density;
  }
  return VectorField(grid, std::move(X));
}

CompetitorFamily::CompetitorFamily(FluidCouple base, ScalarField g, std::vector<double> y_grid)
    : base_(std::move(base)), g_(std::move(g)), u_(correction_flux(base_, g_)), y_grid_(std::move(y_grid)) {
  for (double y : y_grid_) require(std::abs(y) <= 1.0, ErrorCode::InvalidArgument, "y_grid must lie in [-1, 1]");
}

CompetitorFamily::CompetitorFamily(FluidCouple base, Perturbation p, std::vector<double> y_grid)
    : base_(std::move(base)), g_(std::move(p.g)), u_(std::move(p.flux)), y_grid_(std::move(y_grid)) {
  require(g_.grid() == base_.grid() && u_.grid() == base_.grid(), ErrorCode::InvalidArgument,
          "perturbation lives on a different grid");
  for (double y : y_grid_) require(std::abs(y) <= 1.0, ErrorCode::InvalidArgument, "y_grid must lie in [-1, 1]");
}

FluidCouple CompetitorFamily::couple_at(double y) const {
  const GridSpec& grid = base_.grid();
  const auto rho = base_.rho().values();
  const auto v = base_.v().values();
  const auto g = g_.values();
  const auto u = u_.values();
  std::vector<double> rho_y(rho.size()), v_y(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    rho_y[i] = rho[i] + y * g[i];
    require(rho_y[i] > 0.0, ErrorCode::AmplitudeInfeasible, "rho + y g is not positive");
    v_y[i] = v[i] + y * u[i] / rho_y[i];
  }
  return FluidCouple(ScalarField(grid, std::move(rho_y)), VectorField(grid, std::move(v_y)), Provenance::Competitor);
}

std::vector<double> CompetitorFamily::default_y_grid() {
  std::vector<double> ys;
  for (int i = -4; i <= 4; ++i) ys.push_back(0.25 * i);
  return ys;
}

std::vector<ProfilePoint> evaluate_family(const CompetitorFamily& family) {
  std::vector<ProfilePoint> profile;
  profile.reserve(family.y_grid().size());
  for (double y : family.y_grid()) {
    const auto report = quantum_action(family.couple_at(y));
    profile.push_back({y, report.value, report.error_radius});
  }
  return profile;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Violated: return "violated";
    case Verdict::NotStationary: return "not-stationary";
    case Verdict::FailedToConstruct: return "failed-to-construct";
  }
  return "unknown";
}

namespace {

SpecOutcome verify_one(const FluidCouple& base, const PerturbationSpec& spec, const VerifyOptions& options) {
  SpecOutcome out;
  out.spec = spec;
  std::optional<CompetitorFamily> family;
  try {
    family.emplace(base, build_perturbation(spec, base), options.y_grid);
    out.profile = evaluate_family(*family);
  } catch (const Error& e) {
    out.verdict = Verdict::FailedToConstruct;
    out.error = e.what();
    return out;
  }

  auto action = [&](double y) { return quantum_action(family->couple_at(y)); };
  const auto at0 = action(0.0);
  out.value_at_0 = at0.value;
  out.error_at_0 = at0.error_radius;

  const double h = options.h;
  out.derivative_h = (action(h).value - action(-h).value) / (2.0 * h);
  out.derivative_half_h = (action(0.5 * h).value - action(-0.5 * h).value) / h;
  out.derivative_ratio = out.derivative_half_h != 0.0 ? out.derivative_h / out.derivative_half_h
                                                      : std::numeric_limits<double>::infinity();
  out.stationary = std::abs(out.derivative_half_h) <= options.stationarity_factor * out.error_at_0 ||
                   (out.derivative_ratio >= 3.0 && out.derivative_ratio <= 5.0);

  bool any_outside_band = false;
  bool any_inside_band = false;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (const auto& p : out.profile) {
    const double margin = p.value - out.value_at_0;
    const double tol = options.violation_factor * (p.error_radius + out.error_at_0);
    if (margin < out.min_margin) {
      out.min_margin = margin;
      out.min_margin_tolerance = tol;
    }
    if (margin < -tol) any_outside_band = true;
    else if (margin < 0.0) any_inside_band = true;
  }
  out.minimum_ok = !any_outside_band;

  out.min_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < out.profile.size(); ++i) {
    const auto& a = out.profile[i - 1];
    const auto& b = out.profile[i];
    const auto& c = out.profile[i + 1];
    const double second = a.value - 2.0 * b.value + c.value;
    const double tol = options.violation_factor * (a.error_radius + 2.0 * b.error_radius + c.error_radius);
    if (second < out.min_second_difference) {
      out.min_second_difference = second;
      out.second_difference_tolerance = tol;
    }
    if (second < -tol) out.convexity_ok = false;
  }

  if (!out.stationary) out.verdict = Verdict::NotStationary;
  else if (!out.minimum_ok) out.verdict = Verdict::Violated;
  else if (any_inside_band || !out.convexity_ok) out.verdict = Verdict::Inconclusive;
  else out.verdict = Verdict::Pass;
  return out;
}

}  // namespace

TheoremReport verify_theorem1(const FluidCouple& base, std::span<const PerturbationSpec> specs,
                              const VerifyOptions& options) {
  TheoremReport report;
  report.outcomes.resize(specs.size());
  // Specs are independent; results are stored by index so ordering is fixed.
  for (std::size_t i = 0; i < specs.size(); ++i) report.outcomes[i] = verify_one(base, specs[i], options);
  for (const auto& o : report.outcomes) {
    switch (o.verdict) {
      case Verdict::Pass: ++report.passed; break;
      case Verdict::Inconclusive: ++report.inconclusive; break;
      case Verdict::Violated: ++report.violated; break;
      case Verdict::NotStationary: ++report.not_stationary; break;
      case Verdict::FailedToConstruct: ++report.failed_to_construct; break;
    }
  }
  return report;
}

void write_profiles_csv(std::ostream& out, const TheoremReport& report) {
  out << "spec,y,value,error_radius\n";
  for (std::size_t s = 0; s < report.outcomes.size(); ++s)
    for (const auto& p : report.outcomes[s].profile)
      out << s << ',' << format_double(p.y) << ',' << format_double(p.value) << ',' << format_double(p.error_radius)
          << '\n';
}

}  // namespace stochmech
