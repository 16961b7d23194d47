#include "stochmech/benamou_brenier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "stochmech/array_io.hpp"

namespace stochmech {

namespace {

// CDF at the nodes x_0..x_{n-1} plus the box end, normalized to total mass 1,
// integrating the cubic through four neighbouring samples over each cell.
struct Cdf {
  std::vector<double> values;   // n + 1 entries
  std::vector<double> density;  // normalized slopes, n + 1 entries (periodic)
};

Cdf cumulative(std::span<const double> rho, const GridSpec& grid) {
  const std::size_t n = grid.n_x;
  require(rho.size() == n, ErrorCode::InvalidArgument, "density length does not match n_x");
  auto at = [&](std::ptrdiff_t k) {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return rho[static_cast<std::size_t>(((k % m) + m) % m)];
  };
  Cdf cdf;
  cdf.values.assign(n + 1, 0.0);
  const double dx = grid.dx();
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::ptrdiff_t>(k);
    const double cell = dx / 24.0 * (-at(i - 1) + 13.0 * at(i) + 13.0 * at(i + 1) - at(i + 2));
    cdf.values[k + 1] = cdf.values[k] + std::max(cell, 0.0);
  }
  const double total = cdf.values.back();
  require(total > 0.0, ErrorCode::InvalidArgument, "density has no mass");
  for (auto& c : cdf.values) c /= total;
  cdf.density.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) cdf.density[k] = at(static_cast<std::ptrdiff_t>(k)) / total;
  return cdf;
}

double invert(const Cdf& cdf, const GridSpec& grid, double u) {
  const auto& F = cdf.values;
  const double dx = grid.dx();
  if (u <= F.front()) return grid.x_min;
  if (u >= F.back()) return grid.x_max;
  const auto it = std::upper_bound(F.begin(), F.end(), u);
  const auto k = static_cast<std::size_t>(it - F.begin()) - 1;
  const double f0 = F[k], f1 = F[k + 1];
  const double m0 = cdf.density[k] * dx, m1 = cdf.density[k + 1] * dx;
  auto hermite = [&](double s) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * m1;
  };
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hermite(mid) < u) lo = mid;
    else hi = mid;
  }
  return grid.x(k) + 0.5 * (lo + hi) * dx;
}

}  // namespace

void GaussianMeasure::validate() const {
  require(std::isfinite(mean), ErrorCode::InvalidArgument, "Gaussian mean must be finite");
  require(variance > 0.0 && std::isfinite(variance), ErrorCode::InvalidArgument, "Gaussian variance must be positive");
}

double GaussianMeasure::stddev() const { return std::sqrt(variance); }

double GaussianMeasure::density(double x) const {
  const double z = x - mean;
  return std::exp(-0.5 * z * z / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double gaussian_w2(const GaussianMeasure& g0, const GaussianMeasure& g1) {
  g0.validate();
  g1.validate();
  const double dm = g0.mean - g1.mean;
  const double ds = g0.stddev() - g1.stddev();
  return dm * dm + ds * ds;
}

TransportPlan1D monge_map_1d(std::span<const double> rho0, std::span<const double> rho1, const GridSpec& grid) {
  grid.validate();
  for (double r : rho0) require(r > 0.0, ErrorCode::InvalidArgument, "rho0 must be positive");
  for (double r : rho1) require(r > 0.0, ErrorCode::InvalidArgument, "rho1 must be positive");
  const Cdf F0 = cumulative(rho0, grid);
  const Cdf F1 = cumulative(rho1, grid);

  TransportPlan1D plan;
  plan.x = grid.x_nodes();
  plan.map_samples.resize(grid.n_x);
  for (std::size_t k = 0; k < grid.n_x; ++k) plan.map_samples[k] = invert(F1, grid, F0.values[k]);

  plan.potential_samples.assign(grid.n_x, 0.0);
  for (std::size_t k = 1; k < grid.n_x; ++k)
    plan.potential_samples[k] =
        plan.potential_samples[k - 1] + 0.5 * grid.dx() * (plan.map_samples[k - 1] + plan.map_samples[k]);

  double cost = 0.0;
  for (std::size_t k = 0; k < grid.n_x; ++k) {
    const double shift = plan.map_samples[k] - plan.x[k];
    cost += shift * shift * F0.density[k];
  }
  plan.cost = cost * grid.dx();
  return plan;
}

FluidCouple displacement_couple(const GaussianMeasure& g0, const GaussianMeasure& g1, const GridSpec& grid) {
  g0.validate();
  g1.validate();
  const double m0 = g0.mean, m1 = g1.mean;
  const double s0 = g0.stddev(), s1 = g1.stddev();
  auto mean = [=](double t) { return (1.0 - t) * m0 + t * m1; };
  auto stddev = [=](double t) { return (1.0 - t) * s0 + t * s1; };
  auto rho = [=](double x, double t) { return GaussianMeasure{mean(t), stddev(t) * stddev(t)}.density(x); };
  auto v = [=](double x, double t) { return (m1 - m0) + (s1 - s0) * (x - mean(t)) / stddev(t); };
  return FluidCouple::from_functions(grid, rho, v, Provenance::ClassicalOt);
}

double euler_residual(const FluidCouple& couple, const ResidualOptions& options) {
  const GridSpec& g = couple.grid();
  require(g.d == 1, ErrorCode::Unsupported, "euler_residual supports d = 1 only");
  double residual = 0.0;
  for (std::size_t j = 1; j < g.n_t; ++j) {
    const auto v = couple.v().slice(j);
    const auto v_t = time_derivative(couple.v(), j);
    const auto v_x = stencil_derivative(v, g.dx());
    const auto mask = support_mask(couple.rho().slice(j), options.support_floor);
    for (std::size_t k = 0; k < g.n_x; ++k)
      if (mask[k]) residual = std::max(residual, std::abs(v_t[k] + v[k] * v_x[k]));
  }
  return residual;
}

double quantum_force_sup(const ScalarField& rho, const ResidualOptions& options) {
  const GridSpec& g = rho.grid();
  require(g.d == 1, ErrorCode::Unsupported, "quantum_force_sup supports d = 1 only");
  double sup = 0.0;
  for (std::size_t j = 1; j < g.n_t; ++j) {
    const auto force = stencil_derivative(quantum_potential(rho, j), g.dx());
    const auto mask = support_mask(rho.slice(j), options.support_floor);
    for (std::size_t k = 0; k < g.n_x; ++k)
      if (mask[k]) sup = std::max(sup, std::abs(force[k]));
  }
  return sup;
}

QuantumClassicalReport quantum_vs_classical(const GaussianMeasure& g0, const GaussianMeasure& g1,
                                            const FluidCouple& couple) {
  const GridSpec& grid = couple.grid();
  auto check_endpoint = [&](const GaussianMeasure& gm, std::size_t j, const char* which) {
    const auto r = couple.rho().slice(j);
    double peak = 0.0, diff = 0.0;
    for (std::size_t k = 0; k < grid.n_x; ++k) {
      peak = std::max(peak, r[k]);
      diff = std::max(diff, std::abs(r[k] - gm.density(grid.x(k))));
    }
    require(diff <= 1e-6 * peak, ErrorCode::InvalidArgument, std::string("couple endpoint does not match ") + which);
  };
  check_endpoint(g0, 0, "g0");
  check_endpoint(g1, grid.n_t, "g1");

  QuantumClassicalReport report;
  report.tau2 = gaussian_w2(g0, g1);
  report.classical_displacement = classical_action(displacement_couple(g0, g1, grid));
  report.classical_schrodinger = classical_action(couple);
  report.quantum_schrodinger = quantum_action(couple);
  report.transport_bound_ok =
      report.tau2 <= report.classical_schrodinger.value + report.classical_schrodinger.error_radius + 1e-12;
  report.quantum_below_classical = report.quantum_schrodinger.value <= report.classical_schrodinger.value + 1e-10;
  return report;
}

void write_csv(std::ostream& out, const TransportPlan1D& plan) {
  out << "x,T,phi\n";
  for (std::size_t k = 0; k < plan.x.size(); ++k)
    out << format_double(plan.x[k]) << ',' << format_double(plan.map_samples[k]) << ','
        << format_double(plan.potential_samples[k]) << '\n';
}

}  // namespace stochmech
