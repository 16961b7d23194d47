#include "stochmech/action_functionals.hpp"

#include <cmath>
#include <algorithm>

namespace stochmech {

namespace {

double amplitude_tol(const GridSpec& g) { return std::sqrt(g.boundary_tol); }

// Per-node spatial integrand weights for kinetic (v^2 rho) and osmotic
// ((sqrt rho)_x^2) energies, combined with the given signs.
double energy_functional(const ScalarField& rho, const VectorField& v, double kinetic_sign, double osmotic_sign) {
  const GridSpec& g = rho.grid();
  std::vector<double> series(g.time_nodes());
  std::vector<double> integrand(g.n_x);
  for (std::size_t j = 0; j < g.time_nodes(); ++j) {
    const auto r = rho.slice(j);
    const auto vel = v.slice(j);
    check_boundary(r, g.boundary_tol, "action density");
    for (std::size_t k = 0; k < g.n_x; ++k) integrand[k] = kinetic_sign * vel[k] * vel[k] * r[k];
    double value = integrate(integrand, g, -1.0);
    if (osmotic_sign != 0.0) value += osmotic_sign * osmotic_energy(rho, j);
    series[j] = value;
  }
  return time_integrate(series);
}

ActionReport with_refinement(const FluidCouple& couple, ActionKind kind, double kinetic_sign, double osmotic_sign) {
  ActionReport report;
  report.kind = kind;
  report.grid = couple.grid();
  report.value = energy_functional(couple.rho(), couple.v(), kinetic_sign, osmotic_sign);
  if (couple.grid().can_coarsen()) {
    const double coarse =
        energy_functional(couple.rho().coarsened(), couple.v().coarsened(), kinetic_sign, osmotic_sign);
    report.error_radius = std::abs(report.value - coarse);
  }
  return report;
}

double drift_functional(const VectorField& b, const ScalarField& rho) {
  const GridSpec& g = rho.grid();
  std::vector<double> series(g.time_nodes());
  std::vector<double> integrand(g.n_x);
  for (std::size_t j = 0; j < g.time_nodes(); ++j) {
    const auto bj = b.slice(j);
    const auto r = rho.slice(j);
    const auto div = stencil_derivative(bj, g.dx());
    check_boundary(r, g.boundary_tol, "drift_action density");
    for (std::size_t k = 0; k < g.n_x; ++k) integrand[k] = (bj[k] * bj[k] + div[k]) * r[k];
    series[j] = integrate(integrand, g, -1.0);
  }
  return time_integrate(series);
}

}  // namespace

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::Quantum: return "quantum";
    case ActionKind::Classical: return "classical";
    case ActionKind::Drift: return "drift";
    case ActionKind::FiniteAction: return "finite-action";
  }
  return "unknown";
}

double osmotic_energy(const ScalarField& rho, std::size_t j) {
  const GridSpec& g = rho.grid();
  const auto r = rho.slice(j);
  std::vector<double> amp(g.n_x);
  for (std::size_t k = 0; k < g.n_x; ++k) amp[k] = std::sqrt(r[k]);
  auto damp = spectral_derivative(amp, g, 1, amplitude_tol(g));
  for (auto& d : damp) d *= d;
  return integrate(damp, g, -1.0);
}

ActionReport quantum_action(const FluidCouple& couple) {
  return with_refinement(couple, ActionKind::Quantum, 1.0, -1.0);
}

ActionReport classical_action(const FluidCouple& couple) {
  return with_refinement(couple, ActionKind::Classical, 1.0, 0.0);
}

ActionReport finite_action_norm(const FluidCouple& couple) {
  return with_refinement(couple, ActionKind::FiniteAction, 1.0, 1.0);
}

ActionReport drift_action(const DriftField& b, const ScalarField& rho) {
  require(b.grid() == rho.grid(), ErrorCode::InvalidArgument, "drift and density live on different grids");
  ActionReport report;
  report.kind = ActionKind::Drift;
  report.grid = rho.grid();
  report.value = drift_functional(b.b(), rho);
  if (rho.grid().can_coarsen())
    report.error_radius = std::abs(report.value - drift_functional(b.b().coarsened(), rho.coarsened()));
  return report;
}

double continuity_residual(const FluidCouple& couple) {
  const GridSpec& g = couple.grid();
  double residual = 0.0;
  std::vector<double> flux(g.n_x);
  for (std::size_t j = 1; j < g.n_t; ++j) {
    const auto r = couple.rho().slice(j);
    const auto v = couple.v().slice(j);
    for (std::size_t k = 0; k < g.n_x; ++k) flux[k] = r[k] * v[k];
    const auto div_flux = stencil_derivative(flux, g.dx());
    const auto rho_t = time_derivative(couple.rho(), j);
    for (std::size_t k = 0; k < g.n_x; ++k) residual = std::max(residual, std::abs(rho_t[k] + div_flux[k]));
  }
  return residual;
}

}  // namespace stochmech
