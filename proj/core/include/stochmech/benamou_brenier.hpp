#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "stochmech/action_functionals.hpp"
#include "stochmech/madelung.hpp"

namespace stochmech {

struct GaussianMeasure {
  double mean = 0.0;
  double variance = 1.0;

  void validate() const;
  double stddev() const;
  double density(double x) const;
};

/// Squared W2 distance between Gaussians: (m0 - m1)^2 + (s0 - s1)^2.
double gaussian_w2(const GaussianMeasure& g0, const GaussianMeasure& g1);

/// Monotone (quantile-coupling) transport map sampled on the grid, with its
/// convex potential phi (phi' = T, phi(x_min) = 0) and the transport cost
/// int |T(x) - x|^2 rho0(x) dx.
struct TransportPlan1D {
  std::vector<double> x;
  std::vector<double> map_samples;
  std::vector<double> potential_samples;
  double cost = 0.0;
};

/// T = F1^{-1} o F0. CDFs by a fourth-order cumulative rule; F1 is inverted
/// on its cubic Hermite interpolant (slopes rho1).
TransportPlan1D monge_map_1d(std::span<const double> rho0, std::span<const double> rho1, const GridSpec& grid);

/// Displacement interpolation between Gaussians: rho_t = N((1-t) m0 + t m1,
/// ((1-t) s0 + t s1)^2) with the affine velocity of the Brenier geodesic.
FluidCouple displacement_couple(const GaussianMeasure& g0, const GaussianMeasure& g1, const GridSpec& grid);

/// sup over interior nodes, on the support, of |v_t + v v_x|.
double euler_residual(const FluidCouple& couple, const ResidualOptions& options = {});

/// sup over the same nodes of |Q_x|, Q the quantum potential term. For a
/// Schrodinger couple this is what euler_residual converges to.
double quantum_force_sup(const ScalarField& rho, const ResidualOptions& options = {});

struct QuantumClassicalReport {
  double tau2 = 0.0;
  ActionReport classical_displacement;
  ActionReport classical_schrodinger;
  ActionReport quantum_schrodinger;
  bool transport_bound_ok = false;    ///< tau2 <= classical action of the Schrodinger couple
  bool quantum_below_classical = false;  ///< A^Q <= A on the Schrodinger couple
};

/// Compares the Benamou-Brenier minimizer between g0 and g1 with a couple
/// connecting the same endpoints. Throws InvalidArgument if the couple's
/// endpoint densities are not the discretized g0, g1.
QuantumClassicalReport quantum_vs_classical(const GaussianMeasure& g0, const GaussianMeasure& g1,
                                            const FluidCouple& couple);

/// CSV "x,T,phi".
void write_csv(std::ostream& out, const TransportPlan1D& plan);

}  // namespace stochmech
