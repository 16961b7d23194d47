#pragma once

#include <iosfwd>
#include <string_view>

#include "stochmech/grid_fields.hpp"
#include "stochmech/schrodinger.hpp"

namespace stochmech {

enum class Provenance { SchrodingerDerived, Competitor, ClassicalOt, Synthetic };
std::string_view to_string(Provenance p);

/// Fluid-dynamical couple (rho, v): a strictly positive time-dependent
/// probability density and its current velocity. The constructor enforces
/// positivity and unit mass at every time node (within 1e-8).
class FluidCouple {
 public:
  static constexpr double kMassTolerance = 1e-8;

  FluidCouple(ScalarField rho, VectorField v, Provenance provenance);

  template <class Rho, class Vel>
  static FluidCouple from_functions(const GridSpec& grid, Rho&& rho, Vel&& v, Provenance provenance) {
    return FluidCouple(ScalarField::from_function(grid, rho), VectorField::from_function(grid, v), provenance);
  }

  const GridSpec& grid() const { return rho_.grid(); }
  const ScalarField& rho() const { return rho_; }
  const VectorField& v() const { return v_; }
  Provenance provenance() const { return provenance_; }

 private:
  ScalarField rho_;
  VectorField v_;
  Provenance provenance_;
};

/// How a sampled drift is evaluated between nodes. Space is always linear
/// interpolation (clamped to the edge values outside the box); time is either
/// frozen on the grid node at or before t, or linearly interpolated.
enum class TimeInterpolation { PiecewiseConstant, Linear };

class DriftField {
 public:
  DriftField(VectorField b, TimeInterpolation rule = TimeInterpolation::PiecewiseConstant);

  /// Constant drift c everywhere (Brownian motion with drift).
  static DriftField constant(const GridSpec& grid, double c,
                             TimeInterpolation rule = TimeInterpolation::PiecewiseConstant);

  const GridSpec& grid() const { return b_.grid(); }
  const VectorField& b() const { return b_; }
  TimeInterpolation rule() const { return rule_; }

  double operator()(double x, double t) const { return interpolate(b_.values(), x, t); }

  /// Same interpolation rule applied to an arbitrary field on this grid
  /// (used for div b along trajectories).
  double interpolate(std::span<const double> field, double x, double t) const;

  /// d/dx b by stencil differences, one slice per time node.
  ScalarField divergence() const;

 private:
  VectorField b_;
  TimeInterpolation rule_;
};

struct Decomposition {
  ScalarField rho;
  ScalarField S;
  FluidCouple couple;
};

/// Splits psi = sqrt(rho) exp(iS). S is the phase unwrapped along x from the
/// box center, whose value is the principal argument unwrapped across time
/// nodes; v = S_x by stencil differences. Throws UnwrapInconsistent if the
/// phase moves by more than pi/2 between neighbouring samples.
Decomposition decompose(const WaveField& psi, double node_floor = kNodeFloor);

/// Osmotic velocity u = grad(log rho) / 2, by stencil differences of log rho
/// (accurate in the far tails, where sqrt(rho)_x / sqrt(rho) is round-off).
VectorField osmotic(const ScalarField& rho);

/// b = v + u.
DriftField drift(const FluidCouple& couple, TimeInterpolation rule = TimeInterpolation::PiecewiseConstant);

/// Quantum potential term (sqrt(rho))_xx / (2 sqrt(rho)) at one time node.
std::vector<double> quantum_potential(const ScalarField& rho, std::size_t j);

struct ResidualOptions {
  /// Unweighted residuals are measured where rho >= floor * max rho.
  double support_floor = 1e-6;
};

struct MadelungResiduals {
  double r1 = 0.0;      ///< sup |rho_t + (rho S_x)_x|
  double r2 = 0.0;      ///< sup |S_t + S_x^2 / 2 - Q| on the support
  double scale1 = 0.0;  ///< largest summand magnitude of r1
  double scale2 = 0.0;  ///< largest summand magnitude of r2
};

/// Sup-norm residuals over interior time nodes; centered time differences.
MadelungResiduals madelung_residuals(const ScalarField& rho, const ScalarField& S,
                                     const ResidualOptions& options = {});

/// CSV "t,x,rho,v".
void write_csv(std::ostream& out, const FluidCouple& couple);
/// CSV "t,x,b".
void write_csv(std::ostream& out, const DriftField& drift);

}  // namespace stochmech
