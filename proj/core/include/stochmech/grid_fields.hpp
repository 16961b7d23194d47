#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stochmech/errors.hpp"

namespace stochmech {

/// Uniform periodic discretization of a truncated spatial box times the unit
/// time interval. Spatial nodes are x_k = x_min + k*dx for k < n_x (x_max is the
/// periodic image of x_min); time nodes are t_j = j/n_t for j <= n_t.
struct GridSpec {
  double x_min = -12.0;
  double x_max = 12.0;
  std::size_t n_x = 512;
  std::size_t d = 1;
  std::size_t n_t = 256;
  /// Largest edge magnitude of a density-like field, relative to its maximum.
  double boundary_tol = 1e-12;

  void validate() const;

  double length() const { return x_max - x_min; }
  double dx() const { return length() / static_cast<double>(n_x); }
  double dt() const { return 1.0 / static_cast<double>(n_t); }
  double x(std::size_t k) const { return x_min + static_cast<double>(k) * dx(); }
  double t(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(n_t); }
  std::size_t time_nodes() const { return n_t + 1; }
  std::vector<double> x_nodes() const;

  /// Same box with every other spatial and temporal node.
  GridSpec coarsened() const;
  bool can_coarsen() const { return n_x >= 8 && n_t >= 4 && n_t % 2 == 0; }

  bool operator==(const GridSpec&) const = default;
};

/// Real field sampled on every (time node, space node) of a grid.
class ScalarField {
 public:
  ScalarField(GridSpec grid, std::vector<double> values);

  template <class F>
  static ScalarField from_function(const GridSpec& grid, F&& f) {
    std::vector<double> values(grid.time_nodes() * grid.n_x);
    for (std::size_t j = 0; j < grid.time_nodes(); ++j)
      for (std::size_t k = 0; k < grid.n_x; ++k)
        values[j * grid.n_x + k] = f(grid.x(k), grid.t(j));
    return ScalarField(grid, std::move(values));
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> slice(std::size_t j) const;
  double operator()(std::size_t j, std::size_t k) const { return values_[j * grid_.n_x + k]; }

  /// Every other node in space and time, on grid().coarsened().
  ScalarField coarsened() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Vector field with grid.d components per node, stored (time, space, component).
class VectorField {
 public:
  VectorField(GridSpec grid, std::vector<double> values);

  template <class F>
  static VectorField from_function(const GridSpec& grid, F&& f) {
    require(grid.d == 1, ErrorCode::Unsupported, "from_function supports d = 1 only");
    std::vector<double> values(grid.time_nodes() * grid.n_x);
    for (std::size_t j = 0; j < grid.time_nodes(); ++j)
      for (std::size_t k = 0; k < grid.n_x; ++k)
        values[j * grid.n_x + k] = f(grid.x(k), grid.t(j));
    return VectorField(grid, std::move(values));
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t components() const { return grid_.d; }
  std::span<const double> values() const { return values_; }
  std::span<const double> slice(std::size_t j) const;
  double operator()(std::size_t j, std::size_t k, std::size_t c = 0) const {
    return values_[(j * grid_.n_x + k) * grid_.d + c];
  }

  VectorField coarsened() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

// --- boundary guard -------------------------------------------------------

/// Throws BoundaryLeak unless both edge samples are within rel_tol of max|f|.
void check_boundary(std::span<const double> f, double rel_tol, const char* what);
void check_boundary(std::span<const std::complex<double>> f, double rel_tol, const char* what);

// --- spatial differentiation ---------------------------------------------

/// Spectral derivative of the given order of one periodic slice. Guards the
/// slice with check_boundary(rel_tol); rel_tol < 0 disables the guard.
std::vector<double> spectral_derivative(std::span<const double> f, const GridSpec& grid,
                                        int order = 1, double rel_tol = -1.0);
std::vector<std::complex<double>> spectral_derivative(std::span<const std::complex<double>> f,
                                                      const GridSpec& grid, int order = 1);

/// Periodic antiderivative F with F(x_min) = 0 of a zero-mean slice.
/// The returned mean_residual is dx * sum(f), i.e. F(x_max) before the
/// zero-mean projection.
struct Antiderivative {
  std::vector<double> values;
  double mean_residual = 0.0;
};
Antiderivative spectral_antiderivative(std::span<const double> f, const GridSpec& grid);

/// Throws BoundaryLeak if the slice is not resolved as a periodic function:
/// any Fourier coefficient in the outer quarter of the band above
/// rel_tol * (largest coefficient). A field cut off at the box edges fails.
void check_periodic(std::span<const double> f, const GridSpec& grid, double rel_tol, const char* what);

/// Gradient of a periodic-compatible field at one time node (d = 1: the
/// x-derivative), guarded by check_periodic with grid.boundary_tol.
std::vector<double> spectral_gradient(const ScalarField& f, std::size_t t_index);

/// Eighth-order central differences (lower order near the edges). For
/// non-decaying smooth fields such as velocities, where the periodic seam
/// would ruin a spectral derivative.
std::vector<double> stencil_derivative(std::span<const double> f, double dx);

/// Second-order centered time derivative at interior node j (0 < j < n_t),
/// one-sided second order at the ends.
std::vector<double> time_derivative(const ScalarField& f, std::size_t j);
std::vector<double> time_derivative(const VectorField& f, std::size_t j);

// --- quadrature ------------------------------------------------------------

/// Trapezoidal (periodic) rule over the box; guarded by grid.boundary_tol.
double integrate(std::span<const double> f, const GridSpec& grid);
/// Same with an explicit guard tolerance (< 0 disables the guard, for
/// integrands whose decay is already guaranteed by a checked density factor).
double integrate(std::span<const double> f, const GridSpec& grid, double rel_tol);
double integrate(const ScalarField& f, std::size_t t_index);

/// Composite trapezoid over the uniform partition of [0, 1].
double time_integrate(std::span<const double> series);

/// Nodes where f(., t) >= floor * max f(., t). Residual sup-norms of unweighted
/// quantities are taken over this set.
std::vector<bool> support_mask(std::span<const double> density, double floor);

}  // namespace stochmech
