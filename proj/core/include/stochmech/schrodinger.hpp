#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "stochmech/grid_fields.hpp"

namespace stochmech {

/// Default lower bound on |psi|^2 below which a sample counts as a node.
inline constexpr double kNodeFloor = 1e-36;

/// Complex wave function sampled on every (time node, space node).
class WaveField {
 public:
  WaveField(GridSpec grid, std::vector<std::complex<double>> values);

  const GridSpec& grid() const { return grid_; }
  std::span<const std::complex<double>> values() const { return values_; }
  std::span<const std::complex<double>> slice(std::size_t j) const;
  std::complex<double> operator()(std::size_t j, std::size_t k) const { return values_[j * grid_.n_x + k]; }

  /// ||psi(., t_j)||^2 by the periodic trapezoid rule.
  double norm_squared(std::size_t j) const;
  double max_norm_drift() const;
  double min_density() const;

  ScalarField density() const;

 private:
  GridSpec grid_;
  std::vector<std::complex<double>> values_;
};

struct GaussianPacketSpec {
  double sigma0 = 1.0;  ///< initial position standard deviation
  double mu0 = 0.0;     ///< initial mean
  double p = 0.0;       ///< momentum (= group velocity with hbar = m = 1)

  void validate() const;
  /// Position variance of |psi(., t)|^2: sigma0^2 + t^2 / (4 sigma0^2).
  double variance(double t) const;
  double mean(double t) const { return mu0 + p * t; }
};

/// Closed-form free packet psi(x, t), normalized, with psi(x, 0) =
/// (2 pi sigma0^2)^(-1/4) exp(-(x - mu0)^2 / (4 sigma0^2) + i p (x - mu0)).
std::complex<double> gaussian_packet_value(const GaussianPacketSpec& spec, double x, double t);

/// Exact free evolution i psi_t + psi_xx / 2 = 0 of psi0 to every time node,
/// by multiplying the spectral transform with exp(-i k^2 t / 2).
/// Throws BoundaryLeak if psi0 does not decay at the box edges and NormDrift
/// if any slice norm deviates from 1 by more than 1e-8.
WaveField free_propagate(std::span<const std::complex<double>> psi0, const GridSpec& grid);

/// Evolves one slice by an arbitrary time (used for the group property).
std::vector<std::complex<double>> free_step(std::span<const std::complex<double>> psi, const GridSpec& grid,
                                            double time);

/// Closed-form packet sampled on the grid; BoundaryLeak if the density is not
/// negligible at the edges at any time node.
WaveField gaussian_packet(const GaussianPacketSpec& spec, const GridSpec& grid);

/// CSV "t,x,re,im".
void write_csv(std::ostream& out, const WaveField& psi);

}  // namespace stochmech
