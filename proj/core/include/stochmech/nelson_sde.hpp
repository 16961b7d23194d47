#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stochmech/madelung.hpp"

namespace stochmech {

/// Trajectories of dq = b(q, t) dt + dW on the equipartition t_i = i/n of [0, 1].
/// Only partition nodes are kept, together with the Brownian increment summed
/// over each partition interval, so that dq_i = (drift part) + dW_i.
struct Ensemble {
  std::size_t N = 0;  ///< trajectories
  std::size_t n = 0;  ///< partition intervals
  std::size_t d = 1;
  std::uint64_t seed = 0;
  std::string drift_id;
  std::vector<double> paths;  ///< N x (n + 1), path-major
  std::vector<double> noise;  ///< N x n, Brownian increment per interval

  std::span<const double> path(std::size_t p) const { return {paths.data() + p * (n + 1), n + 1}; }
  std::span<const double> increments(std::size_t p) const { return {noise.data() + p * n, n}; }
  /// Positions of all trajectories at partition node i.
  std::vector<double> positions_at(std::size_t i) const;
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t N = 0;
};

/// Mean and standard error of per-path samples.
MCEstimate summarize(std::span<const double> samples);

struct SimulationParams {
  std::size_t N = 100000;
  std::size_t n = 256;
  std::size_t substeps = 4;  ///< Euler-Maruyama steps per partition interval
  std::uint64_t seed = 20220608;

  void validate() const;
};

/// N i.i.d. draws from the density slice rho0 by inverse CDF (cumulative
/// trapezoid, linear inversion). Path p always receives the same draw for a
/// given seed.
std::vector<double> sample_initial(std::span<const double> rho0, const GridSpec& grid, std::size_t N,
                                   std::uint64_t seed);

/// Euler-Maruyama ensemble started from X_0 ~ rho0. Throws Diverged if any
/// trajectory leaves the box by more than 20% of its length.
Ensemble simulate_ensemble(const DriftField& b, std::span<const double> rho0, const SimulationParams& params,
                           std::string drift_id = "b");

/// Same, from explicit initial positions (one per trajectory).
Ensemble simulate_from(const DriftField& b, std::span<const double> initial, const SimulationParams& params,
                       std::string drift_id = "b");

/// Process q^beta with beta_t = sum_i w_i b_i(q^{b_i}_t, t), every q^{b_i}
/// and q^beta driven by one shared X_0 and Brownian path per trajectory.
Ensemble mixture_ensemble(std::span<const DriftField> drifts, std::span<const double> weights,
                          std::span<const double> rho0, const SimulationParams& params);

/// F_n = n E sum_i (dq_i)^2.
MCEstimate discrete_action(const Ensemble& ens);

/// F_n - n d.
MCEstimate renormalized_action(const Ensemble& ens);

/// E int_0^1 (b^2 + div b)(q_t, t) dt, trapezoid over the partition nodes.
MCEstimate estimate_I(const Ensemble& ens, const DriftField& b, const ScalarField& div_b);

/// Scott's rule 3.49 sd N^(-1/3) at partition node i, in whole grid cells (>= 1).
std::size_t scott_bin_cells(const Ensemble& ens, std::size_t i, const GridSpec& grid);

/// Histogram density at partition node i, sampled at every grid node. Bins are
/// runs of bin_cells consecutive grid cells (0 picks scott_bin_cells).
std::vector<double> marginal_histogram(const Ensemble& ens, std::size_t i, const GridSpec& grid,
                                       std::size_t bin_cells = 0);

/// L1 distance between the histogram and rho, bin by bin against the mass rho
/// puts on the bin, plus the mass of samples outside the box.
double marginal_l1_distance(const Ensemble& ens, std::size_t i, std::span<const double> rho, const GridSpec& grid,
                            std::size_t bin_cells = 0);

/// CSV "t,x,density" for the given partition nodes.
void write_histogram_csv(std::ostream& out, const Ensemble& ens, std::span<const std::size_t> nodes,
                         const GridSpec& grid);

}  // namespace stochmech
