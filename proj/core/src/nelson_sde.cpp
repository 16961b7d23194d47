#include "stochmech/nelson_sde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <random>

#include "stochmech/array_io.hpp"

namespace stochmech {

namespace {

enum Stream : std::uint64_t { kInitialStream = 0, kNoiseStream = 1 };

// Counter-based seeding: the generator of (seed, path, stream) does not depend
// on which thread runs the path or in what order.
std::mt19937_64 path_rng(std::uint64_t seed, std::size_t path, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(static_cast<std::uint64_t>(path) >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

struct InverseCdf {
  std::vector<double> x;
  std::vector<double> cdf;

  InverseCdf(std::span<const double> rho, const GridSpec& grid) : x(grid.x_nodes()), cdf(grid.n_x) {
    const double dx = grid.dx();
    cdf[0] = 0.0;
    for (std::size_t k = 1; k < grid.n_x; ++k) cdf[k] = cdf[k - 1] + 0.5 * dx * (rho[k - 1] + rho[k]);
    const double total = cdf.back();
    require(total > 0.0, ErrorCode::InvalidArgument, "initial density has no mass");
    for (auto& c : cdf) c /= total;
  }

  double operator()(double u) const {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.begin()) return x.front();
    if (it == cdf.end()) return x.back();
    const auto k = static_cast<std::size_t>(it - cdf.begin());
    const double lo = cdf[k - 1], hi = cdf[k];
    const double w = hi > lo ? (u - lo) / (hi - lo) : 0.0;
    return x[k - 1] + w * (x[k] - x[k - 1]);
  }
};

struct Escape {
  double lo;
  double hi;
  explicit Escape(const GridSpec& g) : lo(g.x_min - 0.2 * g.length()), hi(g.x_max + 0.2 * g.length()) {}
  bool operator()(double x) const { return !(x >= lo && x <= hi); }
};

Ensemble allocate(const SimulationParams& params, std::string drift_id) {
  Ensemble ens;
  ens.N = params.N;
  ens.n = params.n;
  ens.seed = params.seed;
  ens.drift_id = std::move(drift_id);
  ens.paths.assign(params.N * (params.n + 1), 0.0);
  ens.noise.assign(params.N * params.n, 0.0);
  return ens;
}

}  // namespace

std::vector<double> Ensemble::positions_at(std::size_t i) const {
  std::vector<double> out(N);
  for (std::size_t p = 0; p < N; ++p) out[p] = paths[p * (n + 1) + i];
  return out;
}

MCEstimate summarize(std::span<const double> samples) {
  MCEstimate est;
  est.N = samples.size();
  if (samples.empty()) return est;
  // Two-pass for accuracy: the action samples have mean ~ n and spread ~ sqrt(n).
  double sum = 0.0;
  for (double s : samples) sum += s;
  est.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - est.mean) * (s - est.mean);
    const double var = ss / static_cast<double>(samples.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  }
  return est;
}

void SimulationParams::validate() const {
  require(N >= 2, ErrorCode::InvalidArgument, "mc.N must be at least 2");
  require(n >= 1, ErrorCode::InvalidArgument, "mc.n must be positive");
  require(substeps >= 1, ErrorCode::InvalidArgument, "mc.substeps must be positive");
}

std::vector<double> sample_initial(std::span<const double> rho0, const GridSpec& grid, std::size_t N,
                                   std::uint64_t seed) {
  require(rho0.size() == grid.n_x, ErrorCode::InvalidArgument, "rho0 length does not match n_x");
  const InverseCdf inverse(rho0, grid);
  std::vector<double> out(N);
  const auto count = static_cast<std::ptrdiff_t>(N);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < count; ++p) {
    auto rng = path_rng(seed, static_cast<std::size_t>(p), kInitialStream);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    out[static_cast<std::size_t>(p)] = inverse(uniform(rng));
  }
  return out;
}

Ensemble simulate_from(const DriftField& b, std::span<const double> initial, const SimulationParams& params,
                       std::string drift_id) {
  params.validate();
  require(initial.size() == params.N, ErrorCode::InvalidArgument, "need one initial position per trajectory");
  Ensemble ens = allocate(params, std::move(drift_id));
  const std::size_t n = params.n, m = params.substeps;
  const double h = 1.0 / static_cast<double>(n * m);
  const double sqrt_h = std::sqrt(h);
  const Escape escaped(b.grid());
  std::atomic<bool> diverged{false};

  const auto count = static_cast<std::ptrdiff_t>(params.N);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ps = 0; ps < count; ++ps) {
    const auto p = static_cast<std::size_t>(ps);
    auto rng = path_rng(params.seed, p, kNoiseStream);
    std::normal_distribution<double> normal;
    double* path = ens.paths.data() + p * (n + 1);
    double* noise = ens.noise.data() + p * n;
    double x = initial[p];
    path[0] = x;
    for (std::size_t i = 0; i < n; ++i) {
      double w_sum = 0.0;
      for (std::size_t s = 0; s < m; ++s) {
        const double t = static_cast<double>(i * m + s) * h;
        const double dw = sqrt_h * normal(rng);
        x += b(x, t) * h + dw;
        w_sum += dw;
      }
      path[i + 1] = x;
      noise[i] = w_sum;
    }
    if (escaped(x) || std::any_of(path, path + n + 1, escaped)) diverged = true;
  }
  require(!diverged, ErrorCode::Diverged, "a trajectory left the box by more than 20% of its length");
  return ens;
}

Ensemble simulate_ensemble(const DriftField& b, std::span<const double> rho0, const SimulationParams& params,
                           std::string drift_id) {
  params.validate();
  const auto x0 = sample_initial(rho0, b.grid(), params.N, params.seed);
  return simulate_from(b, x0, params, std::move(drift_id));
}

Ensemble mixture_ensemble(std::span<const DriftField> drifts, std::span<const double> weights,
                          std::span<const double> rho0, const SimulationParams& params) {
  params.validate();
  require(!drifts.empty(), ErrorCode::InvalidArgument, "mixture needs at least one drift");
  require(drifts.size() == weights.size(), ErrorCode::InvalidArgument, "one weight per drift required");
  double total = 0.0;
  for (double w : weights) {
    require(w >= 0.0, ErrorCode::InvalidArgument, "mixture weights must be nonnegative");
    total += w;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::InvalidArgument, "mixture weights must sum to 1");
  for (const auto& d : drifts)
    require(d.grid() == drifts.front().grid(), ErrorCode::InvalidArgument, "mixture drifts on different grids");

  const auto x0 = sample_initial(rho0, drifts.front().grid(), params.N, params.seed);
  Ensemble ens = allocate(params, "mixture");
  const std::size_t n = params.n, m = params.substeps, K = drifts.size();
  const double h = 1.0 / static_cast<double>(n * m);
  const double sqrt_h = std::sqrt(h);
  const Escape escaped(drifts.front().grid());
  std::atomic<bool> diverged{false};

  const auto count = static_cast<std::ptrdiff_t>(params.N);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ps = 0; ps < count; ++ps) {
    const auto p = static_cast<std::size_t>(ps);
    auto rng = path_rng(params.seed, p, kNoiseStream);
    std::normal_distribution<double> normal;
    std::vector<double> markov(K, x0[p]);
    double* path = ens.paths.data() + p * (n + 1);
    double* noise = ens.noise.data() + p * n;
    double x = x0[p];
    path[0] = x;
    bool escaped_here = false;
    for (std::size_t i = 0; i < n; ++i) {
      double w_sum = 0.0;
      for (std::size_t s = 0; s < m; ++s) {
        const double t = static_cast<double>(i * m + s) * h;
        const double dw = sqrt_h * normal(rng);
        double beta = 0.0;
        for (std::size_t c = 0; c < K; ++c) {
          const double bc = drifts[c](markov[c], t);
          beta += weights[c] * bc;
          markov[c] += bc * h + dw;
        }
        x += beta * h + dw;
        w_sum += dw;
      }
      path[i + 1] = x;
      noise[i] = w_sum;
      escaped_here = escaped_here || escaped(x) || std::any_of(markov.begin(), markov.end(), escaped);
    }
    if (escaped_here || escaped(path[0])) diverged = true;
  }
  require(!diverged, ErrorCode::Diverged, "a mixture trajectory left the box by more than 20% of its length");
  return ens;
}

MCEstimate discrete_action(const Ensemble& ens) {
  std::vector<double> samples(ens.N);
  const double n = static_cast<double>(ens.n);
  for (std::size_t p = 0; p < ens.N; ++p) {
    const auto q = ens.path(p);
    double sum = 0.0;
    for (std::size_t i = 0; i < ens.n; ++i) {
      const double dq = q[i + 1] - q[i];
      sum += dq * dq;
    }
    samples[p] = n * sum;
  }
  return summarize(samples);
}

MCEstimate renormalized_action(const Ensemble& ens) {
  MCEstimate est = discrete_action(ens);
  est.mean -= static_cast<double>(ens.n * ens.d);
  return est;
}

MCEstimate estimate_I(const Ensemble& ens, const DriftField& b, const ScalarField& div_b) {
  require(div_b.grid() == b.grid(), ErrorCode::InvalidArgument, "div_b lives on a different grid");
  std::vector<double> samples(ens.N);
  std::vector<double> series(ens.n + 1);
  for (std::size_t p = 0; p < ens.N; ++p) {
    const auto q = ens.path(p);
    for (std::size_t i = 0; i <= ens.n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(ens.n);
      const double bi = b(q[i], t);
      series[i] = bi * bi + b.interpolate(div_b.values(), q[i], t);
    }
    samples[p] = time_integrate(series);
  }
  return summarize(samples);
}

std::size_t scott_bin_cells(const Ensemble& ens, std::size_t i, const GridSpec& grid) {
  require(i <= ens.n, ErrorCode::InvalidArgument, "partition node out of range");
  const auto x = ens.positions_at(i);
  const MCEstimate m = summarize(x);
  const double sd = m.std_error * std::sqrt(static_cast<double>(x.size()));
  const double width = 3.49 * sd * std::cbrt(1.0 / static_cast<double>(x.size()));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(width / grid.dx())));
}

namespace {

// Sample mass per grid node; node k owns [x_k - dx/2, x_k + dx/2), and the
// cell around x_max is the periodic image of the one around x_min.
std::vector<double> node_masses(const Ensemble& ens, std::size_t i, const GridSpec& grid) {
  require(i <= ens.n, ErrorCode::InvalidArgument, "partition node out of range");
  std::vector<double> mass(grid.n_x, 0.0);
  const double dx = grid.dx();
  const double weight = 1.0 / static_cast<double>(ens.N);
  for (std::size_t p = 0; p < ens.N; ++p) {
    const double s = std::round((ens.paths[p * (ens.n + 1) + i] - grid.x_min) / dx);
    if (s < 0.0 || s > static_cast<double>(grid.n_x)) continue;
    mass[static_cast<std::size_t>(s) % grid.n_x] += weight;
  }
  return mass;
}

}  // namespace

std::vector<double> marginal_histogram(const Ensemble& ens, std::size_t i, const GridSpec& grid,
                                       std::size_t bin_cells) {
  if (bin_cells == 0) bin_cells = scott_bin_cells(ens, i, grid);
  const auto mass = node_masses(ens, i, grid);
  std::vector<double> hist(grid.n_x, 0.0);
  for (std::size_t lo = 0; lo < grid.n_x; lo += bin_cells) {
    const std::size_t hi = std::min(grid.n_x, lo + bin_cells);
    double m = 0.0;
    for (std::size_t k = lo; k < hi; ++k) m += mass[k];
    const double density = m / (static_cast<double>(hi - lo) * grid.dx());
    for (std::size_t k = lo; k < hi; ++k) hist[k] = density;
  }
  return hist;
}

double marginal_l1_distance(const Ensemble& ens, std::size_t i, std::span<const double> rho, const GridSpec& grid,
                            std::size_t bin_cells) {
  require(rho.size() == grid.n_x, ErrorCode::InvalidArgument, "rho length does not match n_x");
  if (bin_cells == 0) bin_cells = scott_bin_cells(ens, i, grid);
  const auto mass = node_masses(ens, i, grid);
  // Each bin is compared with the mass rho puts on the same cells.
  double l1 = 0.0, total = 0.0;
  for (std::size_t lo = 0; lo < grid.n_x; lo += bin_cells) {
    const std::size_t hi = std::min(grid.n_x, lo + bin_cells);
    double sample = 0.0, exact = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      sample += mass[k];
      exact += rho[k] * grid.dx();
    }
    l1 += std::abs(sample - exact);
    total += sample;
  }
  return l1 + std::max(0.0, 1.0 - total);
}

void write_histogram_csv(std::ostream& out, const Ensemble& ens, std::span<const std::size_t> nodes,
                         const GridSpec& grid) {
  out << "t,x,density\n";
  for (auto i : nodes) {
    const auto hist = marginal_histogram(ens, i, grid);
    const double t = static_cast<double>(i) / static_cast<double>(ens.n);
    for (std::size_t k = 0; k < grid.n_x; ++k)
      out << format_double(t) << ',' << format_double(grid.x(k)) << ',' << format_double(hist[k]) << '\n';
  }
}

}  // namespace stochmech
