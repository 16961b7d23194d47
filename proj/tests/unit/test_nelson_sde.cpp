#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "oracles.hpp"

using namespace stochmech;

namespace {

std::vector<double> normal_slice(const GridSpec& g, double mean, double var) {
  std::vector<double> r(g.n_x);
  for (std::size_t k = 0; k < g.n_x; ++k) r[k] = oracle::normal_pdf(g.x(k), mean, var);
  return r;
}

SimulationParams params(std::size_t N, std::size_t n, std::uint64_t seed = 99) {
  SimulationParams p;
  p.N = N;
  p.n = n;
  p.seed = seed;
  return p;
}

double sample_variance(std::span<const double> x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST(SampleInitial, StandardNormalMoments) {
  GridSpec g;
  const std::size_t N = 100000;
  const auto x = sample_initial(normal_slice(g, 0, 1), g, N, 1);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / N;
  EXPECT_LT(std::abs(mean), 4 / std::sqrt(double(N)));
  EXPECT_NEAR(sample_variance(x), 1.0, 0.05);
}

TEST(SampleInitial, NarrowBumpStaysInside) {
  GridSpec g;
  std::vector<double> r(g.n_x, 1e-300);
  const double dx = g.dx();
  // Mass on the three nodes around x = 1.5.
  const std::size_t k0 = static_cast<std::size_t>(std::lround((1.5 - g.x_min) / dx));
  r[k0 - 1] = r[k0 + 1] = 0.25 / dx;
  r[k0] = 0.5 / dx;
  for (double x : sample_initial(r, g, 5000, 2)) {
    EXPECT_GE(x, g.x(k0 - 2));
    EXPECT_LE(x, g.x(k0 + 2));
  }
}

TEST(SampleInitial, SeedDeterminism) {
  GridSpec g;
  const auto r = normal_slice(g, 0.5, 2);
  EXPECT_EQ(sample_initial(r, g, 1000, 42), sample_initial(r, g, 1000, 42));
  EXPECT_NE(sample_initial(r, g, 1000, 42), sample_initial(r, g, 1000, 43));
}

TEST(SimulateEnsemble, BrownianVarianceFromOrigin) {
  GridSpec g;
  const auto p = params(40000, 32);
  const auto ens = simulate_from(DriftField::constant(g, 0.0), std::vector<double>(p.N, 0.0), p);
  const auto x1 = ens.positions_at(p.n);
  // Var of the sample variance of N(0,1) is 2/(N-1).
  EXPECT_NEAR(sample_variance(x1), 1.0, 4 * std::sqrt(2.0 / p.N));
}

TEST(SimulateEnsemble, IncrementsDecompose) {
  GridSpec g;
  const auto p = params(200, 16);
  const auto ens = simulate_from(DriftField::constant(g, 0.7), std::vector<double>(p.N, 0.0), p);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto path = ens.path(i);
    const auto dw = ens.increments(i);
    for (std::size_t s = 0; s < p.n; ++s) EXPECT_NEAR(path[s + 1] - path[s] - dw[s], 0.7 / p.n, 1e-12);
  }
}

TEST(SimulateEnsemble, DivergedTrajectories) {
  GridSpec g;
  const auto p = params(100, 16);
  try {
    simulate_from(DriftField::constant(g, 40.0), std::vector<double>(p.N, 0.0), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Diverged);
  }
}

TEST(SimulateEnsemble, BitwiseDeterministicAcrossThreads) {
  GridSpec g;
  const auto dec = decompose(gaussian_packet({1, 0, 1}, g));
  const auto b = drift(dec.couple);
  const auto p = params(3000, 64);
#ifdef _OPENMP
  omp_set_num_threads(1);
#endif
  const auto a = simulate_ensemble(b, dec.rho.slice(0), p);
#ifdef _OPENMP
  omp_set_num_threads(4);
#endif
  const auto c = simulate_ensemble(b, dec.rho.slice(0), p);
  EXPECT_EQ(a.paths, c.paths);
  EXPECT_EQ(a.noise, c.noise);
  EXPECT_EQ(renormalized_action(a).mean, renormalized_action(c).mean);
}

TEST(DiscreteAction, BrownianMotion) {
  GridSpec g;
  const auto p = params(20000, 16);
  const auto ens = simulate_ensemble(DriftField::constant(g, 0.0), normal_slice(g, 0, 1), p);
  const auto F = discrete_action(ens);
  EXPECT_LE(std::abs(F.mean - 16.0), 4 * F.std_error);
  const auto R = renormalized_action(ens);
  EXPECT_LE(std::abs(R.mean), 4 * R.std_error);
  EXPECT_EQ(R.std_error, F.std_error);
}

TEST(DiscreteAction, ConstantDrift) {
  GridSpec g;
  const auto p = params(20000, 64);
  const auto ens = simulate_ensemble(DriftField::constant(g, 3.0), normal_slice(g, -5, 0.5), p);
  const auto R = renormalized_action(ens);
  EXPECT_LE(std::abs(R.mean - 9.0), 4 * R.std_error);
}

TEST(DiscreteAction, StandardErrorScaling) {
  GridSpec g;
  const auto b = DriftField::constant(g, 1.0);
  const auto r0 = normal_slice(g, 0, 1);
  const double se1 = discrete_action(simulate_ensemble(b, r0, params(10000, 32))).std_error;
  const double se2 = discrete_action(simulate_ensemble(b, r0, params(20000, 32))).std_error;
  const double se4 = discrete_action(simulate_ensemble(b, r0, params(40000, 32))).std_error;
  EXPECT_NEAR(se1 / se2, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
  EXPECT_NEAR(se1 / se4, 2.0, 0.4);
}

TEST(EstimateI, Constants) {
  GridSpec g;
  const auto p = params(500, 16);
  const auto r0 = normal_slice(g, 0, 1);
  for (double c : {0.0, 2.5}) {
    const auto b = DriftField::constant(g, c);
    const auto ens = simulate_ensemble(b, r0, p);
    const auto I = estimate_I(ens, b, b.divergence());
    EXPECT_NEAR(I.mean, c * c, c == 0.0 ? 0.0 : 1e-10);
  }
}

TEST(Renormalization, TranslatingCouple) {
  GridSpec g;
  const auto c = FluidCouple::from_functions(
      g, [](double x, double t) { return oracle::normal_pdf(x, -1 + 2 * t, 1); }, [](double, double) { return 2.0; },
      Provenance::Synthetic);
  const auto b = drift(c);
  const auto ens = simulate_ensemble(b, c.rho().slice(0), params(40000, 128));
  const auto R = renormalized_action(ens);
  EXPECT_LE(std::abs(R.mean - 3.75), 3 * R.std_error);
  const auto I = estimate_I(ens, b, b.divergence());
  EXPECT_LE(std::abs(R.mean - I.mean), 4 * std::hypot(R.std_error, I.std_error));
}

TEST(Mixture, DegenerateCases) {
  GridSpec g;
  const auto dec = decompose(gaussian_packet({1, 0, 0}, g));
  const auto b = drift(dec.couple);
  const auto p = params(500, 32);
  const auto rho0 = dec.rho.slice(0);
  const auto single = simulate_ensemble(b, rho0, p);
  const std::vector<DriftField> one{b};
  const std::vector<double> w1{1.0};
  EXPECT_EQ(mixture_ensemble(one, w1, rho0, p).paths, single.paths);
  const std::vector<DriftField> two{b, b};
  const std::vector<double> w2{0.3, 0.7};
  const auto mixed = mixture_ensemble(two, w2, rho0, p);
  for (std::size_t i = 0; i < mixed.paths.size(); ++i) EXPECT_NEAR(mixed.paths[i], single.paths[i], 1e-12);
}

TEST(Mixture, RejectsBadWeights) {
  GridSpec g;
  const std::vector<DriftField> d{DriftField::constant(g, 0), DriftField::constant(g, 1)};
  const std::vector<double> w{0.7, 0.7};
  EXPECT_THROW(mixture_ensemble(d, w, normal_slice(g, 0, 1), params(10, 4)), Error);
}

TEST(Mixture, ConvexInDrift) {
  GridSpec g;
  const double c = 2.0;
  const auto p = params(20000, 64);
  const auto r0 = normal_slice(g, 0, 1);
  const std::vector<DriftField> d{DriftField::constant(g, 0.0), DriftField::constant(g, c)};
  const auto F0 = discrete_action(mixture_ensemble(d, std::vector<double>{1, 0}, r0, p));
  const auto F1 = discrete_action(mixture_ensemble(d, std::vector<double>{0, 1}, r0, p));
  for (double lambda : {0.25, 0.5, 0.75}) {
    const std::vector<double> w{lambda, 1 - lambda};
    const auto ens = mixture_ensemble(d, w, r0, p);
    const auto R = renormalized_action(ens);
    EXPECT_LE(R.mean, (1 - lambda) * c * c + 4 * R.std_error) << "lambda " << lambda;
    const auto F = discrete_action(ens);
    const double se = std::sqrt(F.std_error * F.std_error + F0.std_error * F0.std_error + F1.std_error * F1.std_error);
    EXPECT_LE(F.mean, lambda * F0.mean + (1 - lambda) * F1.mean + 4 * se);
  }
}

// Full-size packet run: marginals, renormalized action, and the drift functional.
TEST(PacketEnsemble, NelsonMarginalsAndActions) {
  GridSpec g;
  const auto dec = decompose(gaussian_packet({1, 0, 0}, g));
  const auto b = drift(dec.couple);
  SimulationParams p;
  const auto ens = simulate_ensemble(b, dec.rho.slice(0), p);

  for (std::size_t q = 0; q <= 4; ++q) {
    const std::size_t i = q * p.n / 4;
    const auto rho = dec.rho.slice(i * g.n_t / p.n);
    EXPECT_LE(marginal_l1_distance(ens, i, rho, g), 0.03) << "t = " << q / 4.0;
  }

  // One bin per grid cell: the L1 is dominated by multinomial noise, whose mean
  // is sum_k sqrt(2 p_k (1 - p_k) / (pi N)) over the cell masses p_k.
  const auto rho1 = dec.rho.slice(g.n_t);
  double floor = 0;
  for (std::size_t k = 0; k < g.n_x; ++k) {
    const double pk = rho1[k] * g.dx();
    floor += std::sqrt(2 * pk * (1 - pk) / (std::numbers::pi * p.N));
  }
  EXPECT_NEAR(marginal_l1_distance(ens, p.n, rho1, g, 1), floor, 0.25 * floor);

  const double closed = (1 - 4 * std::atan(0.5)) / 4;
  const auto R = renormalized_action(ens);
  EXPECT_LE(std::abs(R.mean - closed), std::max(3 * R.std_error, 0.02 * std::abs(closed)));
  const auto I = estimate_I(ens, b, b.divergence());
  EXPECT_LE(std::abs(R.mean - I.mean), 4 * std::hypot(R.std_error, I.std_error));
  const auto D = drift_action(b, dec.rho);
  EXPECT_LE(std::abs(I.mean - D.value), 3 * I.std_error + D.error_radius);
}

TEST(Histogram, ScottBinsAndCsv) {
  GridSpec g;
  const auto p = params(100000, 4);
  const auto ens = simulate_ensemble(DriftField::constant(g, 0.0), normal_slice(g, 0, 1), p);
  // 3.49 * 1 * 1e5^(-1/3) = 0.075, i.e. 2 cells of 0.047.
  EXPECT_EQ(scott_bin_cells(ens, 0, g), 2u);
  const auto h = marginal_histogram(ens, 0, g);
  EXPECT_NEAR(integrate(h, g, -1.0), 1.0, 1e-12);
  std::ostringstream out;
  const std::vector<std::size_t> nodes{0, 4};
  write_histogram_csv(out, ens, nodes, g);
  EXPECT_EQ(out.str().substr(0, 12), "t,x,density\n");
}
