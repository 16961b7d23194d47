// Acceptance checks, one line per criterion. Exit 0 iff the set of failing
// criteria equals the set given with --known-failures (comma separated).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <stochmech/runner.hpp>
#include <stochmech/stochmech.hpp>

#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace stochmech;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds, 0 = none
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const GridSpec kGrid{};
const GaussianPacketSpec kPacket{1.0, 0.0, 0.0};
const SimulationParams kMc{100000, 256, 4, 20220608};

GridSpec with_n_t(GridSpec g, std::size_t n_t) {
  g.n_t = n_t;
  return g;
}

FluidCouple packet_couple(const GaussianPacketSpec& spec = kPacket, const GridSpec& grid = kGrid) {
  return decompose(gaussian_packet(spec, grid)).couple;
}

double combined(const MCEstimate& a, const MCEstimate& b) { return std::hypot(a.std_error, b.std_error); }

// --- 1 -----------------------------------------------------------------------
Outcome exact_propagation() {
  std::vector<std::complex<double>> psi0(kGrid.n_x);
  for (std::size_t k = 0; k < kGrid.n_x; ++k) psi0[k] = gaussian_packet_value(kPacket, kGrid.x(k), 0.0);
  const auto psi = free_propagate(psi0, kGrid);
  const std::size_t j = kGrid.n_t;
  std::vector<double> f(kGrid.n_x);
  for (std::size_t k = 0; k < kGrid.n_x; ++k) f[k] = kGrid.x(k) * std::norm(psi(j, k));
  const double mean = integrate(f, kGrid, -1.0);
  for (std::size_t k = 0; k < kGrid.n_x; ++k) f[k] = (kGrid.x(k) - mean) * (kGrid.x(k) - mean) * std::norm(psi(j, k));
  const double var = integrate(f, kGrid, -1.0);
  const double drift = psi.max_norm_drift();

  // Pointwise against the free-kernel integral.
  double kernel = 0.0;
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.0}) {
    const auto k = static_cast<std::size_t>(std::lround((x - kGrid.x_min) / kGrid.dx()));
    kernel = std::max(kernel, std::abs(psi(j, k) - oracle::free_kernel_evolve(kPacket, kGrid.x(k), 1.0)));
  }
  return {std::abs(var - 1.25) <= 1e-6 && drift <= 1e-10 && kernel <= 1e-8,
          "var(1) = " + fmt(var) + " (|err| " + fmt(std::abs(var - 1.25)) + "), norm drift " + fmt(drift) +
              ", kernel-integral deviation " + fmt(kernel)};
}

// --- 2 -----------------------------------------------------------------------
Outcome residual_order() {
  auto residuals = [](std::size_t n_t) {
    const auto dec = decompose(gaussian_packet(kPacket, with_n_t(kGrid, n_t)));
    return madelung_residuals(dec.rho, dec.S);
  };
  const auto coarse = residuals(128), fine = residuals(256);
  const double q1 = coarse.r1 / fine.r1, q2 = coarse.r2 / fine.r2;
  return {std::abs(q1 - 4.0) <= 0.5 && std::abs(q2 - 4.0) <= 0.5,
          "r1 " + fmt(coarse.r1) + " -> " + fmt(fine.r1) + " (x" + fmt(q1) + "), r2 " + fmt(coarse.r2) + " -> " +
              fmt(fine.r2) + " (x" + fmt(q2) + ")"};
}

// --- 3 -----------------------------------------------------------------------
Outcome drift_identity() {
  std::vector<std::pair<std::string, FluidCouple>> couples;
  couples.emplace_back("packet", packet_couple());

  const oracle::Packet pk{1.1, -0.3, 0.4};
  couples.emplace_back("packet density, v = sin x / 2",
                       FluidCouple::from_functions(
                           kGrid, [&](double x, double t) { return pk.rho(x, t); },
                           [](double x, double) { return 0.5 * std::sin(x); }, Provenance::Synthetic));
  couples.emplace_back("two-component mixture",
                       FluidCouple::from_functions(
                           kGrid,
                           [](double x, double t) {
                             return 0.6 * oracle::normal_pdf(x, -1.0 + t, 1.0) +
                                    0.4 * oracle::normal_pdf(x, 1.5, 0.8 + 0.4 * t);
                           },
                           [](double x, double t) { return 0.2 * x - 0.1 * t; }, Provenance::Synthetic));
  couples.emplace_back("displacement interpolation", displacement_couple({-1.0, 0.6}, {1.0, 1.8}, kGrid));

  const double Z = oracle::integrate([](double z) { return std::exp(-0.5 * z * z - 0.002 * z * z * z * z); }, -12, 12);
  couples.emplace_back("quartic tilt",
                       FluidCouple::from_functions(
                           kGrid,
                           [&](double x, double t) {
                             const double z = x - 0.3 * t;
                             return std::exp(-0.5 * z * z - 0.002 * z * z * z * z) / Z;
                           },
                           [](double x, double t) { return 0.3 + 0.1 * t * std::cos(x); }, Provenance::Synthetic));

  const oracle::Packet narrow{0.8, 0.6, -1.0};
  couples.emplace_back("spreading packet, cubic v",
                       FluidCouple::from_functions(
                           kGrid, [&](double x, double t) { return narrow.rho(x, t); },
                           [](double x, double t) { return 0.05 * x * x * x - t; }, Provenance::Synthetic));

  double worst = 0.0;
  std::string detail;
  for (const auto& [name, c] : couples) {
    const double gap = std::abs(quantum_action(c).value - drift_action(drift(c), c.rho()).value);
    worst = std::max(worst, gap);
    detail += (detail.empty() ? "" : ", ") + name + " " + fmt(gap);
  }
  const double closed = quantum_action(couples.front().second).value;
  const double ref = oracle::packet_action({1.0, 0.0, 0.0}, -1.0);
  return {worst <= 2e-6, "max |A^Q - A_drift| = " + fmt(worst) + " [" + detail + "]; packet A^Q " + fmt(closed) +
                             " vs quadrature " + fmt(ref)};
}

// --- 4 -----------------------------------------------------------------------
Outcome renormalization_chain() {
  const auto couple = packet_couple();
  const auto b = drift(couple);
  const auto rho0 = couple.rho().slice(0);
  const double quantum = quantum_action(couple).value;
  const auto ens = simulate_ensemble(b, rho0, kMc, "packet");
  const auto renorm = renormalized_action(ens);
  const auto I = estimate_I(ens, b, b.divergence());
  const auto zero = renormalized_action(simulate_ensemble(DriftField::constant(kGrid, 0.0), rho0, kMc, "zero"));
  const auto three = renormalized_action(simulate_ensemble(DriftField::constant(kGrid, 3.0), rho0, kMc, "three"));

  const double rel = 0.02 * std::abs(quantum);
  const bool ok_rq = std::abs(renorm.mean - quantum) <= std::max(4 * renorm.std_error, rel);
  const bool ok_iq = std::abs(I.mean - quantum) <= std::max(4 * I.std_error, rel);
  const bool ok_ri = std::abs(renorm.mean - I.mean) <= std::max(4 * combined(renorm, I), rel);
  const bool ok_zero = std::abs(zero.mean) <= 4 * zero.std_error;
  const bool ok_three = std::abs(three.mean - 9.0) <= 4 * three.std_error;
  return {ok_rq && ok_iq && ok_ri && ok_zero && ok_three,
          "A^Q " + fmt(quantum) + ", renormalized " + fmt(renorm.mean) + " +- " + fmt(renorm.std_error) + ", I " +
              fmt(I.mean) + " +- " + fmt(I.std_error) + ", b=0 " + fmt(zero.mean) + " +- " + fmt(zero.std_error) +
              ", b=3 " + fmt(three.mean) + " +- " + fmt(three.std_error)};
}

// --- 5 -----------------------------------------------------------------------
Outcome convergence_in_n() {
  const auto couple = packet_couple();
  const auto b = drift(couple);
  std::vector<std::pair<std::size_t, MCEstimate>> rows;
  std::string detail;
  for (std::size_t n : {64, 128, 256, 512}) {
    SimulationParams p = kMc;
    p.n = n;
    rows.emplace_back(n, renormalized_action(simulate_ensemble(b, couple.rho().slice(0), p, "packet")));
    detail += (detail.empty() ? "" : ", ") + ("n=" + std::to_string(n)) + " " + fmt(rows.back().second.mean) +
              " +- " + fmt(rows.back().second.std_error);
  }
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      if (rows[i].first < 256) continue;
      const auto& a = rows[i].second;
      const auto& c = rows[j].second;
      ok = ok && std::abs(a.mean - c.mean) <= 4 * combined(a, c);
    }
  return {ok, detail};
}

// --- 6 -----------------------------------------------------------------------
Outcome marginals() {
  const auto couple = packet_couple();
  const auto ens = simulate_ensemble(drift(couple), couple.rho().slice(0), kMc, "packet");
  bool ok = true;
  std::string detail;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto i = static_cast<std::size_t>(std::lround(t * kMc.n));
    // Reference density from the closed form, not from the simulated couple.
    std::vector<double> rho(kGrid.n_x);
    for (std::size_t k = 0; k < kGrid.n_x; ++k) rho[k] = oracle::Packet{}.rho(kGrid.x(k), t);
    const double l1 = marginal_l1_distance(ens, i, rho, kGrid);
    const double cells = marginal_l1_distance(ens, i, rho, kGrid, 1);
    ok = ok && l1 <= 0.03;
    detail += (detail.empty() ? "" : ", ") + ("t=" + fmt(t)) + " " + fmt(l1) + " (per cell " + fmt(cells) + ")";
  }
  return {ok, detail};
}

// --- 7, 8 --------------------------------------------------------------------
std::vector<PerturbationSpec> specs(std::size_t count) {
  std::vector<PerturbationSpec> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i].seed = i + 1;
  return out;
}

Outcome minimality() {
  const auto report = verify_theorem1(packet_couple(), specs(20));
  std::size_t minimum = 0, order = 0, convex = 0, built = 0;
  double worst_margin = 0.0, worst_second = 0.0;
  for (const auto& o : report.outcomes) {
    if (o.verdict == Verdict::FailedToConstruct) continue;
    ++built;
    minimum += o.minimum_ok;
    convex += o.convexity_ok;
    order += std::abs(o.derivative_ratio - 4.0) <= 1.0;
    worst_margin = std::min(worst_margin, o.min_margin / std::max(o.min_margin_tolerance / 3.0, 1e-300));
    worst_second = std::min(worst_second, o.min_second_difference / std::max(o.second_difference_tolerance / 3.0, 1e-300));
  }
  const auto frac = [&](std::size_t k) { return std::to_string(k) + "/" + std::to_string(built); };
  return {built == 20 && minimum == built && order == built && convex == built,
          "A(y) >= A(0) - 3err: " + frac(minimum) + ", D(h)/D(h/2) in [3,5]: " + frac(order) +
              ", second differences >= -3err: " + frac(convex) + "; worst margin " + fmt(worst_margin) +
              " err, worst second difference " + fmt(worst_second) + " err"};
}

Outcome negative_control() {
  const GaussianPacketSpec spec{1.0, 0.0, 1.0};
  const auto rho = decompose(gaussian_packet(spec, kGrid)).rho;
  const FluidCouple base(rho, VectorField::from_function(kGrid, [](double, double) { return 1.0; }),
                         Provenance::Synthetic);
  const auto report = verify_theorem1(base, specs(5));
  std::size_t off = 0;
  double best = 0.0;
  for (const auto& o : report.outcomes) {
    if (o.verdict == Verdict::FailedToConstruct) continue;
    const double z = std::abs(o.derivative_half_h) / o.error_at_0;
    best = std::max(best, z);
    off += z > 10.0;
  }
  return {off > 0, std::to_string(off) + "/5 specs with |D(0)| > 10 err, largest " + fmt(best) + " err"};
}

// --- 9 -----------------------------------------------------------------------
Outcome mixture_convexity() {
  const auto rho0 = packet_couple().rho().slice(0);
  SimulationParams p = kMc;
  p.n = 64;
  const std::vector<DriftField> pair{DriftField::constant(kGrid, 0.0), DriftField::constant(kGrid, 3.0)};
  auto action = [&](double lambda) {
    const std::vector<double> w{lambda, 1.0 - lambda};
    return renormalized_action(mixture_ensemble(pair, w, rho0, p));
  };
  const auto a0 = action(1.0), a1 = action(0.0);
  bool ok = true;
  std::string detail = "F(0) " + fmt(a0.mean) + ", F(3) " + fmt(a1.mean);
  for (double lambda : {0.25, 0.5, 0.75}) {
    const auto m = action(lambda);
    const double bound = lambda * a0.mean + (1 - lambda) * a1.mean;
    const double se = std::sqrt(m.std_error * m.std_error + a0.std_error * a0.std_error + a1.std_error * a1.std_error);
    ok = ok && m.mean <= bound + 4 * se;
    detail += ", lambda=" + fmt(lambda) + " " + fmt(m.mean) + " <= " + fmt(bound);
  }
  return {ok, detail};
}

// --- 10 ----------------------------------------------------------------------
Outcome transport_identities() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mean(-1.0, 1.0), var(0.5, 1.5);
  double map_err = 0.0, bb_err = 0.0, oracle_err = 0.0;
  for (int i = 0; i < 10; ++i) {
    const GaussianMeasure a{mean(rng), var(rng)}, b{mean(rng), var(rng)};
    std::vector<double> r0(kGrid.n_x), r1(kGrid.n_x);
    for (std::size_t k = 0; k < kGrid.n_x; ++k) {
      r0[k] = a.density(kGrid.x(k));
      r1[k] = b.density(kGrid.x(k));
    }
    const double tau2 = gaussian_w2(a, b);
    oracle_err = std::max(oracle_err, std::abs(tau2 - oracle::quantile_cost(a.mean, a.variance, b.mean, b.variance)));
    map_err = std::max(map_err, std::abs(monge_map_1d(r0, r1, kGrid).cost - tau2));
    bb_err = std::max(bb_err, std::abs(classical_action(displacement_couple(a, b, kGrid)).value - tau2));
  }

  const GaussianPacketSpec spec{1.0, 0.0, 1.25};
  const auto couple = packet_couple(spec);
  const auto qc = quantum_vs_classical({spec.mean(0), spec.variance(0)}, {spec.mean(1), spec.variance(1)}, couple);

  std::vector<double> geo;
  for (std::size_t n_t : {64, 128, 256})
    geo.push_back(euler_residual(displacement_couple({0.0, 1.0}, {1.0, 2.0}, with_n_t(kGrid, n_t))));
  const bool geo_ok = std::abs(geo[0] / geo[1] - 4.0) <= 0.5 && std::abs(geo[1] / geo[2] - 4.0) <= 0.5;

  // Packet: residual settles on the quantum force, sup |x - m| / (4 var^2)
  // over the same support nodes.
  std::vector<double> packet;
  for (std::size_t n_t : {128, 256, 512}) packet.push_back(euler_residual(packet_couple(spec, with_n_t(kGrid, n_t))));
  double force = 0.0;
  for (std::size_t j = 1; j < kGrid.n_t; ++j) {
    const double t = kGrid.t(j), v = spec.variance(t);
    const double reach = std::sqrt(2.0 * std::log(1e6) * v);
    for (std::size_t k = 0; k < kGrid.n_x; ++k) {
      const double z = kGrid.x(k) - spec.mean(t);
      if (std::abs(z) <= reach) force = std::max(force, std::abs(z) / (4 * v * v));
    }
  }
  const bool settles = std::abs(packet[2] - packet[1]) < std::abs(packet[1] - packet[0]) + 1e-12;
  const bool packet_ok = force > 0 && settles && std::abs(packet[1] - force) <= 0.05 * force;

  const bool ok = map_err <= 1e-5 && bb_err <= 1e-4 && oracle_err <= 1e-8 && qc.transport_bound_ok && geo_ok && packet_ok;
  return {ok, "Monge cost " + fmt(map_err) + ", displacement action " + fmt(bb_err) + ", W2 vs quantile quadrature " +
                  fmt(oracle_err) + "; tau2 " + fmt(qc.tau2) + " <= " + fmt(qc.classical_schrodinger.value) +
                  "; geodesic Euler x" + fmt(geo[0] / geo[1]) + ", x" + fmt(geo[1] / geo[2]) + "; packet Euler " +
                  fmt(packet[0]) + ", " + fmt(packet[1]) + ", " + fmt(packet[2]) + " vs force " + fmt(force)};
}

// --- 11 ----------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("stochmech_acceptance_" + std::to_string(::getpid()));
  const std::vector<std::pair<std::string, std::string>> configs{
      {"gaussian-benchmark", "mc.N = 2000\nmixture.n = 16\n"},
      {"renormalization-convergence", "mc.N = 2000\nconvergence.n_values = 16, 32\nconvergence.check_from = 16\n"},
      {"theorem1-verify", "perturbations.count = 2\n"},
      {"bb-compare", "packet.p = 1.25\nbb.pairs = 3\n"},
      {"marginal-check", "mc.N = 2000\nmarginal.l1_max = 1\n"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, body] : configs) {
    std::string first;
    bool same = true;
    for (int run = 0; run < 2; ++run) {
      std::istringstream in("experiment = " + name + "\n" + body);
      auto cfg = runner::parse_config(in);
      cfg.output_dir = root / (name + std::to_string(run));
      runner::run_experiment(cfg);
      const auto text = slurp(cfg.output_dir / "summary.json");
      if (run == 0) first = text;
      else same = !text.empty() && text == first;
    }
    ok = ok && same;
    detail += (detail.empty() ? "" : ", ") + name + (same ? " identical" : " DIFFERS");
  }
  fs::remove_all(root);
  return {ok, detail};
}

std::set<int> parse_ids(const std::string& list) {
  std::set<int> ids;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) ids.insert(std::stoi(item));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known, only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-failures" && i + 1 < argc) known = parse_ids(argv[++i]);
    else if (arg == "--only" && i + 1 < argc) only = parse_ids(argv[++i]);
    else {
      std::cerr << "usage: " << argv[0] << " [--known-failures 1,2,...] [--only 1,2,...]\n";
      return 1;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "exact free propagation", 5.0, exact_propagation},
      {2, "Madelung residual order in n_t", 0.0, residual_order},
      {3, "quantum action equals drift action", 0.0, drift_identity},
      {4, "renormalized action, estimate_I and A^Q agree", 120.0, renormalization_chain},
      {5, "renormalized action converges in n", 0.0, convergence_in_n},
      {6, "ensemble marginals match |psi|^2", 0.0, marginals},
      {7, "Schrodinger couple minimizes A^Q along competitors", 60.0, minimality},
      {8, "off-critical base is detected", 0.0, negative_control},
      {9, "renormalized action convex on mixtures", 0.0, mixture_convexity},
      {10, "transport identities and Euler residuals", 0.0, transport_identities},
      {11, "summary.json is deterministic", 0.0, determinism},
  };

  std::set<int> failed;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      r.passed = false;
      r.detail += "; over time limit " + fmt(c.time_limit) + " s";
    }
    if (!r.passed) failed.insert(c.id);
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << c.id << ' ' << c.name << ": " << r.detail << " ("
              << fmt(secs) << " s)" << (!r.passed && known.count(c.id) ? " [known failure]" : "") << std::endl;
  }

  std::set<int> expected;
  for (int id : known)
    if (only.empty() || only.count(id)) expected.insert(id);
  for (int id : expected)
    if (!failed.count(id)) std::cout << "criterion " << id << " was expected to fail but passed\n";
  return failed == expected ? 0 : 1;
}
