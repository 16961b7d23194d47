#include "stochmech/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "stochmech/array_io.hpp"

namespace stochmech {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Amplitude-like fields (sqrt(rho), psi) decay like the square root of the density.
double amplitude_tol(const GridSpec& g) { return std::sqrt(g.boundary_tol); }

double wrap_to_pi(double a) { return a - kTwoPi * std::round(a / kTwoPi); }

constexpr double kMaxPhaseStep = 0.5 * std::numbers::pi;

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::SchrodingerDerived: return "schrodinger-derived";
    case Provenance::Competitor: return "competitor";
    case Provenance::ClassicalOt: return "classical-ot";
    case Provenance::Synthetic: return "synthetic";
  }
  return "unknown";
}

FluidCouple::FluidCouple(ScalarField rho, VectorField v, Provenance provenance)
    : rho_(std::move(rho)), v_(std::move(v)), provenance_(provenance) {
  require(rho_.grid() == v_.grid(), ErrorCode::InvalidArgument, "rho and v live on different grids");
  for (double r : rho_.values())
    require(r > 0.0, ErrorCode::InvalidArgument, "couple density must be strictly positive");
  for (std::size_t j = 0; j < grid().time_nodes(); ++j) {
    const double mass = integrate(rho_, j);
    require(std::abs(mass - 1.0) <= kMassTolerance, ErrorCode::InvalidArgument,
            "couple density not normalized at time node " + std::to_string(j) + " (mass " +
                format_double(mass) + ")");
  }
}

// --- drift field -------------------------------------------------------------

DriftField::DriftField(VectorField b, TimeInterpolation rule) : b_(std::move(b)), rule_(rule) {
  require(b_.grid().d == 1, ErrorCode::Unsupported, "DriftField supports d = 1 only");
}

DriftField DriftField::constant(const GridSpec& grid, double c, TimeInterpolation rule) {
  return DriftField(VectorField::from_function(grid, [c](double, double) { return c; }), rule);
}

double DriftField::interpolate(std::span<const double> field, double x, double t) const {
  const GridSpec& g = b_.grid();
  const std::size_t nx = g.n_x;

  const double s = (x - g.x_min) / g.dx();
  std::size_t k = 0;
  double wx = 0.0;
  if (s >= static_cast<double>(nx - 1)) {
    k = nx - 2;
    wx = 1.0;
  } else if (s > 0.0) {
    k = static_cast<std::size_t>(s);
    wx = s - static_cast<double>(k);
  }

  auto at = [&](std::size_t j) {
    const double* row = field.data() + j * nx;
    return row[k] + wx * (row[k + 1] - row[k]);
  };

  const double tau = std::clamp(t, 0.0, 1.0) * static_cast<double>(g.n_t);
  if (rule_ == TimeInterpolation::PiecewiseConstant) {
    // Guard against t = i/n landing a hair below its grid node.
    const auto j = std::min(static_cast<std::size_t>(tau + 1e-9), g.n_t);
    return at(j);
  }
  const auto j = std::min(static_cast<std::size_t>(tau), g.n_t - 1);
  const double wt = tau - static_cast<double>(j);
  return (1.0 - wt) * at(j) + wt * at(j + 1);
}

ScalarField DriftField::divergence() const {
  const GridSpec& g = b_.grid();
  std::vector<double> out(g.time_nodes() * g.n_x);
  for (std::size_t j = 0; j < g.time_nodes(); ++j) {
    const auto d = stencil_derivative(b_.slice(j), g.dx());
    std::copy(d.begin(), d.end(), out.begin() + static_cast<std::ptrdiff_t>(j * g.n_x));
  }
  return ScalarField(g, std::move(out));
}

// --- decomposition -------------------------------------------------------------

Decomposition decompose(const WaveField& psi, double node_floor) {
  const GridSpec& g = psi.grid();
  require(g.d == 1, ErrorCode::Unsupported, "decompose supports d = 1 only");
  const double min_rho = psi.min_density();
  if (min_rho < node_floor)
    raise(ErrorCode::NodeDetected, "min |psi|^2 = " + format_double(min_rho) + " below node floor " +
                                       format_double(node_floor));

  const std::size_t nx = g.n_x;
  const std::size_t nt = g.time_nodes();
  const std::size_t center = static_cast<std::size_t>(std::lround((0.5 * (g.x_min + g.x_max) - g.x_min) / g.dx())) % nx;

  std::vector<double> rho(nt * nx), phase(nt * nx), vel(nt * nx);
  double anchor = 0.0;
  for (std::size_t j = 0; j < nt; ++j) {
    const auto slice = psi.slice(j);
    check_boundary(slice, amplitude_tol(g), "decompose");
    double* r = rho.data() + j * nx;
    double* S = phase.data() + j * nx;
    for (std::size_t k = 0; k < nx; ++k) r[k] = std::norm(slice[k]);

    const double principal = std::arg(slice[center]);
    anchor = j == 0 ? principal : anchor + wrap_to_pi(principal - anchor);
    S[center] = anchor;

    // A resolved phase moves by well under pi/2 per sample; a larger jump is
    // a node (sign flip) or an under-resolved oscillation.
    auto step = [&](std::size_t from, std::size_t to) {
      const double increment = std::arg(slice[to] * std::conj(slice[from]));
      if (std::abs(increment) > kMaxPhaseStep)
        raise(ErrorCode::UnwrapInconsistent, "phase jumps by " + format_double(increment) +
                                                 " between samples at x = " + format_double(g.x(to)));
      S[to] = S[from] + increment;
    };
    for (std::size_t k = center + 1; k < nx; ++k) step(k - 1, k);
    for (std::size_t k = center; k-- > 0;) step(k + 1, k);

    const auto v = stencil_derivative(std::span<const double>(S, nx), g.dx());
    std::copy(v.begin(), v.end(), vel.begin() + static_cast<std::ptrdiff_t>(j * nx));
  }

  ScalarField rho_field(g, std::move(rho));
  ScalarField phase_field(g, std::move(phase));
  FluidCouple couple(rho_field, VectorField(g, std::move(vel)), Provenance::SchrodingerDerived);
  return Decomposition{std::move(rho_field), std::move(phase_field), std::move(couple)};
}

VectorField osmotic(const ScalarField& rho) {
  const GridSpec& g = rho.grid();
  require(g.d == 1, ErrorCode::Unsupported, "osmotic supports d = 1 only");
  std::vector<double> out(g.time_nodes() * g.n_x);
  std::vector<double> log_rho(g.n_x);
  for (std::size_t j = 0; j < g.time_nodes(); ++j) {
    const auto r = rho.slice(j);
    check_boundary(r, g.boundary_tol, "osmotic");
    for (std::size_t k = 0; k < g.n_x; ++k) {
      require(r[k] > 0.0, ErrorCode::InvalidArgument, "osmotic velocity needs a positive density");
      log_rho[k] = std::log(r[k]);
    }
    const auto d = stencil_derivative(log_rho, g.dx());
    for (std::size_t k = 0; k < g.n_x; ++k) out[j * g.n_x + k] = 0.5 * d[k];
  }
  return VectorField(g, std::move(out));
}

DriftField drift(const FluidCouple& couple, TimeInterpolation rule) {
  const auto u = osmotic(couple.rho());
  const auto v = couple.v().values();
  std::vector<double> b(v.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = v[i] + u.values()[i];
  return DriftField(VectorField(couple.grid(), std::move(b)), rule);
}

std::vector<double> quantum_potential(const ScalarField& rho, std::size_t j) {
  const GridSpec& g = rho.grid();
  const auto r = rho.slice(j);
  std::vector<double> amp(g.n_x);
  for (std::size_t k = 0; k < g.n_x; ++k) amp[k] = std::sqrt(r[k]);
  auto q = spectral_derivative(amp, g, 2, amplitude_tol(g));
  for (std::size_t k = 0; k < g.n_x; ++k) q[k] = 0.5 * q[k] / amp[k];
  return q;
}

MadelungResiduals madelung_residuals(const ScalarField& rho, const ScalarField& S, const ResidualOptions& options) {
  require(rho.grid() == S.grid(), ErrorCode::InvalidArgument, "rho and S live on different grids");
  const GridSpec& g = rho.grid();
  require(g.d == 1, ErrorCode::Unsupported, "madelung_residuals supports d = 1 only");
  MadelungResiduals res;
  std::vector<double> flux(g.n_x);
  for (std::size_t j = 1; j < g.n_t; ++j) {
    const auto r = rho.slice(j);
    const auto grad_S = stencil_derivative(S.slice(j), g.dx());
    for (std::size_t k = 0; k < g.n_x; ++k) flux[k] = r[k] * grad_S[k];
    const auto div_flux = stencil_derivative(flux, g.dx());
    const auto rho_t = time_derivative(rho, j);
    for (std::size_t k = 0; k < g.n_x; ++k) {
      res.r1 = std::max(res.r1, std::abs(rho_t[k] + div_flux[k]));
      res.scale1 = std::max({res.scale1, std::abs(rho_t[k]), std::abs(div_flux[k])});
    }

    const auto S_t = time_derivative(S, j);
    const auto Q = quantum_potential(rho, j);
    const auto mask = support_mask(r, options.support_floor);
    for (std::size_t k = 0; k < g.n_x; ++k) {
      if (!mask[k]) continue;
      const double kinetic = 0.5 * grad_S[k] * grad_S[k];
      res.r2 = std::max(res.r2, std::abs(S_t[k] + kinetic - Q[k]));
      res.scale2 = std::max({res.scale2, std::abs(S_t[k]), kinetic, std::abs(Q[k])});
    }
  }
  return res;
}

void write_csv(std::ostream& out, const FluidCouple& couple) {
  const auto& g = couple.grid();
  out << "t,x,rho,v\n";
  for (std::size_t j = 0; j < g.time_nodes(); ++j)
    for (std::size_t k = 0; k < g.n_x; ++k)
      out << format_double(g.t(j)) << ',' << format_double(g.x(k)) << ',' << format_double(couple.rho()(j, k))
          << ',' << format_double(couple.v()(j, k)) << '\n';
}

void write_csv(std::ostream& out, const DriftField& drift) {
  const auto& g = drift.grid();
  out << "t,x,b\n";
  for (std::size_t j = 0; j < g.time_nodes(); ++j)
    for (std::size_t k = 0; k < g.n_x; ++k)
      out << format_double(g.t(j)) << ',' << format_double(g.x(k)) << ',' << format_double(drift.b()(j, k)) << '\n';
}

}  // namespace stochmech
