#include "stochmech/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "spectral.hpp"
#include "stochmech/array_io.hpp"

namespace stochmech {

namespace {

constexpr double kNormTolerance = 1e-8;

std::vector<double> squared_modulus(std::span<const std::complex<double>> psi) {
  std::vector<double> rho(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) rho[i] = std::norm(psi[i]);
  return rho;
}

}  // namespace

WaveField::WaveField(GridSpec grid, std::vector<std::complex<double>> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  require(values_.size() == grid_.time_nodes() * grid_.n_x, ErrorCode::InvalidArgument,
          "WaveField shape does not match grid");
  for (const auto& v : values_)
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorCode::InvalidArgument,
            "WaveField has non-finite entries");
}

std::span<const std::complex<double>> WaveField::slice(std::size_t j) const {
  return std::span<const std::complex<double>>(values_).subspan(j * grid_.n_x, grid_.n_x);
}

double WaveField::norm_squared(std::size_t j) const {
  double sum = 0.0;
  for (const auto& v : slice(j)) sum += std::norm(v);
  return sum * grid_.dx();
}

double WaveField::max_norm_drift() const {
  double drift = 0.0;
  for (std::size_t j = 0; j < grid_.time_nodes(); ++j) drift = std::max(drift, std::abs(norm_squared(j) - 1.0));
  return drift;
}

double WaveField::min_density() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& v : values_) m = std::min(m, std::norm(v));
  return m;
}

ScalarField WaveField::density() const { return ScalarField(grid_, squared_modulus(values_)); }

void GaussianPacketSpec::validate() const {
  require(sigma0 > 0.0 && std::isfinite(sigma0), ErrorCode::InvalidArgument, "sigma0 must be positive");
  require(std::isfinite(mu0) && std::isfinite(p), ErrorCode::InvalidArgument, "packet mean/momentum must be finite");
}

double GaussianPacketSpec::variance(double t) const {
  return sigma0 * sigma0 + t * t / (4.0 * sigma0 * sigma0);
}

std::complex<double> gaussian_packet_value(const GaussianPacketSpec& spec, double x, double t) {
  using namespace std::complex_literals;
  const double s2 = spec.sigma0 * spec.sigma0;
  const std::complex<double> spread = 1.0 + 1i * (t / (2.0 * s2));
  const double prefactor = std::pow(2.0 * std::numbers::pi * s2, -0.25);
  const double shifted = x - spec.mu0 - spec.p * t;
  const std::complex<double> exponent =
      -shifted * shifted / (4.0 * s2 * spread) + 1i * (spec.p * (x - spec.mu0) - 0.5 * spec.p * spec.p * t);
  return prefactor / std::sqrt(spread) * std::exp(exponent);
}

std::vector<std::complex<double>> free_step(std::span<const std::complex<double>> psi, const GridSpec& grid,
                                            double time) {
  require(psi.size() == grid.n_x, ErrorCode::InvalidArgument, "slice length does not match n_x");
  std::vector<std::complex<double>> data(psi.begin(), psi.end());
  auto& fft = detail::fft_for(grid.n_x);
  const auto k = detail::wavenumbers(grid.n_x, grid.length());
  fft.forward(data);
  for (std::size_t m = 0; m < grid.n_x; ++m) data[m] *= std::polar(1.0, -0.5 * k[m] * k[m] * time);
  fft.backward(data);
  return data;
}

WaveField free_propagate(std::span<const std::complex<double>> psi0, const GridSpec& grid) {
  grid.validate();
  require(grid.d == 1, ErrorCode::Unsupported, "free propagation supports d = 1 only");
  require(psi0.size() == grid.n_x, ErrorCode::InvalidArgument, "psi0 length does not match n_x");
  const auto rho0 = squared_modulus(psi0);
  check_boundary(rho0, grid.boundary_tol, "free_propagate(psi0)");

  auto& fft = detail::fft_for(grid.n_x);
  const auto k = detail::wavenumbers(grid.n_x, grid.length());
  std::vector<std::complex<double>> spectrum(psi0.begin(), psi0.end());
  fft.forward(spectrum);

  std::vector<std::complex<double>> values(grid.time_nodes() * grid.n_x);
  std::copy(psi0.begin(), psi0.end(), values.begin());
  std::vector<std::complex<double>> work(grid.n_x);
  for (std::size_t j = 1; j < grid.time_nodes(); ++j) {
    const double t = grid.t(j);
    for (std::size_t m = 0; m < grid.n_x; ++m) work[m] = spectrum[m] * std::polar(1.0, -0.5 * k[m] * k[m] * t);
    fft.backward(work);
    std::copy(work.begin(), work.end(), values.begin() + static_cast<std::ptrdiff_t>(j * grid.n_x));
  }
  WaveField psi(grid, std::move(values));
  for (std::size_t j = 0; j < grid.time_nodes(); ++j) {
    const double drift = std::abs(psi.norm_squared(j) - 1.0);
    if (drift > kNormTolerance)
      raise(ErrorCode::NormDrift, "norm deviates by " + std::to_string(drift) + " at time node " + std::to_string(j));
  }
  return psi;
}

WaveField gaussian_packet(const GaussianPacketSpec& spec, const GridSpec& grid) {
  spec.validate();
  grid.validate();
  require(grid.d == 1, ErrorCode::Unsupported, "gaussian_packet supports d = 1 only");
  std::vector<std::complex<double>> values(grid.time_nodes() * grid.n_x);
  for (std::size_t j = 0; j < grid.time_nodes(); ++j)
    for (std::size_t k = 0; k < grid.n_x; ++k)
      values[j * grid.n_x + k] = gaussian_packet_value(spec, grid.x(k), grid.t(j));
  WaveField psi(grid, std::move(values));
  for (std::size_t j = 0; j < grid.time_nodes(); ++j)
    check_boundary(squared_modulus(psi.slice(j)), grid.boundary_tol, "gaussian_packet");
  return psi;
}

void write_csv(std::ostream& out, const WaveField& psi) {
  const auto& g = psi.grid();
  out << "t,x,re,im\n";
  for (std::size_t j = 0; j < g.time_nodes(); ++j)
    for (std::size_t k = 0; k < g.n_x; ++k) {
      const auto v = psi(j, k);
      out << format_double(g.t(j)) << ',' << format_double(g.x(k)) << ',' << format_double(v.real()) << ','
          << format_double(v.imag()) << '\n';
    }
}

}  // namespace stochmech
