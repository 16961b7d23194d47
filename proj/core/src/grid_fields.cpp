#include "stochmech/grid_fields.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "spectral.hpp"
#include "stochmech/array_io.hpp"

namespace stochmech {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values)
    require(std::isfinite(v), ErrorCode::InvalidArgument, std::string(what) + " has non-finite entries");
}

template <class T>
double max_abs(std::span<const T> f) {
  double m = 0.0;
  for (const auto& v : f) m = std::max(m, std::abs(v));
  return m;
}

template <class T>
void check_boundary_impl(std::span<const T> f, double rel_tol, const char* what) {
  if (rel_tol < 0.0 || f.empty()) return;
  const double peak = max_abs(f);
  if (peak == 0.0) return;
  const double edge = std::max(std::abs(f.front()), std::abs(f.back()));
  if (edge > rel_tol * peak) {
    raise(ErrorCode::BoundaryLeak, std::string(what) + ": edge magnitude " + format_double(edge / peak) +
                                       " of peak exceeds tolerance " + format_double(rel_tol));
  }
}

}  // namespace

void GridSpec::validate() const {
  require(x_max > x_min, ErrorCode::InvalidArgument, "x_max must exceed x_min");
  require(is_power_of_two(n_x), ErrorCode::InvalidArgument, "n_x must be a power of two");
  require(n_t >= 2, ErrorCode::InvalidArgument, "n_t must be at least 2");
  require(d >= 1, ErrorCode::InvalidArgument, "d must be positive");
  require(boundary_tol > 0.0 && boundary_tol < 1.0, ErrorCode::InvalidArgument,
          "boundary_tol must lie in (0, 1)");
}

std::vector<double> GridSpec::x_nodes() const {
  std::vector<double> xs(n_x);
  for (std::size_t k = 0; k < n_x; ++k) xs[k] = x(k);
  return xs;
}

GridSpec GridSpec::coarsened() const {
  require(can_coarsen(), ErrorCode::InvalidArgument, "grid too small (or n_t odd) to coarsen");
  GridSpec g = *this;
  g.n_x /= 2;
  g.n_t /= 2;
  return g;
}

// --- fields ----------------------------------------------------------------

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  require(values_.size() == grid_.time_nodes() * grid_.n_x, ErrorCode::InvalidArgument,
          "ScalarField shape does not match grid");
  require_finite(values_, "ScalarField");
}

std::span<const double> ScalarField::slice(std::size_t j) const {
  return std::span<const double>(values_).subspan(j * grid_.n_x, grid_.n_x);
}

ScalarField ScalarField::coarsened() const {
  const GridSpec coarse = grid_.coarsened();
  std::vector<double> out(coarse.time_nodes() * coarse.n_x);
  for (std::size_t j = 0; j < coarse.time_nodes(); ++j)
    for (std::size_t k = 0; k < coarse.n_x; ++k) out[j * coarse.n_x + k] = (*this)(2 * j, 2 * k);
  return ScalarField(coarse, std::move(out));
}

VectorField::VectorField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  grid_.validate();
  require(values_.size() == grid_.time_nodes() * grid_.n_x * grid_.d, ErrorCode::InvalidArgument,
          "VectorField shape does not match grid");
  require_finite(values_, "VectorField");
}

std::span<const double> VectorField::slice(std::size_t j) const {
  const std::size_t stride = grid_.n_x * grid_.d;
  return std::span<const double>(values_).subspan(j * stride, stride);
}

VectorField VectorField::coarsened() const {
  const GridSpec coarse = grid_.coarsened();
  std::vector<double> out(coarse.time_nodes() * coarse.n_x * coarse.d);
  for (std::size_t j = 0; j < coarse.time_nodes(); ++j)
    for (std::size_t k = 0; k < coarse.n_x; ++k)
      for (std::size_t c = 0; c < coarse.d; ++c)
        out[(j * coarse.n_x + k) * coarse.d + c] = (*this)(2 * j, 2 * k, c);
  return VectorField(coarse, std::move(out));
}

// --- boundary guard -----------------------------------------------------------

void check_boundary(std::span<const double> f, double rel_tol, const char* what) {
  check_boundary_impl(f, rel_tol, what);
}

void check_boundary(std::span<const std::complex<double>> f, double rel_tol, const char* what) {
  check_boundary_impl(f, rel_tol, what);
}

// --- differentiation -----------------------------------------------------------

std::vector<std::complex<double>> spectral_derivative(std::span<const std::complex<double>> f,
                                                      const GridSpec& grid, int order) {
  require(f.size() == grid.n_x, ErrorCode::InvalidArgument, "slice length does not match n_x");
  require(order >= 0, ErrorCode::InvalidArgument, "derivative order must be nonnegative");
  std::vector<std::complex<double>> data(f.begin(), f.end());
  if (order == 0) return data;
  auto& fft = detail::fft_for(grid.n_x);
  const auto k = detail::wavenumbers(grid.n_x, grid.length());
  fft.forward(data);
  const std::complex<double> ik_unit(0.0, 1.0);
  for (std::size_t m = 0; m < grid.n_x; ++m) {
    // The Nyquist mode has no odd-derivative counterpart on a real grid.
    if (m == grid.n_x / 2 && order % 2 == 1) {
      data[m] = 0.0;
      continue;
    }
    data[m] *= std::pow(ik_unit * k[m], order);
  }
  fft.backward(data);
  return data;
}

std::vector<double> spectral_derivative(std::span<const double> f, const GridSpec& grid, int order,
                                        double rel_tol) {
  check_boundary(f, rel_tol, "spectral_derivative");
  std::vector<std::complex<double>> in(f.begin(), f.end());
  const auto out = spectral_derivative(std::span<const std::complex<double>>(in), grid, order);
  std::vector<double> result(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) result[i] = out[i].real();
  return result;
}

Antiderivative spectral_antiderivative(std::span<const double> f, const GridSpec& grid) {
  require(f.size() == grid.n_x, ErrorCode::InvalidArgument, "slice length does not match n_x");
  Antiderivative result;
  double sum = 0.0;
  for (double v : f) sum += v;
  result.mean_residual = sum * grid.dx();

  std::vector<std::complex<double>> data(f.begin(), f.end());
  auto& fft = detail::fft_for(grid.n_x);
  const auto k = detail::wavenumbers(grid.n_x, grid.length());
  fft.forward(data);
  data[0] = 0.0;
  data[grid.n_x / 2] = 0.0;
  for (std::size_t m = 1; m < grid.n_x; ++m)
    if (m != grid.n_x / 2) data[m] /= std::complex<double>(0.0, k[m]);
  fft.backward(data);
  result.values.resize(grid.n_x);
  const double anchor = data[0].real();
  for (std::size_t i = 0; i < grid.n_x; ++i) result.values[i] = data[i].real() - anchor;
  return result;
}

void check_periodic(std::span<const double> f, const GridSpec& grid, double rel_tol, const char* what) {
  require(f.size() == grid.n_x, ErrorCode::InvalidArgument, "slice length does not match n_x");
  if (rel_tol < 0.0) return;
  std::vector<std::complex<double>> data(f.begin(), f.end());
  detail::fft_for(grid.n_x).forward(data);
  const std::size_t n = grid.n_x;
  double peak = 0.0, tail = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double a = std::abs(data[m]);
    peak = std::max(peak, a);
    if (8 * std::min(m, n - m) >= 3 * n) tail = std::max(tail, a);
  }
  if (peak > 0.0 && tail > rel_tol * peak)
    raise(ErrorCode::BoundaryLeak, std::string(what) + ": spectral tail " + format_double(tail / peak) +
                                       " of peak exceeds tolerance " + format_double(rel_tol));
}

std::vector<double> spectral_gradient(const ScalarField& f, std::size_t t_index) {
  require(f.grid().d == 1, ErrorCode::Unsupported, "spectral_gradient supports d = 1 only");
  require(t_index < f.grid().time_nodes(), ErrorCode::InvalidArgument, "time index out of range");
  check_periodic(f.slice(t_index), f.grid(), f.grid().boundary_tol, "spectral_gradient");
  return spectral_derivative(f.slice(t_index), f.grid(), 1);
}

std::vector<double> stencil_derivative(std::span<const double> f, double dx) {
  static constexpr std::array<double, 4> c8 = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  static constexpr std::array<double, 3> c6 = {3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0};
  static constexpr std::array<double, 2> c4 = {2.0 / 3.0, -1.0 / 12.0};
  const std::size_t n = f.size();
  require(n >= 3, ErrorCode::InvalidArgument, "stencil_derivative needs at least 3 samples");
  std::vector<double> out(n);
  auto central = [&](std::size_t i, std::span<const double> coeffs) {
    double acc = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) acc += coeffs[m] * (f[i + m + 1] - f[i - m - 1]);
    return acc / dx;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t reach = std::min(i, n - 1 - i);
    if (reach >= 4) {
      out[i] = central(i, c8);
    } else if (reach == 3) {
      out[i] = central(i, c6);
    } else if (reach == 2) {
      out[i] = central(i, c4);
    } else if (reach == 1) {
      out[i] = (f[i + 1] - f[i - 1]) / (2.0 * dx);
    } else if (i == 0) {
      out[i] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
    } else {
      out[i] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
    }
  }
  return out;
}

namespace {

template <class Field>
std::vector<double> time_derivative_impl(const Field& f, std::size_t j) {
  const GridSpec& g = f.grid();
  require(j < g.time_nodes(), ErrorCode::InvalidArgument, "time index out of range");
  const double dt = g.dt();
  const std::size_t last = g.n_t;
  std::vector<double> out(f.slice(0).size());
  if (j == 0 || j == last) {
    const bool front = j == 0;
    const auto a = f.slice(front ? 0 : last);
    const auto b = f.slice(front ? 1 : last - 1);
    const auto c = f.slice(front ? 2 : last - 2);
    const double sign = front ? 1.0 : -1.0;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sign * (-3.0 * a[i] + 4.0 * b[i] - c[i]) / (2.0 * dt);
    return out;
  }
  const auto prev = f.slice(j - 1);
  const auto next = f.slice(j + 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (next[i] - prev[i]) / (2.0 * dt);
  return out;
}

}  // namespace

std::vector<double> time_derivative(const ScalarField& f, std::size_t j) { return time_derivative_impl(f, j); }
std::vector<double> time_derivative(const VectorField& f, std::size_t j) { return time_derivative_impl(f, j); }

// --- quadrature ----------------------------------------------------------------

double integrate(std::span<const double> f, const GridSpec& grid) {
  return integrate(f, grid, grid.boundary_tol);
}

double integrate(std::span<const double> f, const GridSpec& grid, double rel_tol) {
  require(f.size() == grid.n_x, ErrorCode::InvalidArgument, "slice length does not match n_x");
  check_boundary(f, rel_tol, "integrate");
  // On a periodic grid the trapezoid weights are all dx.
  double sum = 0.0;
  for (double v : f) sum += v;
  return sum * grid.dx();
}

double integrate(const ScalarField& f, std::size_t t_index) {
  require(t_index < f.grid().time_nodes(), ErrorCode::InvalidArgument, "time index out of range");
  return integrate(f.slice(t_index), f.grid());
}

double time_integrate(std::span<const double> series) {
  require(series.size() >= 2, ErrorCode::InvalidArgument, "time series needs at least 2 nodes");
  const double h = 1.0 / static_cast<double>(series.size() - 1);
  double sum = 0.5 * (series.front() + series.back());
  for (std::size_t i = 1; i + 1 < series.size(); ++i) sum += series[i];
  return sum * h;
}

std::vector<bool> support_mask(std::span<const double> density, double floor) {
  double peak = 0.0;
  for (double v : density) peak = std::max(peak, v);
  std::vector<bool> mask(density.size());
  for (std::size_t i = 0; i < density.size(); ++i) mask[i] = density[i] >= floor * peak;
  return mask;
}

}  // namespace stochmech
