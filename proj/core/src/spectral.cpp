#include "spectral.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace stochmech::detail {

namespace {
// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftEngine::FftEngine(std::size_t n) : n_(n) {
  std::lock_guard lock(planner_mutex());
  buffer_ = fftw_alloc_complex(n);
  forward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftEngine::~FftEngine() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(forward_plan_);
  fftw_destroy_plan(backward_plan_);
  fftw_free(buffer_);
}

void FftEngine::forward(std::vector<std::complex<double>>& data) {
  std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buffer_));
  fftw_execute(forward_plan_);
  std::copy_n(reinterpret_cast<const std::complex<double>*>(buffer_), n_, data.begin());
}

void FftEngine::backward(std::vector<std::complex<double>>& data) {
  std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buffer_));
  fftw_execute(backward_plan_);
  const double scale = 1.0 / static_cast<double>(n_);
  const auto* out = reinterpret_cast<const std::complex<double>*>(buffer_);
  for (std::size_t i = 0; i < n_; ++i) data[i] = out[i] * scale;
}

FftEngine& fft_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<FftEngine>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftEngine>(n);
  return *slot;
}

std::vector<double> wavenumbers(std::size_t n, double length) {
  std::vector<double> k(n);
  const double base = 2.0 * std::numbers::pi / length;
  for (std::size_t m = 0; m < n; ++m) {
    const auto signed_m = m < n / 2 ? static_cast<double>(m)
                                    : static_cast<double>(m) - static_cast<double>(n);
    k[m] = base * signed_m;
  }
  return k;
}

}  // namespace stochmech::detail
