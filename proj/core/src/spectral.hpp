#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <fftw3.h>

namespace stochmech::detail {

// Owns FFTW buffers and plans for one transform length. Not shareable across
// threads; use fft_for(n), which hands out a thread-local instance.
class FftEngine {
 public:
  explicit FftEngine(std::size_t n);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  std::size_t size() const { return n_; }
  // In-place on `data` (length n). backward() includes the 1/n normalization.
  void forward(std::vector<std::complex<double>>& data);
  void backward(std::vector<std::complex<double>>& data);

 private:
  std::size_t n_;
  fftw_complex* buffer_;
  fftw_plan forward_plan_;
  fftw_plan backward_plan_;
};

FftEngine& fft_for(std::size_t n);

// Angular wavenumbers in FFT order for a periodic box of length `length`.
std::vector<double> wavenumbers(std::size_t n, double length);

}  // namespace stochmech::detail
