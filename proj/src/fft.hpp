#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <fftw3.h>

namespace nmk::detail {

// One-dimensional complex FFT with owned, aligned buffers. Planning is
// serialized internally because the FFTW planner is not thread safe;
// execution is.
class FftPlan {
 public:
  enum class Direction { Forward, Backward };

  FftPlan(std::size_t n, Direction dir);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::complex<double>* in() noexcept { return reinterpret_cast<std::complex<double>*>(in_); }
  std::complex<double>* out() noexcept { return reinterpret_cast<std::complex<double>*>(out_); }

  void execute() noexcept { fftw_execute(plan_); }

 private:
  std::size_t n_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

// Unnormalized DFT with the sign convention exp(-2 pi i k j / n) for Forward.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x,
                                      FftPlan::Direction dir);

std::size_t next_pow2(std::size_t n);

}  // namespace nmk::detail
