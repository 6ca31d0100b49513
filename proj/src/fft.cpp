#include "fft.hpp"

#include <algorithm>
#include <mutex>
#include <new>

namespace nmk::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t n, Direction dir) : n_(n) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  in_ = fftw_alloc_complex(n);
  out_ = fftw_alloc_complex(n);
  if (!in_ || !out_) throw std::bad_alloc();
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_,
                           dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                           FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan_);
  fftw_free(in_);
  fftw_free(out_);
}

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x,
                                      FftPlan::Direction dir) {
  FftPlan plan(x.size(), dir);
  std::copy(x.begin(), x.end(), plan.in());
  plan.execute();
  return {plan.out(), plan.out() + x.size()};
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace nmk::detail
