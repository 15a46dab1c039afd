#include "fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <stdexcept>

namespace sqzcomb::detail {

namespace {
// Only plan creation and destruction touch FFTW's global state.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void FftwFree::operator()(void* p) const { fftw_free(p); }

RealFft::Workspace::Workspace(std::size_t n)
    : n_(n),
      real_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
      spectrum_(static_cast<std::complex<double>*>(
          fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
  if (!real_ || !spectrum_) throw std::bad_alloc();
}

RealFft::RealFft(std::size_t n) : n_(n), forward_plan_(nullptr), inverse_plan_(nullptr) {
  if (n < 2) throw std::invalid_argument("RealFft: size must be >= 2");
  Workspace ws(n);
  auto* spec = reinterpret_cast<fftw_complex*>(ws.spectrum_.get());
  std::lock_guard lock(planner_mutex());
  const int len = static_cast<int>(n);
  forward_plan_ = fftw_plan_dft_r2c_1d(len, ws.real_.get(), spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(len, spec, ws.real_.get(), FFTW_ESTIMATE);
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("RealFft: FFTW planning failed");
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::forward(Workspace& ws) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), ws.real_.get(),
                       reinterpret_cast<fftw_complex*>(ws.spectrum_.get()));
}

void RealFft::inverse(Workspace& ws) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(ws.spectrum_.get()), ws.real_.get());
}

}  // namespace sqzcomb::detail
