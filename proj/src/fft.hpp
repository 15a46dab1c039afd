#pragma once

// Thin RAII wrapper over FFTW's real-data transforms. Plans are created
// once and executed through the new-array interface, which FFTW documents
// as thread-safe; each thread brings its own Workspace.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace sqzcomb::detail {

struct FftwFree {
  void operator()(void* p) const;
};

class RealFft {
 public:
  class Workspace {
   public:
    std::span<double> real() { return {real_.get(), n_}; }
    std::span<std::complex<double>> spectrum() { return {spectrum_.get(), n_ / 2 + 1}; }

   private:
    friend class RealFft;
    explicit Workspace(std::size_t n);
    std::size_t n_;
    std::unique_ptr<double, FftwFree> real_;
    std::unique_ptr<std::complex<double>, FftwFree> spectrum_;
  };

  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  Workspace make_workspace() const { return Workspace(n_); }

  // real() -> spectrum(), unnormalised.
  void forward(Workspace& ws) const;
  // spectrum() -> real(), unnormalised (sum over all N bins). Clobbers spectrum().
  void inverse(Workspace& ws) const;

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace sqzcomb::detail
