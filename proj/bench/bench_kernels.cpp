// Serial reference versus OpenMP kernels at desk scale.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include "sqzcomb/kernels.hpp"
#include "sqzcomb/trace_synth.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

namespace {

using namespace sqzcomb;

const OpoParams& params() {
  static const OpoParams p = OpoParams::from_fsr(199e6, 0.02, 0.0651, 0.8169);
  return p;
}

constexpr std::size_t seg_len = 4096;

std::vector<double> flat_variance() { return std::vector<double>(seg_len / 2 + 1, 1.0); }

template <auto Kernel>
void bm_comb(benchmark::State& state) {
  std::vector<double> f(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.25e6 * static_cast<double>(i);
  std::vector<double> vp(f.size()), vm(f.size());
  for (auto _ : state) {
    Kernel(params(), f, vp, vm, DelayTerm::symmetric);
    benchmark::DoNotOptimize(vm.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void bm_synth(benchmark::State& state) {
  const auto var = flat_variance();
  std::vector<double> out(seg_len * static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    Kernel(var, seg_len, 7, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(out.size()));
}

template <auto Kernel>
void bm_fir(benchmark::State& state) {
  const LowPassFir fir(1.024e9, 450e6);
  std::vector<double> in(seg_len * static_cast<std::size_t>(state.range(0)));
  kernels::serial::synthesize_segments(flat_variance(), seg_len, 3, in);
  std::vector<double> out(in.size());
  for (auto _ : state) {
    Kernel(fir.taps(), in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(in.size()));
}

template <auto Kernel>
void bm_psd(benchmark::State& state) {
  std::vector<double> in(seg_len * static_cast<std::size_t>(state.range(0)));
  kernels::serial::synthesize_segments(flat_variance(), seg_len, 5, in);
  std::vector<double> acc(seg_len / 2 + 1);
  for (auto _ : state) {
    std::fill(acc.begin(), acc.end(), 0.0);
    Kernel(in, seg_len, AveragingMode::power, acc);
    benchmark::DoNotOptimize(acc.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(in.size()));
}

}  // namespace

BENCHMARK(bm_comb<sqzcomb::kernels::serial::evaluate_comb>)->Name("comb/serial")->Arg(10001);
BENCHMARK(bm_comb<sqzcomb::kernels::parallel::evaluate_comb>)->Name("comb/parallel")->Arg(10001);
BENCHMARK(bm_synth<sqzcomb::kernels::serial::synthesize_segments>)->Name("synth/serial")->Arg(256);
BENCHMARK(bm_synth<sqzcomb::kernels::parallel::synthesize_segments>)->Name("synth/parallel")->Arg(256);
BENCHMARK(bm_fir<sqzcomb::kernels::serial::fir_filter>)->Name("fir/serial")->Arg(256);
BENCHMARK(bm_fir<sqzcomb::kernels::parallel::fir_filter>)->Name("fir/parallel")->Arg(256);
BENCHMARK(bm_psd<sqzcomb::kernels::serial::accumulate_psd>)->Name("psd/serial")->Arg(256);
BENCHMARK(bm_psd<sqzcomb::kernels::parallel::accumulate_psd>)->Name("psd/parallel")->Arg(256);

BENCHMARK_MAIN();
