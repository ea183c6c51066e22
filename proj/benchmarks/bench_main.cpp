#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "diracspec/cauchy.hpp"
#include "diracspec/direct_spectra.hpp"
#include "diracspec/fourier_algebra.hpp"
#include "diracspec/glm_krein.hpp"
#include "diracspec/spectral_products.hpp"
#include "diracspec/transform_kernel.hpp"

using namespace dirac;

namespace {

Potential step_q() { return Potential::piecewise({0.0, 0.5, 1.0}, {1.0, 0.0}, {0.5, 0.5}); }

Potential smooth_q(int cells) {
  std::vector<double> x, q1, q2;
  for (int k = 0; k <= cells; ++k) {
    x.push_back(static_cast<double>(k) / cells);
    q1.push_back(std::sin(2.0 * std::numbers::pi * x.back()));
    q2.push_back(0.3);
  }
  return Potential::sampled(x, q1, q2);
}

const NormingData& step_data() {
  static const NormingData d = norming_from_two_spectra(compute_spectra(step_q(), -64, 64));
  return d;
}

}  // namespace

static void BM_CharValuesPiecewise(benchmark::State& state) {
  const Potential q = step_q();
  double l = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(char_values(q, l));
    l += 1e-3;
  }
}
BENCHMARK(BM_CharValuesPiecewise);

static void BM_CharValuesSampled(benchmark::State& state) {
  const Potential q = smooth_q(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(char_values(q, 6.0));
}
BENCHMARK(BM_CharValuesSampled)->Arg(128)->Arg(512);

static void BM_ComputeSpectra(benchmark::State& state) {
  const Potential q = step_q();
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_spectra(q, -N, N));
  state.SetComplexityN(N);
}
BENCHMARK(BM_ComputeSpectra)->RangeMultiplier(2)->Range(16, 128)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_NormingFromTwoSpectra(benchmark::State& state) {
  const SpectrumPair sp = compute_spectra(step_q(), -64, 64);
  for (auto _ : state) benchmark::DoNotOptimize(norming_from_two_spectra(sp));
}
BENCHMARK(BM_NormingFromTwoSpectra)->Unit(benchmark::kMillisecond);

static void BM_PSeries(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const Potential q = smooth_q(cells);
  for (auto _ : state) benchmark::DoNotOptimize(build_P_series(q, 8, Grid::uniform(cells)));
  state.SetComplexityN(cells);
}
BENCHMARK(BM_PSeries)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNSquared)->Unit(
    benchmark::kMillisecond);

static void BM_Krein(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const KreinOptions opt{state.range(1) == 0 ? KreinMethod::dense : KreinMethod::levinson, DiagonalRule::nystrom};
  const ToeplitzSlice H = build_H(step_data(), M, Summation::raw);
  for (auto _ : state) benchmark::DoNotOptimize(solve_krein(H, Grid::uniform(M), opt));
  state.SetLabel(state.range(1) == 0 ? "dense" : "levinson");
}
BENCHMARK(BM_Krein)->ArgsProduct({{64, 128, 256}, {0, 1}})->Unit(benchmark::kMillisecond);

static void BM_Positivity(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const ToeplitzSlice H = build_H(step_data(), M, Summation::raw);
  const FKernel F = build_F(H, Grid::uniform(M));
  for (auto _ : state) benchmark::DoNotOptimize(check_positivity(F));
}
BENCHMARK(BM_Positivity)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_Reconstruct(benchmark::State& state) {
  ReconstructionOptions opt;
  opt.cells = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(step_data(), opt));
}
BENCHMARK(BM_Reconstruct)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_WienerInvert(benchmark::State& state) {
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = 0.3 * std::cos(2.0 * std::numbers::pi * k / v.size());
  const Samples f = Samples::from_real(v, SampleLayout::point);
  for (auto _ : state) benchmark::DoNotOptimize(wiener_invert(f));
}
BENCHMARK(BM_WienerInvert)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
