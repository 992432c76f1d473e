// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <cmath>

#include "glab/beltrami.hpp"
#include "glab/kernels.hpp"
#include "glab/quaddiff.hpp"
#include "glab/scmap.hpp"

namespace {

using glab::cplx;

const glab::DiskRule& rule() {
  static const glab::DiskRule r = glab::polar_rule(128, 512);
  return r;
}

cplx kernel_integrand(cplx z) {
  const cplx d = 1.0 - 0.99 * z;
  return std::conj(z) * z / (d * d * d * d);
}

void BM_DiskIntegralReference(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(glab::disk_integral_reference(rule(), kernel_integrand));
}
void BM_DiskIntegralSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(glab::disk_integral(rule(), kernel_integrand, glab::Exec::serial));
}
void BM_DiskIntegralParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(glab::disk_integral(rule(), kernel_integrand, glab::Exec::parallel));
}

std::vector<cplx> samples() {
  std::vector<cplx> v(rule().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.4 * std::exp(cplx(0.0, -2.0 * std::arg(rule().nodes[i])));
  return v;
}

void BM_PowerMomentsReference(benchmark::State& st) {
  const auto v = samples();
  for (auto _ : st) benchmark::DoNotOptimize(glab::power_moments_reference(rule(), v, int(st.range(0))));
}
void BM_PowerMomentsParallel(benchmark::State& st) {
  const auto v = samples();
  for (auto _ : st) benchmark::DoNotOptimize(glab::power_moments(rule(), v, int(st.range(0))));
}

const glab::ExteriorMapSpec& square() {
  static const glab::ExteriorMapSpec s = [] {
    const std::vector<cplx> v{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    return glab::solve_parameters(glab::PolygonSpec::from_vertices(v));
  }();
  return s;
}

void BM_MapEvaluate(benchmark::State& st) {
  const auto exec = st.range(0) ? glab::Exec::parallel : glab::Exec::serial;
  std::vector<cplx> pts;
  for (int i = 0; i < 2048; ++i) pts.push_back(std::polar(1.0 + 3.0 * i / 2048.0, 0.37 * i));
  for (auto _ : st)
    benchmark::DoNotOptimize(glab::evaluate_batch([](cplx z) { return glab::evaluate(square(), z); }, pts, exec));
}

}  // namespace

BENCHMARK(BM_DiskIntegralReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiskIntegralSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiskIntegralParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PowerMomentsReference)->Arg(30)->Arg(126)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PowerMomentsParallel)->Arg(30)->Arg(126)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MapEvaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
