// Compares the serial reference window kernels against the OpenMP-parallel
// ones on a large bilateral scan. Uses Google Benchmark when available,
// otherwise a plain chrono loop producing the same comparison table.

#include <cstdio>
#include <vector>

#include "lyshift/kernels.hpp"
#include "lyshift/weights.hpp"
#include "lyshift/window.hpp"

namespace {

using namespace lyshift;

WeightSeq bench_weights() {
  // bilateral two-regime spec: decaying left tail, doubling right tail
  PiecewiseGeometricSpec spec;
  GeoSegment left;
  left.lo_unbounded = true;
  left.hi = 0;
  left.value = 0.5;
  GeoSegment right;
  right.lo = 1;
  right.hi_unbounded = true;
  right.value = 2.0;
  spec.segments = {left, right};
  return WeightSeq::make(Side::Bilateral, spec, 2.0);
}

constexpr index_t kLo = -200000;
constexpr index_t kHi = 200000;
constexpr index_t kLen = 512;

}  // namespace

#if defined(LYSHIFT_HAVE_GBENCH)

#include <benchmark/benchmark.h>

static void BM_WindowSerial(benchmark::State& state) {
  const WeightSeq w = bench_weights();
  const LogWindowTable table = build_table(w, kLo - kLen, kHi);
  for (auto _ : state) {
    BestWindow b = best_window_serial(table, kLen, kLo, kHi);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_WindowSerial);

static void BM_WindowParallel(benchmark::State& state) {
  const WeightSeq w = bench_weights();
  const LogWindowTable table = build_table(w, kLo - kLen, kHi);
  for (auto _ : state) {
    BestWindow b = best_window_parallel(table, kLen, kLo, kHi);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_WindowParallel);

static void BM_DivergenceScanSerial(benchmark::State& state) {
  const WeightSeq w = bench_weights();
  for (auto _ : state) {
    DivergenceScan s = detect_divergence(w, 64, kLo, kHi, 1e9, Exec::Serial);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_DivergenceScanSerial);

static void BM_DivergenceScanParallel(benchmark::State& state) {
  const WeightSeq w = bench_weights();
  for (auto _ : state) {
    DivergenceScan s = detect_divergence(w, 64, kLo, kHi, 1e9, Exec::Parallel);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_DivergenceScanParallel);

BENCHMARK_MAIN();

#else

#include <chrono>

int main() {
  const WeightSeq w = bench_weights();
  const LogWindowTable table = build_table(w, kLo - kLen, kHi);
  const int reps = 50;

  const auto time_ms = [&](auto&& fn) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
  };

  volatile double sink = 0.0;
  const double serial_ms =
      time_ms([&] { sink = best_window_serial(table, kLen, kLo, kHi).value; });
  const double parallel_ms =
      time_ms([&] { sink = best_window_parallel(table, kLen, kLo, kHi).value; });
  (void)sink;

  std::printf("parallel kernels enabled: %s\n", parallel_kernels_enabled() ? "yes" : "no");
  std::printf("best_window  serial   %10.4f ms/scan\n", serial_ms);
  std::printf("best_window  parallel %10.4f ms/scan  (x%.2f)\n", parallel_ms,
              serial_ms / parallel_ms);

  const auto scan_serial = [&] {
    volatile double v = detect_divergence(w, 64, kLo, kHi, 1e9, Exec::Serial).max_log_product;
    (void)v;
  };
  const auto scan_parallel = [&] {
    volatile double v = detect_divergence(w, 64, kLo, kHi, 1e9, Exec::Parallel).max_log_product;
    (void)v;
  };
  const double ds = time_ms(scan_serial);
  const double dp = time_ms(scan_parallel);
  std::printf("divergence   serial   %10.4f ms/scan\n", ds);
  std::printf("divergence   parallel %10.4f ms/scan  (x%.2f)\n", dp, ds / dp);
  return 0;
}

#endif
