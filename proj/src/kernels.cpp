#include "lyshift/kernels.hpp"

#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace lyshift {

namespace {

// chunk granularity for the parallel scans; fixed so the reduction order
// never depends on the thread count
constexpr index_t kChunk = 8192;

inline void fold(BestWindow& acc, const BestWindow& c) {
  if (c.value > acc.value) acc = c;
  // equal values keep the earlier (smaller) end index: chunks are folded in
  // ascending index order and each chunk already reports its smallest end
}

}  // namespace

BestWindow best_window_serial(const LogWindowTable& table, index_t n, index_t k_first,
                              index_t k_last) {
  BestWindow best;
  for (index_t k = k_first; k <= k_last; ++k) {
    double v = table.window_sum(k - n + 1, k);
    if (v > best.value) best = BestWindow{v, k};
  }
  return best;
}

BestWindow best_window_parallel(const LogWindowTable& table, index_t n, index_t k_first,
                                index_t k_last) {
#if defined(_OPENMP)
  index_t span = k_last - k_first + 1;
  if (span <= 0) return BestWindow{};
  index_t nchunks = (span + kChunk - 1) / kChunk;
  if (nchunks < 2) return best_window_serial(table, n, k_first, k_last);

  std::vector<BestWindow> partial(static_cast<std::size_t>(nchunks));
#pragma omp parallel for schedule(static)
  for (index_t c = 0; c < nchunks; ++c) {
    index_t a = k_first + c * kChunk;
    index_t b = std::min(k_last, a + kChunk - 1);
    partial[static_cast<std::size_t>(c)] = best_window_serial(table, n, a, b);
  }
  BestWindow best;
  for (const BestWindow& p : partial) fold(best, p);
  return best;
#else
  return best_window_serial(table, n, k_first, k_last);
#endif
}

index_t first_window_reaching(const LogWindowTable& table, index_t n, index_t k_first,
                              index_t k_last, double theta) {
  for (index_t k = k_first; k <= k_last; ++k) {
    if (table.window_sum(k - n + 1, k) >= theta) return k;
  }
  return k_last + 1;
}

bool parallel_kernels_enabled() {
#if defined(_OPENMP)
  return true;
#else
  return false;
#endif
}

}  // namespace lyshift
