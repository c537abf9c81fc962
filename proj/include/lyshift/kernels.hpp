#pragma once

// Inner scan kernels behind the window module. The serial variants are the
// reference implementations; the parallel variants chunk the index space into
// fixed-size pieces, scan pieces concurrently, and reduce left-to-right, so
// their results are bitwise identical to the serial ones.

#include "lyshift/weights.hpp"

namespace lyshift {

struct BestWindow {
  double value = kNegInf;
  index_t end_k = 0;  // smallest end index attaining value; undefined when value = -inf
};

// Max over end indices k in [k_first, k_last] of table.window_sum(k-n+1, k).
// Caller guarantees the windows lie inside the table.
BestWindow best_window_serial(const LogWindowTable& table, index_t n, index_t k_first,
                              index_t k_last);
BestWindow best_window_parallel(const LogWindowTable& table, index_t n, index_t k_first,
                                index_t k_last);

// Smallest end k in [k_first, k_last] whose window reaches theta, or k_last+1.
index_t first_window_reaching(const LogWindowTable& table, index_t n, index_t k_first,
                              index_t k_last, double theta);

bool parallel_kernels_enabled();

}  // namespace lyshift
