#include "lyshift/window.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "lyshift/kernels.hpp"

namespace lyshift {

namespace {

// n's are scanned in blocks; inside a block each n is independent
constexpr index_t kNBlock = 64;

// Admissible end indices are the columns of the truncated matrix of B^n on
// [k_lo, k_hi]: any end in range, with factors reaching below the range
// (weight domain permitting). Unilateral columns k <= n land at index < 1 and
// are annihilated, so they carry no norm.
index_t first_admissible(const WeightSeq& w, index_t n, index_t k_lo) {
  return w.side() == Side::Unilateral ? std::max(k_lo, n + 1) : k_lo;
}

struct PerN {
  index_t found_k;  // k_last+1 when theta never reached
  BestWindow best;  // filled only up to the first theta hit
};

PerN scan_one_length(const LogWindowTable& table, index_t n, index_t k_first, index_t k_hi,
                     double theta) {
  PerN r{k_hi + 1, BestWindow{}};
  for (index_t k = k_first; k <= k_hi; ++k) {
    double v = table.window_sum(k - n + 1, k);
    if (v > r.best.value) r.best = BestWindow{v, k};
    if (v >= theta) {
      r.found_k = k;
      return r;  // smallest (n, k) certificate wanted; rest of this n is moot
    }
  }
  return r;
}

}  // namespace

WindowResult max_window_log_product(const WeightSeq& w, index_t n, index_t k_lo, index_t k_hi,
                                    Exec exec) {
  if (n < 1) throw EmptyRange("window length must be >= 1");
  index_t k_first = first_admissible(w, n, k_lo);
  if (k_first > k_hi)
    throw EmptyRange("no column of B^" + std::to_string(n) + " survives inside the range");
  LogWindowTable table(w, std::max(k_first - n + 1, w.domain_lo()), k_hi);
  BestWindow best = (exec == Exec::Parallel)
                        ? best_window_parallel(table, n, k_first, k_hi)
                        : best_window_serial(table, n, k_first, k_hi);
  return WindowResult{best.end_k, best.value};
}

double op_log_norm_global(const WeightSeq& w, index_t n, Exec exec) {
  if (n < 1) throw EmptyRange("operator power must be >= 1");
  index_t lo = 0, hi = 0;
  if (const auto* e = std::get_if<ExplicitSpec>(&w.data())) {
    lo = e->first_index - n;
    hi = e->first_index + static_cast<index_t>(e->values.size()) - 1 + n;
  } else if (const auto* p = std::get_if<PeriodicSpec>(&w.data())) {
    // need one full run of pattern phases among the admissible end indices
    const index_t len = static_cast<index_t>(p->pattern.size());
    lo = p->anchor;
    hi = std::max(p->anchor + n + len - 2, n + len);
  } else {
    const auto& g = std::get<PiecewiseGeometricSpec>(w.data());
    bool any = false;
    index_t bmin = 0, bmax = 0;
    for (const GeoSegment& s : g.segments) {
      if (!s.lo_unbounded) {
        bmin = any ? std::min(bmin, s.lo) : s.lo;
        bmax = any ? std::max(bmax, s.lo) : s.lo;
        any = true;
      }
      if (!s.hi_unbounded) {
        bmin = any ? std::min(bmin, s.hi) : s.hi;
        bmax = any ? std::max(bmax, s.hi) : s.hi;
        any = true;
      }
    }
    if (!any) {
      // single unbounded segment: constant weight, any one column suffices
      lo = w.domain_lo() == 1 ? n + 1 : 0;
      hi = lo;
    } else {
      lo = bmin - n - 1;
      hi = bmax + n + 1;
    }
  }
  lo = std::max(lo, w.domain_lo());
  hi = std::max(hi, w.side() == Side::Unilateral ? n + 1 : lo);
  return op_log_norm(w, n, lo, hi, exec);
}

DivergenceScan detect_divergence(const WeightSeq& w, index_t horizon, index_t k_lo, index_t k_hi,
                                 double theta, Exec exec) {
  if (horizon < 1) throw EmptyRange("horizon must be >= 1");
  if (first_admissible(w, 1, k_lo) > k_hi)
    throw EmptyRange("not even a length-1 window has a surviving column in the range");
  // unilateral columns need n + 1 <= k <= k_hi; bilateral columns exist at any n
  index_t n_max = horizon;
  if (w.side() == Side::Unilateral) n_max = std::min(n_max, k_hi - 1);
  LogWindowTable table(w, std::max(k_lo - n_max + 1, w.domain_lo()), k_hi);

  DivergenceScan scan;
  auto note_max = [&](index_t n, const BestWindow& b) {
    if (b.value > scan.max_log_product) {
      scan.max_log_product = b.value;
      scan.max_n = n;
      scan.max_k = b.end_k;
    }
  };
  auto certify = [&](index_t n, index_t k) {
    scan.cert = DivergenceCert{k, n, table.window_sum(k - n + 1, k), theta};
  };

  bool parallel = exec == Exec::Parallel && parallel_kernels_enabled();
  if (!parallel) {
    for (index_t n = 1; n <= n_max; ++n) {
      PerN r = scan_one_length(table, n, first_admissible(w, n, k_lo), k_hi, theta);
      if (r.found_k <= k_hi) {
        certify(n, r.found_k);
        return scan;
      }
      note_max(n, r.best);
    }
    return scan;
  }

  std::vector<PerN> block(static_cast<std::size_t>(kNBlock));
  for (index_t n0 = 1; n0 <= n_max; n0 += kNBlock) {
    index_t n1 = std::min(n_max, n0 + kNBlock - 1);
    index_t count = n1 - n0 + 1;
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
    for (index_t i = 0; i < count; ++i) {
      block[static_cast<std::size_t>(i)] =
          scan_one_length(table, n0 + i, first_admissible(w, n0 + i, k_lo), k_hi, theta);
    }
    for (index_t i = 0; i < count; ++i) {
      const PerN& r = block[static_cast<std::size_t>(i)];
      if (r.found_k <= k_hi) {
        certify(n0 + i, r.found_k);
        return scan;
      }
      note_max(n0 + i, r.best);
    }
  }
  return scan;
}

DecayScan detect_prefix_decay(const WeightSeq& w, index_t horizon, double theta, int m_max) {
  if (w.side() != Side::Bilateral)
    throw NotBilateral("prefix decay scans the negative half axis; weights are unilateral");
  if (horizon < 1) throw EmptyRange("horizon must be >= 1");
  if (!(theta > 0.0)) throw MalformedSpec("decay threshold theta must be positive");
  if (m_max < 1) throw MalformedSpec("decay level count must be >= 1");

  LogWindowTable table(w, -horizon + 1, 0);
  DecayScan scan;
  scan.min_prefix = std::numeric_limits<double>::infinity();
  DecayCert cert{theta, {}};
  int m = 1;
  for (index_t n = 1; n <= horizon && m <= m_max; ++n) {
    double p = table.window_sum(-n + 1, 0);
    if (p < scan.min_prefix) {
      scan.min_prefix = p;
      scan.min_prefix_n = n;
    }
    if (p <= -theta * m) {
      cert.entries.push_back(DecayEntry{n, p});
      ++m;
    }
  }
  scan.levels_reached = m - 1;
  if (m > m_max) scan.cert = std::move(cert);
  return scan;
}

bool replay_divergence(const WeightSeq& w, const DivergenceCert& cert, double tol) {
  if (cert.n < 1) return false;
  // a certified window is a surviving column: unilateral must land at >= 1
  if (w.side() == Side::Unilateral && cert.k - cert.n < 1) return false;
  index_t a = cert.k - cert.n + 1;
  if (!w.in_domain(a)) return false;
  LogWindowTable table(w, a, cert.k);
  double v = table.window_sum(a, cert.k);
  return std::fabs(v - cert.log_product) <= tol && v >= cert.threshold_used;
}

bool replay_decay(const WeightSeq& w, const DecayCert& cert, double tol) {
  if (w.side() != Side::Bilateral || cert.entries.empty()) return false;
  index_t deepest = cert.entries.back().n_m;
  LogWindowTable table(w, -deepest + 1, 0);
  index_t prev = 0;
  for (std::size_t m = 0; m < cert.entries.size(); ++m) {
    const DecayEntry& e = cert.entries[m];
    if (e.n_m <= prev) return false;
    prev = e.n_m;
    double p = table.window_sum(-e.n_m + 1, 0);
    if (std::fabs(p - e.log_product) > tol) return false;
    if (p > -cert.theta * static_cast<double>(m + 1)) return false;
  }
  return true;
}

}  // namespace lyshift
