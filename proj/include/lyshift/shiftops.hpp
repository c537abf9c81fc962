#pragma once

// Finite-support vectors with signed log-scale coefficients, and the backward
// weighted shift acting on them: apply_power moves e_m to e_{m-n} with the
// n-factor window product prod_{j=m-n+1..m} w_j. Unilateral entries whose
// target index would fall below 1 are annihilated exactly.

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "lyshift/logscale.hpp"
#include "lyshift/weights.hpp"

namespace lyshift {

enum class Norm { L1, L2, Sup };

class SparseVector {
 public:
  using entry_map = std::map<index_t, LogCoeff>;

  static SparseVector zero(Side side) { return SparseVector(side); }
  static SparseVector basis(Side side, index_t i);
  // linear-scale ingestion; repeated indices accumulate
  static SparseVector from_pairs(Side side, std::span<const std::pair<index_t, double>> pairs);

  Side side() const { return side_; }
  bool is_zero() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }
  const entry_map& entries() const { return entries_; }

  index_t support_min() const;  // throws EmptyRange on the zero vector
  index_t support_max() const;

  // adds value * e_i (exact-cancel aware); value 0 is a no-op
  void add_entry(index_t i, double value);
  void add_coeff(index_t i, const LogCoeff& c);

  // coefficient at i; sign 0 / -inf when absent
  LogCoeff at(index_t i) const;

 private:
  explicit SparseVector(Side side) : side_(side) {}
  void check_index(index_t i) const;

  Side side_;
  entry_map entries_;
};

// x - y entry-wise with sign-aware log addition
SparseVector subtract(const SparseVector& x, const SparseVector& y);

// B_w^n x; n >= 0; throws SideMismatch when vector and weights disagree
SparseVector apply_power(const WeightSeq& w, const SparseVector& x, index_t n);

// log||x||_p; -inf for the zero vector
double log_norm(const SparseVector& x, Norm p);

// log||B^t x - B^t y||_p for each t in times (-inf = exactly zero)
std::vector<double> pair_distance_along(const WeightSeq& w, const SparseVector& x,
                                        const SparseVector& y, std::span<const index_t> times,
                                        Norm p);

}  // namespace lyshift
