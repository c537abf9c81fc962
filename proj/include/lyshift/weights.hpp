#pragma once

// Weight sequences for backward shifts, and prefix-summed log windows.
//
// A WeightSeq is an immutable, deterministic map j -> w_j over either j >= 1
// (unilateral) or all of Z (bilateral). Only |w_j| is ever consumed; signs are
// accepted in specs and dropped at ingestion. Evaluation is total on the
// domain and rejects zero weights and bound violations at construction.

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "lyshift/errors.hpp"
#include "lyshift/logscale.hpp"

namespace lyshift {

using index_t = std::int64_t;

inline constexpr index_t kIndexMin = std::numeric_limits<index_t>::min() / 4;
inline constexpr index_t kIndexMax = std::numeric_limits<index_t>::max() / 4;

enum class Side { Unilateral, Bilateral };

// finite list of values starting at first_index; default value elsewhere
struct ExplicitSpec {
  index_t first_index = 1;
  std::vector<double> values;
  double default_value = 1.0;
};

// w_j = pattern[(j - anchor) mod L]
struct PeriodicSpec {
  index_t anchor = 1;
  std::vector<double> pattern;
};

// ordered contiguous intervals, each with one constant value; must tile the domain
struct GeoSegment {
  bool lo_unbounded = false;
  bool hi_unbounded = false;
  index_t lo = 0;
  index_t hi = 0;
  double value = 1.0;
};

struct PiecewiseGeometricSpec {
  std::vector<GeoSegment> segments;
};

using SpecData = std::variant<ExplicitSpec, PeriodicSpec, PiecewiseGeometricSpec>;

class WeightSeq {
 public:
  // Validates and normalizes: throws ZeroWeight, BoundViolation, MalformedSpec.
  static WeightSeq make(Side side, SpecData data, double bound_M);

  Side side() const { return side_; }
  double bound() const { return bound_; }
  const SpecData& data() const { return data_; }

  bool in_domain(index_t j) const { return side_ == Side::Bilateral || j >= 1; }
  index_t domain_lo() const { return side_ == Side::Bilateral ? kIndexMin : 1; }

  // |w_j| in linear scale; throws OutOfDomain
  double weight_mag(index_t j) const;
  // log|w_j|; throws OutOfDomain
  double log_weight(index_t j) const { return std::log(weight_mag(j)); }

 private:
  WeightSeq(Side side, SpecData data, double bound)
      : side_(side), data_(std::move(data)), bound_(bound) {}

  Side side_;
  SpecData data_;
  double bound_;
};

// Prefix-summed log|w| over a materialized index range. Window queries are
// O(1) double-double differences; single-index queries return the stored log
// exactly.
class LogWindowTable {
 public:
  // throws OutOfDomain if [lo, hi] leaves the weight domain, EmptyRange if lo > hi
  LogWindowTable(const WeightSeq& w, index_t lo, index_t hi);

  index_t lo() const { return lo_; }
  index_t hi() const { return hi_; }

  // exact stored log|w_j|
  double log_at(index_t j) const;

  // sum of log|w_j| over [a, b]; throws OutOfDomain outside the table
  double window_sum(index_t a, index_t b) const;

 private:
  index_t lo_, hi_;
  std::vector<double> logs_;
  std::vector<DD> prefix_;  // prefix_[i] = sum of logs_[0..i-1]
};

inline LogWindowTable build_table(const WeightSeq& w, index_t lo, index_t hi) {
  return LogWindowTable(w, lo, hi);
}

}  // namespace lyshift
