#include "lyshift/shiftops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lyshift {

void SparseVector::check_index(index_t i) const {
  if (side_ == Side::Unilateral && i < 1)
    throw OutOfDomain("unilateral vector index " + std::to_string(i) + " must be >= 1");
  if (i < kIndexMin || i > kIndexMax) throw OutOfDomain("vector index out of representable range");
}

SparseVector SparseVector::basis(Side side, index_t i) {
  SparseVector v(side);
  v.check_index(i);
  v.entries_.emplace(i, LogCoeff{1, 0.0});
  return v;
}

SparseVector SparseVector::from_pairs(Side side,
                                      std::span<const std::pair<index_t, double>> pairs) {
  SparseVector v(side);
  for (const auto& [i, value] : pairs) v.add_entry(i, value);
  return v;
}

index_t SparseVector::support_min() const {
  if (entries_.empty()) throw EmptyRange("zero vector has no support");
  return entries_.begin()->first;
}

index_t SparseVector::support_max() const {
  if (entries_.empty()) throw EmptyRange("zero vector has no support");
  return entries_.rbegin()->first;
}

void SparseVector::add_entry(index_t i, double value) {
  if (value == 0.0) return;
  if (!std::isfinite(value)) throw OutOfDomain("vector entry must be finite");
  add_coeff(i, to_log_coeff(value));
}

void SparseVector::add_coeff(index_t i, const LogCoeff& c) {
  check_index(i);
  if (c.sign == 0 || is_log_zero(c.log_mag)) return;
  auto it = entries_.find(i);
  if (it == entries_.end()) {
    entries_.emplace(i, c);
    return;
  }
  LogCoeff sum = log_add(it->second, c);
  if (sum.sign == 0) {
    entries_.erase(it);
  } else {
    it->second = sum;
  }
}

LogCoeff SparseVector::at(index_t i) const {
  auto it = entries_.find(i);
  return it == entries_.end() ? LogCoeff{0, kNegInf} : it->second;
}

SparseVector subtract(const SparseVector& x, const SparseVector& y) {
  if (x.side() != y.side()) throw SideMismatch("subtract: vectors live on different sides");
  SparseVector r = x;
  for (const auto& [i, c] : y.entries()) r.add_coeff(i, log_negate(c));
  return r;
}

SparseVector apply_power(const WeightSeq& w, const SparseVector& x, index_t n) {
  if (w.side() != x.side()) throw SideMismatch("apply_power: vector side differs from weights");
  if (n < 0) throw OutOfDomain("apply_power: negative power");
  if (n == 0 || x.is_zero()) return x;

  // one table covers every surviving window [m-n+1, m]
  index_t lo_needed = x.support_min() - n + 1;
  index_t lo = std::max(lo_needed, w.domain_lo());
  index_t hi = x.support_max();
  SparseVector out = SparseVector::zero(x.side());
  if (lo > hi) return out;  // every entry annihilated
  LogWindowTable table(w, lo, hi);

  for (const auto& [m, c] : x.entries()) {
    index_t target = m - n;
    if (x.side() == Side::Unilateral && target < 1) continue;
    double prod = table.window_sum(m - n + 1, m);
    out.add_coeff(target, LogCoeff{c.sign, c.log_mag + prod});
  }
  return out;
}

double log_norm(const SparseVector& x, Norm p) {
  if (x.is_zero()) return kNegInf;
  switch (p) {
    case Norm::L1: {
      LogSum s;
      for (const auto& [i, c] : x.entries()) s.add(c.log_mag);
      return s.value();
    }
    case Norm::L2: {
      LogSum s;
      for (const auto& [i, c] : x.entries()) s.add(2.0 * c.log_mag);
      return 0.5 * s.value();
    }
    case Norm::Sup: {
      double m = kNegInf;
      for (const auto& [i, c] : x.entries()) m = std::max(m, c.log_mag);
      return m;
    }
  }
  return kNegInf;
}

std::vector<double> pair_distance_along(const WeightSeq& w, const SparseVector& x,
                                        const SparseVector& y, std::span<const index_t> times,
                                        Norm p) {
  std::vector<double> out;
  out.reserve(times.size());
  for (index_t t : times) {
    SparseVector bx = apply_power(w, x, t);
    SparseVector by = apply_power(w, y, t);
    out.push_back(log_norm(subtract(bx, by), p));
  }
  return out;
}

}  // namespace lyshift
