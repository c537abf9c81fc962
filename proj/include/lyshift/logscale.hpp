#pragma once

// Signed log-scale scalars. Every magnitude in the library lives as a natural
// log; a coefficient is (sign, log|c|). Exact zero is represented by absent
// map entries at the vector level and by log = -inf where a bare value needs
// a zero state.

#include <cmath>
#include <limits>

namespace lyshift {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Two coefficients of opposite sign whose log-magnitudes agree this closely
// cancel to exact zero instead of producing log(eps)-noise.
inline constexpr double kCancelEps = 1e-13;

struct LogCoeff {
  int sign;        // +1 or -1; never 0 inside a vector (zero entries are absent)
  double log_mag;  // log of the absolute value
};

inline bool is_log_zero(double log_mag) { return std::isinf(log_mag) && log_mag < 0; }

// value -> signed log form; |value| must be finite and nonzero
inline LogCoeff to_log_coeff(double value) {
  return LogCoeff{value < 0 ? -1 : 1, std::log(std::fabs(value))};
}

inline double from_log(double log_mag) { return is_log_zero(log_mag) ? 0.0 : std::exp(log_mag); }

inline double coeff_value(const LogCoeff& c) { return c.sign * std::exp(c.log_mag); }

// a + b in signed log form. Returns sign 0 with log_mag = -inf on exact
// cancellation (caller drops the entry).
inline LogCoeff log_add(const LogCoeff& a, const LogCoeff& b) {
  const LogCoeff& big = (a.log_mag >= b.log_mag) ? a : b;
  const LogCoeff& small = (a.log_mag >= b.log_mag) ? b : a;
  double d = small.log_mag - big.log_mag;  // <= 0
  if (a.sign == b.sign) {
    return LogCoeff{a.sign, big.log_mag + std::log1p(std::exp(d))};
  }
  if (big.log_mag - small.log_mag <= kCancelEps) {
    return LogCoeff{0, kNegInf};
  }
  return LogCoeff{big.sign, big.log_mag + std::log1p(-std::exp(d))};
}

inline LogCoeff log_negate(const LogCoeff& c) { return LogCoeff{-c.sign, c.log_mag}; }

// Streaming log-sum-exp accumulator: sum of exp(l_i) without leaving log scale.
class LogSum {
 public:
  void add(double log_term) {
    if (is_log_zero(log_term)) return;
    if (is_log_zero(max_)) {
      max_ = log_term;
      scaled_ = 1.0;
      return;
    }
    if (log_term <= max_) {
      scaled_ += std::exp(log_term - max_);
    } else {
      scaled_ = scaled_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }
  bool empty() const { return is_log_zero(max_); }
  double value() const { return empty() ? kNegInf : max_ + std::log(scaled_); }

 private:
  double max_ = kNegInf;
  double scaled_ = 0.0;
};

// Double-double accumulation for prefix sums: keeps window differences at
// ulp-of-the-window accuracy even when the running prefix is large.
struct DD {
  double hi = 0.0, lo = 0.0;
};

inline DD dd_add(const DD& a, double b) {
  double s = a.hi + b;
  double bb = s - a.hi;
  double err = (a.hi - (s - bb)) + (b - bb);
  double lo = a.lo + err;
  double hi = s + lo;
  return DD{hi, lo - (hi - s)};
}

inline double dd_diff(const DD& a, const DD& b) { return (a.hi - b.hi) + (a.lo - b.lo); }

}  // namespace lyshift
