#include "lyshift/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lyshift {

namespace {

void check_value(double v, double bound, const char* what) {
  if (!std::isfinite(v)) throw MalformedSpec(std::string(what) + ": non-finite weight value");
  if (v == 0.0) throw ZeroWeight(std::string(what) + ": weight value is zero");
  if (std::fabs(v) > bound)
    throw BoundViolation(std::string(what) + ": |value| exceeds declared bound_M");
}

}  // namespace

WeightSeq WeightSeq::make(Side side, SpecData data, double bound_M) {
  if (!std::isfinite(bound_M) || bound_M <= 0.0)
    throw MalformedSpec("bound_M must be finite and positive");

  if (auto* e = std::get_if<ExplicitSpec>(&data)) {
    if (e->values.empty()) throw MalformedSpec("explicit spec: empty value list");
    if (side == Side::Unilateral && e->first_index < 1)
      throw MalformedSpec("explicit spec: unilateral first_index must be >= 1");
    if (e->first_index < kIndexMin ||
        e->first_index > kIndexMax - static_cast<index_t>(e->values.size()))
      throw MalformedSpec("explicit spec: index range too large");
    for (double& v : e->values) {
      check_value(v, bound_M, "explicit spec");
      v = std::fabs(v);  // only moduli are consumed
    }
    check_value(e->default_value, bound_M, "explicit spec default");
    e->default_value = std::fabs(e->default_value);
  } else if (auto* p = std::get_if<PeriodicSpec>(&data)) {
    if (p->pattern.empty()) throw MalformedSpec("periodic spec: empty pattern");
    if (side == Side::Unilateral && p->anchor < 1)
      throw MalformedSpec("periodic spec: unilateral anchor must be >= 1");
    for (double& v : p->pattern) {
      check_value(v, bound_M, "periodic spec");
      v = std::fabs(v);
    }
  } else {
    auto& g = std::get<PiecewiseGeometricSpec>(data);
    if (g.segments.empty()) throw MalformedSpec("piecewise spec: no segments");
    for (std::size_t i = 0; i < g.segments.size(); ++i) {
      GeoSegment& s = g.segments[i];
      check_value(s.value, bound_M, "piecewise spec");
      s.value = std::fabs(s.value);
      bool first = (i == 0), last = (i + 1 == g.segments.size());
      if (s.lo_unbounded && !first)
        throw MalformedSpec("piecewise spec: interior segment with unbounded lo");
      if (s.hi_unbounded && !last)
        throw MalformedSpec("piecewise spec: interior segment with unbounded hi");
      if (!s.lo_unbounded && !s.hi_unbounded && s.lo > s.hi)
        throw MalformedSpec("piecewise spec: segment lo > hi");
      if (!first) {
        const GeoSegment& prev = g.segments[i - 1];
        if (prev.hi_unbounded || s.lo_unbounded || s.lo != prev.hi + 1)
          throw MalformedSpec("piecewise spec: segments must be contiguous and ordered");
      }
    }
    // must tile the whole domain
    const GeoSegment& first = g.segments.front();
    const GeoSegment& last = g.segments.back();
    if (side == Side::Unilateral) {
      if (first.lo_unbounded || first.lo != 1)
        throw MalformedSpec("piecewise spec: unilateral segments must start at j = 1");
    } else if (!first.lo_unbounded) {
      throw MalformedSpec("piecewise spec: bilateral segments must start unbounded");
    }
    if (!last.hi_unbounded)
      throw MalformedSpec("piecewise spec: last segment must be unbounded above");
  }

  return WeightSeq(side, std::move(data), bound_M);
}

double WeightSeq::weight_mag(index_t j) const {
  if (!in_domain(j))
    throw OutOfDomain("weight index " + std::to_string(j) + " outside unilateral domain j >= 1");

  if (const auto* e = std::get_if<ExplicitSpec>(&data_)) {
    index_t off = j - e->first_index;
    if (off >= 0 && off < static_cast<index_t>(e->values.size()))
      return e->values[static_cast<std::size_t>(off)];
    return e->default_value;
  }
  if (const auto* p = std::get_if<PeriodicSpec>(&data_)) {
    index_t L = static_cast<index_t>(p->pattern.size());
    index_t r = (j - p->anchor) % L;
    if (r < 0) r += L;
    return p->pattern[static_cast<std::size_t>(r)];
  }
  const auto& g = std::get<PiecewiseGeometricSpec>(data_);
  for (const GeoSegment& s : g.segments) {
    bool above_lo = s.lo_unbounded || j >= s.lo;
    bool below_hi = s.hi_unbounded || j <= s.hi;
    if (above_lo && below_hi) return s.value;
  }
  // unreachable: validated segments tile the domain
  throw OutOfDomain("weight index " + std::to_string(j) + " not covered by any segment");
}

LogWindowTable::LogWindowTable(const WeightSeq& w, index_t lo, index_t hi) : lo_(lo), hi_(hi) {
  if (lo > hi) throw EmptyRange("table range is empty");
  if (!w.in_domain(lo)) throw OutOfDomain("table range leaves the weight domain");
  std::size_t n = static_cast<std::size_t>(hi - lo + 1);
  logs_.resize(n);
  prefix_.resize(n + 1);
  DD acc;
  prefix_[0] = acc;
  for (std::size_t i = 0; i < n; ++i) {
    logs_[i] = w.log_weight(lo + static_cast<index_t>(i));
    acc = dd_add(acc, logs_[i]);
    prefix_[i + 1] = acc;
  }
}

double LogWindowTable::log_at(index_t j) const {
  if (j < lo_ || j > hi_) throw OutOfDomain("index outside window table range");
  return logs_[static_cast<std::size_t>(j - lo_)];
}

double LogWindowTable::window_sum(index_t a, index_t b) const {
  if (a > b) throw EmptyRange("window [a, b] is empty");
  if (a < lo_ || b > hi_) throw OutOfDomain("window outside table range");
  if (a == b) return logs_[static_cast<std::size_t>(a - lo_)];
  return dd_diff(prefix_[static_cast<std::size_t>(b - lo_ + 1)],
                 prefix_[static_cast<std::size_t>(a - lo_)]);
}

}  // namespace lyshift
