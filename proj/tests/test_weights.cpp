#include <cmath>
#include <vector>

#include "doctest.h"
#include "lyshift/errors.hpp"
#include "lyshift/weights.hpp"
#include "oracles.hpp"

using namespace lyshift;

namespace {

WeightSeq two_segment() {
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

constexpr double kLn2 = 0.6931471805599453;

}  // namespace

TEST_CASE("explicit spec evaluates listed values and the default elsewhere") {
  ExplicitSpec e;
  e.first_index = -2;
  e.values = {0.5, -1.5, 2.0, 3.0};
  e.default_value = 1.0;
  const WeightSeq w = WeightSeq::make(Side::Bilateral, e, 3.0);
  CHECK(w.weight_mag(-2) == 0.5);
  CHECK(w.weight_mag(-1) == 1.5);  // sign dropped at ingestion
  CHECK(w.weight_mag(0) == 2.0);
  CHECK(w.weight_mag(1) == 3.0);
  CHECK(w.weight_mag(2) == 1.0);
  CHECK(w.weight_mag(-100) == 1.0);
  CHECK(w.log_weight(0) == std::log(2.0));
}

TEST_CASE("periodic spec cycles its pattern on both sides of the anchor") {
  PeriodicSpec p;
  p.anchor = -1;
  p.pattern = {2.0, 0.5, 3.0};
  const WeightSeq w = WeightSeq::make(Side::Bilateral, p, 3.0);
  for (index_t j = -20; j <= 20; ++j) {
    const index_t r = ((j - (-1)) % 3 + 3) % 3;
    const double expect = p.pattern[static_cast<std::size_t>(r)];
    CHECK(w.weight_mag(j) == expect);
  }
}

TEST_CASE("piecewise spec evaluates per segment and must tile the domain") {
  const WeightSeq w = two_segment();
  CHECK(w.weight_mag(-7) == 0.5);
  CHECK(w.weight_mag(0) == 0.5);
  CHECK(w.weight_mag(1) == 2.0);
  CHECK(w.weight_mag(123456) == 2.0);

  PiecewiseGeometricSpec gap;
  GeoSegment a;
  a.lo_unbounded = true;
  a.hi = 0;
  GeoSegment b;
  b.lo = 2;  // leaves j = 1 uncovered
  b.hi_unbounded = true;
  gap.segments = {a, b};
  CHECK_THROWS_AS(WeightSeq::make(Side::Bilateral, gap, 2.0), MalformedSpec);
}

TEST_CASE("construction rejects zero weights, bound violations, bad shapes") {
  ExplicitSpec z;
  z.values = {1.0, 0.0};
  CHECK_THROWS_AS(WeightSeq::make(Side::Unilateral, z, 2.0), ZeroWeight);

  ExplicitSpec big;
  big.values = {1.0, 2.5};
  CHECK_THROWS_AS(WeightSeq::make(Side::Unilateral, big, 2.0), BoundViolation);

  ExplicitSpec def_zero;
  def_zero.values = {1.0};
  def_zero.default_value = 0.0;
  CHECK_THROWS_AS(WeightSeq::make(Side::Unilateral, def_zero, 2.0), ZeroWeight);

  ExplicitSpec neg_first;
  neg_first.first_index = 0;
  neg_first.values = {1.0};
  CHECK_THROWS_AS(WeightSeq::make(Side::Unilateral, neg_first, 2.0), MalformedSpec);

  PeriodicSpec empty;
  CHECK_THROWS_AS(WeightSeq::make(Side::Unilateral, empty, 2.0), MalformedSpec);
}

TEST_CASE("unilateral domain excludes j <= 0") {
  PeriodicSpec p;
  p.pattern = {2.0};
  const WeightSeq w = WeightSeq::make(Side::Unilateral, p, 2.0);
  CHECK(w.in_domain(1));
  CHECK(!w.in_domain(0));
  CHECK_THROWS_AS(w.weight_mag(0), OutOfDomain);
  CHECK_THROWS_AS(w.weight_mag(-5), OutOfDomain);
}

TEST_CASE("window table: two-segment sum over [-2, 3] cancels exactly") {
  const WeightSeq w = two_segment();
  const LogWindowTable t = build_table(w, -10, 10);
  CHECK(std::abs(t.window_sum(-2, 3)) < 1e-12);
  CHECK(std::abs(t.window_sum(1, 3) - 3 * kLn2) < 1e-14);
  CHECK(std::abs(t.window_sum(-2, 0) + 3 * kLn2) < 1e-14);
  CHECK(t.log_at(0) == w.log_weight(0));
  CHECK(t.log_at(5) == w.log_weight(5));
}

TEST_CASE("window table matches compensated direct summation on random specs") {
  oracle::SpecGen gen(20240901u);
  for (int trial = 0; trial < 20; ++trial) {
    const Side side = trial % 2 ? Side::Unilateral : Side::Bilateral;
    const WeightSeq w = gen.explicit_spec(side, 200, 0.1, 3.0);
    const index_t lo = side == Side::Unilateral ? 1 : -120;
    const index_t hi = 120;
    const LogWindowTable t = build_table(w, lo, hi);
    for (int rep = 0; rep < 50; ++rep) {
      const index_t a = gen.pick_index(lo, hi);
      const index_t b = gen.pick_index(a, hi);
      CHECK(std::abs(t.window_sum(a, b) - oracle::direct_window_sum(w, a, b)) < 1e-12);
    }
  }
}

TEST_CASE("window table rejects empty and out-of-range queries") {
  const WeightSeq w = two_segment();
  const LogWindowTable t = build_table(w, -5, 5);
  CHECK_THROWS_AS(t.window_sum(3, 2), EmptyRange);
  CHECK_THROWS_AS(t.window_sum(-6, 0), OutOfDomain);
  CHECK_THROWS_AS(t.window_sum(0, 6), OutOfDomain);
  CHECK_THROWS_AS(t.log_at(6), OutOfDomain);
  CHECK_THROWS_AS(build_table(w, 5, -5), EmptyRange);

  PeriodicSpec p;
  p.pattern = {2.0};
  const WeightSeq u = WeightSeq::make(Side::Unilateral, p, 2.0);
  CHECK_THROWS_AS(build_table(u, 0, 5), OutOfDomain);
}
