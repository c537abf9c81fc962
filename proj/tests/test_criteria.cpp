#include <cmath>

#include "doctest.h"
#include "lyshift/criteria.hpp"
#include "lyshift/errors.hpp"

using namespace lyshift;

namespace {

constexpr double kLn2 = 0.6931471805599453;

WeightSeq const_weight(Side side, double v) {
  PeriodicSpec p;
  p.pattern = {v};
  return WeightSeq::make(side, p, std::max(std::abs(v), 1.0));
}

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

}  // namespace

TEST_CASE("unilateral verdict: divergence alone decides") {
  const AnalysisParams params;
  const WeightSeq w2 = const_weight(Side::Unilateral, 2.0);
  const ChaosVerdict v = unilateral_verdict(w2, params);
  CHECK(v.property == Property::DenseUniformLiYorke);
  CHECK(v.status == Status::Established);
  CHECK(v.side == Side::Unilateral);
  CHECK(v.failed_conjuncts.empty());
  REQUIRE(v.divergence.has_value());
  CHECK(v.divergence->n == 58);
  CHECK(v.divergence->k == 59);
  CHECK(!v.decay.has_value());
  CHECK(replay_certificates(w2, v));

  CHECK_THROWS_AS(unilateral_verdict(two_segment(), params), WrongSide);
}

TEST_CASE("unilateral verdict: unit weights stay not-observed at every horizon") {
  const WeightSeq w1 = const_weight(Side::Unilateral, 1.0);
  for (index_t horizon : {10, 100, 1000}) {
    AnalysisParams params;
    params.horizon = horizon;
    const ChaosVerdict v = unilateral_verdict(w1, params);
    CHECK(v.status == Status::NotObservedWithinHorizon);
    REQUIRE(v.failed_conjuncts.size() == 1);
    CHECK(v.failed_conjuncts[0] == "divergence");
    CHECK(v.max_window_log_product == 0.0);
    CHECK(!v.divergence.has_value());
  }
}

TEST_CASE("a verdict is horizon-relative, never a refutation") {
  // doubling weights certify at theta = 40 but a threshold beyond the horizon
  // yields not-observed, with the best window reported as progress
  AnalysisParams params;
  params.horizon = 50;
  params.theta_div = 40.0;
  const WeightSeq w2 = const_weight(Side::Unilateral, 2.0);
  const ChaosVerdict v = unilateral_verdict(w2, params);
  CHECK(v.status == Status::NotObservedWithinHorizon);
  CHECK(v.max_window_log_product == doctest::Approx(50 * kLn2).epsilon(1e-12));
  CHECK(v.max_window_n == 50);

  params.horizon = 10000;
  CHECK(unilateral_verdict(w2, params).status == Status::Established);
}

TEST_CASE("bilateral verdict: decay and divergence are separate conjuncts") {
  const AnalysisParams params;

  const ChaosVerdict both = bilateral_verdict(two_segment(), params);
  CHECK(both.status == Status::Established);
  CHECK(both.failed_conjuncts.empty());
  REQUIRE(both.divergence.has_value());
  REQUIRE(both.decay.has_value());
  CHECK(both.divergence->n == 58);
  CHECK(both.decay->entries.size() == 8);
  CHECK(both.decay->entries[0].n_m == 58);
  CHECK(replay_certificates(two_segment(), both));

  const ChaosVerdict no_decay = bilateral_verdict(const_weight(Side::Bilateral, 2.0), params);
  CHECK(no_decay.status == Status::NotObservedWithinHorizon);
  REQUIRE(no_decay.failed_conjuncts.size() == 1);
  CHECK(no_decay.failed_conjuncts[0] == "prefix_decay");
  CHECK(no_decay.divergence.has_value());  // the passing conjunct is still evidenced

  const ChaosVerdict no_div = bilateral_verdict(const_weight(Side::Bilateral, 0.5), params);
  CHECK(no_div.status == Status::NotObservedWithinHorizon);
  REQUIRE(no_div.failed_conjuncts.size() == 1);
  CHECK(no_div.failed_conjuncts[0] == "divergence");
  CHECK(no_div.decay.has_value());

  const ChaosVerdict neither = bilateral_verdict(const_weight(Side::Bilateral, 1.0), params);
  REQUIRE(neither.failed_conjuncts.size() == 2);
  CHECK(neither.failed_conjuncts[0] == "divergence");  // sorted order
  CHECK(neither.failed_conjuncts[1] == "prefix_decay");

  CHECK_THROWS_AS(bilateral_verdict(const_weight(Side::Unilateral, 2.0), params), WrongSide);
}

TEST_CASE("sensitivity is established exactly when a divergence window exists") {
  const AnalysisParams params;
  CHECK(sensitivity_verdict(const_weight(Side::Unilateral, 2.0), params).status ==
        Status::Established);
  CHECK(sensitivity_verdict(two_segment(), params).status == Status::Established);
  const ChaosVerdict flat = sensitivity_verdict(const_weight(Side::Unilateral, 1.0), params);
  CHECK(flat.status == Status::NotObservedWithinHorizon);
  CHECK(flat.property == Property::Sensitive);
}

TEST_CASE("unilateral null orbits: annihilation gives exact zeros unconditionally") {
  AnalysisParams params;
  params.support_bound = 5;
  // even the non-chaotic unit shift has dense null orbits
  for (double c : {1.0, 2.0, 0.5}) {
    const ChaosVerdict v = dense_null_orbit_verdict(const_weight(Side::Unilateral, c), params);
    CHECK(v.property == Property::DenseNullOrbits);
    CHECK(v.status == Status::Established);
    REQUIRE(v.null_checks.size() == 5);
    for (const auto& chk : v.null_checks) {
      CHECK(chk.exact_zero);
      CHECK(chk.ok);
      CHECK(chk.time == chk.basis_index);  // e_j dies exactly at power j
      CHECK(chk.log_value == kNegInf);
    }
  }
}

TEST_CASE("bilateral null orbits ride the decay certificate with a band shift") {
  AnalysisParams params;
  params.support_bound = 5;
  const ChaosVerdict v = dense_null_orbit_verdict(two_segment(), params);
  CHECK(v.status == Status::Established);
  REQUIRE(v.null_times.size() == 8);
  // times are the decay lengths shifted by the band half-width s = 5
  const index_t expect[8] = {63, 121, 179, 236, 294, 352, 409, 467};
  for (int m = 0; m < 8; ++m) CHECK(v.null_times[static_cast<std::size_t>(m)] == expect[m]);
  for (const auto& chk : v.null_checks) {
    CHECK(chk.ok);
    CHECK(chk.log_value <= chk.log_bound + 1e-9);
  }

  const ChaosVerdict none = dense_null_orbit_verdict(const_weight(Side::Bilateral, 2.0), params);
  CHECK(none.status == Status::NotObservedWithinHorizon);
  CHECK(none.null_times.empty());
}

TEST_CASE("certificate replay rejects a tampered verdict") {
  const AnalysisParams params;
  const WeightSeq w = two_segment();
  ChaosVerdict v = bilateral_verdict(w, params);
  REQUIRE(v.divergence.has_value());
  v.divergence->log_product += 1e-6;
  CHECK(!replay_certificates(w, v));

  v = bilateral_verdict(w, params);
  REQUIRE(v.decay.has_value());
  v.decay->entries[2].n_m -= 1;
  CHECK(!replay_certificates(w, v));
}

TEST_CASE("analyze_weights dispatches by side and bundles all three verdicts") {
  const AnalysisParams params;
  const Analysis u = analyze_weights(const_weight(Side::Unilateral, 2.0), params);
  CHECK(u.chaos.property == Property::DenseUniformLiYorke);
  CHECK(u.chaos.status == Status::Established);
  CHECK(u.sensitivity.status == Status::Established);
  CHECK(u.null_orbits.status == Status::Established);

  const Analysis b = analyze_weights(two_segment(), params);
  CHECK(b.chaos.status == Status::Established);
  REQUIRE(b.chaos.decay.has_value());

  // certificates agree with the side-specific entry points
  const ChaosVerdict direct = bilateral_verdict(two_segment(), params);
  CHECK(b.chaos.divergence->k == direct.divergence->k);
  CHECK(b.chaos.decay->entries.size() == direct.decay->entries.size());
}
