#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "echotdoa/tdoa.hpp"

using namespace echotdoa;

namespace {

const CorrectionConfig kConfig{};  // margin 0.1 m, period 15 ms, 343 m/s
constexpr double kWrap = 343.0 * 0.015;  // 5.145 m
constexpr double kBaseline = 2.0;        // anchor distance used throughout

ToaEstimate toa_of(int id, double t) {
  ToaEstimate e;
  e.anchor_id = id;
  e.toa_mod_s = t;
  return e;
}

}  // namespace

TEST_CASE("raw range difference scales folded arrival times") {
  CHECK(raw_range_diff(toa_of(2, 0.0021), toa_of(1, 0.0011), 343.0) ==
        doctest::Approx(343.0 * 0.001).epsilon(1e-12));
  CHECK_THROWS_AS(raw_range_diff(toa_of(2, 0.1), toa_of(1, 0.1), 0.0),
                  std::invalid_argument);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.015);
  for (int i = 0; i < 200; ++i) {
    double d = raw_range_diff(toa_of(2, u(rng)), toa_of(1, u(rng)), 343.0);
    CHECK(std::abs(d) < kWrap);
  }
}

TEST_CASE("wrap correction at frozen values") {
  CHECK(correct_range_difference(1.5, kBaseline, kConfig) == 1.5);
  CHECK(correct_range_difference(5.0, kBaseline, kConfig) ==
        doctest::Approx(-0.145).epsilon(1e-12));
  CHECK(correct_range_difference(-4.0, kBaseline, kConfig) ==
        doctest::Approx(1.145).epsilon(1e-12));
  // Band edge is inclusive; a hair beyond it wraps.
  CHECK(correct_range_difference(2.1, kBaseline, kConfig) == 2.1);
  CHECK(correct_range_difference(2.1000001, kBaseline, kConfig) ==
        doctest::Approx(-3.0449999).epsilon(1e-12));
}

TEST_CASE("values inside the reachable band pass through bitwise") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2.1, 2.1);
  for (int i = 0; i < 500; ++i) {
    double d = u(rng);
    CHECK(correct_range_difference(d, kBaseline, kConfig) == d);
  }
}

TEST_CASE("correction undoes every wrap over a millimeter grid") {
  // d0 sweeps the reachable band; each wrapped image must come back.
  for (int i = -2100; i <= 2100; ++i) {
    double d0 = static_cast<double>(i) * 1e-3;
    for (double w : {-kWrap, 0.0, kWrap}) {
      double corrected = correct_range_difference(d0 + w, kBaseline, kConfig);
      CHECK(std::abs(corrected - d0) < 1e-9);
    }
  }
}

TEST_CASE("correction is idempotent on achievable raw differences") {
  // Raw differences come from folded arrivals of reachable positions:
  // a true difference inside the band, possibly displaced by one wrap.
  // (Values in the dead zone between band edge and wrap - band cannot
  // occur and are not claimed.)
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.1, 2.1);
  std::uniform_int_distribution<int> pick(-1, 1);
  for (int i = 0; i < 500; ++i) {
    double raw = u(rng) + static_cast<double>(pick(rng)) * kWrap;
    if (std::abs(raw) >= kWrap) {
      continue;
    }
    double once = correct_range_difference(raw, kBaseline, kConfig);
    CHECK(correct_range_difference(once, kBaseline, kConfig) == once);
  }
}

TEST_CASE("undecidable configurations are rejected") {
  CorrectionConfig short_period = kConfig;
  short_period.period_s = 0.01;  // wrap 3.43 m < 2 * (2.0 + 0.1)
  CHECK_THROWS_AS(correct_range_difference(1.0, kBaseline, short_period),
                  std::invalid_argument);
  CHECK_THROWS_AS(correct_range_difference(1.0, -1.0, kConfig),
                  std::invalid_argument);
}

TEST_CASE("a wrapped trial recovers the true difference") {
  // Anchors 2 m apart, mobile at (0.7, 1.3), window latency 4 ms: the
  // second arrival folds past the period boundary and the raw
  // difference lands a full period high.
  Scene s;
  s.anchors = {{1, {-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}},
               {2, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}};
  s.mobile = {0.7, 1.3, 0.0};
  std::vector<ToaEstimate> toas = {
      toa_of(1, 0.0022393395215838767),
      toa_of(2, 0.014889697977879398),
  };

  RangeDiffSet raw = form_corrected_set(toas, s, kConfig, 1, false);
  REQUIRE(raw.diffs.size() == 1);
  CHECK(raw.diffs[0].anchor_id == 2);
  CHECK(raw.diffs[0].diff_m == doctest::Approx(4.3390729505093635).epsilon(1e-12));
  CHECK_FALSE(raw.diffs[0].corrected);

  RangeDiffSet fixed = form_corrected_set(toas, s, kConfig, 1, true);
  CHECK(fixed.reference_id == 1);
  CHECK(fixed.diffs[0].diff_m ==
        doctest::Approx(-0.8059270494906361).epsilon(1e-12));
  CHECK(fixed.diffs[0].corrected);
}

TEST_CASE("set formation validates its inputs") {
  Scene s;
  s.anchors = {{1, {-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}},
               {2, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}};
  s.mobile = {0.0, 1.0, 0.0};
  std::vector<ToaEstimate> toas = {toa_of(1, 0.001), toa_of(2, 0.002)};
  CHECK_THROWS_AS(form_corrected_set(toas, s, kConfig, 9, true),
                  std::out_of_range);
  std::vector<ToaEstimate> one = {toa_of(1, 0.001)};
  CHECK_THROWS_AS(form_corrected_set(one, s, kConfig, 1, true),
                  std::invalid_argument);
}
