#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "echotdoa/geometry.hpp"

using namespace echotdoa;

namespace {

Scene two_anchor_scene() {
  Scene s;
  s.anchors = {{1, {-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}},
               {2, {0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}};
  s.mobile = {0.5, 1.5, 0.0};
  return s;
}

}  // namespace

TEST_CASE("range matches hand-computed distances") {
  CHECK(range({-1.0, 0.0, 0.0}, {0.5, 1.5, 0.0}) ==
        doctest::Approx(2.1213203435596424).epsilon(1e-12));
  CHECK(range({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(range({0.0, 0.0, 0.0}, {3.0, 4.0, 0.0}) == doctest::Approx(5.0));
}

TEST_CASE("true range difference matches the worked two-anchor case") {
  Scene s = two_anchor_scene();
  CHECK(true_range_diff(s, 1, 2) ==
        doctest::Approx(0.5401815134754526).epsilon(1e-12));
  CHECK(true_range_diff(s, 1, 1) == 0.0);
}

TEST_CASE("range differences are antisymmetric and bounded by the baseline") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    Scene s;
    s.anchors = {{1, {u(rng), u(rng), 0.0}}, {2, {u(rng), u(rng), 0.0}}};
    if (range(s.anchors[0].position, s.anchors[1].position) < 1e-6) {
      continue;
    }
    s.mobile = {u(rng), u(rng), 0.0};
    double d12 = true_range_diff(s, 1, 2);
    double d21 = true_range_diff(s, 2, 1);
    CHECK(std::abs(d12 + d21) < 1e-12);
    double baseline = range(s.anchors[0].position, s.anchors[1].position);
    CHECK(std::abs(d12) <= baseline + 1e-12);
  }
}

TEST_CASE("range differences are invariant under rigid motions") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < 100; ++i) {
    Scene s;
    s.anchors = {{1, {u(rng), u(rng), 0.0}}, {2, {u(rng), u(rng), 0.0}}};
    if (range(s.anchors[0].position, s.anchors[1].position) < 1e-6) {
      continue;
    }
    s.mobile = {u(rng), u(rng), 0.0};
    double before = true_range_diff(s, 1, 2);

    double a = ang(rng);
    Point3 shift{u(rng), u(rng), 0.0};
    auto move = [&](const Point3& p) {
      return Point3{std::cos(a) * p.x - std::sin(a) * p.y + shift.x,
                    std::sin(a) * p.x + std::cos(a) * p.y + shift.y, 0.0};
    };
    Scene t = s;
    t.anchors[0].position = move(s.anchors[0].position);
    t.anchors[1].position = move(s.anchors[1].position);
    t.mobile = move(s.mobile);
    CHECK(true_range_diff(t, 1, 2) == doctest::Approx(before).epsilon(1e-9));
  }
}

TEST_CASE("incidence angle covers boresight, broadside and rear") {
  Anchor a{1, {0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  CHECK(incidence_angle(a, {0.0, 2.0, 0.0}) == doctest::Approx(0.0));
  CHECK(incidence_angle(a, {3.0, 0.0, 0.0}) ==
        doctest::Approx(std::numbers::pi / 2.0));
  CHECK(incidence_angle(a, {0.0, -1.0, 0.0}) ==
        doctest::Approx(std::numbers::pi));
  CHECK_THROWS_AS(incidence_angle(a, {0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("scene validation rejects broken deployments") {
  Scene good = two_anchor_scene();
  CHECK_NOTHROW(good.validate());

  Scene one = good;
  one.anchors.resize(1);
  CHECK_THROWS_AS(one.validate(), std::invalid_argument);

  Scene dup_id = good;
  dup_id.anchors[1].id = 1;
  CHECK_THROWS_AS(dup_id.validate(), std::invalid_argument);

  Scene coincident = good;
  coincident.anchors[1].position = coincident.anchors[0].position;
  CHECK_THROWS_AS(coincident.validate(), std::invalid_argument);

  Scene tilted = good;
  tilted.anchors[0].boresight = {0.0, 2.0, 0.0};
  CHECK_THROWS_AS(tilted.validate(), std::invalid_argument);

  Scene still = good;
  still.speed_of_sound = 0.0;
  CHECK_THROWS_AS(still.validate(), std::invalid_argument);
}

TEST_CASE("anchor lookup by id") {
  Scene s = two_anchor_scene();
  CHECK(s.anchor(2).position.x == 0.0);
  CHECK_THROWS_AS(s.anchor(99), std::out_of_range);
}
