#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "echotdoa/config.hpp"
#include "echotdoa/experiment.hpp"

using namespace echotdoa;

namespace {

// A deliberately tiny sweep so unit tests stay fast.
ExperimentConfig coarse_config() {
  ExperimentConfig c = default_experiment_config();
  c.pitch_m = 1.0;  // 5 x 5 grid over the default 4 m x 4 m area
  c.latencies_s = {0.0, 0.0007, 0.0148};
  c.sigma = 0.01;
  c.master_seed = 77;
  return c;
}

}  // namespace

TEST_CASE("trial seeds are deterministic and decorrelated") {
  CHECK(trial_seed(1, 0, 0) == trial_seed(1, 0, 0));
  CHECK(trial_seed(1, 0, 0) != trial_seed(1, 0, 1));
  CHECK(trial_seed(1, 0, 0) != trial_seed(1, 1, 0));
  CHECK(trial_seed(1, 0, 0) != trial_seed(2, 0, 0));
}

TEST_CASE("a noise-free trial at a frontal point is millimeter accurate") {
  ExperimentConfig c = default_experiment_config();
  c.sigma = 0.0;
  double err = run_trial(c, {0.7, 1.3, 0.0}, 0.004, trial_seed(c.master_seed, 0, 0));
  CHECK(err < 1e-3);
}

TEST_CASE("a noise-free tdoa trial resolves well under the 30 us threshold") {
  ExperimentConfig c = default_experiment_config();
  CliOverrides ov;
  ov.mode = ExperimentMode::tdoa_2anchor;
  c = parse_config_text("", "<test>", ov);
  c.sigma = 0.0;
  double err = run_trial(c, {0.7, 1.3, 0.0}, 0.004, 1);
  CHECK(err < 5e-6);
}

TEST_CASE("a trial at an anchor position reports +inf instead of throwing") {
  ExperimentConfig c = default_experiment_config();
  c.sigma = 0.0;
  double err = run_trial(c, {-1.0, 0.0, 0.0}, 0.0, 1);
  CHECK(std::isinf(err));
}

TEST_CASE("grid layout, ordering and trial bookkeeping") {
  ExperimentConfig c = coarse_config();
  GridResult r = grid_sweep_serial(c);
  CHECK(r.nx == 5);
  CHECK(r.ny == 5);
  REQUIRE(r.points.size() == 25);
  REQUIRE(r.per_trial_errors.size() == 25 * 3);
  // x varies fastest; y ascends.
  CHECK(r.points[0].x_m == -2.0);
  CHECK(r.points[0].y_m == -2.0);
  CHECK(r.points[1].x_m == -1.0);
  CHECK(r.points[1].y_m == -2.0);
  CHECK(r.points[5].x_m == -2.0);
  CHECK(r.points[5].y_m == -1.0);
  CHECK(r.points[24].x_m == 2.0);
  CHECK(r.points[24].y_m == 2.0);
  // Per-trial rows follow the same point order, latencies ascending.
  CHECK(r.per_trial_errors[0].latency_s == 0.0);
  CHECK(r.per_trial_errors[1].latency_s == 0.0007);
  CHECK(r.per_trial_errors[2].latency_s == 0.0148);
  CHECK(r.per_trial_errors[3].x_m == -1.0);
  CHECK(!r.metadata.empty());
}

TEST_CASE("error fractions recompute from the per-trial errors") {
  ExperimentConfig c = coarse_config();
  GridResult r = grid_sweep_serial(c);
  std::size_t n_lat = c.latencies_s.size();
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    std::size_t events = 0;
    for (std::size_t il = 0; il < n_lat; ++il) {
      double e = r.per_trial_errors[p * n_lat + il].error;
      if (!(e <= c.position_error_threshold_m)) {
        ++events;
      }
    }
    CHECK(r.points[p].error_fraction ==
          static_cast<double>(events) / static_cast<double>(n_lat));
  }
}

TEST_CASE("sweeps are reproducible and independent of threading") {
  ExperimentConfig c = coarse_config();
  GridResult serial = grid_sweep_serial(c);
  GridResult again = grid_sweep_serial(c);
  c.threads = 3;  // oversubscribed on purpose
  GridResult parallel = grid_sweep(c);

  REQUIRE(serial.per_trial_errors.size() == again.per_trial_errors.size());
  REQUIRE(serial.per_trial_errors.size() == parallel.per_trial_errors.size());
  for (std::size_t i = 0; i < serial.per_trial_errors.size(); ++i) {
    CHECK(serial.per_trial_errors[i].error == again.per_trial_errors[i].error);
    CHECK(serial.per_trial_errors[i].error ==
          parallel.per_trial_errors[i].error);
  }
  for (std::size_t p = 0; p < serial.points.size(); ++p) {
    CHECK(serial.points[p].error_fraction == parallel.points[p].error_fraction);
  }
}

TEST_CASE("degenerate areas still sweep") {
  ExperimentConfig c = coarse_config();
  c.sigma = 0.0;
  c.area = {0.25, 0.25, 1.0, 1.0};  // single point
  c.latencies_s = {0.002};
  GridResult r = grid_sweep(c);
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0].x_m == 0.25);
  CHECK(r.points[0].y_m == 1.0);
  CHECK(r.points[0].error_fraction == 0.0);
}

TEST_CASE("empirical cdf of a small sample") {
  std::vector<double> sample = {3.0, 1.0, 2.0, 2.0};
  auto cdf = empirical_cdf(sample);
  REQUIRE(cdf.size() == 3);
  CHECK(cdf[0] == std::pair<double, double>{1.0, 0.25});
  CHECK(cdf[1] == std::pair<double, double>{2.0, 0.75});
  CHECK(cdf[2] == std::pair<double, double>{3.0, 1.0});

  std::vector<double> with_inf = {1.0,
                                  std::numeric_limits<double>::infinity()};
  auto cdf2 = empirical_cdf(with_inf);
  REQUIRE(cdf2.size() == 2);
  CHECK(cdf2[0].second == 0.5);
  CHECK(std::isinf(cdf2[1].first));
  CHECK(cdf2[1].second == 1.0);

  CHECK_THROWS_AS(empirical_cdf(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("slot-equivalent range") {
  CHECK(ble_slot_range_equivalent(343.0, 625e-6) == doctest::Approx(0.214375));
  CHECK(ble_slot_range_equivalent(343.0, 0.0) == 0.0);
}

TEST_CASE("config echo round-trips through the parser") {
  ExperimentConfig c = default_experiment_config();
  std::string echo = describe_config(c);
  ExperimentConfig back = parse_config_text(echo, "<echo>");
  CHECK(describe_config(back) == echo);

  // A customized config survives the round trip too.
  ExperimentConfig custom = default_experiment_config();
  custom.mode = ExperimentMode::tdoa_2anchor;
  custom.scene.anchors = {{1, {-0.4, 0.0, 0.0}, {0.0, 1.0, 0.0}},
                          {2, {0.4, 0.0, 0.0}, {0.0, 1.0, 0.0}}};
  custom.sigma = 0.003;
  custom.latencies_s = {0.0, 0.0017, 0.0031};
  custom.attenuation.directivity_db = {{0.0, 0.0}, {90.0, -12.0}};
  custom.margin_m = 0.25;
  custom.master_seed = 424242;
  std::string echo2 = describe_config(custom);
  ExperimentConfig back2 = parse_config_text(echo2, "<echo>");
  CHECK(describe_config(back2) == echo2);
  CHECK(back2.mode == ExperimentMode::tdoa_2anchor);
  CHECK(back2.scene.anchors.size() == 2);
  CHECK(back2.latencies_s == custom.latencies_s);
}
