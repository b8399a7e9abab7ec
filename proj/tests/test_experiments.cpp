#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "rbmlab/experiments.hpp"
#include "rbmlab/io.hpp"

using namespace rbmlab;

TEST_CASE("partition error curve") {
  SECTION("relative error is exactly k/(n-1)") {
    for (int n : {2, 5, 10}) {
      const auto rows = run_partition_error_curve(n, 7);
      REQUIRE(rows.size() == std::size_t(n));
      for (const auto& r : rows) {
        REQUIRE(r.kl_bits == double(r.k));
        REQUIRE(std::abs(r.relative_error - double(r.k) / double(n - 1)) <=
                1e-12);
      }
      REQUIRE(rows.front().relative_error == 0.0);
      REQUIRE(rows.back().relative_error == 1.0);
    }
  }
  SECTION("same seed, same curve") {
    const auto a = run_partition_error_curve(8, 11);
    const auto b = run_partition_error_curve(8, 11);
    REQUIRE(partition_curve_csv(a) == partition_curve_csv(b));
  }
  SECTION("dimension guard") {
    REQUIRE_THROWS_AS(run_partition_error_curve(1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(run_partition_error_curve(13, 0), std::invalid_argument);
  }
}

TEST_CASE("construction verification harness") {
  SECTION("random mixtures pass for two to four components") {
    for (int components : {2, 3, 4}) {
      const auto result = run_construction_verification(
          4, components, {5.0, 10.0, 20.0, 30.0}, 5, 99, 2);
      REQUIRE(result.all_pass);
      REQUIRE(result.rows.size() == 20);
    }
  }
  SECTION("single-component targets stay below the tolerance") {
    const auto result =
        run_construction_verification(3, 1, {7.0, 30.0}, 8, 5, 1);
    REQUIRE(result.all_pass);
  }
  SECTION("config validation") {
    REQUIRE_THROWS_AS(run_construction_verification(4, 0, {30.0}, 5, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(run_construction_verification(4, 2, {}, 5, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(run_construction_verification(4, 2, {30.0}, 0, 1),
                      std::invalid_argument);
  }
}

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n = 3;
  cfg.m_max = 1;
  cfg.restarts = 3;
  cfg.seed = 21;
  cfg.cd_epochs = 60;
  cfg.cd_epochs2 = 40;
  cfg.ml_epochs = 200;
  return cfg;
}

}  // namespace

TEST_CASE("parity experiment") {
  SECTION("emits every phase for every restart with the right bound") {
    const auto rows = run_parity_experiment(small_config());
    REQUIRE(rows.size() == 2 * 3 * 4);  // (m_max+1) * restarts * phases
    std::map<std::pair<int, int>, int> phases_seen;
    for (const auto& r : rows) {
      REQUIRE(r.bound_bits == theorem2_bound(3, r.m));
      phases_seen[{r.m, r.restart}]++;
    }
    for (const auto& [key, count] : phases_seen) REQUIRE(count == 4);
  }
  SECTION("byte-identical output independent of the worker pool") {
    ExperimentConfig cfg = small_config();
    cfg.threads = 1;
    const auto a = run_parity_experiment(cfg);
    cfg.threads = 4;
    const auto b = run_parity_experiment(cfg);
    REQUIRE(parity_csv(a) == parity_csv(b));
  }
  SECTION("at m=0 the exact ascent settles on the projection divergence") {
    ExperimentConfig cfg = small_config();
    cfg.m_max = 0;
    cfg.restarts = 3;
    cfg.ml_epochs = 3000;
    const auto rows = run_parity_experiment(cfg);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : rows)
      if (r.phase == "ml") best = std::min(best, r.kl_bits);
    REQUIRE(std::abs(best - 1.0) <= 1e-6);
  }
  SECTION("config validation") {
    ExperimentConfig cfg = small_config();
    cfg.m_max = 5;  // above 2^(n-1)
    REQUIRE_THROWS_AS(run_parity_experiment(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.restarts = 0;
    REQUIRE_THROWS_AS(run_parity_experiment(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.n = 7;
    REQUIRE_THROWS_AS(run_parity_experiment(cfg), std::invalid_argument);
  }
}
