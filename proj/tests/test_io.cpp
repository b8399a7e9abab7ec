#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>

#include "rbmlab/io.hpp"

using namespace rbmlab;

TEST_CASE("json round trips") {
  SECTION("face") {
    const Face f(4, 0b1010, 0b0010);
    const nlohmann::json j = f;
    REQUIRE(j.at("n") == 4);
    REQUIRE(j.at("fixed_mask") == 0b1010);
    REQUIRE(j.at("fixed_values") == 0b0010);
    REQUIRE(j.get<Face>() == f);
  }
  SECTION("cubical partitions serialize as faces") {
    const Partition xi = balanced_cubical_partition(3, 2);
    const nlohmann::json j = xi;
    REQUIRE(j.at("blocks")[0].is_object());
    const Partition back = j.get<Partition>();
    REQUIRE(back.blocks == xi.blocks);
    REQUIRE(back.is_cubical);
  }
  SECTION("general partitions serialize as state lists") {
    const Partition xi = exchangeable_partition(3);
    const nlohmann::json j = xi;
    REQUIRE(j.at("blocks")[1].is_array());
    REQUIRE(j.get<Partition>().blocks == xi.blocks);
  }
  SECTION("partial partitions keep their coverage flag") {
    const Partition xi = Partition::from_blocks(2, {{0, 1}}, false);
    const nlohmann::json j = xi;
    const Partition back = j.get<Partition>();
    REQUIRE_FALSE(back.covers_all);
  }
  SECTION("distribution") {
    const auto p = random_distribution(3, 5);
    const nlohmann::json j = p;
    const auto back = j.get<Distribution>();
    REQUIRE(back.n == 3);
    REQUIRE(back.probs == p.probs);
    nlohmann::json bad = {{"n", 2}, {"probs", {0.5, 0.5, 0.5, 0.5}}};
    REQUIRE_THROWS_AS(bad.get<Distribution>(), std::invalid_argument);
  }
  SECTION("mixture of products") {
    MixtureOfProducts mix;
    mix.n = 3;
    mix.components.push_back(
        {0.25, ProductDistribution(Face(3, 0b100, 0b100), {0.5, 0.25})});
    mix.components.push_back(
        {0.75, ProductDistribution(Face(3, 0b100, 0b000), {0.1, 0.9})});
    const nlohmann::json j = mix;
    const auto back = j.get<MixtureOfProducts>();
    REQUIRE(back.components.size() == 2);
    REQUIRE(back.components[0].weight == 0.25);
    REQUIRE(back.components[1].product.theta == std::vector<double>{0.1, 0.9});
    REQUIRE(max_abs_diff(densify(back), densify(mix)) == 0.0);
  }
  SECTION("rbm parameters") {
    const RbmParams p = random_init(3, 2, 2.0, 9);
    const nlohmann::json j = p;
    const auto back = j.get<RbmParams>();
    REQUIRE(back.W == p.W);
    REQUIRE(back.B == p.B);
    REQUIRE(back.C == p.C);
    nlohmann::json bad = j;
    bad["W"] = std::vector<double>{1.0};
    REQUIRE_THROWS_AS(bad.get<RbmParams>(), std::invalid_argument);
  }
  SECTION("projection result") {
    const auto r = project_independence(random_distribution(2, 3));
    const nlohmann::json j = r;
    REQUIRE(j.contains("divergence_bits"));
    REQUIRE(j.at("projection").at("n") == 2);
  }
}

TEST_CASE("csv formatting") {
  SECTION("format_double round trips") {
    for (double x : {1.0 / 3.0, 0.1, 1e-17, 123456.789, 0.0, 2.0}) {
      const std::string s = format_double(x);
      REQUIRE(std::strtod(s.c_str(), nullptr) == x);
    }
  }
  SECTION("distribution csv has one row per state") {
    const auto csv = distribution_csv(Distribution::uniform(2));
    REQUIRE(csv.rfind("state_index,probability\n", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 5);
  }
  SECTION("bound table csv") {
    std::vector<BoundReport> rows = {bound_report(4, 0), bound_report(4, 3)};
    const auto csv = bound_table_csv(rows);
    REQUIRE(csv.find("n,m,theorem2,lower_envelope,upper_envelope,universal") ==
            0);
    REQUIRE(csv.find("4,0,3,") != std::string::npos);
  }
  SECTION("trajectory csv counts epochs from one") {
    const auto csv = trajectory_csv(2, {0.5, 0.25});
    REQUIRE(csv == "restart,epoch,kl_bits\n2,1,0.5\n2,2,0.25\n");
  }
}
