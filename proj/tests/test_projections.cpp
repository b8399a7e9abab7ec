#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "rbmlab/projections.hpp"

using namespace rbmlab;

namespace {

const Partition& two_edge_square_partition() {
  static const Partition xi =
      Partition::from_faces(2, {Face(2, 0b10, 0b00), Face(2, 0b10, 0b10)});
  return xi;
}

}  // namespace

TEST_CASE("kl divergence basics") {
  SECTION("delta against uniform costs n bits") {
    for (int n = 1; n <= 6; ++n)
      for (state_t x = 0; x < cube_size(n); ++x)
        REQUIRE(kl_bits(Distribution::delta(n, x), Distribution::uniform(n)) ==
                double(n));
  }
  SECTION("kl(p, p) = 0") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto p = random_distribution(3, seed);
      REQUIRE(kl_bits(p, p) == 0.0);
    }
  }
  SECTION("half-half pair against the uniform square") {
    Distribution p(2, {0.5, 0.0, 0.0, 0.5});
    REQUIRE(kl_bits(p, Distribution::uniform(2)) == 1.0);
  }
  SECTION("support escape gives infinity") {
    Distribution q(2, {1.0, 0.0, 0.0, 0.0});
    REQUIRE(std::isinf(kl_bits(Distribution::delta(2, 3), q)));
  }
  SECTION("dimension mismatch throws") {
    REQUIRE_THROWS_AS(
        kl_bits(Distribution::uniform(2), Distribution::uniform(3)),
        std::invalid_argument);
  }
  SECTION("non-negative, zero only at equality") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto p = random_distribution(3, derive_seed(1, seed));
      const auto q = random_distribution(3, derive_seed(2, seed));
      const double d = kl_bits(p, q);
      REQUIRE(d >= 0.0);
      if (max_abs_diff(p, q) > 1e-12) REQUIRE(d > 0.0);
    }
  }
}

TEST_CASE("independence projection") {
  SECTION("products project onto themselves") {
    const auto p = densify(
        ProductDistribution(Face::full_cube(3), {0.2, 0.7, 0.55}));
    const auto r = project_independence(p);
    REQUIRE(r.divergence_bits <= 1e-13);
    REQUIRE(max_abs_diff(r.projection, p) <= 1e-13);
  }
  SECTION("complementary pair projects to uniform at n-1 bits") {
    for (int n = 2; n <= 5; ++n) {
      const state_t x = 0b0101 & cube_mask(n);
      std::vector<double> w(cube_size(n), 0.0);
      w[x] = 0.5;
      w[x ^ cube_mask(n)] = 0.5;
      const auto r = project_independence(Distribution(n, std::move(w)));
      REQUIRE(max_abs_diff(r.projection, Distribution::uniform(n)) <= 1e-14);
      REQUIRE(r.divergence_bits == Catch::Approx(double(n - 1)).margin(1e-12));
    }
  }
  SECTION("matches a numerical minimizer on random inputs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto p = random_distribution(3, derive_seed(5, seed));
      const auto r = project_independence(p);
      const double numeric =
          oracles::min_kl_over_products(p, Face::full_cube(3));
      REQUIRE(r.divergence_bits == Catch::Approx(numeric).margin(1e-6));
    }
  }
  SECTION("support violations are rejected") {
    REQUIRE_THROWS_AS(
        project_independence(Distribution::uniform(2), Face(2, 0b10, 0b10)),
        std::invalid_argument);
  }
  SECTION("face-supported distributions project within the face") {
    const Face f(3, 0b001, 0b001);
    std::vector<double> w(8, 0.0);
    w[0b001] = 0.5;
    w[0b111] = 0.5;
    const auto r = project_independence(Distribution(3, std::move(w)), f);
    REQUIRE(r.divergence_bits == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("partition projection") {
  SECTION("uniform is a fixed point") {
    const auto r =
        project_partition(Distribution::uniform(2), two_edge_square_partition());
    REQUIRE(r.divergence_bits == 0.0);
    REQUIRE(max_abs_diff(r.projection, Distribution::uniform(2)) == 0.0);
  }
  SECTION("delta spreads over its block") {
    const auto r =
        project_partition(Distribution::delta(2, 0b11), two_edge_square_partition());
    REQUIRE(r.projection.probs == std::vector<double>{0.0, 0.0, 0.5, 0.5});
    REQUIRE(r.divergence_bits == 1.0);
  }
  SECTION("half-half delta pair costs exactly k bits on 2^k blocks") {
    for (int n = 2; n <= 6; ++n) {
      std::vector<double> w(cube_size(n), 0.0);
      w[0] = 0.5;
      w[cube_mask(n)] = 0.5;
      const Distribution p(n, std::move(w));
      for (int k = 0; k < n; ++k) {
        // block A fixes the high n-k coordinates to 0, block B to 1
        const state_t free_bits = cube_mask(k);
        const Face a(n, cube_mask(n) & ~free_bits, 0);
        const Face b(n, cube_mask(n) & ~free_bits,
                     cube_mask(n) & ~free_bits);
        std::vector<char> uncovered(cube_size(n), 1);
        for (state_t v : a.members()) uncovered[v] = 0;
        for (state_t v : b.members()) uncovered[v] = 0;
        std::vector<Face> faces = {a, b};
        for (const auto& f : carve_into_faces(n, uncovered)) faces.push_back(f);
        const auto r = project_partition(p, Partition::from_faces(n, faces));
        REQUIRE(r.divergence_bits == double(k));
      }
    }
  }
  SECTION("refining a partition never increases the divergence") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const int n = 3 + int(seed % 2);
      const auto p = random_distribution(n, derive_seed(9, seed));
      double previous = std::numeric_limits<double>::infinity();
      // chain from the one-block partition down to singletons by fixing
      // one more coordinate at each step
      for (int t = 0; t <= n; ++t) {
        std::vector<Face> faces;
        const state_t mask = cube_mask(t);
        for (state_t values = 0; values < cube_size(t); ++values)
          faces.emplace_back(n, mask, values);
        const auto r = project_partition(p, Partition::from_faces(n, faces));
        REQUIRE(r.divergence_bits <= previous + 1e-12);
        previous = r.divergence_bits;
      }
    }
  }
}

TEST_CASE("disjoint mixture projection") {
  SECTION("the two-edge mixture on the square is the whole simplex") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto p = random_distribution(2, derive_seed(13, seed));
      const auto r = project_disjoint_mixture(p, two_edge_square_partition());
      REQUIRE(r.divergence_bits <= 1e-12);
      REQUIRE(max_abs_diff(r.projection, p) <= 1e-12);
    }
  }
  SECTION("uniform has divergence zero for any cubical partition") {
    for (int blocks = 1; blocks <= 4; ++blocks) {
      const auto r = project_disjoint_mixture(
          Distribution::uniform(3), balanced_cubical_partition(3, blocks));
      REQUIRE(r.divergence_bits <= 1e-13);
    }
  }
  SECTION("divergence equals the mass-weighted block multiinformation") {
    const Partition xi = balanced_cubical_partition(3, 2);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const auto p = random_distribution(3, derive_seed(17, seed));
      const auto direct = project_disjoint_mixture(p, xi);
      const auto parts = block_conditionals(p, xi);
      double expected = 0.0;
      for (std::size_t i = 0; i < parts.size(); ++i)
        expected +=
            parts[i].mass *
            project_independence(parts[i].conditional, xi.faces[i])
                .divergence_bits;
      REQUIRE(direct.divergence_bits ==
              Catch::Approx(expected).margin(1e-12));
    }
  }
  SECTION("non-cubical blocks are rejected") {
    REQUIRE_THROWS_AS(project_disjoint_mixture(Distribution::uniform(3),
                                               exchangeable_partition(3)),
                      std::invalid_argument);
  }
}

TEST_CASE("maximal divergence") {
  SECTION("independence model on the 3-cube") {
    const auto r = max_divergence(ModelClass::independence(3));
    REQUIRE(r.value_bits == 2.0);
    const auto check = project_independence(r.witness);
    REQUIRE(check.divergence_bits ==
            Catch::Approx(r.value_bits).margin(1e-12));
  }
  SECTION("partition model of the square split") {
    const auto r =
        max_divergence(ModelClass::partition_model(two_edge_square_partition()));
    REQUIRE(r.value_bits == 1.0);
    const auto check = project_partition(r.witness, two_edge_square_partition());
    REQUIRE(check.divergence_bits == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("one-block partition is the uniform model, divergence n") {
    for (int n = 1; n <= 5; ++n) {
      const auto r = max_divergence(
          ModelClass::partition_model(balanced_cubical_partition(n, 1)));
      REQUIRE(r.value_bits == double(n));
    }
  }
  SECTION("mixture value is one bit below the partition value") {
    for (int n = 2; n <= 5; ++n) {
      for (int blocks = 1; blocks < int(cube_size(n - 1)); ++blocks) {
        const Partition xi = balanced_cubical_partition(n, blocks);
        const auto rp = max_divergence(ModelClass::partition_model(xi));
        const auto rm =
            max_divergence(ModelClass::disjoint_product_mixture(xi));
        REQUIRE(rm.value_bits == std::max(rp.value_bits - 1.0, 0.0));
        const auto check = project_disjoint_mixture(rm.witness, xi);
        REQUIRE(check.divergence_bits ==
                Catch::Approx(rm.value_bits).margin(1e-12));
      }
    }
  }
  SECTION("witness attains the value for face-restricted independence") {
    const Face f(4, 0b0011, 0b0001);
    const auto r = max_divergence(ModelClass::independence(f));
    REQUIRE(r.value_bits == 1.0);  // two free coordinates
    const auto check = project_independence(r.witness, f);
    REQUIRE(check.divergence_bits == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("100000 random distributions never exceed the maximum") {
    std::vector<ModelClass> models;
    for (int n = 2; n <= 4; ++n) {
      models.push_back(ModelClass::independence(n));
      models.push_back(
          ModelClass::partition_model(balanced_cubical_partition(n, 2)));
      models.push_back(ModelClass::disjoint_product_mixture(
          balanced_cubical_partition(n, int(cube_size(n - 1)) / 2 + 1)));
    }
    std::size_t draws = 0;
    for (std::size_t i = 0; models.size() * i < 100000; ++i) {
      for (std::size_t k = 0; k < models.size(); ++k) {
        const auto& model = models[k];
        const int n = model.kind == ModelClass::Kind::independence
                          ? model.support.n
                          : model.partition.n;
        const double cap = max_divergence(model).value_bits;
        const auto p = random_distribution(n, derive_seed(31 + k, i));
        REQUIRE(project(p, model).divergence_bits <= cap + 1e-12);
        ++draws;
      }
    }
    REQUIRE(draws >= 100000);
  }
}

TEST_CASE("projection optimality against random model members") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + int(rng.below(3));
    const auto p = random_distribution(n, derive_seed(41, trial));
    const Partition xi =
        balanced_cubical_partition(n, 1 + int(rng.below(cube_size(n - 1))));

    const double best_ind = project_independence(p).divergence_bits;
    const double best_part = project_partition(p, xi).divergence_bits;
    const double best_mix = project_disjoint_mixture(p, xi).divergence_bits;
    for (int c = 0; c < 300; ++c) {
      REQUIRE(kl_bits(p, oracles::random_product_member(Face::full_cube(n),
                                                        rng)) >=
              best_ind - 1e-9);
      REQUIRE(kl_bits(p, oracles::random_partition_member(xi, rng)) >=
              best_part - 1e-9);
      REQUIRE(kl_bits(p, oracles::random_mixture_member(xi, rng)) >=
              best_mix - 1e-9);
    }
  }
}

TEST_CASE("best partition projection") {
  SECTION("uniform reaches zero with any budget") {
    for (int blocks = 1; blocks <= 4; ++blocks) {
      const auto [xi, r] =
          best_partition_projection(Distribution::uniform(3), blocks);
      REQUIRE(r.divergence_bits == 0.0);
    }
  }
  SECTION("parity with two blocks stays within the coarse bound") {
    const auto [xi, r] = best_partition_projection(parity_distribution(3), 2);
    REQUIRE(r.divergence_bits <= 2.0);
    REQUIRE(r.divergence_bits == 1.0);  // any half split projects to uniform
  }
  SECTION("deltas prefer small blocks") {
    const auto [xi, r] =
        best_partition_projection(Distribution::delta(3, 5), 2);
    // with two blocks both are halves, so the delta costs n-1 bits
    REQUIRE(r.divergence_bits == 2.0);
    const auto [xi8, r8] =
        best_partition_projection(Distribution::delta(3, 5), 8);
    REQUIRE(r8.divergence_bits == 0.0);  // singleton block available
  }
  SECTION("agrees with a scan over the enumeration") {
    const auto p = random_distribution(3, 77);
    const auto [xi, r] = best_partition_projection(p, 3);
    double manual = std::numeric_limits<double>::infinity();
    for (const auto& candidate : list_cubical_partitions(3, 3))
      manual = std::min(manual,
                        project_partition(p, candidate).divergence_bits);
    REQUIRE(r.divergence_bits == manual);
  }
  SECTION("dimension guard") {
    REQUIRE_THROWS_AS(best_partition_projection(Distribution::uniform(7), 2),
                      std::invalid_argument);
  }
}
