#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "doobmax/bounds.hpp"
#include "doobmax/suites.hpp"
#include "testutil.hpp"

using namespace doobmax;

TEST_CASE("weighted norm") {
  FilteredSpace space = FilteredSpace::dyadic(2);
  Weight ones(SimpleFunction(4, 1.0));
  CHECK(weighted_norm(space, SimpleFunction(4, 1.0), ones, 2.0) == 1.0);
  CHECK(weighted_norm(space, {4.0, 0.0, 0.0, 0.0}, ones, 2.0) == 2.0);
  CHECK(weighted_norm(space, {-4.0, 0.0, 0.0, 0.0}, ones, 2.0) == 2.0);
  CHECK(weighted_norm(space, {4.0, 0.0, 0.0, 0.0}, ones, 1.0) == 1.0);

  SUBCASE("weight scaling is homogeneous of degree 1/p") {
    SplitMix64 rng(41);
    FilteredSpace random = random_dyadic_space(rng, 6);
    SimpleFunction f = testutil::spread_function(rng, random.leaf_count(), true);
    Weight w = random_weight(rng, random.leaf_count(), 2.0);
    SimpleFunction scaled = w.values();
    for (double& x : scaled) x *= 8.0;
    for (double p : {1.5, 2.0, 3.0})
      CHECK(weighted_norm(random, f, Weight(scaled), p) ==
            doctest::Approx(std::pow(8.0, 1.0 / p) * weighted_norm(random, f, w, p))
                .epsilon(1e-12));
  }
  SUBCASE("matches the leaf scan") {
    SplitMix64 rng(42);
    FilteredSpace random = random_dyadic_space(rng, 6);
    SimpleFunction f = testutil::spread_function(rng, random.leaf_count(), true);
    Weight w = random_weight(rng, random.leaf_count(), 2.0);
    CHECK(weighted_norm(random, f, w, 2.5) ==
          doctest::Approx(testutil::naive_weighted_norm(random, f, w.values(), 2.5))
              .epsilon(1e-12));
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(weighted_norm(space, SimpleFunction(4, 1.0), ones, 0.5), ParameterError);
    CHECK_THROWS_AS(maximal_ratio(space, SimpleFunction(4, 0.0), ones, 2.0), ParameterError);
  }
}

TEST_CASE("upper bound verification") {
  SUBCASE("frozen spiked weight") {
    FilteredSpace space = FilteredSpace::dyadic(2);
    SimpleFunction f = {4.0, 0.0, 0.0, 0.0};
    Weight v(SimpleFunction{1.0, 1.0, 1.0, 16.0});
    UpperBoundReport report = verify_upper(space, f, v, 2.0);
    CHECK(report.lhs == doctest::Approx(std::sqrt(9.25)).epsilon(1e-14));
    CHECK(report.constant == doctest::Approx(4.0 * 4.515625).epsilon(1e-14));
    CHECK(report.rhs == doctest::Approx(36.125).epsilon(1e-12));
    CHECK(report.slack > 0.0);
    CHECK(report.pass());
  }
  SUBCASE("unit weight always passes") {
    SplitMix64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
      SplitMix64 child = rng.split(static_cast<std::uint64_t>(trial));
      FilteredSpace space = random_dyadic_space(child, 6);
      SimpleFunction f = testutil::spread_function(child, space.leaf_count(), true);
      Weight ones(SimpleFunction(space.leaf_count(), 1.0));
      CHECK(verify_upper(space, f, ones, 1.5 + 2.0 * child.next_double()).pass());
    }
  }
}

TEST_CASE("node test family") {
  SUBCASE("unit weight") {
    FilteredSpace space = FilteredSpace::dyadic(3);
    TestFamilyResult family = ap_lower_test_family(space, Weight(SimpleFunction(8, 1.0)), 2.0);
    CHECK(family.max_ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(family.argmax_level == 0);
  }
  SUBCASE("frozen two-leaf value") {
    FilteredSpace space = FilteredSpace::dyadic(1);
    TestFamilyResult family =
        ap_lower_test_family(space, Weight(SimpleFunction{1.0, 4.0}), 2.0);
    CHECK(family.max_ratio == doctest::Approx(1.25).epsilon(1e-14));
    CHECK(family.argmax_level == 0);
  }
  SUBCASE("p-th power reproduces the characteristic") {
    SplitMix64 rng(44);
    for (int trial = 0; trial < 25; ++trial) {
      SplitMix64 child = rng.split(static_cast<std::uint64_t>(trial));
      FilteredSpace space = random_dyadic_space(child, 6);
      Weight v = random_weight(child, space.leaf_count(), 2.5);
      double p = 1.5 + 2.0 * child.next_double();
      double characteristic = ap_characteristic(space, v, p).characteristic;
      double family = ap_lower_test_family(space, v, p).max_ratio;
      CHECK(std::pow(family, p) == doctest::Approx(characteristic).epsilon(1e-9));
    }
  }
  SUBCASE("the family ratio is attained by its test function") {
    SplitMix64 rng(45);
    FilteredSpace space = random_dyadic_space(rng, 6);
    Weight v = random_weight(rng, space.leaf_count(), 2.0);
    double p = 2.0;
    TestFamilyResult family = ap_lower_test_family(space, v, p);
    SimpleFunction sigma = dual_weight(v, p).values();
    SimpleFunction g(space.leaf_count(), 0.0);
    for (std::size_t leaf = space.node_begin(family.argmax_level, family.argmax_node);
         leaf < space.node_end(family.argmax_level, family.argmax_node); ++leaf)
      g[leaf] = sigma[leaf];
    CHECK(maximal_ratio(space, g, v, p) >= family.max_ratio * (1.0 - 1e-9));
  }
}

TEST_CASE("extremal search") {
  SUBCASE("unit weight stays within the classical bracket") {
    FilteredSpace space = FilteredSpace::dyadic(4);
    NormEstimate estimate = extremal_search(space, Weight(SimpleFunction(16, 1.0)), 2.0, 200);
    CHECK(estimate.best_ratio >= 1.0 - 1e-12);
    CHECK(estimate.best_ratio <= 2.0 + 1e-12);
    CHECK(estimate.upper_constant == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("improves on the seeds and reports a consistent witness") {
    SplitMix64 rng(46);
    for (int trial = 0; trial < 8; ++trial) {
      SplitMix64 child = rng.split(static_cast<std::uint64_t>(trial));
      FilteredSpace space = random_dyadic_space(child, 5);
      Weight v = random_weight(child, space.leaf_count(), 2.0);
      double p = trial % 2 == 0 ? 2.0 : 3.0;
      NormEstimate estimate = extremal_search(space, v, p, 400);
      CHECK(estimate.best_ratio >= estimate.seed_ratio * (1.0 - 1e-12));
      CHECK(estimate.best_ratio >=
            std::pow(estimate.ap.characteristic, 1.0 / p) * (1.0 - 1e-9));
      CHECK(estimate.best_ratio <= estimate.upper_constant * (1.0 + 1e-9));
      REQUIRE_FALSE(estimate.witness.empty());
      CHECK(maximal_ratio(space, estimate.witness, v, p) ==
            doctest::Approx(estimate.best_ratio).epsilon(1e-12));
    }
  }
  SUBCASE("budget zero returns the best seed") {
    SplitMix64 rng(47);
    FilteredSpace space = random_dyadic_space(rng, 5);
    Weight v = random_weight(rng, space.leaf_count(), 2.0);
    NormEstimate estimate = extremal_search(space, v, 2.0, 0);
    CHECK(estimate.best_ratio == estimate.seed_ratio);
    CHECK(maximal_ratio(space, estimate.witness, v, 2.0) == estimate.best_ratio);
  }
  SUBCASE("monotone in the budget") {
    SplitMix64 rng(48);
    FilteredSpace space = random_dyadic_space(rng, 5);
    Weight v = random_weight(rng, space.leaf_count(), 2.5);
    double previous = 0.0;
    for (std::size_t budget : {0u, 4u, 16u, 64u, 256u}) {
      double ratio = extremal_search(space, v, 2.0, budget).best_ratio;
      CHECK(ratio >= previous);
      previous = ratio;
    }
  }
  SUBCASE("power weight stays under the proven constant") {
    FilteredSpace space = FilteredSpace::dyadic(12);
    Weight v = power_weight(space, -0.5);
    NormEstimate estimate = extremal_search(space, v, 2.0, 200);
    CHECK(estimate.best_ratio <= estimate.upper_constant * (1.0 + 1e-9));
    CHECK(estimate.best_ratio >= std::pow(estimate.ap.characteristic, 0.5) * (1.0 - 1e-9));
  }
}

TEST_CASE("sharpness experiment") {
  SUBCASE("alpha zero row is the unweighted search") {
    SharpnessTable table = sharpness_experiment(2.0, std::vector<double>{0.0}, 6, 100);
    REQUIRE(table.rows.size() == 1);
    CHECK(table.rows[0].ap_char == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(table.rows[0].best_ratio >= 1.0 - 1e-12);
    CHECK(table.rows[0].best_ratio <= 4.0 + 1e-9);
    CHECK(table.rows[0].normalized_ratio ==
          doctest::Approx(table.rows[0].best_ratio).epsilon(1e-9));
  }
  SUBCASE("characteristic column grows toward alpha = -1") {
    SharpnessTable table =
        sharpness_experiment(2.0, std::vector<double>{-0.3, -0.5, -0.7}, 8, 60);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].ap_char < table.rows[1].ap_char);
    CHECK(table.rows[1].ap_char < table.rows[2].ap_char);
    CHECK(table.char_span ==
          doctest::Approx(table.rows[2].ap_char / table.rows[0].ap_char).epsilon(1e-12));
    for (const SharpnessRow& row : table.rows) {
      CHECK(row.best_ratio <= row.upper_bound * (1.0 + 1e-9));
      CHECK(row.normalized_ratio ==
            doctest::Approx(row.best_ratio / row.ap_char).epsilon(1e-12));
    }
    CHECK(table.band_factor >= 1.0);
    CHECK(table.within_band(table.band_factor + 1.0));
    CHECK_FALSE(table.within_band(table.band_factor * 0.5));
  }
  SUBCASE("csv shape") {
    SharpnessTable table = sharpness_experiment(2.0, std::vector<double>{-0.5}, 6, 40);
    std::string csv = sharpness_csv(table);
    CHECK(csv.rfind("alpha,ap_char,best_ratio,normalized_ratio,upper_bound\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(sharpness_csv(table) == csv);
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(sharpness_experiment(2.0, std::vector<double>{0.5}, 6, 10), ParameterError);
    CHECK_THROWS_AS(sharpness_experiment(2.0, std::vector<double>{-1.0}, 6, 10),
                    ParameterError);
    CHECK_THROWS_AS(sharpness_experiment(2.0, std::vector<double>{}, 6, 10), ParameterError);
  }
}

TEST_CASE("random bracket suite stays clean") {
  std::vector<double> ps = {1.5, 2.0, 3.0};
  SuiteResult result = bracket_suite(49, 60, ps, 6);
  INFO(result.first_failure);
  CHECK(result.pass());
  CHECK(result.worst_margin >= -1e-9);
}
