#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "doobmax/constants.hpp"
#include "doobmax/errors.hpp"
#include "doobmax/numeric.hpp"
#include "doobmax/rng.hpp"

using namespace doobmax;

TEST_CASE("numeric helpers") {
  SUBCASE("pow_abs matches the general form") {
    SplitMix64 rng(71);
    for (int trial = 0; trial < 30; ++trial) {
      double x = rng.next_in(-5.0, 5.0);
      for (double p : {1.0, 2.0, 3.0, 2.5}) {
        CHECK(pow_abs(x, p) ==
              doctest::Approx(std::pow(std::fabs(x), p)).epsilon(1e-15));
      }
    }
    CHECK(pow_abs(-3.0, 2.0) == 9.0);
    CHECK(pow_abs(-3.0, 1.0) == 3.0);
    CHECK(pow_abs(-2.0, 3.0) == 8.0);
  }
  SUBCASE("relative comparison") {
    CHECK(leq_rel(1.0, 1.0, 0.0));
    CHECK(leq_rel(1.0 + 1e-13, 1.0, 1e-12));
    CHECK_FALSE(leq_rel(1.0 + 1e-11, 1.0, 1e-12));
    CHECK(rel_margin(1.0, 3.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(rel_margin(0.0, 0.5) == 0.5);
  }
  SUBCASE("scale index brackets base^(l-1) < value <= base^l") {
    CHECK(scale_index(4.0, 2.0) == 2);
    CHECK(scale_index(4.0000000001, 2.0) == 3);
    CHECK(scale_index(3.0, 2.0) == 2);
    CHECK(scale_index(1.0, 2.0) == 0);
    CHECK(scale_index(0.5, 2.0) == -1);
    CHECK(scale_index(0.7, 2.0) == 0);
    CHECK_THROWS_AS(scale_index(0.0, 2.0), ParameterError);
    CHECK_THROWS_AS(scale_index(1.0, 1.0), ParameterError);

    SplitMix64 rng(72);
    for (int trial = 0; trial < 50; ++trial) {
      double base = 1.0 + std::exp(rng.next_in(-2.0, 1.0));
      double value = std::exp(rng.next_in(-8.0, 8.0));
      int l = scale_index(value, base);
      CHECK(value <= power_int(base, l));
      CHECK(value > power_int(base, l - 1));
    }
  }
  SUBCASE("geometric grid") {
    std::vector<double> grid = geometric_grid(1.5, 24.0, 9);
    CHECK(grid.size() == 9);
    CHECK(grid.front() == 1.5);
    CHECK(grid.back() == 24.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      CHECK(grid[i] > grid[i - 1]);
      CHECK(grid[i] / grid[i - 1] ==
            doctest::Approx(grid[1] / grid[0]).epsilon(1e-9));
    }
    CHECK_THROWS_AS(geometric_grid(0.0, 2.0, 5), ParameterError);
    CHECK_THROWS_AS(geometric_grid(2.0, 2.0, 5), ParameterError);
    CHECK_THROWS_AS(geometric_grid(1.0, 2.0, 1), ParameterError);
  }
}

TEST_CASE("closed-form profile values") {
  SUBCASE("p = 2") {
    ConstantProfile c = profile(2.0);
    CHECK(c.p == 2.0);
    CHECK(c.p_conjugate == 2.0);
    CHECK(c.psi == 2.0);
    CHECK(c.a0 == 1.5);
    CHECK(c.phi == 6.75);
    CHECK(c.bound_sharp == 4.0);
    CHECK(c.unweighted == 2.0);
  }
  SUBCASE("p = 1.5") {
    ConstantProfile c = profile(1.5);
    CHECK(c.p_conjugate == 3.0);
    CHECK(c.psi == 2.25);
    CHECK(c.a0 == 2.0);
    CHECK(c.phi == 16.0);
    CHECK(c.bound_sharp == 6.75);
    CHECK(c.unweighted == 3.0);
  }
  SUBCASE("p = 3") {
    ConstantProfile c = profile(3.0);
    CHECK(c.p_conjugate == 1.5);
    CHECK(c.a0 == 1.25);
    CHECK(c.psi == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    // 1.5625 * sqrt(5)
    CHECK(c.phi == doctest::Approx(3.4938562148434213).epsilon(1e-15));
    CHECK(c.bound_sharp == doctest::Approx(1.5 * std::sqrt(3.0)).epsilon(1e-15));
  }
  SUBCASE("conjugate identity") {
    SplitMix64 rng(73);
    for (int trial = 0; trial < 30; ++trial) {
      double p = 1.0 + std::exp(rng.next_in(-4.0, 3.0));
      ConstantProfile c = profile(p);
      CHECK(1.0 / c.p + 1.0 / c.p_conjugate == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(c.unweighted == c.p_conjugate);
      CHECK(c.bound_sharp == c.psi * c.p_conjugate);
    }
  }
  SUBCASE("eta") {
    ConstantProfile c = profile(2.0);
    CHECK(c.eta(2.0) == 2.0);
    CHECK(c.eta(1.5) == 3.0);
    CHECK(c.eta(5.0) == 1.25);
    CHECK_THROWS_AS(c.eta(1.0), ParameterError);
    CHECK_THROWS_AS(c.eta(0.5), ParameterError);
    CHECK_THROWS_AS(c.eta(HUGE_VAL), ParameterError);
  }
  SUBCASE("principal factor ties the pieces together") {
    for (double p : {1.5, 2.0, 3.0, 8.0}) {
      ConstantProfile c = profile(p);
      CHECK(c.phi == c.principal_factor(c.a0));
      CHECK(c.bound_principal(c.a0) == c.phi * c.p_conjugate);
      double a = 1.75;
      CHECK(c.principal_factor(a) ==
            doctest::Approx(a * a * std::pow(c.eta(a), c.p_conjugate - 1.0))
                .epsilon(1e-14));
    }
  }
  SUBCASE("rejects exponents at or below one") {
    CHECK_THROWS_AS(profile(1.0), ParameterError);
    CHECK_THROWS_AS(profile(0.5), ParameterError);
    CHECK_THROWS_AS(profile(1.0 + 1e-13), ParameterError);
    CHECK_THROWS_AS(profile(HUGE_VAL), ParameterError);
    CHECK_THROWS_AS(profile(std::nan("")), ParameterError);
  }
}

TEST_CASE("minimizer verification") {
  SUBCASE("p = 2 against a coarse grid") {
    std::vector<double> grid = {1.1, 1.3, 1.5, 2.0, 3.0, 10.0};
    MinimizerReport report = verify_minimizer(2.0, grid);
    CHECK(report.pass);
    CHECK(report.a0 == 1.5);
    CHECK(report.value_at_a0 == 6.75);
    CHECK(report.detail.empty());
  }
  SUBCASE("grid containing the minimizer itself") {
    std::vector<double> grid = {1.5, 2.0, 4.0};
    MinimizerReport report = verify_minimizer(1.5, grid);
    CHECK(report.pass);
    CHECK(report.a0 == 2.0);
    CHECK(report.value_at_a0 == 16.0);
  }
  SUBCASE("random exponents on a dense grid") {
    SplitMix64 rng(74);
    std::vector<double> grid = geometric_grid(1.01, 64.0, 400);
    for (int trial = 0; trial < 50; ++trial) {
      double p = rng.next_in(1.01, 20.0);
      MinimizerReport report = verify_minimizer(p, grid);
      CHECK(report.pass);
      CHECK(report.value_at_a0 == profile(p).phi);
    }
  }
  SUBCASE("grid points at or below one are rejected") {
    std::vector<double> grid = {1.0, 2.0};
    CHECK_THROWS_AS(verify_minimizer(2.0, grid), ParameterError);
  }
}

TEST_CASE("monotonicity and limits") {
  MonotonicityReport report = verify_monotonicity_and_limits();
  CHECK(report.phi_decreasing);
  CHECK(report.psi_decreasing);
  CHECK(report.phi_ge_psi);
  CHECK(report.psi_limit_at_one);
  CHECK(report.phi_limit_at_infinity);
  CHECK(report.ratio_decreasing);
  CHECK(report.ratio_bounded);
  CHECK(report.pass());
  CHECK(report.psi_near_one == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
  CHECK(report.phi_at_large == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("figure data") {
  SUBCASE("three-point sample") {
    std::vector<Figure1Row> rows = figure1_data(2.0, 4.0, 3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].p == 2.0);
    CHECK(rows[0].phi == 6.75);
    CHECK(rows[0].psi == 2.0);
    CHECK(rows[1].p == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(rows[2].p == 4.0);
  }
  SUBCASE("dense sample is ordered the way the curves are") {
    std::vector<Figure1Row> rows = figure1_data(1.1, 10.0, 200);
    REQUIRE(rows.size() == 200);
    CHECK(rows.front().p == 1.1);
    CHECK(rows.back().p == 10.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].phi > rows[i].psi);
      if (i > 0) {
        CHECK(rows[i].phi < rows[i - 1].phi);
        CHECK(rows[i].psi < rows[i - 1].psi);
      }
    }
  }
  SUBCASE("rejects bad ranges") {
    CHECK_THROWS_AS(figure1_data(1.0, 10.0, 5), ParameterError);
    CHECK_THROWS_AS(figure1_data(2.0, 2.0, 5), ParameterError);
    CHECK_THROWS_AS(figure1_data(2.0, 4.0, 1), ParameterError);
  }
  SUBCASE("csv layout") {
    std::vector<Figure1Row> rows = figure1_data(2.0, 4.0, 3);
    std::string csv = figure1_csv(rows);
    CHECK(csv.rfind("p,phi,psi\n", 0) == 0);
    CHECK(csv.find("\n2,6.75,2\n") != std::string::npos);
    std::size_t lines = 0;
    for (char ch : csv)
      if (ch == '\n') ++lines;
    CHECK(lines == 4);
    CHECK(csv == figure1_csv(figure1_data(2.0, 4.0, 3)));
  }
  SUBCASE("svg plot") {
    std::vector<Figure1Row> rows = figure1_data(1.1, 10.0, 50);
    std::string svg = figure1_svg(rows);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("constants by exponent (log-log)") != std::string::npos);
    CHECK(svg.find("phi(p)") != std::string::npos);
    CHECK(svg.find("psi(p)") != std::string::npos);
    std::size_t polylines = 0;
    for (std::size_t at = svg.find("<polyline"); at != std::string::npos;
         at = svg.find("<polyline", at + 1))
      ++polylines;
    CHECK(polylines == 2);
    CHECK(svg == figure1_svg(figure1_data(1.1, 10.0, 50)));
    CHECK_THROWS_AS(figure1_svg({rows[0]}), ParameterError);
  }
}
