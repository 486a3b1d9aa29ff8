#pragma once

#include <span>
#include <string>
#include <vector>

#include "doobmax/weights.hpp"

namespace doobmax {

// (integral of |f|^p w)^(1/p). Requires p >= 1.
double weighted_norm(const FilteredSpace& space, const SimpleFunction& f, const Weight& w,
                     double p);

// ||Mf||_{L^p(v)} / ||f||_{L^p(v)}; requires f not identically zero.
double maximal_ratio(const FilteredSpace& space, const SimpleFunction& f, const Weight& v,
                     double p);

struct UpperBoundReport {
  double lhs = 0.0;       // ||Mf||_{L^p(v)}
  double rhs = 0.0;       // constant * ||f||_{L^p(v)}
  double constant = 0.0;  // p^(1/(p-1)) p' [v]^(1/(p-1))
  double slack = 0.0;     // rhs - lhs
  bool pass(double rel_slack = 1e-9) const;
};

UpperBoundReport verify_upper(const FilteredSpace& space, const SimpleFunction& f, const Weight& v,
                              double p);

struct TestFamilyResult {
  double max_ratio = 0.0;  // attained by f = (indicator of a node) * sigma
  int argmax_level = 0;
  std::size_t argmax_node = 0;
};

// For every node B evaluates the lower-bound ratio of the test function
// (indicator of B) * sigma, namely
//   ( integral over B of E(sigma|F_level)^p v  /  integral over B of sigma )^(1/p),
// and returns the maximum. Its p-th power reproduces the characteristic of v.
TestFamilyResult ap_lower_test_family(const FilteredSpace& space, const Weight& v, double p);

struct NormEstimate {
  double upper_constant = 0.0;  // p^(1/(p-1)) p' [v]^(1/(p-1))
  double best_ratio = 0.0;
  double seed_ratio = 0.0;      // best ratio among the seeds alone
  SimpleFunction witness;
  ApReport ap;
};

// Deterministic lower-bound search for ||M||_{L^p(v)}: scores the seeds
// {(indicator of node B) * sigma} and {sigma}, then runs coordinate ascent
// (multiplicative steps x2 / x0.5 per leaf, improvements above 1e-12
// relative) from sigma and from the best node seed. `budget` caps the number
// of accepted steps per ascent; the result never decreases as the budget
// grows, and budget 0 returns the best seed untouched.
NormEstimate extremal_search(const FilteredSpace& space, const Weight& v, double p,
                             std::size_t budget);

struct SharpnessRow {
  double alpha = 0.0;
  double ap_char = 0.0;
  double best_ratio = 0.0;
  double normalized_ratio = 0.0;  // best_ratio / ap_char^(1/(p-1))
  double upper_bound = 0.0;
};

struct SharpnessTable {
  double p = 0.0;
  int depth = 0;
  std::vector<SharpnessRow> rows;
  double band_factor = 0.0;  // max / min of the normalized column
  double char_span = 0.0;    // max / min of the characteristic column
  bool within_band(double factor = 4.0) const;
};

// Runs extremal_search against the power weights x^alpha on the dyadic space
// of the given depth. All alpha must lie in (-1, 0].
SharpnessTable sharpness_experiment(double p, std::span<const double> alphas, int depth,
                                    std::size_t budget = 2000);

// CSV with header "alpha,ap_char,best_ratio,normalized_ratio,upper_bound".
std::string sharpness_csv(const SharpnessTable& table);

}  // namespace doobmax
