#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "doobmax/bounds.hpp"
#include "doobmax/principal.hpp"
#include "doobmax/rng.hpp"
#include "doobmax/stopping.hpp"

namespace doobmax {

// Randomized-instance generators. Every suite splits one SplitMix64 stream
// per instance, so the reports below are reproducible byte for byte.

FilteredSpace random_dyadic_space(SplitMix64& rng, int max_depth);
SimpleFunction random_function(SplitMix64& rng, std::size_t leaves, bool signed_values,
                               double zero_fraction);
Weight random_weight(SplitMix64& rng, std::size_t leaves, double spread);

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst_margin = 0.0;     // smallest relative margin seen (negative = violation)
  std::string first_failure;     // serialized first counterexample, empty if none
  std::string csv;               // one row per instance
  bool pass() const { return failures == 0; }
};

// |Mf| in L^p against p' |f| in L^p, plain measure, signed f.
SuiteResult unweighted_doob_suite(std::uint64_t seed, std::size_t trials,
                                  std::span<const double> p_values, int max_depth);

// Two-sided estimate for random (f >= 0, v): the node test family reaches
// [v]^(1/p) from below, and ||Mf|| <= p^(1/(p-1)) p' [v]^(1/(p-1)) ||f||.
SuiteResult bracket_suite(std::uint64_t seed, std::size_t trials,
                          std::span<const double> p_values, int max_depth);

// The node test family maximum equals the characteristic^(1/p) up to 1e-9.
SuiteResult family_identity_suite(std::uint64_t seed, std::size_t trials, int max_depth);

// Forest construction: the six structural properties, the mass bound and the
// pointwise domination, for a in {1.5, 2, (2p-1)/(2p-2)}.
SuiteResult principal_suite(std::uint64_t seed, std::size_t trials, int max_depth);

// Slice-by-slice weighted estimate and its global aggregate.
SuiteResult sparse_bound_suite(std::uint64_t seed, std::size_t trials, int max_depth);

// Partition and chain verification per b value.
SuiteResult stopping_suite(std::uint64_t seed, std::size_t trials,
                           std::span<const double> b_values, int max_depth);

}  // namespace doobmax
