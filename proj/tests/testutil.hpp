#pragma once

// Brute-force reference implementations for the tests. Everything here scans
// per leaf and per level with no shared tables, so a bug in the library's
// incremental passes cannot hide in the oracle.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "doobmax/filtration.hpp"
#include "doobmax/operators.hpp"
#include "doobmax/rng.hpp"

namespace testutil {

using doobmax::FilteredSpace;
using doobmax::SimpleFunction;

inline double naive_node_average(const FilteredSpace& space, const SimpleFunction& f, int level,
                                 std::size_t node) {
  double num = 0.0, den = 0.0;
  for (std::size_t leaf = space.node_begin(level, node); leaf < space.node_end(level, node);
       ++leaf) {
    num += f[leaf] * space.leaf_measure(leaf);
    den += space.leaf_measure(leaf);
  }
  return num / den;
}

inline double naive_weighted_average(const FilteredSpace& space, const SimpleFunction& f,
                                     const SimpleFunction& w, int level, std::size_t node) {
  double num = 0.0, den = 0.0;
  for (std::size_t leaf = space.node_begin(level, node); leaf < space.node_end(level, node);
       ++leaf) {
    num += f[leaf] * w[leaf] * space.leaf_measure(leaf);
    den += w[leaf] * space.leaf_measure(leaf);
  }
  return num / den;
}

// Node containing the leaf, found by scanning the whole level.
inline std::size_t naive_node_of(const FilteredSpace& space, int level, std::size_t leaf) {
  for (std::size_t k = 0; k < space.node_count(level); ++k)
    if (space.node_begin(level, k) <= leaf && leaf < space.node_end(level, k)) return k;
  return space.node_count(level);
}

inline SimpleFunction naive_cond_exp(const FilteredSpace& space, const SimpleFunction& f,
                                     int level) {
  SimpleFunction out(space.leaf_count());
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf)
    out[leaf] = naive_node_average(space, f, level, naive_node_of(space, level, leaf));
  return out;
}

inline SimpleFunction naive_tailed_maximal(const FilteredSpace& space, const SimpleFunction& f,
                                           int from_level) {
  SimpleFunction out(space.leaf_count(), 0.0);
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf)
    for (int level = from_level; level <= space.depth(); ++level) {
      double avg = naive_node_average(space, f, level, naive_node_of(space, level, leaf));
      out[leaf] = std::max(out[leaf], std::fabs(avg));
    }
  return out;
}

inline SimpleFunction naive_doob_maximal(const FilteredSpace& space, const SimpleFunction& f) {
  return naive_tailed_maximal(space, f, 0);
}

inline SimpleFunction naive_weighted_maximal(const FilteredSpace& space, const SimpleFunction& f,
                                             const SimpleFunction& w) {
  SimpleFunction out(space.leaf_count(), 0.0);
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf)
    for (int level = 0; level <= space.depth(); ++level) {
      double avg = naive_weighted_average(space, f, w, level, naive_node_of(space, level, leaf));
      out[leaf] = std::max(out[leaf], std::fabs(avg));
    }
  return out;
}

inline std::vector<int> naive_stopping_time(const FilteredSpace& space,
                                            const std::function<bool(int, std::size_t)>& hits,
                                            int from_level) {
  std::vector<int> out(space.leaf_count(), doobmax::kLevelInfinity);
  for (std::size_t leaf = 0; leaf < out.size(); ++leaf)
    for (int level = from_level; level <= space.depth(); ++level)
      if (hits(level, naive_node_of(space, level, leaf))) {
        out[leaf] = level;
        break;
      }
  return out;
}

inline double naive_ap_characteristic(const FilteredSpace& space, const SimpleFunction& v,
                                      double p) {
  double characteristic = 0.0;
  for (int level = 0; level <= space.depth(); ++level)
    for (std::size_t node = 0; node < space.node_count(level); ++node) {
      double avg_v = 0.0, avg_sigma = 0.0, mass = 0.0;
      for (std::size_t leaf = space.node_begin(level, node); leaf < space.node_end(level, node);
           ++leaf) {
        avg_v += v[leaf] * space.leaf_measure(leaf);
        avg_sigma += std::pow(v[leaf], -1.0 / (p - 1.0)) * space.leaf_measure(leaf);
        mass += space.leaf_measure(leaf);
      }
      characteristic =
          std::max(characteristic, (avg_v / mass) * std::pow(avg_sigma / mass, p - 1.0));
    }
  return characteristic;
}

inline double naive_weighted_norm(const FilteredSpace& space, const SimpleFunction& f,
                                  const SimpleFunction& w, double p) {
  double sum = 0.0;
  for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
    sum += std::pow(std::fabs(f[leaf]), p) * w[leaf] * space.leaf_measure(leaf);
  return std::pow(sum, 1.0 / p);
}

// Three-level non-dyadic fixture: sizes 6 -> (2, 4) -> (1, 1, 3, 1) -> leaves.
inline FilteredSpace ragged_space() {
  return FilteredSpace::from_level_sizes(
      {{6}, {2, 4}, {1, 1, 3, 1}, {1, 1, 1, 1, 1, 1}},
      {0.5, 0.25, 0.125, 0.5, 1.0, 0.625});
}

inline SimpleFunction spread_function(doobmax::SplitMix64& rng, std::size_t leaves,
                                      bool signed_values) {
  SimpleFunction f(leaves);
  for (double& x : f) {
    x = std::exp(rng.next_in(-2.0, 2.0));
    if (signed_values && rng.next_double() < 0.5) x = -x;
  }
  return f;
}

inline SimpleFunction positive_function(doobmax::SplitMix64& rng, std::size_t leaves) {
  return spread_function(rng, leaves, false);
}

}  // namespace testutil
