#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "doobmax/filtration.hpp"

namespace doobmax {

// Stopping level meaning "never": larger than every real level.
inline constexpr int kLevelInfinity = std::numeric_limits<int>::max();

// E(f | F_level), one value per node of the given level.
std::vector<double> node_averages(const FilteredSpace& space, const SimpleFunction& f, int level);

// E^w(f | F_level) = E(fw | F_level) / E(w | F_level); w strictly positive.
std::vector<double> weighted_node_averages(const FilteredSpace& space, const SimpleFunction& f,
                                           const SimpleFunction& w, int level);

// Conditional expectation expanded back to one value per leaf.
SimpleFunction cond_exp(const FilteredSpace& space, const SimpleFunction& f, int level);
SimpleFunction weighted_cond_exp(const FilteredSpace& space, const SimpleFunction& f,
                                 const SimpleFunction& w, int level);

// Mf = max over levels of |E(f | F_i)|, per leaf.
SimpleFunction doob_maximal(const FilteredSpace& space, const SimpleFunction& f);

// Tail variant: max over levels j >= from_level only.
SimpleFunction tailed_maximal(const FilteredSpace& space, const SimpleFunction& f, int from_level);

// Weighted variant: max over levels of |E^w(f | F_i)|.
SimpleFunction weighted_maximal(const FilteredSpace& space, const SimpleFunction& f,
                                const SimpleFunction& w);

// First level >= from_level whose node around the leaf satisfies the
// predicate; kLevelInfinity where no level qualifies. The predicate sees
// (level, node index) and must not depend on anything finer.
std::vector<int> stopping_time(const FilteredSpace& space,
                               const std::function<bool(int, std::size_t)>& hits,
                               int from_level = 0);

}  // namespace doobmax
