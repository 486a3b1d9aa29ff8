#include "doobmax/operators.hpp"

#include <cmath>

namespace doobmax {

std::vector<double> node_averages(const FilteredSpace& space, const SimpleFunction& f,
                                  int level) {
  require_same_shape(space, f);
  space.require_level(level);
  std::vector<double> out(space.node_count(level));
  for (std::size_t k = 0; k < out.size(); ++k) {
    double sum = 0.0;
    for (std::size_t leaf = space.node_begin(level, k); leaf < space.node_end(level, k); ++leaf)
      sum += f[leaf] * space.leaf_measure(leaf);
    out[k] = sum / space.node_measure(level, k);
  }
  return out;
}

std::vector<double> weighted_node_averages(const FilteredSpace& space, const SimpleFunction& f,
                                           const SimpleFunction& w, int level) {
  require_same_shape(space, f);
  require_same_shape(space, w);
  space.require_level(level);
  std::vector<double> out(space.node_count(level));
  for (std::size_t k = 0; k < out.size(); ++k) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t leaf = space.node_begin(level, k); leaf < space.node_end(level, k); ++leaf) {
      double mass = space.leaf_measure(leaf);
      num += f[leaf] * w[leaf] * mass;
      den += w[leaf] * mass;
    }
    if (!(den > 0.0))
      throw InvalidMeasureError("weight vanishes on a node");
    out[k] = num / den;
  }
  return out;
}

namespace {
SimpleFunction expand(const FilteredSpace& space, const std::vector<double>& per_node,
                      int level) {
  SimpleFunction out(space.leaf_count());
  for (std::size_t k = 0; k < per_node.size(); ++k)
    for (std::size_t leaf = space.node_begin(level, k); leaf < space.node_end(level, k); ++leaf)
      out[leaf] = per_node[k];
  return out;
}
}  // namespace

SimpleFunction cond_exp(const FilteredSpace& space, const SimpleFunction& f, int level) {
  return expand(space, node_averages(space, f, level), level);
}

SimpleFunction weighted_cond_exp(const FilteredSpace& space, const SimpleFunction& f,
                                 const SimpleFunction& w, int level) {
  return expand(space, weighted_node_averages(space, f, w, level), level);
}

SimpleFunction tailed_maximal(const FilteredSpace& space, const SimpleFunction& f,
                              int from_level) {
  space.require_level(from_level);
  // Running per-node maximum of |E(f|F_i)| down the tree; each node inherits
  // its parent's maximum, so one pass over all nodes suffices.
  std::vector<double> running;
  for (int i = from_level; i <= space.depth(); ++i) {
    std::vector<double> avg = node_averages(space, f, i);
    for (double& a : avg) a = std::fabs(a);
    if (i > from_level)
      for (std::size_t k = 0; k < avg.size(); ++k) {
        double up = running[space.parent_of(i, k)];
        if (up > avg[k]) avg[k] = up;
      }
    running = std::move(avg);
  }
  return expand(space, running, space.depth());
}

SimpleFunction doob_maximal(const FilteredSpace& space, const SimpleFunction& f) {
  return tailed_maximal(space, f, 0);
}

SimpleFunction weighted_maximal(const FilteredSpace& space, const SimpleFunction& f,
                                const SimpleFunction& w) {
  std::vector<double> running;
  for (int i = 0; i <= space.depth(); ++i) {
    std::vector<double> avg = weighted_node_averages(space, f, w, i);
    for (double& a : avg) a = std::fabs(a);
    if (i > 0)
      for (std::size_t k = 0; k < avg.size(); ++k) {
        double up = running[space.parent_of(i, k)];
        if (up > avg[k]) avg[k] = up;
      }
    running = std::move(avg);
  }
  return expand(space, running, space.depth());
}

std::vector<int> stopping_time(const FilteredSpace& space,
                               const std::function<bool(int, std::size_t)>& hits,
                               int from_level) {
  space.require_level(from_level);
  // First-hit level per node, pushed down the tree; the last level consists
  // of singletons, so the final row is already indexed by leaf.
  std::vector<int> node_stop;
  for (int i = from_level; i <= space.depth(); ++i) {
    std::vector<int> cur(space.node_count(i), kLevelInfinity);
    for (std::size_t k = 0; k < cur.size(); ++k) {
      int inherited =
          i > from_level ? node_stop[space.parent_of(i, k)] : kLevelInfinity;
      if (inherited != kLevelInfinity)
        cur[k] = inherited;
      else if (hits(i, k))
        cur[k] = i;
    }
    node_stop = std::move(cur);
  }
  return node_stop;
}

}  // namespace doobmax
