#include "doobmax/principal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <json.hpp>

#include "doobmax/numeric.hpp"

namespace doobmax {

namespace {

// Node averages of h for every level, computed once per build or check.
std::vector<std::vector<double>> all_level_averages(const FilteredSpace& space,
                                                    const SimpleFunction& h) {
  std::vector<std::vector<double>> avg(static_cast<std::size_t>(space.depth()) + 1);
  for (int i = 0; i <= space.depth(); ++i)
    avg[static_cast<std::size_t>(i)] = node_averages(space, h, i);
  return avg;
}

class ForestBuilder {
 public:
  ForestBuilder(const FilteredSpace& space, const SimpleFunction& h, double a)
      : space_(space), a_(a), avg_(all_level_averages(space, h)) {}

  double average(int level, std::size_t node) const {
    return avg_[static_cast<std::size_t>(level)][node];
  }

  // Child node index range of (level, node) one level down.
  std::pair<std::size_t, std::size_t> child_range(int level, std::size_t node) const {
    std::size_t b = space_.node_begin(level, node);
    std::size_t e = space_.node_end(level, node);
    return {space_.node_of(level + 1, b), space_.node_of(level + 1, e - 1) + 1};
  }

  // Fills tau, exceptional and children of `set`, whose support is the union
  // of the given nodes of set.level. Walks the subtree below those nodes,
  // stopping each branch the first time the running average of h exceeds
  // a^(scale+1). Stopped nodes regroup by (level, realized scale) into the
  // children; the never-stopped remainder is the exceptional part.
  void fill(PrincipalSet& set, const std::vector<std::size_t>& base_nodes) {
    std::size_t n = space_.leaf_count();
    set.tau.assign(n, kLevelInfinity);
    set.exceptional = LeafSet(n);
    double cut = power_int(a_, set.scale + 1);

    std::map<std::pair<int, int>, std::vector<std::size_t>> stopped;
    std::vector<std::size_t> active = base_nodes;
    for (int j = set.level + 1; j <= space_.depth() && !active.empty(); ++j) {
      std::vector<std::size_t> next;
      for (std::size_t node : active) {
        auto [lo, hi] = child_range(j - 1, node);
        for (std::size_t c = lo; c < hi; ++c) {
          if (average(j, c) > cut) {
            stopped[{j, scale_index(average(j, c), a_)}].push_back(c);
            for (std::size_t leaf = space_.node_begin(j, c); leaf < space_.node_end(j, c);
                 ++leaf)
              set.tau[leaf] = j;
          } else {
            next.push_back(c);
          }
        }
      }
      active = std::move(next);
    }

    for (std::size_t leaf = 0; leaf < n; ++leaf)
      if (set.support.contains(leaf) && set.tau[leaf] == kLevelInfinity)
        set.exceptional.add(leaf);

    for (auto& [key, nodes] : stopped) {
      PrincipalSet child;
      child.level = key.first;
      child.scale = key.second;
      child.support = LeafSet(n);
      for (std::size_t node : nodes)
        for (std::size_t leaf = space_.node_begin(child.level, node);
             leaf < space_.node_end(child.level, node); ++leaf)
          child.support.add(leaf);
      fill(child, nodes);
      set.children.push_back(std::move(child));
    }
  }

 private:
  const FilteredSpace& space_;
  double a_;
  std::vector<std::vector<double>> avg_;
};

}  // namespace

PrincipalForest build_principal_forest(const FilteredSpace& space, const SimpleFunction& h,
                                       double a, int base_level, int base_scale,
                                       const LeafSet& omega0) {
  require_same_shape(space, h);
  require_same_shape(space, omega0);
  require_finite(h);
  for (double x : h)
    if (x < 0.0) throw ParameterError("the forest is built from a nonnegative function");
  if (!(a > 1.0) || !std::isfinite(a)) throw ParameterError("ratio a must exceed 1");
  space.require_level(base_level);
  for (std::size_t k = 0; k < space.node_count(base_level); ++k) {
    std::size_t begin = space.node_begin(base_level, k);
    std::size_t end = space.node_end(base_level, k);
    std::size_t inside = 0;
    for (std::size_t leaf = begin; leaf < end; ++leaf)
      if (omega0.contains(leaf)) ++inside;
    if (inside != 0 && inside != end - begin)
      throw ShapeError("starting region must be a union of complete base-level nodes");
  }

  PrincipalForest forest;
  forest.a = a;
  forest.eta = a / (a - 1.0);
  forest.h = h;
  forest.base_level = base_level;
  forest.base_scale = base_scale;
  forest.domain = omega0;
  forest.root.level = base_level;
  forest.root.scale = base_scale;
  forest.root.support = LeafSet(space.leaf_count());
  forest.root.exceptional = LeafSet(space.leaf_count());
  forest.root.tau.assign(space.leaf_count(), kLevelInfinity);

  ForestBuilder builder(space, h, a);
  std::vector<std::size_t> base_nodes;
  for (std::size_t k = 0; k < space.node_count(base_level); ++k) {
    if (!omega0.contains(space.node_begin(base_level, k))) continue;
    double avg = builder.average(base_level, k);
    if (!(avg > 0.0)) continue;
    if (scale_index(avg, a) != base_scale) continue;
    base_nodes.push_back(k);
    for (std::size_t leaf = space.node_begin(base_level, k);
         leaf < space.node_end(base_level, k); ++leaf)
      forest.root.support.add(leaf);
  }
  if (base_nodes.empty()) return forest;
  forest.empty = false;
  builder.fill(forest.root, base_nodes);
  return forest;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

namespace {

// Depth-first visit of every set in the forest.
template <typename Fn>
void walk(const PrincipalSet& set, Fn&& fn) {
  fn(set);
  for (const PrincipalSet& child : set.children) walk(child, fn);
}

std::string set_label(const PrincipalSet& set) {
  return "set at level " + std::to_string(set.level) + " scale " + std::to_string(set.scale);
}

void fail(CheckResult& r, const std::string& detail, std::optional<std::size_t> leaf = {}) {
  if (!r.pass) return;
  r.pass = false;
  r.detail = detail;
  r.counterexample_leaf = leaf;
}

}  // namespace

bool PropertyReport::all_pass() const {
  for (const CheckResult& r : property)
    if (!r.pass) return false;
  return mass_bound.pass;
}

PropertyReport verify_properties(const FilteredSpace& space, const PrincipalForest& forest) {
  PropertyReport report;
  if (forest.empty) {
    report.empty_forest = true;
    return report;
  }
  std::size_t n = space.leaf_count();
  double a = forest.a;
  std::vector<std::vector<double>> avg = all_level_averages(space, forest.h);

  // (1) The exceptional parts tile the root set exactly once.
  {
    std::vector<int> hits(n, 0);
    walk(forest.root, [&](const PrincipalSet& set) {
      for (std::size_t leaf = 0; leaf < n; ++leaf)
        if (set.exceptional.contains(leaf)) ++hits[leaf];
    });
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
      int want = forest.root.support.contains(leaf) ? 1 : 0;
      if (hits[leaf] != want) {
        fail(report.property[0],
             "leaf " + std::to_string(leaf) + " covered " + std::to_string(hits[leaf]) +
                 " times by exceptional parts, expected " + std::to_string(want),
             leaf);
        break;
      }
    }
  }

  walk(forest.root, [&](const PrincipalSet& set) {
    ++report.sets_checked;
    double cut = power_int(a, set.scale + 1);
    const std::vector<double>& level_avg = avg[static_cast<std::size_t>(set.level)];

    double support_mass = 0.0;
    double exceptional_mass = 0.0;
    for (std::size_t k = 0; k < space.node_count(set.level); ++k) {
      std::size_t begin = space.node_begin(set.level, k);
      std::size_t end = space.node_end(set.level, k);
      std::size_t inside = 0;
      for (std::size_t leaf = begin; leaf < end; ++leaf)
        if (set.support.contains(leaf)) ++inside;
      if (inside == 0) continue;

      // (2) Support is a union of complete nodes of the set's level.
      if (inside != end - begin) {
        fail(report.property[1], set_label(set) + ": node " + std::to_string(k) +
                                     " is only partially inside the support");
        continue;
      }

      double node_mass = space.node_measure(set.level, k);
      double node_exceptional = 0.0;
      for (std::size_t leaf = begin; leaf < end; ++leaf)
        if (set.exceptional.contains(leaf)) node_exceptional += space.leaf_measure(leaf);
      support_mass += node_mass;
      exceptional_mass += node_exceptional;

      // (3) Every node keeps at least a 1/eta share in the exceptional part.
      if (!leq_rel(node_mass, forest.eta * node_exceptional, 1e-9))
        fail(report.property[2],
             set_label(set) + ": node " + std::to_string(k) + " keeps only a " +
                 std::to_string(node_exceptional / node_mass) + " share of its mass");

      // (4) The level average lands in the set's slice.
      if (!(level_avg[k] > 0.0) || scale_index(level_avg[k], a) != set.scale)
        fail(report.property[3], set_label(set) + ": node " + std::to_string(k) +
                                     " has level average " + std::to_string(level_avg[k]) +
                                     " outside the slice");
    }

    if (!leq_rel(support_mass, forest.eta * exceptional_mass, 1e-9))
      fail(report.mass_bound, set_label(set) + ": mass " + std::to_string(support_mass) +
                                  " exceeds eta * " + std::to_string(exceptional_mass));

    // (5) Tail averages of the restriction stay below the stopping cut on the
    // exceptional part. The restriction agrees with h on every node under the
    // support, so this is the construction's own comparison.
    SimpleFunction restricted(n, 0.0);
    for (std::size_t leaf = 0; leaf < n; ++leaf)
      if (set.support.contains(leaf)) restricted[leaf] = forest.h[leaf];
    for (int j = set.level; j <= space.depth(); ++j) {
      std::vector<double> tail = node_averages(space, restricted, j);
      for (std::size_t k = 0; k < tail.size(); ++k) {
        if (!(tail[k] <= cut)) {
          std::size_t begin = space.node_begin(j, k);
          std::size_t end = space.node_end(j, k);
          for (std::size_t leaf = begin; leaf < end; ++leaf)
            if (set.exceptional.contains(leaf)) {
              fail(report.property[4],
                   set_label(set) + ": tail average " + std::to_string(tail[k]) +
                       " at level " + std::to_string(j) + " exceeds " + std::to_string(cut),
                   leaf);
              break;
            }
        }
      }
    }

    // (6) Strictly before the stopping time the running average sits at or
    // below the cut; at the stopping level it exceeds it.
    for (std::size_t leaf = 0; leaf < n && report.property[5].pass; ++leaf) {
      if (!set.support.contains(leaf)) continue;
      int stop = set.tau[leaf];
      int last = stop == kLevelInfinity ? space.depth() : stop - 1;
      for (int j = set.level; j <= last; ++j) {
        double value = avg[static_cast<std::size_t>(j)][space.node_of(j, leaf)];
        if (!(value <= cut))
          fail(report.property[5],
               set_label(set) + ": average " + std::to_string(value) + " at level " +
                   std::to_string(j) + " exceeds the cut before the stopping time",
               leaf);
      }
      if (stop != kLevelInfinity) {
        double value = avg[static_cast<std::size_t>(stop)][space.node_of(stop, leaf)];
        if (!(value > cut))
          fail(report.property[5],
               set_label(set) + ": average " + std::to_string(value) +
                   " at the stopping level does not exceed the cut",
               leaf);
      }
    }
  });

  return report;
}

DominationReport tail_domination_check(const FilteredSpace& space,
                                        const PrincipalForest& forest) {
  DominationReport report;
  if (forest.empty) {
    report.empty_forest = true;
    return report;
  }
  std::size_t n = space.leaf_count();

  SimpleFunction restricted(n, 0.0);
  for (std::size_t leaf = 0; leaf < n; ++leaf)
    if (forest.root.support.contains(leaf)) restricted[leaf] = forest.h[leaf];

  SimpleFunction full_tail = tailed_maximal(space, forest.h, forest.base_level);
  SimpleFunction restricted_tail = tailed_maximal(space, restricted, forest.base_level);
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    if (!forest.root.support.contains(leaf)) continue;
    if (full_tail[leaf] != restricted_tail[leaf]) {
      report.restriction_identity = false;
      report.counterexample_leaf = leaf;
      break;
    }
  }

  bool first = true;
  walk(forest.root, [&](const PrincipalSet& set) {
    double bound = power_int(forest.a, set.scale + 1);
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
      if (!set.exceptional.contains(leaf)) continue;
      double margin = bound - full_tail[leaf];
      if (first || margin < report.min_margin) {
        report.min_margin = margin;
        first = false;
      }
      if (!(full_tail[leaf] <= bound) && report.dominated) {
        report.dominated = false;
        report.counterexample_leaf = leaf;
      }
    }
  });
  return report;
}

// ---------------------------------------------------------------------------
// Weighted estimate
// ---------------------------------------------------------------------------

bool SparseBoundReport::pass(double rel_slack) const {
  for (const SparseBoundRow& row : rows) {
    if (!leq_rel(row.lhs, row.rhs, rel_slack)) return false;
    if (!leq_rel(row.lhs_envelope, row.rhs_envelope, rel_slack)) return false;
  }
  return leq_rel(global_lhs, global_rhs, rel_slack);
}

SparseBoundReport principal_weighted_estimate(const FilteredSpace& space,
                                              const SimpleFunction& f, const Weight& v,
                                              double p, double a) {
  require_same_shape(space, f);
  require_same_shape(space, v.values());
  require_finite(f);
  for (double x : f)
    if (x < 0.0) throw ParameterError("the weighted estimate expects f >= 0");
  if (!(a > 1.0) || !std::isfinite(a)) throw ParameterError("ratio a must exceed 1");

  double pc = conjugate_exponent(p);
  Weight sigma = dual_weight(v, p);
  double characteristic = ap_characteristic(space, v, p).characteristic;

  SparseBoundReport report;
  double eta = a / (a - 1.0);
  report.constant =
      a * a * std::pow(eta, pc - 1.0) * pc * std::pow(characteristic, pc / p);

  std::size_t n = space.leaf_count();
  SimpleFunction g(n);
  for (std::size_t leaf = 0; leaf < n; ++leaf) g[leaf] = f[leaf] * sigma[leaf];

  double fp_sigma_total = 0.0;
  for (std::size_t leaf = 0; leaf < n; ++leaf)
    fp_sigma_total += pow_abs(f[leaf], p) * sigma[leaf] * space.leaf_measure(leaf);

  for (int i = 0; i <= space.depth(); ++i) {
    std::vector<double> avg = node_averages(space, g, i);
    // Realized slices at this level; zero-average nodes carry no part of g.
    std::vector<int> scales;
    for (double value : avg)
      if (value > 0.0) {
        int k = scale_index(value, a);
        if (std::find(scales.begin(), scales.end(), k) == scales.end()) scales.push_back(k);
      }
    std::sort(scales.begin(), scales.end());

    for (int k : scales) {
      PrincipalForest forest =
          build_principal_forest(space, g, a, i, k, space.all_leaves());
      const LeafSet& slice = forest.root.support;

      SimpleFunction g_slice(n, 0.0);
      for (std::size_t leaf = 0; leaf < n; ++leaf)
        if (slice.contains(leaf)) g_slice[leaf] = g[leaf];
      SimpleFunction tail = tailed_maximal(space, g_slice, i);

      double lhs_p = 0.0;
      double fp_sigma_slice = 0.0;
      for (std::size_t leaf = 0; leaf < n; ++leaf) {
        if (!slice.contains(leaf)) continue;
        double mass = space.leaf_measure(leaf);
        lhs_p += pow_abs(tail[leaf], p) * v[leaf] * mass;
        fp_sigma_slice += pow_abs(f[leaf], p) * sigma[leaf] * mass;
      }

      double envelope = 0.0;
      walk(forest.root, [&](const PrincipalSet& set) {
        double weighted_exceptional = 0.0;
        for (std::size_t leaf = 0; leaf < n; ++leaf)
          if (set.exceptional.contains(leaf))
            weighted_exceptional += v[leaf] * space.leaf_measure(leaf);
        envelope += std::pow(power_int(a, set.scale - 1), p) * weighted_exceptional;
      });

      SparseBoundRow row;
      row.base_level = i;
      row.scale = k;
      row.slice_mass = measure(space, slice);
      row.lhs = std::pow(lhs_p, 1.0 / p);
      row.rhs = report.constant * std::pow(fp_sigma_slice, 1.0 / p);
      row.lhs_envelope = lhs_p;
      row.rhs_envelope = std::pow(a, 2.0 * p) * envelope;
      report.rows.push_back(row);
    }
  }

  SimpleFunction mg = doob_maximal(space, g);
  double global_p = 0.0;
  for (std::size_t leaf = 0; leaf < n; ++leaf)
    global_p += pow_abs(mg[leaf], p) * v[leaf] * space.leaf_measure(leaf);
  report.global_lhs = std::pow(global_p, 1.0 / p);
  report.global_rhs = report.constant * std::pow(fp_sigma_total, 1.0 / p);
  return report;
}

// ---------------------------------------------------------------------------
// Document
// ---------------------------------------------------------------------------

namespace {
nlohmann::json set_json(const PrincipalSet& set) {
  nlohmann::json doc;
  doc["level"] = set.level;
  doc["scale"] = set.scale;
  doc["support"] = set.support.indices();
  doc["exceptional"] = set.exceptional.indices();
  nlohmann::json children = nlohmann::json::array();
  for (const PrincipalSet& child : set.children) children.push_back(set_json(child));
  doc["children"] = children;
  return doc;
}
}  // namespace

std::string forest_document(const PrincipalForest& forest) {
  nlohmann::json doc;
  doc["empty"] = forest.empty;
  doc["a"] = forest.a;
  doc["eta"] = forest.eta;
  doc["base_level"] = forest.base_level;
  doc["base_scale"] = forest.base_scale;
  doc["domain"] = forest.domain.indices();
  doc["root"] = forest.empty ? nlohmann::json(nullptr) : set_json(forest.root);
  return doc.dump();
}

}  // namespace doobmax
