#include "doobmax/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "doobmax/constants.hpp"
#include "doobmax/format.hpp"
#include "doobmax/numeric.hpp"

namespace doobmax {

double weighted_norm(const FilteredSpace& space, const SimpleFunction& f, const Weight& w,
                     double p) {
  require_same_shape(space, f);
  require_same_shape(space, w.values());
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("norm exponent must satisfy p >= 1");
  double sum = 0.0;
  for (std::size_t leaf = 0; leaf < f.size(); ++leaf)
    sum += pow_abs(f[leaf], p) * w[leaf] * space.leaf_measure(leaf);
  return std::pow(sum, 1.0 / p);
}

double maximal_ratio(const FilteredSpace& space, const SimpleFunction& f, const Weight& v,
                     double p) {
  double denominator = weighted_norm(space, f, v, p);
  if (denominator == 0.0)
    throw ParameterError("the maximal ratio needs a function with a nonzero value");
  return weighted_norm(space, doob_maximal(space, f), v, p) / denominator;
}

bool UpperBoundReport::pass(double rel_slack) const { return leq_rel(lhs, rhs, rel_slack); }

UpperBoundReport verify_upper(const FilteredSpace& space, const SimpleFunction& f,
                              const Weight& v, double p) {
  ConstantProfile prof = profile(p);
  double characteristic = ap_characteristic(space, v, p).characteristic;
  UpperBoundReport report;
  report.constant = prof.bound_sharp * std::pow(characteristic, 1.0 / (p - 1.0));
  report.lhs = weighted_norm(space, doob_maximal(space, f), v, p);
  report.rhs = report.constant * weighted_norm(space, f, v, p);
  report.slack = report.rhs - report.lhs;
  return report;
}

TestFamilyResult ap_lower_test_family(const FilteredSpace& space, const Weight& v, double p) {
  require_same_shape(space, v.values());
  conjugate_exponent(p);
  Weight sigma = dual_weight(v, p);
  TestFamilyResult result;
  double best_p = 0.0;
  for (int level = 0; level <= space.depth(); ++level) {
    for (std::size_t k = 0; k < space.node_count(level); ++k) {
      double sigma_sum = 0.0;
      double v_sum = 0.0;
      for (std::size_t leaf = space.node_begin(level, k); leaf < space.node_end(level, k);
           ++leaf) {
        double mass = space.leaf_measure(leaf);
        sigma_sum += sigma[leaf] * mass;
        v_sum += v[leaf] * mass;
      }
      double average = sigma_sum / space.node_measure(level, k);
      double ratio_p = std::pow(average, p) * v_sum / sigma_sum;
      if (ratio_p > best_p) {
        best_p = ratio_p;
        result.argmax_level = level;
        result.argmax_node = k;
      }
    }
  }
  result.max_ratio = std::pow(best_p, 1.0 / p);
  return result;
}

// ---------------------------------------------------------------------------
// Coordinate ascent on the maximal ratio
// ---------------------------------------------------------------------------

namespace {

// Keeps ||Mf||^p_{L^p(v)} and ||f||^p_{L^p(v)} current under single-leaf
// multiplicative updates. A trial touches only the node path above the leaf;
// every other leaf's maximal value can move only where the path's running
// maximum beats its off-path suffix maximum, so whole sibling subtrees are
// skipped via per-node minima. Accepted steps rebuild every table from
// scratch, which keeps float drift out of long ascents.
class RatioSearch {
 public:
  RatioSearch(const FilteredSpace& space, const Weight& v, double p)
      : space_(space),
        p_(p),
        n_(space.leaf_count()),
        depth_(space.depth()),
        stride_(static_cast<std::size_t>(space.depth()) + 2),
        vmu_(n_),
        overflow_guard_(std::pow(1e280, 1.0 / p)) {
    for (std::size_t leaf = 0; leaf < n_; ++leaf)
      vmu_[leaf] = v[leaf] * space.leaf_measure(leaf);
    first_child_.resize(static_cast<std::size_t>(depth_));
    for (int level = 0; level < depth_; ++level) {
      auto& row = first_child_[static_cast<std::size_t>(level)];
      row.resize(space.node_count(level) + 1);
      for (std::size_t k = 0; k < space.node_count(level); ++k)
        row[k] = space.node_of(level + 1, space.node_begin(level, k));
      row.back() = space.node_count(level + 1);
    }
    node_vmu_.resize(static_cast<std::size_t>(depth_) + 1);
    for (int level = 0; level <= depth_; ++level) {
      auto& per_node = node_vmu_[static_cast<std::size_t>(level)];
      per_node.resize(space.node_count(level));
      for (std::size_t k = 0; k < per_node.size(); ++k) {
        double sum = 0.0;
        for (std::size_t leaf = space.node_begin(level, k); leaf < space.node_end(level, k);
             ++leaf)
          sum += vmu_[leaf];
        per_node[k] = sum;
      }
    }
  }

  // Runs sweeps of x2 / x0.5 single-leaf trials until none is accepted, the
  // accepted-step budget runs out, or the sweep cap is reached. Returns the
  // final ratio; `witness` receives the final function.
  double ascend(SimpleFunction f, std::size_t budget, SimpleFunction& witness) {
    rebuild(std::move(f));
    std::size_t accepted = 0;
    for (int sweep = 0; sweep < kMaxSweeps && accepted < budget; ++sweep) {
      bool any = false;
      for (std::size_t leaf = 0; leaf < n_ && accepted < budget; ++leaf) {
        if (f_[leaf] == 0.0) continue;
        bool grew = false;
        for (int rep = 0; rep < kMaxRepeats && accepted < budget; ++rep) {
          if (!try_step(leaf, 2.0)) break;
          ++accepted;
          any = grew = true;
        }
        if (grew) continue;
        for (int rep = 0; rep < kMaxRepeats && accepted < budget; ++rep) {
          if (!try_step(leaf, 0.5)) break;
          ++accepted;
          any = true;
        }
      }
      if (!any) break;
    }
    witness = f_;
    return std::pow(maximal_p_, 1.0 / p_) / std::pow(norm_p_, 1.0 / p_);
  }

 private:
  static constexpr int kMaxRepeats = 64;
  static constexpr int kMaxSweeps = 50;

  std::size_t row(int level) const { return static_cast<std::size_t>(level); }
  double suffix(std::size_t leaf, int level) const {
    return suffix_max_[leaf * stride_ + static_cast<std::size_t>(level)];
  }

  // Recomputes node sums, suffix maxima, per-node minima and both integrals
  // from the current function, rescaled to unit maximum so that repeated
  // doublings cannot overflow.
  void rebuild(SimpleFunction f) {
    f_ = std::move(f);
    double top = 0.0;
    for (double x : f_) top = std::max(top, std::fabs(x));
    if (top > 0.0 && top != 1.0)
      for (double& x : f_) x /= top;

    sums_.assign(static_cast<std::size_t>(depth_) + 1, {});
    for (int level = 0; level <= depth_; ++level) {
      auto& per_node = sums_[row(level)];
      per_node.resize(space_.node_count(level));
      for (std::size_t k = 0; k < per_node.size(); ++k) {
        double sum = 0.0;
        for (std::size_t leaf = space_.node_begin(level, k); leaf < space_.node_end(level, k);
             ++leaf)
          sum += f_[leaf] * space_.leaf_measure(leaf);
        per_node[k] = sum;
      }
    }

    suffix_max_.assign(n_ * stride_, 0.0);
    for (int level = depth_; level >= 0; --level)
      for (std::size_t k = 0; k < space_.node_count(level); ++k) {
        double value = std::fabs(sums_[row(level)][k] / space_.node_measure(level, k));
        for (std::size_t leaf = space_.node_begin(level, k); leaf < space_.node_end(level, k);
             ++leaf) {
          double below = suffix_max_[leaf * stride_ + static_cast<std::size_t>(level) + 1];
          suffix_max_[leaf * stride_ + static_cast<std::size_t>(level)] =
              std::max(value, below);
        }
      }

    node_min_.assign(static_cast<std::size_t>(depth_) + 1, {});
    node_max_.assign(static_cast<std::size_t>(depth_) + 1, {});
    for (int level = 0; level <= depth_; ++level) {
      auto& per_min = node_min_[row(level)];
      auto& per_max = node_max_[row(level)];
      per_min.resize(space_.node_count(level));
      per_max.resize(space_.node_count(level));
      for (std::size_t k = 0; k < per_min.size(); ++k) {
        double lowest = std::numeric_limits<double>::infinity();
        double highest = 0.0;
        for (std::size_t leaf = space_.node_begin(level, k); leaf < space_.node_end(level, k);
             ++leaf) {
          lowest = std::min(lowest, suffix(leaf, level));
          highest = std::max(highest, suffix(leaf, level));
        }
        per_min[k] = lowest;
        per_max[k] = highest;
      }
    }

    contribution_.resize(n_);
    maximal_p_ = 0.0;
    norm_p_ = 0.0;
    for (std::size_t leaf = 0; leaf < n_; ++leaf) {
      contribution_[leaf] = pow_abs(suffix(leaf, 0), p_) * vmu_[leaf];
      maximal_p_ += contribution_[leaf];
      norm_p_ += pow_abs(f_[leaf], p_) * vmu_[leaf];
    }
  }

  // Evaluates the single-leaf update f[x] *= factor and keeps it when the
  // ratio improves by more than one part in 1e12. Returns whether it did.
  bool try_step(std::size_t x, double factor) {
    double fx = f_[x];
    double updated = fx * factor;
    if (std::fabs(updated) > overflow_guard_ || std::fabs(updated) < 1e-140) return false;

    double norm_p = norm_p_ + (pow_abs(updated, p_) - pow_abs(fx, p_)) * vmu_[x];
    double maximal_p = maximal_p_;
    double delta = (factor - 1.0) * fx * space_.leaf_measure(x);

    // Path from the root to x, with the running maxima of the old and new
    // node averages.
    double pm_old = 0.0;
    double pm_new = 0.0;
    std::size_t node = x;  // node index at the leaf level equals the leaf
    path_.resize(static_cast<std::size_t>(depth_) + 1);
    for (int level = depth_; level >= 0; --level) {
      path_[row(level)] = node;
      if (level > 0) node = space_.parent_of(level, node);
    }
    for (int level = 0; level <= depth_; ++level) {
      std::size_t at = path_[row(level)];
      double mass = space_.node_measure(level, at);
      pm_old = std::max(pm_old, std::fabs(sums_[row(level)][at] / mass));
      pm_new = std::max(pm_new, std::fabs((sums_[row(level)][at] + delta) / mass));

      if (level == depth_) {
        maximal_p += pow_abs(pm_new, p_) * vmu_[x] - contribution_[x];
        break;
      }

      // Off-path leaves under this node meet the path exactly here, so their
      // maximal value is max(running path maximum, own suffix maximum). A
      // sibling subtree whose suffixes all clear both running maxima keeps
      // every value; one whose suffixes all fall below both swaps pm_old for
      // pm_new wholesale; only straddling subtrees need a leaf-by-leaf pass.
      double threshold = std::max(pm_old, pm_new);
      double low = std::min(pm_old, pm_new);
      double pow_old = pow_abs(pm_old, p_);
      double pow_new = pow_abs(pm_new, p_);
      std::size_t child = path_[row(level + 1)];
      const auto& fc = first_child_[row(level)];
      for (std::size_t s = fc[at]; s < fc[at + 1]; ++s) {
        if (s == child) continue;
        if (node_min_[row(level + 1)][s] >= threshold) continue;
        if (node_max_[row(level + 1)][s] < low) {
          maximal_p += (pow_new - pow_old) * node_vmu_[row(level + 1)][s];
          continue;
        }
        for (std::size_t leaf = space_.node_begin(level + 1, s);
             leaf < space_.node_end(level + 1, s); ++leaf) {
          double tail = suffix(leaf, level + 1);
          if (tail >= threshold) continue;
          double fresh = std::max(pm_new, tail);
          maximal_p += pow_abs(fresh, p_) * vmu_[leaf] - contribution_[leaf];
        }
      }
    }

    if (!(maximal_p > 0.0) || !(norm_p > 0.0)) return false;
    double gate = std::pow(1.0 + 1e-12, p_);
    if (!(maximal_p * norm_p_ > maximal_p_ * norm_p * gate)) return false;

    f_[x] = updated;
    rebuild(std::move(f_));
    return true;
  }

  const FilteredSpace& space_;
  double p_;
  std::size_t n_;
  int depth_;
  std::size_t stride_;
  SimpleFunction vmu_;
  std::vector<std::vector<std::size_t>> first_child_;

  SimpleFunction f_;
  std::vector<std::vector<double>> sums_;      // node integrals of f
  std::vector<double> suffix_max_;             // per leaf, per level: max |avg| below
  std::vector<std::vector<double>> node_min_;  // per node: min suffix over its leaves
  std::vector<std::vector<double>> node_max_;  // per node: max suffix over its leaves
  std::vector<std::vector<double>> node_vmu_;  // per node: sum of v * mass
  std::vector<double> contribution_;           // per leaf: (Mf)^p v mass
  std::vector<std::size_t> path_;
  double maximal_p_ = 0.0;
  double norm_p_ = 0.0;
  double overflow_guard_;  // |f| cap keeping f^p finite across sweeps
};

}  // namespace

NormEstimate extremal_search(const FilteredSpace& space, const Weight& v, double p,
                             std::size_t budget) {
  require_same_shape(space, v.values());
  NormEstimate estimate;
  estimate.ap = ap_characteristic(space, v, p);
  ConstantProfile prof = profile(p);
  estimate.upper_constant =
      prof.bound_sharp * std::pow(estimate.ap.characteristic, 1.0 / (p - 1.0));

  SimpleFunction sigma = dual_weight(v, p).values();
  SimpleFunction node_seed(space.leaf_count(), 0.0);
  for (std::size_t leaf = space.node_begin(estimate.ap.argmax_level, estimate.ap.argmax_node);
       leaf < space.node_end(estimate.ap.argmax_level, estimate.ap.argmax_node); ++leaf)
    node_seed[leaf] = sigma[leaf];

  double sigma_ratio = maximal_ratio(space, sigma, v, p);
  double node_ratio = maximal_ratio(space, node_seed, v, p);
  estimate.seed_ratio = std::max(sigma_ratio, node_ratio);

  if (budget == 0) {
    estimate.best_ratio = estimate.seed_ratio;
    estimate.witness = sigma_ratio >= node_ratio ? std::move(sigma) : std::move(node_seed);
    return estimate;
  }

  RatioSearch search(space, v, p);
  SimpleFunction sigma_witness;
  double best = search.ascend(sigma, budget, sigma_witness);
  estimate.witness = std::move(sigma_witness);
  if (estimate.ap.argmax_level > 0) {
    SimpleFunction node_witness;
    double from_node = search.ascend(node_seed, budget, node_witness);
    if (from_node > best) {
      best = from_node;
      estimate.witness = std::move(node_witness);
    }
  }
  estimate.best_ratio = std::max(best, estimate.seed_ratio);
  return estimate;
}

// ---------------------------------------------------------------------------
// Sharpness table
// ---------------------------------------------------------------------------

bool SharpnessTable::within_band(double factor) const { return band_factor <= factor; }

SharpnessTable sharpness_experiment(double p, std::span<const double> alphas, int depth,
                                    std::size_t budget) {
  if (alphas.empty()) throw ParameterError("the sharpness table needs at least one alpha");
  for (double alpha : alphas)
    if (!(alpha > -1.0) || !(alpha <= 0.0))
      throw ParameterError("sharpness alphas must lie in (-1, 0]");
  conjugate_exponent(p);

  SharpnessTable table;
  table.p = p;
  table.depth = depth;
  FilteredSpace space = FilteredSpace::dyadic(depth);

  for (double alpha : alphas) {
    Weight v = power_weight(space, alpha);
    NormEstimate estimate = extremal_search(space, v, p, budget);
    SharpnessRow row;
    row.alpha = alpha;
    row.ap_char = estimate.ap.characteristic;
    row.best_ratio = estimate.best_ratio;
    row.normalized_ratio =
        estimate.best_ratio / std::pow(estimate.ap.characteristic, 1.0 / (p - 1.0));
    row.upper_bound = estimate.upper_constant;
    table.rows.push_back(row);
  }

  double norm_lo = table.rows.front().normalized_ratio;
  double norm_hi = norm_lo;
  double char_lo = table.rows.front().ap_char;
  double char_hi = char_lo;
  for (const SharpnessRow& row : table.rows) {
    norm_lo = std::min(norm_lo, row.normalized_ratio);
    norm_hi = std::max(norm_hi, row.normalized_ratio);
    char_lo = std::min(char_lo, row.ap_char);
    char_hi = std::max(char_hi, row.ap_char);
  }
  table.band_factor = norm_hi / norm_lo;
  table.char_span = char_hi / char_lo;
  return table;
}

std::string sharpness_csv(const SharpnessTable& table) {
  std::string out = "alpha,ap_char,best_ratio,normalized_ratio,upper_bound\n";
  for (const SharpnessRow& row : table.rows)
    out += format_double(row.alpha) + "," + format_double(row.ap_char) + "," +
           format_double(row.best_ratio) + "," + format_double(row.normalized_ratio) + "," +
           format_double(row.upper_bound) + "\n";
  return out;
}

}  // namespace doobmax
