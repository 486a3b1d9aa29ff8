#include "doobmax/suites.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "doobmax/format.hpp"
#include "doobmax/numeric.hpp"

namespace doobmax {

FilteredSpace random_dyadic_space(SplitMix64& rng, int max_depth) {
  if (max_depth < 1 || max_depth > kMaxDyadicDepth)
    throw ParameterError("suite depth must lie in {1.." + std::to_string(kMaxDyadicDepth) +
                         "}");
  int depth = static_cast<int>(rng.next_range(1, static_cast<std::uint64_t>(max_depth)));
  std::size_t n = std::size_t{1} << depth;
  if (rng.next_double() < 0.25) return FilteredSpace::dyadic(depth);
  std::vector<double> masses(n);
  for (double& m : masses) m = std::exp(rng.next_in(-3.0, 3.0)) * std::ldexp(1.0, -depth);
  return FilteredSpace::dyadic(depth, masses);
}

SimpleFunction random_function(SplitMix64& rng, std::size_t leaves, bool signed_values,
                               double zero_fraction) {
  SimpleFunction f(leaves);
  for (double& x : f) {
    if (rng.next_double() < zero_fraction) {
      x = 0.0;
      continue;
    }
    x = std::exp(rng.next_in(-3.0, 3.0));
    if (signed_values && rng.next_double() < 0.5) x = -x;
  }
  return f;
}

Weight random_weight(SplitMix64& rng, std::size_t leaves, double spread) {
  SimpleFunction w(leaves);
  for (double& x : w) x = std::exp(rng.next_in(-spread, spread));
  return Weight(std::move(w));
}

namespace {

constexpr double kExponents[] = {1.5, 2.0, 3.0, 8.0};

struct MarginTracker {
  double worst = std::numeric_limits<double>::infinity();
  void see(double margin) { worst = std::min(worst, margin); }
  double value() const { return std::isfinite(worst) ? worst : 0.0; }
};

std::string failure_note(std::uint64_t seed, std::size_t trial,
                         std::initializer_list<std::pair<const char*, nlohmann::json>> extra) {
  nlohmann::json doc;
  doc["seed"] = seed;
  doc["trial"] = trial;
  for (const auto& [key, value] : extra) doc[key] = value;
  return doc.dump();
}

}  // namespace

SuiteResult unweighted_doob_suite(std::uint64_t seed, std::size_t trials,
                                  std::span<const double> p_values, int max_depth) {
  if (p_values.empty()) throw ParameterError("the suite needs at least one exponent");
  SuiteResult result;
  result.name = "unweighted_doob";
  result.csv = "trial,depth,p,lhs,rhs,margin\n";
  SplitMix64 root(seed);
  MarginTracker tracker;

  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng = root.split(t);
    FilteredSpace space = random_dyadic_space(rng, max_depth);
    SimpleFunction f = random_function(rng, space.leaf_count(), true, 0.2);
    double p = p_values[t % p_values.size()];
    Weight plain(SimpleFunction(space.leaf_count(), 1.0));

    double lhs = weighted_norm(space, doob_maximal(space, f), plain, p);
    double rhs = conjugate_exponent(p) * weighted_norm(space, f, plain, p);
    double margin = rel_margin(lhs, rhs);
    tracker.see(margin);
    ++result.trials;
    ++result.checks;
    if (!leq_rel(lhs, rhs, 1e-9)) {
      ++result.failures;
      if (result.first_failure.empty())
        result.first_failure = failure_note(
            seed, t, {{"p", p}, {"depth", space.depth()}, {"lhs", lhs}, {"rhs", rhs}});
    }
    result.csv += std::to_string(t) + "," + std::to_string(space.depth()) + "," +
                  format_double(p) + "," + format_double(lhs) + "," + format_double(rhs) +
                  "," + format_double(margin) + "\n";
  }
  result.worst_margin = tracker.value();
  return result;
}

SuiteResult bracket_suite(std::uint64_t seed, std::size_t trials,
                          std::span<const double> p_values, int max_depth) {
  if (p_values.empty()) throw ParameterError("the suite needs at least one exponent");
  SuiteResult result;
  result.name = "bracket";
  result.csv = "trial,depth,p,characteristic,upper_margin,lower_margin\n";
  SplitMix64 root(seed);
  MarginTracker tracker;

  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng = root.split(t);
    FilteredSpace space = random_dyadic_space(rng, max_depth);
    SimpleFunction f = random_function(rng, space.leaf_count(), false, 0.2);
    Weight v = random_weight(rng, space.leaf_count(), 2.5);
    double p = p_values[t % p_values.size()];
    ++result.trials;

    UpperBoundReport upper = verify_upper(space, f, v, p);
    double upper_margin = rel_margin(upper.lhs, upper.rhs);
    tracker.see(upper_margin);
    ++result.checks;
    if (!upper.pass()) {
      ++result.failures;
      if (result.first_failure.empty())
        result.first_failure =
            failure_note(seed, t,
                         {{"p", p},
                          {"depth", space.depth()},
                          {"check", "upper"},
                          {"lhs", upper.lhs},
                          {"rhs", upper.rhs}});
    }

    // The best node seed really attains the test-family value.
    TestFamilyResult family = ap_lower_test_family(space, v, p);
    SimpleFunction sigma = dual_weight(v, p).values();
    SimpleFunction seedf(space.leaf_count(), 0.0);
    for (std::size_t leaf = space.node_begin(family.argmax_level, family.argmax_node);
         leaf < space.node_end(family.argmax_level, family.argmax_node); ++leaf)
      seedf[leaf] = sigma[leaf];
    double attained = maximal_ratio(space, seedf, v, p);
    double lower_margin = rel_margin(family.max_ratio, attained);
    tracker.see(lower_margin);
    ++result.checks;
    if (!leq_rel(family.max_ratio, attained, 1e-9)) {
      ++result.failures;
      if (result.first_failure.empty())
        result.first_failure =
            failure_note(seed, t,
                         {{"p", p},
                          {"depth", space.depth()},
                          {"check", "lower"},
                          {"family", family.max_ratio},
                          {"attained", attained}});
    }

    result.csv += std::to_string(t) + "," + std::to_string(space.depth()) + "," +
                  format_double(p) + "," + format_double(upper.constant) + "," +
                  format_double(upper_margin) + "," + format_double(lower_margin) + "\n";
  }
  result.worst_margin = tracker.value();
  return result;
}

SuiteResult family_identity_suite(std::uint64_t seed, std::size_t trials, int max_depth) {
  SuiteResult result;
  result.name = "family_identity";
  result.csv = "trial,depth,p,characteristic,family_p,margin\n";
  SplitMix64 root(seed);
  MarginTracker tracker;

  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng = root.split(t);
    FilteredSpace space = random_dyadic_space(rng, max_depth);
    Weight v = random_weight(rng, space.leaf_count(), 2.5);
    double p = kExponents[t % 4];
    ++result.trials;

    double characteristic = ap_characteristic(space, v, p).characteristic;
    double family_p = std::pow(ap_lower_test_family(space, v, p).max_ratio, p);
    double rel = std::fabs(family_p - characteristic) / characteristic;
    double margin = 1e-9 - rel;
    tracker.see(margin);
    ++result.checks;
    if (!(rel <= 1e-9)) {
      ++result.failures;
      if (result.first_failure.empty())
        result.first_failure = failure_note(seed, t,
                                            {{"p", p},
                                             {"depth", space.depth()},
                                             {"characteristic", characteristic},
                                             {"family_p", family_p}});
    }
    result.csv += std::to_string(t) + "," + std::to_string(space.depth()) + "," +
                  format_double(p) + "," + format_double(characteristic) + "," +
                  format_double(family_p) + "," + format_double(margin) + "\n";
  }
  result.worst_margin = tracker.value();
  return result;
}

SuiteResult principal_suite(std::uint64_t seed, std::size_t trials, int max_depth) {
  SuiteResult result;
  result.name = "principal";
  result.csv = "trial,depth,a,base_level,base_scale,sets,empty,pass\n";
  SplitMix64 root(seed);
  MarginTracker tracker;

  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng = root.split(t);
    FilteredSpace space = random_dyadic_space(rng, max_depth);
    SimpleFunction h = random_function(rng, space.leaf_count(), false, 0.3);
    double p = kExponents[t % 4];
    double a = t % 3 == 0 ? 1.5 : t % 3 == 1 ? 2.0 : (2.0 * p - 1.0) / (2.0 * p - 2.0);
    int base_level = static_cast<int>(rng.next_range(0, static_cast<std::uint64_t>(space.depth())));

    // Aim at a realized slice so most forests are nonempty.
    std::vector<double> avg = node_averages(space, h, base_level);
    int base_scale = 0;
    std::vector<std::size_t> positive;
    for (std::size_t k = 0; k < avg.size(); ++k)
      if (avg[k] > 0.0) positive.push_back(k);
    if (!positive.empty()) {
      std::size_t pick = positive[rng.next_range(0, positive.size() - 1)];
      base_scale = scale_index(avg[pick], a);
    }

    LeafSet omega0 = space.all_leaves();
    if (rng.next_double() < 0.25) {
      omega0 = LeafSet(space.leaf_count());
      for (std::size_t k = 0; k < space.node_count(base_level); ++k)
        if (rng.next_double() < 0.5)
          for (std::size_t leaf = space.node_begin(base_level, k);
               leaf < space.node_end(base_level, k); ++leaf)
            omega0.add(leaf);
    }

    PrincipalForest forest = build_principal_forest(space, h, a, base_level, base_scale, omega0);
    PropertyReport props = verify_properties(space, forest);
    DominationReport dom = tail_domination_check(space, forest);
    ++result.trials;
    result.checks += 8;
    tracker.see(dom.min_margin);

    bool ok = props.all_pass() && dom.pass();
    if (!ok) {
      for (const CheckResult& check : props.property)
        if (!check.pass) ++result.failures;
      if (!props.mass_bound.pass) ++result.failures;
      if (!dom.pass()) ++result.failures;
      if (result.first_failure.empty()) {
        std::string detail;
        for (const CheckResult& check : props.property)
          if (!check.pass && detail.empty()) detail = check.detail;
        if (detail.empty() && !props.mass_bound.pass) detail = props.mass_bound.detail;
        if (detail.empty())
          detail = dom.restriction_identity ? "domination fails" : "restriction differs";
        result.first_failure = failure_note(
            seed, t, {{"a", a}, {"base_level", base_level}, {"detail", detail}});
      }
    }
    result.csv += std::to_string(t) + "," + std::to_string(space.depth()) + "," +
                  format_double(a) + "," + std::to_string(base_level) + "," +
                  std::to_string(base_scale) + "," + std::to_string(props.sets_checked) + "," +
                  (forest.empty ? "1" : "0") + "," + (ok ? "1" : "0") + "\n";
  }
  result.worst_margin = tracker.value();
  return result;
}

SuiteResult sparse_bound_suite(std::uint64_t seed, std::size_t trials, int max_depth) {
  SuiteResult result;
  result.name = "sparse_bound";
  result.csv = "trial,depth,p,a,rows,global_lhs,global_rhs,margin\n";
  SplitMix64 root(seed);
  MarginTracker tracker;

  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng = root.split(t);
    FilteredSpace space = random_dyadic_space(rng, max_depth);
    SimpleFunction f = random_function(rng, space.leaf_count(), false, 0.25);
    Weight v = random_weight(rng, space.leaf_count(), 2.0);
    double p = kExponents[t % 4];
    double a = t % 3 == 0 ? 1.5 : t % 3 == 1 ? 2.0 : (2.0 * p - 1.0) / (2.0 * p - 2.0);

    SparseBoundReport report = principal_weighted_estimate(space, f, v, p, a);
    ++result.trials;
    result.checks += 2 * report.rows.size() + 1;
    double margin = rel_margin(report.global_lhs, report.global_rhs);
    for (const SparseBoundRow& row : report.rows) {
      margin = std::min(margin, rel_margin(row.lhs, row.rhs));
      margin = std::min(margin, rel_margin(row.lhs_envelope, row.rhs_envelope));
    }
    tracker.see(margin);
    if (!report.pass()) {
      ++result.failures;
      if (result.first_failure.empty())
        result.first_failure = failure_note(seed, t,
                                            {{"p", p},
                                             {"a", a},
                                             {"depth", space.depth()},
                                             {"global_lhs", report.global_lhs},
                                             {"global_rhs", report.global_rhs}});
    }
    result.csv += std::to_string(t) + "," + std::to_string(space.depth()) + "," +
                  format_double(p) + "," + format_double(a) + "," +
                  std::to_string(report.rows.size()) + "," + format_double(report.global_lhs) +
                  "," + format_double(report.global_rhs) + "," + format_double(margin) + "\n";
  }
  result.worst_margin = tracker.value();
  return result;
}

SuiteResult stopping_suite(std::uint64_t seed, std::size_t trials,
                           std::span<const double> b_values, int max_depth) {
  if (b_values.empty()) throw ParameterError("the suite needs at least one ratio");
  SuiteResult result;
  result.name = "stopping";
  result.csv = "trial,depth,p,b,cells,margin\n";
  SplitMix64 root(seed);
  MarginTracker tracker;

  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng = root.split(t);
    FilteredSpace space = random_dyadic_space(rng, max_depth);
    SimpleFunction f = random_function(rng, space.leaf_count(), true, 0.2);
    Weight v = random_weight(rng, space.leaf_count(), 2.0);
    double p = kExponents[t % 4];
    double b = b_values[t % b_values.size()];

    StoppingDecomposition dec = build_decomposition(space, f, v, p, b);
    PartitionReport partition = verify_partition(space, dec, f);
    ChainReport chain = verify_chain(space, dec, f, v, p);
    ++result.trials;
    result.checks += 6;
    double margin = std::min({rel_margin(chain.lhs, chain.cell_bound),
                              rel_margin(chain.cell_bound, chain.weak_bound),
                              rel_margin(chain.lhs, chain.final_bound)});
    tracker.see(margin);

    std::size_t failed = 0;
    if (!partition.pass) ++failed;
    if (!chain.lhs_le_cell) ++failed;
    if (!chain.cells_le_weak) ++failed;
    if (!chain.lhs_le_final) ++failed;
    if (!chain.grid_decreasing) ++failed;
    if (!chain.norm_le_limit) ++failed;
    result.failures += failed;
    if (failed > 0 && result.first_failure.empty()) {
      std::string detail = !partition.pass ? partition.detail : "chain inequality fails";
      result.first_failure = failure_note(
          seed, t, {{"p", p}, {"b", b}, {"depth", space.depth()}, {"detail", detail}});
    }
    result.csv += std::to_string(t) + "," + std::to_string(space.depth()) + "," +
                  format_double(p) + "," + format_double(b) + "," +
                  std::to_string(dec.cells.size()) + "," + format_double(margin) + "\n";
  }
  result.worst_margin = tracker.value();
  return result;
}

}  // namespace doobmax
