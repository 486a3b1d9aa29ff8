#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "doobmax/weights.hpp"

namespace doobmax {

// One set of the exponential-stopping forest for a nonnegative h and ratio
// a > 1. `level`/`scale` record where and at which power of `a` the set was
// cut out; `support` is the set itself, `exceptional` the part never hit by
// the next stopping time, and `children` pick up the rest one scale jump up.
struct PrincipalSet {
  int level = 0;                  // construction level
  int scale = 0;                  // exponent k: averages sit in (a^(k-1), a^k]
  LeafSet support;                // the set P
  LeafSet exceptional;            // E(P) = P with the next stopping time never firing
  std::vector<int> tau;           // per-leaf stopping level, kLevelInfinity off support
  std::vector<PrincipalSet> children;
};

struct PrincipalForest {
  bool empty = true;              // base slice carries no mass
  double a = 0.0;
  double eta = 0.0;               // a / (a - 1)
  SimpleFunction h;
  int base_level = 0;
  int base_scale = 0;
  LeafSet domain;                 // starting region (union of base-level nodes)
  PrincipalSet root;
};

// Builds the forest for h >= 0 over `omega0` (a union of complete
// `base_level` nodes): the root set collects the leaves whose base-level
// average lies in (a^(base_scale-1), a^base_scale], each set stops at the
// first level where the running average exceeds a^(scale+1), and the leaves
// hit at level j with average in (a^(l-1), a^l] form the child with scale l.
// Levels strictly increase and scales jump by at least 2, so the recursion
// terminates at the leaf level.
PrincipalForest build_principal_forest(const FilteredSpace& space, const SimpleFunction& h,
                                       double a, int base_level, int base_scale,
                                       const LeafSet& omega0);

struct CheckResult {
  bool pass = true;
  std::string detail;
  std::optional<std::size_t> counterexample_leaf;
};

struct PropertyReport {
  // (1) exceptional parts partition the root set
  // (2) each set is a union of complete nodes of its level
  // (3) each set's level-nodes hold at least a 1/eta fraction of exceptional mass
  // (4) on each set the level average sits in (a^(scale-1), a^scale]
  // (5) tail averages of h restricted to the set stay <= a^(scale+1) on the
  //     exceptional part
  // (6) below its stopping time the running average stays <= a^(scale+1)
  std::array<CheckResult, 6> property;
  CheckResult mass_bound;        // mass(P) <= eta * mass(E(P))
  std::size_t sets_checked = 0;
  bool empty_forest = false;
  bool all_pass() const;
};

PropertyReport verify_properties(const FilteredSpace& space, const PrincipalForest& forest);

struct DominationReport {
  bool empty_forest = false;
  bool restriction_identity = true;   // tail maximal of h equals that of h restricted, on the root set
  bool dominated = true;              // tail maximal <= a^2 * a^(scale-1) on each exceptional part
  double min_margin = 0.0;            // min over leaves of bound - value
  std::optional<std::size_t> counterexample_leaf;
  bool pass() const { return restriction_identity && dominated; }
};

// Pointwise domination of the tail maximal function by the forest's
// exceptional-part envelope, scale by scale.
DominationReport tail_domination_check(const FilteredSpace& space, const PrincipalForest& forest);

struct SparseBoundRow {
  int base_level = 0;
  int scale = 0;
  double slice_mass = 0.0;
  double lhs = 0.0, rhs = 0.0;              // per-slice L^p(v) estimate
  double lhs_envelope = 0.0, rhs_envelope = 0.0;  // integrated envelope bound
};

struct SparseBoundReport {
  std::vector<SparseBoundRow> rows;   // one row per (base level, realized scale)
  double global_lhs = 0.0;            // || M(f sigma) ||_{L^p(v)}
  double global_rhs = 0.0;            // constant * (integral of f^p sigma)^(1/p)
  double constant = 0.0;              // a^2 eta^(p'-1) p' [v]^(p'/p)
  bool pass(double rel_slack = 1e-9) const;
};

// For every base level and every realized scale, compares the tail maximal
// of f*sigma (restricted to the slice) in L^p(v) against the forest-driven
// bound, then aggregates to the global estimate for M(f sigma).
SparseBoundReport principal_weighted_estimate(const FilteredSpace& space, const SimpleFunction& f,
                                              const Weight& v, double p, double a);

// JSON rendering of the forest (levels, scales, supports) for fixtures.
std::string forest_document(const PrincipalForest& forest);

}  // namespace doobmax
