#pragma once

#include <span>
#include <string>
#include <vector>

namespace doobmax {

// Closed-form constants attached to exponent p > 1.
//
//   psi(p) = p^(1/(p-1))                   (stopping-time route, b -> 1)
//   phi(p) = ((2p-1)/(2p-2))^2 (2p-1)^(1/(p-1))
//                                          (principal-set route at its best a)
//   a0(p)  = (2p-1)/(2p-2)                 (minimizer of a^2 eta(a)^(p'-1))
//
// Both decrease in p; phi >= psi everywhere; psi -> e and phi -> infinity as
// p -> 1+, both -> 1 as p -> infinity.
struct ConstantProfile {
  double p = 0.0;
  double p_conjugate = 0.0;
  double psi = 0.0;
  double phi = 0.0;
  double a0 = 0.0;
  double bound_sharp = 0.0;    // psi(p) * p', the best weighted constant here
  double unweighted = 0.0;     // p', the unweighted constant

  double eta(double a) const;               // a / (a - 1)
  double principal_factor(double a) const;  // a^2 eta(a)^(p'-1)
  double bound_principal(double a) const;   // principal_factor(a) * p'
};

ConstantProfile profile(double p);

struct MinimizerReport {
  bool pass = false;
  double a0 = 0.0;
  double value_at_a0 = 0.0;    // equals phi(p)
  std::string detail;
};

// Checks that a0(p) beats every grid point for a |-> a^2 eta(a)^(p'-1) and
// that the value at a0 reproduces phi(p) exactly.
MinimizerReport verify_minimizer(double p, std::span<const double> grid);

struct MonotonicityReport {
  bool phi_decreasing = false;
  bool psi_decreasing = false;
  bool phi_ge_psi = false;
  bool psi_limit_at_one = false;     // psi(1 + 1e-8) within 1e-6 of e
  bool phi_limit_at_infinity = false;  // phi(1e6) within 1e-4 of 1
  bool ratio_decreasing = false;     // ln phi / ln psi decreasing toward 1
  bool ratio_bounded = false;        // in (1, 1 + (1+ln2)/ln p] for grid p >= 100
  double psi_near_one = 0.0;
  double phi_at_large = 0.0;
  bool pass() const {
    return phi_decreasing && psi_decreasing && phi_ge_psi && psi_limit_at_one &&
           phi_limit_at_infinity && ratio_decreasing && ratio_bounded;
  }
};

// Evaluates the profile on a geometric grid over [1.01, 1e6].
MonotonicityReport verify_monotonicity_and_limits();

struct Figure1Row {
  double p = 0.0;
  double phi = 0.0;
  double psi = 0.0;
};

// Samples phi and psi on a geometric grid (endpoints included).
std::vector<Figure1Row> figure1_data(double p_min, double p_max, int samples);

// CSV with header "p,phi,psi".
std::string figure1_csv(const std::vector<Figure1Row>& rows);

// Self-contained SVG line plot, log-scaled p axis, log-scaled value axis.
// Deterministic: equal inputs produce identical bytes.
std::string figure1_svg(const std::vector<Figure1Row>& rows);

}  // namespace doobmax
