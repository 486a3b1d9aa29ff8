#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "doobmax/operators.hpp"

namespace doobmax {

// Strictly positive, finite density. Validated once at construction.
class Weight {
 public:
  explicit Weight(SimpleFunction values);

  const SimpleFunction& values() const { return values_; }
  double operator[](std::size_t leaf) const { return values_[leaf]; }
  std::size_t size() const { return values_.size(); }

 private:
  SimpleFunction values_;
};

// p' with 1/p + 1/p' = 1. Requires p > 1.
double conjugate_exponent(double p);

// sigma = v^(1-p') = v^(-1/(p-1)), the density dual to v at exponent p.
Weight dual_weight(const Weight& v, double p);

struct ApReport {
  double p = 0.0;
  double p_conjugate = 0.0;
  double characteristic = 1.0;              // sup over nodes, always >= 1
  int argmax_level = 0;
  std::size_t argmax_node = 0;
  std::vector<std::vector<double>> node_values;  // [level][node]: E(v) E(sigma)^(p-1)
};

// Muckenhoupt-style characteristic of v at exponent p over all tree nodes.
ApReport ap_characteristic(const FilteredSpace& space, const Weight& v, double p);

// JSON rendering of a report (17-digit doubles, deterministic layout).
std::string ap_report_document(const ApReport& report);

// Weight whose leaf values are the exact averages of x^alpha over the leaf
// intervals under the identification of a dyadic space with [0,1).
// Requires alpha > -1 so the averages are finite.
Weight power_weight(const FilteredSpace& space, double alpha);

}  // namespace doobmax
