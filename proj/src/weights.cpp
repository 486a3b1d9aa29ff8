#include "doobmax/weights.hpp"

#include <cmath>
#include <utility>

#include <json.hpp>

#include "doobmax/format.hpp"
#include "doobmax/numeric.hpp"

namespace doobmax {

Weight::Weight(SimpleFunction values) : values_(std::move(values)) {
  if (values_.empty()) throw ShapeError("a weight needs at least one value");
  for (double v : values_)
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidMeasureError("weight values must be positive and finite");
}

double conjugate_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw ParameterError("exponent must satisfy p > 1");
  return p / (p - 1.0);
}

Weight dual_weight(const Weight& v, double p) {
  conjugate_exponent(p);
  SimpleFunction out(v.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::pow(v[i], -1.0 / (p - 1.0));
  return Weight(std::move(out));
}

ApReport ap_characteristic(const FilteredSpace& space, const Weight& v, double p) {
  require_same_shape(space, v.values());
  ApReport report;
  report.p = p;
  report.p_conjugate = conjugate_exponent(p);
  Weight sigma = dual_weight(v, p);
  report.node_values.resize(static_cast<std::size_t>(space.depth()) + 1);
  report.characteristic = 0.0;
  for (int i = 0; i <= space.depth(); ++i) {
    std::vector<double> av = node_averages(space, v.values(), i);
    std::vector<double> as = node_averages(space, sigma.values(), i);
    auto& row = report.node_values[static_cast<std::size_t>(i)];
    row.resize(av.size());
    for (std::size_t k = 0; k < av.size(); ++k) {
      row[k] = av[k] * std::pow(as[k], p - 1.0);
      if (row[k] > report.characteristic) {
        report.characteristic = row[k];
        report.argmax_level = i;
        report.argmax_node = k;
      }
    }
  }
  return report;
}

std::string ap_report_document(const ApReport& report) {
  nlohmann::json doc;
  doc["p"] = report.p;
  doc["p_conjugate"] = report.p_conjugate;
  doc["characteristic"] = report.characteristic;
  doc["argmax_level"] = report.argmax_level;
  doc["argmax_node"] = report.argmax_node;
  doc["node_values"] = report.node_values;
  return doc.dump();
}

Weight power_weight(const FilteredSpace& space, double alpha) {
  if (!(alpha > -1.0) || !std::isfinite(alpha))
    throw ParameterError("power weight needs alpha > -1");
  if (!space.is_dyadic())
    throw ShapeError("power weight is defined on dyadic spaces only");
  std::size_t n = space.leaf_count();
  SimpleFunction out(n);
  // Average of x^alpha over [k/n, (k+1)/n) is
  //   n (b^(alpha+1) - a^(alpha+1)) / (alpha+1),  a = k/n, b = (k+1)/n,
  // and simply 1 when alpha == 0.
  for (std::size_t k = 0; k < n; ++k) {
    if (alpha == 0.0) {
      out[k] = 1.0;
      continue;
    }
    double a = static_cast<double>(k) / static_cast<double>(n);
    double b = static_cast<double>(k + 1) / static_cast<double>(n);
    double hi = std::pow(b, alpha + 1.0);
    double lo = std::pow(a, alpha + 1.0);
    out[k] = static_cast<double>(n) * (hi - lo) / (alpha + 1.0);
  }
  return Weight(std::move(out));
}

}  // namespace doobmax
