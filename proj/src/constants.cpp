#include "doobmax/constants.hpp"

#include <cmath>
#include <cstdio>

#include "doobmax/errors.hpp"
#include "doobmax/format.hpp"
#include "doobmax/numeric.hpp"

namespace doobmax {

namespace {
void require_exponent(double p) {
  if (!std::isfinite(p) || !(p - 1.0 >= 1e-12))
    throw ParameterError("constants need a finite exponent with p - 1 >= 1e-12");
}
}  // namespace

double ConstantProfile::eta(double a) const {
  if (!(a > 1.0) || !std::isfinite(a)) throw ParameterError("ratio a must exceed 1");
  return a / (a - 1.0);
}

double ConstantProfile::principal_factor(double a) const {
  // a - 1 is exact, so eta carries a single rounding even when a is barely
  // above 1; pow keeps integer exponents exact (phi(2) = 6.75 on the nose).
  return a * a * std::pow(eta(a), 1.0 / (p - 1.0));
}

double ConstantProfile::bound_principal(double a) const {
  return principal_factor(a) * p_conjugate;
}

ConstantProfile profile(double p) {
  require_exponent(p);
  ConstantProfile c;
  c.p = p;
  c.p_conjugate = p / (p - 1.0);
  c.psi = std::pow(p, 1.0 / (p - 1.0));
  c.a0 = (2.0 * p - 1.0) / (2.0 * p - 2.0);
  c.phi = c.principal_factor(c.a0);
  c.bound_sharp = c.psi * c.p_conjugate;
  c.unweighted = c.p_conjugate;
  return c;
}

MinimizerReport verify_minimizer(double p, std::span<const double> grid) {
  ConstantProfile prof = profile(p);
  MinimizerReport report;
  report.a0 = prof.a0;
  report.value_at_a0 = prof.principal_factor(prof.a0);
  report.pass = true;
  if (report.value_at_a0 != prof.phi) {
    report.pass = false;
    report.detail = "value at a0 does not reproduce the closed form";
    return report;
  }
  for (double a : grid) {
    double value = prof.principal_factor(a);
    if (!leq_rel(report.value_at_a0, value, 1e-12)) {
      report.pass = false;
      report.detail = "grid point a = " + std::to_string(a) + " with value " +
                      std::to_string(value) + " beats a0";
      return report;
    }
  }
  return report;
}

MonotonicityReport verify_monotonicity_and_limits() {
  MonotonicityReport report;
  std::vector<double> grid = geometric_grid(1.01, 1e6, 200);
  std::vector<double> phi(grid.size());
  std::vector<double> psi(grid.size());
  std::vector<double> ratio(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ConstantProfile prof = profile(grid[i]);
    phi[i] = prof.phi;
    psi[i] = prof.psi;
    ratio[i] = std::log(prof.phi) / std::log(prof.psi);
  }

  report.phi_decreasing = true;
  report.psi_decreasing = true;
  report.ratio_decreasing = true;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    report.phi_decreasing = report.phi_decreasing && phi[i] < phi[i - 1];
    report.psi_decreasing = report.psi_decreasing && psi[i] < psi[i - 1];
    report.ratio_decreasing = report.ratio_decreasing && ratio[i] < ratio[i - 1];
  }

  report.phi_ge_psi = true;
  for (std::size_t i = 0; i < grid.size(); ++i)
    report.phi_ge_psi = report.phi_ge_psi && phi[i] >= psi[i];

  report.psi_near_one = profile(1.0 + 1e-8).psi;
  report.psi_limit_at_one = std::fabs(report.psi_near_one - std::exp(1.0)) <= 1e-6;
  report.phi_at_large = profile(1e6).phi;
  report.phi_limit_at_infinity = std::fabs(report.phi_at_large - 1.0) <= 1e-4;

  report.ratio_bounded = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 100.0) continue;
    double cap = 1.0 + (1.0 + std::log(2.0)) / std::log(grid[i]);
    report.ratio_bounded = report.ratio_bounded && ratio[i] > 1.0 && ratio[i] <= cap;
  }
  return report;
}

std::vector<Figure1Row> figure1_data(double p_min, double p_max, int samples) {
  require_exponent(p_min);
  std::vector<Figure1Row> rows;
  for (double p : geometric_grid(p_min, p_max, samples)) {
    ConstantProfile prof = profile(p);
    rows.push_back({p, prof.phi, prof.psi});
  }
  return rows;
}

std::string figure1_csv(const std::vector<Figure1Row>& rows) {
  std::string out = "p,phi,psi\n";
  for (const Figure1Row& row : rows)
    out += format_double(row.p) + "," + format_double(row.phi) + "," +
           format_double(row.psi) + "\n";
  return out;
}

namespace {
std::string fixed2(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", x);
  return buffer;
}
}  // namespace

std::string figure1_svg(const std::vector<Figure1Row>& rows) {
  if (rows.size() < 2) throw ParameterError("the figure needs at least two samples");
  const double width = 640.0, height = 440.0;
  const double left = 70.0, right = 610.0, top = 40.0, bottom = 390.0;

  double x_lo = std::log10(rows.front().p);
  double x_hi = std::log10(rows.back().p);
  double y_hi = 0.0;
  for (const Figure1Row& row : rows) y_hi = std::max(y_hi, std::log10(row.phi));
  y_hi = std::max(1.0, std::ceil(y_hi));

  auto sx = [&](double p) {
    return left + (std::log10(p) - x_lo) / (x_hi - x_lo) * (right - left);
  };
  auto sy = [&](double value) {
    return bottom - std::log10(value) / y_hi * (bottom - top);
  };

  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" "
      "viewBox=\"0 0 " +
      fixed2(width) + " " + fixed2(height) + "\">\n";
  svg += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
  svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">constants by exponent (log-log)</text>\n";

  // Axes.
  svg += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(bottom) + "\" x2=\"" +
         fixed2(right) + "\" y2=\"" + fixed2(bottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fixed2(left) + "\" y1=\"" + fixed2(top) + "\" x2=\"" + fixed2(left) +
         "\" y2=\"" + fixed2(bottom) + "\" stroke=\"black\"/>\n";

  // Decade ticks.
  for (int e = static_cast<int>(std::ceil(x_lo)); e <= static_cast<int>(std::floor(x_hi));
       ++e) {
    double x = left + (e - x_lo) / (x_hi - x_lo) * (right - left);
    svg += "<line x1=\"" + fixed2(x) + "\" y1=\"" + fixed2(bottom) + "\" x2=\"" + fixed2(x) +
           "\" y2=\"" + fixed2(bottom + 6.0) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed2(x) + "\" y=\"" + fixed2(bottom + 22.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">1e" +
           std::to_string(e) + "</text>\n";
  }
  for (int e = 0; e <= static_cast<int>(y_hi); ++e) {
    double y = bottom - e / y_hi * (bottom - top);
    svg += "<line x1=\"" + fixed2(left - 6.0) + "\" y1=\"" + fixed2(y) + "\" x2=\"" +
           fixed2(left) + "\" y2=\"" + fixed2(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed2(left - 10.0) + "\" y=\"" + fixed2(y + 4.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e" +
           std::to_string(e) + "</text>\n";
  }
  svg += "<text x=\"340\" y=\"425\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">p</text>\n";

  auto polyline = [&](double Figure1Row::*field, const char* color) {
    std::string points;
    for (const Figure1Row& row : rows) {
      if (!points.empty()) points += " ";
      points += fixed2(sx(row.p)) + "," + fixed2(sy(row.*field));
    }
    return "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.8\" points=\"" + points + "\"/>\n";
  };
  svg += polyline(&Figure1Row::phi, "#1f77b4");
  svg += polyline(&Figure1Row::psi, "#d62728");

  svg += "<rect x=\"480\" y=\"52\" width=\"118\" height=\"48\" fill=\"white\" "
         "stroke=\"#888\"/>\n";
  svg += "<line x1=\"490\" y1=\"68\" x2=\"514\" y2=\"68\" stroke=\"#1f77b4\" "
         "stroke-width=\"1.8\"/>\n";
  svg += "<text x=\"520\" y=\"72\" font-family=\"sans-serif\" font-size=\"12\">phi(p)</text>\n";
  svg += "<line x1=\"490\" y1=\"86\" x2=\"514\" y2=\"86\" stroke=\"#d62728\" "
         "stroke-width=\"1.8\"/>\n";
  svg += "<text x=\"520\" y=\"90\" font-family=\"sans-serif\" font-size=\"12\">psi(p)</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace doobmax
