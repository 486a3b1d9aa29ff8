#include "doobmax/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "doobmax/format.hpp"
#include "doobmax/numeric.hpp"

namespace doobmax {

namespace {

std::vector<std::vector<double>> level_table(const FilteredSpace& space,
                                             const SimpleFunction& f) {
  std::vector<std::vector<double>> avg(static_cast<std::size_t>(space.depth()) + 1);
  for (int i = 0; i <= space.depth(); ++i)
    avg[static_cast<std::size_t>(i)] = node_averages(space, f, i);
  return avg;
}

std::vector<std::vector<double>> weighted_level_table(const FilteredSpace& space,
                                                      const SimpleFunction& f,
                                                      const SimpleFunction& w) {
  std::vector<std::vector<double>> avg(static_cast<std::size_t>(space.depth()) + 1);
  for (int i = 0; i <= space.depth(); ++i)
    avg[static_cast<std::size_t>(i)] = weighted_node_averages(space, f, w, i);
  return avg;
}

}  // namespace

StoppingDecomposition build_decomposition(const FilteredSpace& space, const SimpleFunction& f,
                                          const Weight& v, double p, double b) {
  require_same_shape(space, f);
  require_same_shape(space, v.values());
  require_finite(f);
  double pc = conjugate_exponent(p);
  if (!(b > 1.0) || !std::isfinite(b)) throw ParameterError("ratio b must exceed 1");

  StoppingDecomposition dec;
  dec.p = p;
  dec.b = b;
  dec.sigma = dual_weight(v, p).values();
  dec.mf = doob_maximal(space, f);

  std::size_t n = space.leaf_count();
  std::vector<std::vector<double>> avg_f = level_table(space, f);
  std::vector<std::vector<double>> avg_sigma = level_table(space, dec.sigma);

  // Literal forms of the two conditioned quantities, one value per node:
  // E^sigma(f sigma^-1 | F_n) and E^v(v^-1 | F_n).
  SimpleFunction f_over_sigma(n);
  SimpleFunction v_inverse(n);
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    f_over_sigma[leaf] = f[leaf] / dec.sigma[leaf];
    v_inverse[leaf] = 1.0 / v[leaf];
  }
  std::vector<std::vector<double>> cond_f = weighted_level_table(space, f_over_sigma, dec.sigma);
  std::vector<std::vector<double>> cond_vinv =
      weighted_level_table(space, v_inverse, v.values());

  // Heights realized by the maximal function; leaf sits in slice k when
  // b^k < Mf <= b^(k+1).
  std::set<int> heights;
  for (std::size_t leaf = 0; leaf < n; ++leaf)
    if (dec.mf[leaf] > 0.0) heights.insert(scale_index(dec.mf[leaf], b) - 1);

  auto tau_at = [&](int k) -> const std::vector<int>& {
    auto it = dec.tau.find(k);
    if (it != dec.tau.end()) return it->second;
    double cut = power_int(b, k);
    std::vector<int> stop = stopping_time(
        space,
        [&](int level, std::size_t node) {
          return std::fabs(avg_f[static_cast<std::size_t>(level)][node]) > cut;
        });
    return dec.tau.emplace(k, std::move(stop)).first->second;
  };

  for (int k : heights) {
    const std::vector<int>& tau_k = tau_at(k);
    const std::vector<int>& tau_next = tau_at(k + 1);

    // Group the stopped region by the size of the sigma-average at the
    // stopping node.
    std::map<int, StoppingCell> by_j;
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
      int level = tau_k[leaf];
      if (level == kLevelInfinity) continue;
      std::size_t node = space.node_of(level, leaf);
      double sigma_avg = avg_sigma[static_cast<std::size_t>(level)][node];
      int j = scale_index(sigma_avg, b) - 1;
      auto [it, fresh] = by_j.try_emplace(j);
      StoppingCell& cell = it->second;
      if (fresh) {
        cell.k = k;
        cell.j = j;
        cell.a_set = LeafSet(n);
        cell.b_set = LeafSet(n);
        cell.t_value = std::numeric_limits<double>::infinity();
      }
      cell.a_set.add(leaf);
      double conditioned = pow_abs(cond_f[static_cast<std::size_t>(level)][node], p);
      cell.t_value = std::min(cell.t_value, conditioned);
      if (tau_next[leaf] == kLevelInfinity) {
        cell.b_set.add(leaf);
        double mass = space.leaf_measure(leaf);
        cell.mass += mass;
        cell.vartheta +=
            std::pow(cond_vinv[static_cast<std::size_t>(level)][node], pc) * v[leaf] * mass;
      }
    }
    for (auto& [j, cell] : by_j)
      if (!cell.b_set.empty()) dec.cells.push_back(std::move(cell));
  }
  return dec;
}

// ---------------------------------------------------------------------------
// Partition check
// ---------------------------------------------------------------------------

PartitionReport verify_partition(const FilteredSpace& space, const StoppingDecomposition& dec,
                                 const SimpleFunction& f) {
  PartitionReport report;
  auto fail = [&](const std::string& detail) {
    if (report.pass) {
      report.pass = false;
      report.detail = detail;
    }
  };

  std::size_t n = space.leaf_count();
  SimpleFunction mf = doob_maximal(space, f);
  for (std::size_t leaf = 0; leaf < n; ++leaf)
    if (mf[leaf] != dec.mf[leaf]) {
      fail("stored maximal function does not match");
      return report;
    }

  std::set<int> heights;
  for (std::size_t leaf = 0; leaf < n; ++leaf)
    if (mf[leaf] > 0.0) heights.insert(scale_index(mf[leaf], dec.b) - 1);

  for (int k : heights) {
    auto it_k = dec.tau.find(k);
    auto it_next = dec.tau.find(k + 1);
    if (it_k == dec.tau.end() || it_next == dec.tau.end()) {
      fail("stopping times for height " + std::to_string(k) + " are missing");
      continue;
    }
    const std::vector<int>& tau_k = it_k->second;
    const std::vector<int>& tau_next = it_next->second;

    // Slice k against the two-stopping-time description.
    std::vector<int> covered(n, 0);
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
      bool in_slice = mf[leaf] > 0.0 && scale_index(mf[leaf], dec.b) - 1 == k;
      bool described = tau_k[leaf] != kLevelInfinity && tau_next[leaf] == kLevelInfinity;
      if (in_slice != described)
        fail("slice " + std::to_string(k) + " disagrees with the stopping times at leaf " +
             std::to_string(leaf));
      covered[leaf] = in_slice ? 0 : -1;
    }

    for (const StoppingCell& cell : dec.cells) {
      if (cell.k != k) continue;
      for (std::size_t leaf = 0; leaf < n; ++leaf) {
        if (cell.b_set.contains(leaf)) {
          if (!cell.a_set.contains(leaf))
            fail("cell (" + std::to_string(cell.k) + "," + std::to_string(cell.j) +
                 ") has a leaf outside its own first-passage set");
          if (covered[leaf] < 0)
            fail("cell (" + std::to_string(cell.k) + "," + std::to_string(cell.j) +
                 ") covers leaf " + std::to_string(leaf) + " outside the slice");
          else
            ++covered[leaf];
        }
        if (cell.a_set.contains(leaf)) {
          if (tau_k[leaf] == kLevelInfinity)
            fail("cell (" + std::to_string(cell.k) + "," + std::to_string(cell.j) +
                 ") includes a leaf that never passes the height");
          bool survives = tau_next[leaf] == kLevelInfinity;
          if (survives != cell.b_set.contains(leaf))
            fail("cell (" + std::to_string(cell.k) + "," + std::to_string(cell.j) +
                 ") mislabels leaf " + std::to_string(leaf));
        }
      }

      // First-passage sets are unions of complete nodes at the stopping level.
      for (std::size_t leaf = 0; leaf < n; ++leaf) {
        if (!cell.a_set.contains(leaf)) continue;
        int level = tau_k[leaf];
        std::size_t node = space.node_of(level, leaf);
        for (std::size_t other = space.node_begin(level, node);
             other < space.node_end(level, node); ++other)
          if (!cell.a_set.contains(other) || tau_k[other] != level)
            fail("cell (" + std::to_string(cell.k) + "," + std::to_string(cell.j) +
                 ") splits the node at level " + std::to_string(level));
      }
    }

    for (std::size_t leaf = 0; leaf < n; ++leaf)
      if (covered[leaf] == 0)
        fail("slice " + std::to_string(k) + " leaf " + std::to_string(leaf) +
             " is covered by no cell");
      else if (covered[leaf] > 1)
        fail("slice " + std::to_string(k) + " leaf " + std::to_string(leaf) +
             " is covered more than once");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Inequality chain
// ---------------------------------------------------------------------------

ChainReport verify_chain(const FilteredSpace& space, const StoppingDecomposition& dec,
                         const SimpleFunction& f, const Weight& v, double p) {
  require_same_shape(space, f);
  double pc = conjugate_exponent(p);
  double b = dec.b;
  std::size_t n = space.leaf_count();

  ChainReport report;
  double characteristic = ap_characteristic(space, v, p).characteristic;
  double char_pc = std::pow(characteristic, pc);
  double b2p = std::pow(b, 2.0 * p);

  for (std::size_t leaf = 0; leaf < n; ++leaf)
    report.lhs += pow_abs(dec.mf[leaf], p) * v[leaf] * space.leaf_measure(leaf);

  for (const StoppingCell& cell : dec.cells)
    report.sum_t_vartheta += cell.t_value * cell.vartheta;
  report.cell_bound = b2p * char_pc * report.sum_t_vartheta;

  SimpleFunction f_over_sigma(n);
  for (std::size_t leaf = 0; leaf < n; ++leaf) f_over_sigma[leaf] = f[leaf] / dec.sigma[leaf];
  SimpleFunction dual_maximal = weighted_maximal(space, f_over_sigma, dec.sigma);
  double weak_integral = 0.0;
  for (std::size_t leaf = 0; leaf < n; ++leaf)
    weak_integral += pow_abs(dual_maximal[leaf], p) * dec.sigma[leaf] * space.leaf_measure(leaf);
  report.weak_bound = b2p * std::pow(p, pc) * char_pc * weak_integral;

  double f_integral = 0.0;
  for (std::size_t leaf = 0; leaf < n; ++leaf)
    f_integral += pow_abs(f[leaf], p) * v[leaf] * space.leaf_measure(leaf);
  report.final_bound = b2p * std::pow(p, pc) * std::pow(pc, p) * char_pc * f_integral;

  double psi = std::pow(p, 1.0 / (p - 1.0));
  report.limit_constant = psi * pc * std::pow(characteristic, 1.0 / (p - 1.0));
  for (double grid_b : {2.0, 1.5, 1.2, 1.1, 1.05, 1.01})
    report.limit_grid.emplace_back(grid_b, grid_b * grid_b * report.limit_constant);

  report.lhs_le_cell = leq_rel(report.lhs, report.cell_bound, 1e-9);
  report.cells_le_weak = leq_rel(report.cell_bound, report.weak_bound, 1e-9);
  report.lhs_le_final = leq_rel(report.lhs, report.final_bound, 1e-9);
  report.grid_decreasing = true;
  for (std::size_t i = 1; i < report.limit_grid.size(); ++i)
    report.grid_decreasing =
        report.grid_decreasing && report.limit_grid[i].second < report.limit_grid[i - 1].second;
  report.norm_le_limit = leq_rel(std::pow(report.lhs, 1.0 / p),
                                 report.limit_constant * std::pow(f_integral, 1.0 / p), 1e-9);
  return report;
}

std::string decomposition_csv(const FilteredSpace& space, const StoppingDecomposition& dec,
                              const Weight& v) {
  double pc = conjugate_exponent(dec.p);
  double characteristic = ap_characteristic(space, v, dec.p).characteristic;
  double factor = std::pow(dec.b, 2.0 * dec.p) * std::pow(characteristic, pc);

  std::string out = "k,j,mass,vartheta,T,margin\n";
  for (const StoppingCell& cell : dec.cells) {
    double slice_integral = 0.0;
    for (std::size_t leaf = 0; leaf < space.leaf_count(); ++leaf)
      if (cell.b_set.contains(leaf))
        slice_integral += pow_abs(dec.mf[leaf], dec.p) * v[leaf] * space.leaf_measure(leaf);
    double bound = factor * cell.t_value * cell.vartheta;
    out += std::to_string(cell.k) + "," + std::to_string(cell.j) + "," +
           format_double(cell.mass) + "," + format_double(cell.vartheta) + "," +
           format_double(cell.t_value) + "," + format_double(rel_margin(slice_integral, bound)) +
           "\n";
  }
  return out;
}

}  // namespace doobmax
