#pragma once

#include <map>
#include <string>
#include <vector>

#include "doobmax/weights.hpp"

namespace doobmax {

// One cell of the two-parameter stopping decomposition at ratio b:
// k indexes the height of |E(f|F_n)| at first passage, j the size of
// E(sigma | F_{tau_k}) there.
struct StoppingCell {
  int k = 0;
  int j = 0;
  LeafSet a_set;        // first passage happened, sigma-average in (b^j, b^(j+1)]
  LeafSet b_set;        // a_set members whose next height is never reached
  double mass = 0.0;    // plain mass of b_set
  double vartheta = 0.0;  // integral over b_set of E^v(v^-1 | F_{tau_k})^(p') v
  double t_value = 0.0;   // min over a_set of |E^sigma(f sigma^-1 | F_{tau_k})|^p
};

struct StoppingDecomposition {
  double p = 0.0;
  double b = 0.0;
  std::map<int, std::vector<int>> tau;  // k -> per-leaf first level with |E(f|F_n)| > b^k
  std::vector<StoppingCell> cells;      // cells with nonempty b_set, ordered by (k, j)
  SimpleFunction sigma;                 // dual weight values
  SimpleFunction mf;                    // Doob maximal of f
};

StoppingDecomposition build_decomposition(const FilteredSpace& space, const SimpleFunction& f,
                                          const Weight& v, double p, double b);

struct PartitionReport {
  bool pass = true;
  std::string detail;
};

// Checks that the b_set cells tile each slice {b^k < Mf <= b^(k+1)} exactly,
// that slices agree with the two-stopping-time description, and that every
// a_set is a union of complete nodes at each stopping level.
PartitionReport verify_partition(const FilteredSpace& space, const StoppingDecomposition& dec,
                                 const SimpleFunction& f);

struct ChainReport {
  double lhs = 0.0;            // integral of (Mf)^p v
  double cell_bound = 0.0;     // b^(2p) [v]^(p') sum of T * vartheta
  double weak_bound = 0.0;     // b^(2p) p^(p') [v]^(p') integral of (M^sigma(f/sigma))^p sigma
  double final_bound = 0.0;    // b^(2p) p^(p') p'^p [v]^(p') integral of |f|^p v
  double sum_t_vartheta = 0.0;
  // (b, b^2 * p^(1/(p-1)) p' [v]^(1/(p-1))) on the fixed grid b in
  // {2, 1.5, 1.2, 1.1, 1.05, 1.01}; decreases toward limit_constant.
  std::vector<std::pair<double, double>> limit_grid;
  double limit_constant = 0.0;  // p^(1/(p-1)) p' [v]^(1/(p-1))
  bool lhs_le_cell = false;
  bool cells_le_weak = false;
  bool lhs_le_final = false;
  bool grid_decreasing = false;
  bool norm_le_limit = false;   // ||Mf|| <= limit_constant * ||f|| in L^p(v)
  bool pass() const {
    return lhs_le_cell && cells_le_weak && lhs_le_final && grid_decreasing && norm_le_limit;
  }
};

ChainReport verify_chain(const FilteredSpace& space, const StoppingDecomposition& dec,
                         const SimpleFunction& f, const Weight& v, double p);

// CSV rows "k,j,mass,vartheta,T,margin"; margin is the slack of the per-cell
// estimate of the slice integral.
std::string decomposition_csv(const FilteredSpace& space, const StoppingDecomposition& dec,
                              const Weight& v);

}  // namespace doobmax
