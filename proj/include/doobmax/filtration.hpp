#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "doobmax/errors.hpp"

namespace doobmax {

// One real value per leaf (finest atom) of an associated FilteredSpace.
using SimpleFunction = std::vector<double>;

// Subset of the leaves of a space, stored as a membership mask.
class LeafSet {
 public:
  LeafSet() = default;
  explicit LeafSet(std::size_t leaf_count, bool filled = false)
      : mask_(leaf_count, filled ? 1 : 0) {}

  static LeafSet of(std::size_t leaf_count, std::initializer_list<std::size_t> leaves) {
    LeafSet s(leaf_count);
    for (std::size_t leaf : leaves) s.add(leaf);
    return s;
  }

  std::size_t size() const { return mask_.size(); }
  bool contains(std::size_t leaf) const { return mask_[leaf] != 0; }
  void add(std::size_t leaf) { mask_[leaf] = 1; }
  void remove(std::size_t leaf) { mask_[leaf] = 0; }

  bool empty() const;
  std::size_t count() const;
  std::vector<std::size_t> indices() const;
  bool is_subset_of(const LeafSet& other) const;
  bool intersects(const LeafSet& other) const;

  friend LeafSet set_union(const LeafSet& a, const LeafSet& b);
  friend LeafSet set_intersection(const LeafSet& a, const LeafSet& b);
  friend LeafSet set_difference(const LeafSet& a, const LeafSet& b);

  bool operator==(const LeafSet&) const = default;

 private:
  std::vector<unsigned char> mask_;
};

LeafSet set_union(const LeafSet& a, const LeafSet& b);
LeafSet set_intersection(const LeafSet& a, const LeafSet& b);
LeafSet set_difference(const LeafSet& a, const LeafSet& b);

// Rooted refinement tree over a finite measure space. Level 0 is the single
// root node, level depth() the leaves; every node is a contiguous group of
// leaves, every level refines the previous one, and every leaf carries a
// strictly positive mass. Node masses are accumulated bottom-up, so a node's
// mass equals the sum of its children's masses exactly (bit for bit).
// Immutable after construction.
class FilteredSpace {
 public:
  int depth() const { return depth_; }
  std::size_t leaf_count() const { return leaf_measure_.size(); }
  double leaf_measure(std::size_t leaf) const { return leaf_measure_[leaf]; }
  double total_measure() const { return levels_[0].measure[0]; }

  std::size_t node_count(int level) const { return level_at(level).measure.size(); }
  std::size_t node_begin(int level, std::size_t node) const { return level_at(level).offsets[node]; }
  std::size_t node_end(int level, std::size_t node) const { return level_at(level).offsets[node + 1]; }
  double node_measure(int level, std::size_t node) const { return level_at(level).measure[node]; }

  // Index of the leaf's node at `level` (binary search over node offsets).
  std::size_t node_of(int level, std::size_t leaf) const;
  // Index at level-1 of the node containing this node. Requires level >= 1.
  std::size_t parent_of(int level, std::size_t node) const { return level_at(level).parent[node]; }

  // 2^i equal-width nodes at every level i (so the space can be identified
  // with [0,1) split into equal dyadic intervals).
  bool is_dyadic() const;

  void require_level(int level) const;

  LeafSet all_leaves() const { return LeafSet(leaf_count(), true); }
  LeafSet node_leaves(int level, std::size_t node) const;

  // Equal-split tree of the given depth over 2^depth leaves. Leaf masses
  // default to 2^-depth; a span of positive masses overrides them.
  static FilteredSpace dyadic(int depth, std::span<const double> leaf_measures = {});

  // General tree from per-level node sizes (level 0 first, one entry per
  // node, sizes in leaves). The last level must consist of singletons.
  static FilteredSpace from_level_sizes(const std::vector<std::vector<std::size_t>>& sizes,
                                        std::vector<double> leaf_measures);

 private:
  struct Level {
    std::vector<std::size_t> offsets;  // node k spans leaves [offsets[k], offsets[k+1])
    std::vector<double> measure;
    std::vector<std::size_t> parent;   // empty at level 0
  };

  FilteredSpace() = default;
  const Level& level_at(int level) const {
    require_level(level);
    return levels_[static_cast<std::size_t>(level)];
  }
  static FilteredSpace from_offsets(std::vector<std::vector<std::size_t>> offsets,
                                    std::vector<double> leaf_measures);

  int depth_ = 0;
  std::vector<double> leaf_measure_;
  std::vector<Level> levels_;
};

// Largest supported dyadic depth (keeps one space comfortably in memory).
inline constexpr int kMaxDyadicDepth = 22;

FilteredSpace build_dyadic(int depth, std::span<const double> leaf_measures = {});

// JSON document format shared by the CLI and the test fixtures:
//   { "depth": L, "leaf_measures": [...], "levels": [[node sizes]...] }
FilteredSpace parse_space_document(const std::string& text);
std::string space_document(const FilteredSpace& space);

// Sum of f * leaf mass over a leaf set (or all leaves).
double integrate(const FilteredSpace& space, const SimpleFunction& f, const LeafSet& over);
double integrate(const FilteredSpace& space, const SimpleFunction& f);
double measure(const FilteredSpace& space, const LeafSet& set);

void require_same_shape(const FilteredSpace& space, const SimpleFunction& f);
void require_same_shape(const FilteredSpace& space, const LeafSet& set);
void require_finite(const SimpleFunction& f);

}  // namespace doobmax
