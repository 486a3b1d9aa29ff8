#include "doobmax/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace doobmax {

// ---------------------------------------------------------------------------
// LeafSet
// ---------------------------------------------------------------------------

bool LeafSet::empty() const {
  return std::find(mask_.begin(), mask_.end(), 1) == mask_.end();
}

std::size_t LeafSet::count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

std::vector<std::size_t> LeafSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i]) out.push_back(i);
  return out;
}

bool LeafSet::is_subset_of(const LeafSet& other) const {
  if (mask_.size() != other.mask_.size())
    throw ShapeError("leaf sets belong to different spaces");
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i] && !other.mask_[i]) return false;
  return true;
}

bool LeafSet::intersects(const LeafSet& other) const {
  if (mask_.size() != other.mask_.size())
    throw ShapeError("leaf sets belong to different spaces");
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i] && other.mask_[i]) return true;
  return false;
}

namespace {
LeafSet combine(const LeafSet& a, const LeafSet& b, bool (*op)(bool, bool)) {
  if (a.size() != b.size()) throw ShapeError("leaf sets belong to different spaces");
  LeafSet out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (op(a.contains(i), b.contains(i))) out.add(i);
  return out;
}
}  // namespace

LeafSet set_union(const LeafSet& a, const LeafSet& b) {
  return combine(a, b, [](bool x, bool y) { return x || y; });
}
LeafSet set_intersection(const LeafSet& a, const LeafSet& b) {
  return combine(a, b, [](bool x, bool y) { return x && y; });
}
LeafSet set_difference(const LeafSet& a, const LeafSet& b) {
  return combine(a, b, [](bool x, bool y) { return x && !y; });
}

// ---------------------------------------------------------------------------
// FilteredSpace
// ---------------------------------------------------------------------------

void FilteredSpace::require_level(int level) const {
  if (level < 0 || level > depth_)
    throw LevelRangeError("level " + std::to_string(level) + " outside {0.." +
                          std::to_string(depth_) + "}");
}

std::size_t FilteredSpace::node_of(int level, std::size_t leaf) const {
  const Level& lv = level_at(level);
  if (leaf >= leaf_count()) throw ShapeError("leaf index out of range");
  auto it = std::upper_bound(lv.offsets.begin(), lv.offsets.end(), leaf);
  return static_cast<std::size_t>(it - lv.offsets.begin()) - 1;
}

bool FilteredSpace::is_dyadic() const {
  std::size_t n = leaf_count();
  for (int i = 0; i <= depth_; ++i) {
    std::size_t nodes = node_count(i);
    if (nodes != (std::size_t{1} << i)) return false;
    std::size_t width = n / nodes;
    for (std::size_t k = 0; k < nodes; ++k)
      if (node_end(i, k) - node_begin(i, k) != width) return false;
  }
  return true;
}

LeafSet FilteredSpace::node_leaves(int level, std::size_t node) const {
  LeafSet s(leaf_count());
  for (std::size_t leaf = node_begin(level, node); leaf < node_end(level, node); ++leaf)
    s.add(leaf);
  return s;
}

FilteredSpace FilteredSpace::from_offsets(std::vector<std::vector<std::size_t>> offsets,
                                          std::vector<double> leaf_measures) {
  std::size_t n = leaf_measures.size();
  if (n == 0) throw RefinementError("a space needs at least one leaf");
  for (double m : leaf_measures)
    if (!(m > 0.0) || !std::isfinite(m))
      throw InvalidMeasureError("leaf masses must be positive and finite");

  int depth = static_cast<int>(offsets.size()) - 1;
  for (int i = 0; i <= depth; ++i) {
    const auto& off = offsets[static_cast<std::size_t>(i)];
    if (off.front() != 0 || off.back() != n)
      throw RefinementError("level " + std::to_string(i) + " does not cover the leaves");
    for (std::size_t k = 0; k + 1 < off.size(); ++k)
      if (off[k] >= off[k + 1])
        throw RefinementError("empty node at level " + std::to_string(i));
  }
  if (offsets.front().size() != 2)
    throw RefinementError("level 0 must be the single root node");
  if (offsets.back().size() != n + 1)
    throw RefinementError("the finest level must split into single leaves");
  // Nesting: every coarse boundary must reappear one level down.
  for (int i = 0; i < depth; ++i) {
    const auto& coarse = offsets[static_cast<std::size_t>(i)];
    const auto& fine = offsets[static_cast<std::size_t>(i) + 1];
    for (std::size_t b : coarse)
      if (!std::binary_search(fine.begin(), fine.end(), b))
        throw RefinementError("level " + std::to_string(i + 1) + " does not refine level " +
                              std::to_string(i));
  }

  FilteredSpace space;
  space.depth_ = depth;
  space.leaf_measure_ = std::move(leaf_measures);
  space.levels_.resize(static_cast<std::size_t>(depth) + 1);

  // Masses bottom-up: a node's mass is the exact sum of its children's.
  for (int i = depth; i >= 0; --i) {
    Level& lv = space.levels_[static_cast<std::size_t>(i)];
    lv.offsets = std::move(offsets[static_cast<std::size_t>(i)]);
    std::size_t nodes = lv.offsets.size() - 1;
    lv.measure.assign(nodes, 0.0);
    if (i == depth) {
      for (std::size_t k = 0; k < nodes; ++k) lv.measure[k] = space.leaf_measure_[k];
    } else {
      const Level& below = space.levels_[static_cast<std::size_t>(i) + 1];
      std::size_t child = 0;
      for (std::size_t k = 0; k < nodes; ++k) {
        double sum = 0.0;
        while (child < below.measure.size() && below.offsets[child] < lv.offsets[k + 1])
          sum += below.measure[child++];
        lv.measure[k] = sum;
      }
    }
  }
  for (int i = 1; i <= depth; ++i) {
    Level& lv = space.levels_[static_cast<std::size_t>(i)];
    lv.parent.resize(lv.measure.size());
    for (std::size_t k = 0; k < lv.parent.size(); ++k)
      lv.parent[k] = space.node_of(i - 1, lv.offsets[k]);
  }
  if (!std::isfinite(space.total_measure()))
    throw InvalidMeasureError("total mass overflows");
  return space;
}

FilteredSpace FilteredSpace::dyadic(int depth, std::span<const double> leaf_measures) {
  if (depth < 0) throw ParameterError("dyadic depth must be nonnegative");
  if (depth > kMaxDyadicDepth)
    throw CapacityError("dyadic depth " + std::to_string(depth) + " exceeds the supported " +
                        std::to_string(kMaxDyadicDepth));
  std::size_t n = std::size_t{1} << depth;
  std::vector<double> masses;
  if (leaf_measures.empty()) {
    masses.assign(n, std::ldexp(1.0, -depth));
  } else {
    if (leaf_measures.size() != n)
      throw ShapeError("expected " + std::to_string(n) + " leaf masses");
    masses.assign(leaf_measures.begin(), leaf_measures.end());
  }
  std::vector<std::vector<std::size_t>> offsets(static_cast<std::size_t>(depth) + 1);
  for (int i = 0; i <= depth; ++i) {
    std::size_t nodes = std::size_t{1} << i;
    std::size_t width = n >> i;
    auto& off = offsets[static_cast<std::size_t>(i)];
    off.resize(nodes + 1);
    for (std::size_t k = 0; k <= nodes; ++k) off[k] = k * width;
  }
  return from_offsets(std::move(offsets), std::move(masses));
}

FilteredSpace FilteredSpace::from_level_sizes(const std::vector<std::vector<std::size_t>>& sizes,
                                              std::vector<double> leaf_measures) {
  if (sizes.empty()) throw RefinementError("at least one level is required");
  std::vector<std::vector<std::size_t>> offsets(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    offsets[i].resize(sizes[i].size() + 1);
    offsets[i][0] = 0;
    for (std::size_t k = 0; k < sizes[i].size(); ++k)
      offsets[i][k + 1] = offsets[i][k] + sizes[i][k];
  }
  return from_offsets(std::move(offsets), std::move(leaf_measures));
}

FilteredSpace build_dyadic(int depth, std::span<const double> leaf_measures) {
  return FilteredSpace::dyadic(depth, leaf_measures);
}

// ---------------------------------------------------------------------------
// Document format
// ---------------------------------------------------------------------------

FilteredSpace parse_space_document(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("space document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("depth") || !doc.contains("leaf_measures") ||
      !doc.contains("levels"))
    throw DocumentError("space document needs depth, leaf_measures and levels");
  try {
    int depth = doc.at("depth").get<int>();
    auto masses = doc.at("leaf_measures").get<std::vector<double>>();
    auto sizes = doc.at("levels").get<std::vector<std::vector<std::size_t>>>();
    if (static_cast<int>(sizes.size()) != depth + 1)
      throw DocumentError("levels must list depth + 1 partitions");
    return FilteredSpace::from_level_sizes(sizes, std::move(masses));
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("space document has wrong field types: ") + e.what());
  }
}

std::string space_document(const FilteredSpace& space) {
  nlohmann::json doc;
  doc["depth"] = space.depth();
  std::vector<double> masses(space.leaf_count());
  for (std::size_t i = 0; i < masses.size(); ++i) masses[i] = space.leaf_measure(i);
  doc["leaf_measures"] = masses;
  std::vector<std::vector<std::size_t>> sizes;
  for (int i = 0; i <= space.depth(); ++i) {
    std::vector<std::size_t> row(space.node_count(i));
    for (std::size_t k = 0; k < row.size(); ++k)
      row[k] = space.node_end(i, k) - space.node_begin(i, k);
    sizes.push_back(std::move(row));
  }
  doc["levels"] = sizes;
  return doc.dump();
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

void require_same_shape(const FilteredSpace& space, const SimpleFunction& f) {
  if (f.size() != space.leaf_count())
    throw ShapeError("function has " + std::to_string(f.size()) + " values, space has " +
                     std::to_string(space.leaf_count()) + " leaves");
}

void require_same_shape(const FilteredSpace& space, const LeafSet& set) {
  if (set.size() != space.leaf_count())
    throw ShapeError("leaf set has " + std::to_string(set.size()) + " slots, space has " +
                     std::to_string(space.leaf_count()) + " leaves");
}

void require_finite(const SimpleFunction& f) {
  for (double x : f)
    if (!std::isfinite(x)) throw ShapeError("function values must be finite");
}

double integrate(const FilteredSpace& space, const SimpleFunction& f, const LeafSet& over) {
  require_same_shape(space, f);
  require_same_shape(space, over);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (over.contains(i)) sum += f[i] * space.leaf_measure(i);
  return sum;
}

double integrate(const FilteredSpace& space, const SimpleFunction& f) {
  require_same_shape(space, f);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * space.leaf_measure(i);
  return sum;
}

double measure(const FilteredSpace& space, const LeafSet& set) {
  require_same_shape(space, set);
  double sum = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set.contains(i)) sum += space.leaf_measure(i);
  return sum;
}

}  // namespace doobmax
