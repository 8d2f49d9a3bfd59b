#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "funscene/core_types.hpp"

namespace funscene {

inline const std::set<std::string>& default_functional_labels() {
  static const std::set<std::string> labels{"handle", "knob", "button", "switch", "lever", "faucet"};
  return labels;
}

// One label per line; blank lines and '#' comments ignored.
inline std::set<std::string> load_label_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open label list " + path.string());
  std::set<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    std::string label = line.substr(b, e - b + 1);
    std::transform(label.begin(), label.end(), label.begin(), [](unsigned char c) { return std::tolower(c); });
    labels.insert(label);
  }
  return labels;
}

enum class NormalizeBy { object_bounds, part_cloud };

struct PartMetaOptions {
  // Parent labels that carry no information; the asset category is always skipped too.
  std::set<std::string> generic_parents{"", "base", "body", "root", "frame", "other", "object"};
  NormalizeBy normalize_by = NormalizeBy::object_bounds;
};

// Direction a viewer standing in front of the object (facing it) calls "left".
inline Vec2 viewer_left(const Vec2& front_axis) { return {front_axis.y, -front_axis.x}; }

// Drops depth and maps each centroid into [0,1]^2 over `bounds`:
// X = 1 at the viewer's left, 0 at the viewer's right; Y = 0 bottom, 1 top.
inline std::vector<Vec2> normalize_centroids(const std::vector<const PartNode*>& parts, const Aabb3& bounds,
                                             const Vec2& front_axis = {0.0, 1.0}) {
  const Vec2 left = viewer_left(front_axis);
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& c : bounds.corners()) {
    const double s = dot(Vec2{c.x, c.y}, left);
    lo = first ? s : std::min(lo, s);
    hi = first ? s : std::max(hi, s);
    first = false;
  }
  const double zlo = bounds.min.z, zhi = bounds.max.z;
  if (!(hi - lo > 1e-12)) throw InvalidArgument("degenerate object extent on the lateral axis");
  if (!(zhi - zlo > 1e-12)) throw InvalidArgument("degenerate object extent on the vertical axis");
  std::vector<Vec2> out;
  out.reserve(parts.size());
  for (const PartNode* p : parts) {
    const double x = (dot(Vec2{p->centroid3.x, p->centroid3.y}, left) - lo) / (hi - lo);
    const double y = (p->centroid3.z - zlo) / (zhi - zlo);
    out.push_back({std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0)});
  }
  return out;
}

inline std::string enrich_label(const std::string& label, const PartNode* parent, const std::string& category,
                                const PartMetaOptions& options) {
  if (!parent) return label;
  const std::string parent_label = to_lower_copy(parent->label);
  if (options.generic_parents.contains(parent_label) || parent_label == to_lower_copy(category)) return label;
  if (to_lower_copy(label).rfind(parent_label, 0) == 0) return label;  // already prefixed
  return parent->label + " " + label;
}

// Parts whose label is in `functional_labels`. A matched part is one element;
// parts below it are its sub-parts and are not listed separately.
inline std::vector<FunctionalElement> functional_elements(const AssetRecord& asset,
                                                          const std::set<std::string>& functional_labels,
                                                          const PartMetaOptions& options = {}) {
  if (!asset.root_part) throw InvalidArgument("asset " + asset.asset_id + " has no part tree");
  std::vector<const PartNode*> matched;
  std::vector<std::string> enriched;
  auto walk = [&](auto&& self, const PartNode& node, const PartNode* parent) -> void {
    if (functional_labels.contains(to_lower_copy(node.label))) {
      matched.push_back(&node);
      enriched.push_back(enrich_label(node.label, parent, asset.category, options));
      return;
    }
    for (const auto& child : node.children) self(self, child, &node);
  };
  walk(walk, *asset.root_part, nullptr);
  if (matched.empty()) return {};

  Aabb3 bounds = asset.bounds();
  if (options.normalize_by == NormalizeBy::part_cloud) {
    bounds = matched.front()->aabb;
    for (const PartNode* p : matched) {
      bounds.min = {std::min(bounds.min.x, p->aabb.min.x), std::min(bounds.min.y, p->aabb.min.y),
                    std::min(bounds.min.z, p->aabb.min.z)};
      bounds.max = {std::max(bounds.max.x, p->aabb.max.x), std::max(bounds.max.y, p->aabb.max.y),
                    std::max(bounds.max.z, p->aabb.max.z)};
    }
  }
  const auto centroids = normalize_centroids(matched, bounds, asset.front_axis);
  std::vector<FunctionalElement> out;
  out.reserve(matched.size());
  for (std::size_t i = 0; i < matched.size(); ++i)
    out.push_back({matched[i]->part_id, matched[i]->label, enriched[i], centroids[i]});
  return out;
}

// Distinct plain labels of the functional elements across assets, sorted.
inline std::vector<std::string> functional_label_union(const std::vector<std::vector<FunctionalElement>>& per_asset) {
  std::set<std::string> labels;
  for (const auto& elements : per_asset)
    for (const auto& e : elements) labels.insert(to_lower_copy(e.label));
  return {labels.begin(), labels.end()};
}

}  // namespace funscene
