#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "funscene/error.hpp"
#include "funscene/geometry.hpp"

namespace funscene {

using json = nlohmann::json;

inline std::string to_lower_copy(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

enum class Database { annotated_S, unannotated_U };
enum class ObjectType { door, window, other };

inline std::string to_string(Database db) {
  return db == Database::annotated_S ? "annotated_S" : "unannotated_U";
}
inline std::string to_string(ObjectType t) {
  switch (t) {
    case ObjectType::door: return "door";
    case ObjectType::window: return "window";
    default: return "other";
  }
}
inline std::optional<ObjectType> object_type_from_string(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "door") return ObjectType::door;
  if (s == "window") return ObjectType::window;
  if (s == "other") return ObjectType::other;
  return std::nullopt;
}

// A single natural-language action sentence.
class TaskDescription {
 public:
  explicit TaskDescription(std::string text) : text_(std::move(text)) {
    const auto first = text_.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw InvalidArgument("task description is empty");
    const auto last = text_.find_last_not_of(" \t\r\n");
    text_ = text_.substr(first, last - first + 1);
    // A sentence terminator followed by more words means several sentences.
    for (std::size_t i = 0; i + 1 < text_.size(); ++i) {
      const char c = text_[i];
      if ((c == '.' || c == '!' || c == '?') && std::isspace(static_cast<unsigned char>(text_[i + 1]))) {
        if (text_.find_first_not_of(" \t.!?", i + 1) != std::string::npos)
          throw InvalidArgument("task description must be a single sentence: " + text_);
      }
    }
  }

  const std::string& text() const { return text_; }
  bool operator==(const TaskDescription&) const = default;

 private:
  std::string text_;
};

struct TaskParse {
  std::string layout_prompt;
  std::string context_free_prompt;
  std::string object_name;
  std::string functional_label;  // filled by requirement inference
  ObjectType object_type = ObjectType::other;

  bool operator==(const TaskParse&) const = default;
};

// Opaque pointer to a part's geometry mask: a file plus an index inside it.
struct MaskRef {
  std::string path;
  int index = 0;

  bool operator==(const MaskRef&) const = default;
};

struct PartNode {
  std::string part_id;
  std::string label;
  std::vector<PartNode> children;
  Vec3 centroid3;
  Aabb3 aabb;
  std::optional<MaskRef> mask_ref;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const PartNode&) const = default;
};

// Depth-first visit with the parent pointer (nullptr for the root).
template <typename Fn>
void visit_parts(const PartNode& node, Fn&& fn, const PartNode* parent = nullptr) {
  fn(node, parent);
  for (const auto& child : node.children) visit_parts(child, fn, &node);
}

inline const PartNode* find_part(const PartNode& root, const std::string& part_id) {
  if (root.part_id == part_id) return &root;
  for (const auto& child : root.children)
    if (const PartNode* hit = find_part(child, part_id)) return hit;
  return nullptr;
}

// Leaves under (and including) a node; these carry the masks.
inline std::vector<const PartNode*> leaf_parts(const PartNode& node) {
  std::vector<const PartNode*> out;
  visit_parts(node, [&](const PartNode& p, const PartNode*) {
    if (p.is_leaf()) out.push_back(&p);
  });
  return out;
}

// Canonical frame: X lateral, Y depth with +Y the front unless `front_axis`
// says otherwise, Z up.
struct AssetRecord {
  std::string asset_id;
  Database database = Database::unannotated_U;
  std::string category;
  std::string description;
  Vec3 dims{1.0, 1.0, 1.0};  // width, depth, height
  Vec2 front_axis{0.0, 1.0};
  std::optional<PartNode> root_part;

  // Whole-object box in the canonical frame: the root part's box when
  // annotated, otherwise the dims centered on the origin with the base at z=0.
  Aabb3 bounds() const {
    if (root_part) return root_part->aabb;
    return {{-dims.x / 2, -dims.y / 2, 0.0}, {dims.x / 2, dims.y / 2, dims.z}};
  }

  bool operator==(const AssetRecord&) const = default;
};

struct FunctionalElement {
  std::string part_id;
  std::string label;           // plain part label
  std::string enriched_label;  // parent label + part label
  Vec2 centroid2;

  bool operator==(const FunctionalElement&) const = default;
};

struct MaskSelection {
  std::string asset_id;
  std::string part_id;
  std::string reasoning;

  bool operator==(const MaskSelection&) const = default;
};

// Every violated invariant, one message each. Empty iff the record is well formed.
inline std::vector<std::string> validate_asset(const AssetRecord& record) {
  std::vector<std::string> report;
  if (record.asset_id.empty()) report.emplace_back("empty asset id");
  if (!(record.dims.x > 0.0 && record.dims.y > 0.0 && record.dims.z > 0.0))
    report.emplace_back("non-positive dimension");
  if (std::abs(norm(record.front_axis) - 1.0) > 1e-6) report.emplace_back("front axis is not a unit vector");
  if (record.database == Database::annotated_S && !record.root_part)
    report.emplace_back("missing part tree");
  if (record.database == Database::unannotated_U && record.root_part)
    report.emplace_back("unannotated asset carries a part tree");
  if (record.root_part) {
    std::set<std::string> seen;
    visit_parts(*record.root_part, [&](const PartNode& p, const PartNode*) {
      if (!seen.insert(p.part_id).second) report.push_back("duplicate part id " + p.part_id);
      if (p.is_leaf() && !p.mask_ref) report.push_back("leaf part " + p.part_id + " has no mask");
      if (!p.aabb.contains(p.centroid3)) report.push_back("centroid outside box for part " + p.part_id);
    });
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON mapping. The asset metadata schema is documented in docs/asset-schema.md.

inline void to_json(json& j, const Vec2& v) { j = json::array({v.x, v.y}); }
inline void from_json(const json& j, Vec2& v) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected a 2-vector");
  v = {j[0].get<double>(), j[1].get<double>()};
}
inline void to_json(json& j, const Vec3& v) { j = json::array({v.x, v.y, v.z}); }
inline void from_json(const json& j, Vec3& v) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-vector");
  v = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}
inline void to_json(json& j, const Aabb3& b) { j = json{{"min", b.min}, {"max", b.max}}; }
inline void from_json(const json& j, Aabb3& b) {
  b.min = j.at("min").get<Vec3>();
  b.max = j.at("max").get<Vec3>();
}
inline void to_json(json& j, const MaskRef& m) { j = json{{"path", m.path}, {"index", m.index}}; }
inline void from_json(const json& j, MaskRef& m) {
  m.path = j.at("path").get<std::string>();
  m.index = j.at("index").get<int>();
}

inline void to_json(json& j, const PartNode& p) {
  j = json{{"id", p.part_id}, {"label", p.label}, {"centroid", p.centroid3}, {"aabb", p.aabb}};
  if (p.mask_ref) j["mask"] = *p.mask_ref;
  if (!p.children.empty()) j["children"] = p.children;
}
inline void from_json(const json& j, PartNode& p) {
  p.part_id = j.at("id").get<std::string>();
  p.label = j.at("label").get<std::string>();
  p.centroid3 = j.at("centroid").get<Vec3>();
  p.aabb = j.at("aabb").get<Aabb3>();
  p.mask_ref = j.contains("mask") ? std::optional<MaskRef>(j["mask"].get<MaskRef>()) : std::nullopt;
  p.children = j.value("children", std::vector<PartNode>{});
}

inline void to_json(json& j, const AssetRecord& a) {
  j = json{{"asset_id", a.asset_id},
           {"database", to_string(a.database)},
           {"category", a.category},
           {"description", a.description},
           {"dims", a.dims},
           {"front_axis", a.front_axis}};
  if (a.root_part) j["parts"] = *a.root_part;
}
inline void from_json(const json& j, AssetRecord& a) {
  a.asset_id = j.at("asset_id").get<std::string>();
  const auto db = j.at("database").get<std::string>();
  if (db == "annotated_S" || db == "S") {
    a.database = Database::annotated_S;
  } else if (db == "unannotated_U" || db == "U") {
    a.database = Database::unannotated_U;
  } else {
    throw ParseError("unknown database '" + db + "' for asset " + a.asset_id);
  }
  a.category = j.value("category", std::string{});
  a.description = j.value("description", std::string{});
  a.dims = j.at("dims").get<Vec3>();
  a.front_axis = j.value("front_axis", Vec2{0.0, 1.0});
  a.root_part = j.contains("parts") ? std::optional<PartNode>(j["parts"].get<PartNode>()) : std::nullopt;
}

inline void to_json(json& j, const TaskParse& t) {
  j = json{{"layout_prompt", t.layout_prompt},
           {"context_free_prompt", t.context_free_prompt},
           {"object_name", t.object_name},
           {"functional_label", t.functional_label},
           {"object_type", to_string(t.object_type)}};
}
inline void from_json(const json& j, TaskParse& t) {
  t.layout_prompt = j.at("layout_prompt").get<std::string>();
  t.context_free_prompt = j.at("context_free_prompt").get<std::string>();
  t.object_name = j.at("object_name").get<std::string>();
  t.functional_label = j.value("functional_label", std::string{});
  auto type = object_type_from_string(j.at("object_type").get<std::string>());
  if (!type) throw ParseError("invalid object_type");
  t.object_type = *type;
}

inline void to_json(json& j, const FunctionalElement& e) {
  j = json{{"id", e.part_id}, {"label", e.label}, {"name", e.enriched_label}, {"centroid", e.centroid2}};
}
inline void from_json(const json& j, FunctionalElement& e) {
  e.part_id = j.at("id").get<std::string>();
  e.label = j.value("label", std::string{});
  e.enriched_label = j.at("name").get<std::string>();
  e.centroid2 = j.at("centroid").get<Vec2>();
}

inline void to_json(json& j, const MaskSelection& m) {
  j = json{{"asset_id", m.asset_id}, {"part_id", m.part_id}, {"reasoning", m.reasoning}};
}
inline void from_json(const json& j, MaskSelection& m) {
  m.asset_id = j.at("asset_id").get<std::string>();
  m.part_id = j.at("part_id").get<std::string>();
  m.reasoning = j.value("reasoning", std::string{});
}

// ---------------------------------------------------------------------------
// Asset catalog: every `*.json` document under a directory, keyed by id.

using AssetCatalog = std::map<std::string, AssetRecord>;

inline AssetRecord load_asset_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open asset file " + path.string());
  try {
    return json::parse(in).get<AssetRecord>();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void save_asset_file(const AssetRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write asset file " + path.string());
  out << json(record).dump(2) << '\n';
}

inline AssetCatalog load_asset_catalog(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("asset directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  AssetCatalog catalog;
  for (const auto& f : files) {
    auto record = load_asset_file(f);
    const auto id = record.asset_id;
    if (!catalog.emplace(id, std::move(record)).second) throw ParseError("duplicate asset id " + id);
  }
  return catalog;
}

}  // namespace funscene
