#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "funscene/core_types.hpp"
#include "funscene/layout.hpp"
#include "funscene/random.hpp"

namespace funscene {

// ---------------------------------------------------------------------------
// Camera

struct Intrinsics {
  double fx = 1432.0;
  double fy = 1432.0;
  double cx = 960.0;
  double cy = 720.0;
  int width = 1920;
  int height = 1440;

  bool operator==(const Intrinsics&) const = default;
};

// World-to-camera rotation rows are the camera's right, down and forward axes
// (x right, y down, z along the optical axis).
struct Camera {
  Vec3 position;
  std::array<Vec3, 3> rotation{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  Intrinsics intrinsics;

  Vec3 forward() const { return rotation[2]; }
  bool operator==(const Camera&) const = default;
};

inline void validate(const Intrinsics& k) {
  if (!(k.fx > 0.0 && k.fy > 0.0)) throw InvalidArgument("focal lengths must be positive");
  if (k.width <= 0 || k.height <= 0) throw InvalidArgument("image size must be positive");
  if (!(k.cx >= 0.0 && k.cx <= k.width && k.cy >= 0.0 && k.cy <= k.height))
    throw InvalidArgument("principal point must lie inside the image");
}

inline Camera look_at(const Vec3& position, const Vec3& target, const Intrinsics& intrinsics = {}) {
  const Vec3 d = target - position;
  if (norm(d) < 1e-9) throw InvalidArgument("camera coincides with its target");
  const Vec3 f = normalized(d);
  const Vec3 side = cross(f, Vec3{0.0, 0.0, 1.0});
  if (norm(side) < 1e-6) throw InvalidArgument("camera looks straight up or down");
  const Vec3 r = normalized(side);
  return {position, {r, cross(f, r), f}, intrinsics};
}

inline Vec3 to_camera(const Vec3& p, const Camera& cam) {
  const Vec3 d = p - cam.position;
  return {dot(cam.rotation[0], d), dot(cam.rotation[1], d), dot(cam.rotation[2], d)};
}

// Pinhole projection; nullopt when the point is not in front of the camera.
inline std::optional<Vec2> project(const Vec3& p, const Camera& cam) {
  const Vec3 c = to_camera(p, cam);
  if (c.z <= 1e-9) return std::nullopt;
  const auto& k = cam.intrinsics;
  return Vec2{k.fx * c.x / c.z + k.cx, k.fy * c.y / c.z + k.cy};
}

// ---------------------------------------------------------------------------
// Target geometry in world coordinates

// Asset-frame point to world: the asset's footprint center and base map to the
// placement center and elevation, then the yaw is applied.
inline Vec3 to_world(const Placement& placement, const Aabb3& asset_bounds, const Vec3& local) {
  const Vec3 c = asset_bounds.center();
  const Vec2 xy = placement.center + rotate(Vec2{local.x - c.x, local.y - c.y}, placement.yaw_deg);
  return {xy.x, xy.y, placement.elevation + local.z - asset_bounds.min.z};
}

struct SubPart {
  std::string part_id;
  Vec3 centroid;
  std::array<Vec3, 8> corners{};

  bool operator==(const SubPart&) const = default;
};

struct TargetGeometry {
  std::string handle;
  std::string asset_id;
  std::string part_id;
  Vec3 centroid;
  std::array<Vec3, 8> corners{};
  std::vector<SubPart> sub_parts;  // one per leaf under the selected part

  bool operator==(const TargetGeometry&) const = default;
};

inline TargetGeometry target_geometry(const AssetRecord& asset, const Placement& placement, const std::string& part_id) {
  if (!asset.root_part) throw InvalidArgument("asset " + asset.asset_id + " has no part tree");
  const PartNode* part = find_part(*asset.root_part, part_id);
  if (!part) throw InvalidArgument("part " + part_id + " not found in " + asset.asset_id);
  const Aabb3 bounds = asset.bounds();
  auto corners_of = [&](const Aabb3& box) {
    std::array<Vec3, 8> out{};
    const auto local = box.corners();
    for (std::size_t i = 0; i < 8; ++i) out[i] = to_world(placement, bounds, local[i]);
    return out;
  };
  TargetGeometry g;
  g.handle = placement.handle;
  g.asset_id = asset.asset_id;
  g.part_id = part_id;
  g.centroid = to_world(placement, bounds, part->centroid3);
  g.corners = corners_of(part->aabb);
  for (const PartNode* leaf : leaf_parts(*part))
    g.sub_parts.push_back({leaf->part_id, to_world(placement, bounds, leaf->centroid3), corners_of(leaf->aabb)});
  return g;
}

// ---------------------------------------------------------------------------
// Orbit trajectories

struct OrbitOptions {
  int n_frames = 60;
  double radius_min = 1.0;  // horizontal distance to the target
  double radius_max = 2.5;
  double height_min = 0.8;
  double height_max = 1.8;
  double half_angle_deg = 80.0;  // orbit stays within this angle of the target's front
  double arc_min_deg = 40.0;
  double arc_max_deg = 120.0;
  double clearance = 0.1;  // distance kept from walls and furniture
  int max_attempts = 500;
};

namespace detail {

inline bool camera_position_free(const Vec3& p, const SceneLayout& layout, double clearance) {
  const Room& room = layout.room;
  if (p.x < clearance || p.y < clearance || p.x > room.width - clearance || p.y > room.depth - clearance) return false;
  for (const auto& pl : layout.placements) {
    if (p.z < pl.elevation - clearance || p.z > pl.top() + clearance) continue;
    const Vec2 local = rotate(Vec2{p.x, p.y} - pl.center, -pl.yaw_deg);
    if (std::abs(local.x) <= pl.dims.x / 2 + clearance && std::abs(local.y) <= pl.dims.y / 2 + clearance) return false;
  }
  return true;
}

}  // namespace detail

// Randomized arc around the target's front, every camera aimed at `focus`.
inline std::vector<Camera> orbit_trajectory(const SceneLayout& layout, const Placement& target, const Vec3& focus,
                                            const OrbitOptions& opt, std::uint64_t seed, const Intrinsics& intrinsics = {}) {
  if (opt.n_frames < 1) throw InvalidArgument("n_frames must be at least 1");
  if (!(opt.radius_min > 0.0 && opt.radius_min <= opt.radius_max)) throw InvalidArgument("invalid orbit radius range");
  if (!(opt.height_min <= opt.height_max)) throw InvalidArgument("invalid orbit height range");
  if (!(opt.arc_min_deg >= 0.0 && opt.arc_min_deg <= opt.arc_max_deg)) throw InvalidArgument("invalid orbit arc range");
  validate(intrinsics);
  const Vec2 front = target.world_front();
  const double half = opt.half_angle_deg;
  Rng rng(seed);
  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    const double radius = rng.uniform(opt.radius_min, opt.radius_max);
    const double height = rng.uniform(opt.height_min, opt.height_max);
    const double arc = std::min(rng.uniform(opt.arc_min_deg, opt.arc_max_deg), 2.0 * half);
    const double start = rng.uniform(-half, half - arc);
    std::vector<Camera> cams;
    cams.reserve(static_cast<std::size_t>(opt.n_frames));
    bool ok = true;
    for (int i = 0; i < opt.n_frames && ok; ++i) {
      const double t = opt.n_frames == 1 ? 0.5 : static_cast<double>(i) / (opt.n_frames - 1);
      const Vec2 dir = rotate(front, start + arc * t);
      const Vec3 pos{focus.x + radius * dir.x, focus.y + radius * dir.y, height};
      ok = detail::camera_position_free(pos, layout, opt.clearance);
      if (ok) cams.push_back(look_at(pos, focus, intrinsics));
    }
    if (ok) return cams;
  }
  throw Error("orbit", "no collision-free orbit inside the room for " + target.handle);
}

// ---------------------------------------------------------------------------
// Frames and filters

enum class FilterMode { real_style, synthetic_style };

inline std::string to_string(FilterMode m) { return m == FilterMode::real_style ? "real_style" : "synthetic_style"; }
inline std::optional<FilterMode> filter_mode_from_string(const std::string& s) {
  if (s == "real_style" || s == "real") return FilterMode::real_style;
  if (s == "synthetic_style" || s == "synthetic") return FilterMode::synthetic_style;
  return std::nullopt;
}

struct FilterOptions {
  double max_distance_m = 2.0;  // kept iff strictly closer
  double border_px = 200.0;     // kept iff at least this far from every border
  double min_occupancy = 0.0001;
  double max_occupancy = 0.25;
};

struct FrameVerdict {
  bool kept = false;
  std::string reason;  // empty when kept

  bool operator==(const FrameVerdict&) const = default;
};

struct AnnotationFrame {
  int index = 0;
  Camera camera;
  std::string part_id;
  Vec2 centroid_px;
  bool in_front = true;
  bool line_of_sight = true;
  double occupancy = 0.0;
  double distance_m = 0.0;
  std::vector<Vec2> points_px;  // one per sub-part
  FrameVerdict verdict;
};

// Fraction of the image covered by the convex hull of the projected box
// corners, clipped to the image; corners behind the camera are dropped.
inline double occupancy(const std::array<Vec3, 8>& corners, const Camera& cam) {
  Polygon2 pts;
  for (const auto& c : corners)
    if (const auto px = project(c, cam)) pts.push_back(*px);
  if (pts.size() < 3) return 0.0;
  const auto& k = cam.intrinsics;
  const Polygon2 clipped = clip_to_rect(convex_hull(pts), Rect{{0.0, 0.0}, {double(k.width), double(k.height)}});
  if (clipped.size() < 3) return 0.0;
  return std::clamp(std::abs(signed_area(clipped)) / (double(k.width) * k.height), 0.0, 1.0);
}

namespace detail {

// Does the segment a->b pass through a placement's box (excluding the end point)?
inline bool segment_hits(const Vec3& a, const Vec3& b, const Placement& pl) {
  const Vec2 la = rotate(Vec2{a.x, a.y} - pl.center, -pl.yaw_deg);
  const Vec2 lb = rotate(Vec2{b.x, b.y} - pl.center, -pl.yaw_deg);
  const double lo[3] = {-pl.dims.x / 2, -pl.dims.y / 2, pl.elevation};
  const double hi[3] = {pl.dims.x / 2, pl.dims.y / 2, pl.top()};
  const double p0[3] = {la.x, la.y, a.z};
  const double d[3] = {lb.x - la.x, lb.y - la.y, b.z - a.z};
  double t0 = 0.0, t1 = 1.0 - 1e-6;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-12) {
      if (p0[i] < lo[i] || p0[i] > hi[i]) return false;
      continue;
    }
    double ta = (lo[i] - p0[i]) / d[i], tb = (hi[i] - p0[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace detail

// Line of sight to the part centroid, tested against every other object's box.
inline bool line_of_sight(const Vec3& from, const Vec3& to, const SceneLayout& layout, const std::string& target_handle) {
  return std::none_of(layout.placements.begin(), layout.placements.end(), [&](const Placement& pl) {
    return pl.handle != target_handle && detail::segment_hits(from, to, pl);
  });
}

inline AnnotationFrame annotate_frame(int index, const Camera& cam, const TargetGeometry& target, const SceneLayout& layout) {
  AnnotationFrame f;
  f.index = index;
  f.camera = cam;
  f.part_id = target.part_id;
  f.distance_m = norm(target.centroid - cam.position);
  const auto px = project(target.centroid, cam);
  f.in_front = px.has_value();
  f.centroid_px = px.value_or(Vec2{-1.0, -1.0});
  f.line_of_sight = line_of_sight(cam.position, target.centroid, layout, target.handle);
  f.occupancy = occupancy(target.corners, cam);
  for (const auto& sp : target.sub_parts)
    if (const auto q = project(sp.centroid, cam)) f.points_px.push_back(*q);
  if (target.sub_parts.empty() && px) f.points_px.push_back(*px);
  return f;
}

inline std::vector<AnnotationFrame> annotate_trajectory(const std::vector<Camera>& cams, const TargetGeometry& target,
                                                        const SceneLayout& layout) {
  std::vector<AnnotationFrame> out;
  for (std::size_t i = 0; i < cams.size(); ++i) out.push_back(annotate_frame(static_cast<int>(i), cams[i], target, layout));
  return out;
}

inline FrameVerdict filter_frame(const AnnotationFrame& f, FilterMode mode, const FilterOptions& opt = {}) {
  const auto& k = f.camera.intrinsics;
  const double x = f.centroid_px.x, y = f.centroid_px.y;
  const bool in_image = x >= 0.0 && y >= 0.0 && x < k.width && y < k.height;
  if (!f.in_front || !in_image || !f.line_of_sight) return {false, "not-visible"};
  if (mode == FilterMode::real_style) {
    if (!(f.distance_m < opt.max_distance_m)) return {false, "distance"};
    const double margin = std::min({x, y, k.width - x, k.height - y});
    if (margin < opt.border_px) return {false, "boundary"};
    for (const auto& p : f.points_px) {
      if (std::min({p.x, p.y, k.width - p.x, k.height - p.y}) < opt.border_px) return {false, "boundary"};
    }
  } else {
    if (f.occupancy < opt.min_occupancy || f.occupancy > opt.max_occupancy) return {false, "occupancy"};
  }
  return {true, ""};
}

// Every stride-th frame, filtered, then the top k by occupancy (ties to the
// lower index), returned in frame order.
inline std::vector<AnnotationFrame> select_frames(std::vector<AnnotationFrame> frames, FilterMode mode, int stride = 3,
                                                  int k = 5, const FilterOptions& opt = {}) {
  if (stride < 1 || k < 1) throw InvalidArgument("stride and k must be at least 1");
  std::vector<AnnotationFrame> kept;
  for (auto& f : frames) {
    if (f.index % stride != 0) continue;
    f.verdict = filter_frame(f, mode, opt);
    if (f.verdict.kept) kept.push_back(std::move(f));
  }
  std::stable_sort(kept.begin(), kept.end(), [](const AnnotationFrame& a, const AnnotationFrame& b) {
    if (a.occupancy != b.occupancy) return a.occupancy > b.occupancy;
    return a.index < b.index;
  });
  if (kept.size() > static_cast<std::size_t>(k)) kept.resize(static_cast<std::size_t>(k));
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
  return kept;
}

// ---------------------------------------------------------------------------
// Pointing samples

struct PointingSample {
  std::string scene_id;
  int trajectory = 0;
  int frame = 0;
  std::string user;
  std::string assistant;
  std::vector<std::array<int, 2>> points;
};

inline std::string pointing_instruction(const std::string& task_description) {
  return "Point to the object part I need to interact with in order to \"" + task_description +
         "\". Return the points using JSON...";
}

inline std::string pointing_answer(const std::vector<std::array<int, 2>>& points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back({{"point_2d", {p[0], p[1]}}});
  return "```json\n" + arr.dump() + "\n```";
}

inline std::vector<PointingSample> emit_pointing_samples(const std::vector<AnnotationFrame>& kept,
                                                         const std::string& task_description,
                                                         const std::string& scene_id = {}, int trajectory = 0) {
  std::vector<PointingSample> out;
  for (const auto& f : kept) {
    const auto& k = f.camera.intrinsics;
    PointingSample s;
    s.scene_id = scene_id;
    s.trajectory = trajectory;
    s.frame = f.index;
    const std::vector<Vec2>& pts = f.points_px.empty() ? std::vector<Vec2>{f.centroid_px} : f.points_px;
    for (const auto& p : pts) {
      const int x = std::clamp(static_cast<int>(std::lround(p.x)), 0, k.width - 1);
      const int y = std::clamp(static_cast<int>(std::lround(p.y)), 0, k.height - 1);
      s.points.push_back({x, y});
    }
    s.user = pointing_instruction(task_description);
    s.assistant = pointing_answer(s.points);
    out.push_back(std::move(s));
  }
  return out;
}

inline json to_json_line(const PointingSample& s) {
  char image[64];
  std::snprintf(image, sizeof image, "traj%02d/frame_%05d.png", s.trajectory, s.frame);
  return json{{"scene_id", s.scene_id},
              {"trajectory", s.trajectory},
              {"frame", s.frame},
              {"image", image},
              {"conversations", json::array({json{{"role", "user"}, {"content", "<image>\n" + s.user}},
                                             json{{"role", "assistant"}, {"content", s.assistant}}})},
              {"points", s.points}};
}

// ---------------------------------------------------------------------------
// Manifest

inline constexpr int kManifestVersion = 1;

struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<Camera> cameras;
  bool operator==(const Trajectory&) const = default;
};

struct SceneManifest {
  int schema_version = kManifestVersion;
  std::string scene_id;
  std::string task_description;
  std::uint64_t seed = 0;
  SceneLayout layout;
  std::map<std::string, int> instance_ids;
  MaskSelection selection;
  TargetGeometry target;
  std::vector<Clause> clauses;
  std::vector<Trajectory> trajectories;
  std::vector<std::string> approximations;

  bool operator==(const SceneManifest&) const = default;
};

// Dense ids from 1 in placement order.
inline std::map<std::string, int> assign_instance_ids(const SceneLayout& layout) {
  std::map<std::string, int> ids;
  int next = 1;
  for (const auto& p : layout.placements) ids.emplace(p.handle, next++);
  return ids;
}

inline void to_json(json& j, const Opening& o) {
  j = json{{"wall", to_string(o.wall)}, {"span", {o.lo, o.hi}}, {"kind", to_string(o.kind)}};
}
inline void from_json(const json& j, Opening& o) {
  const auto w = wall_from_string(j.at("wall").get<std::string>());
  if (!w) throw ParseError("unknown wall " + j.at("wall").dump());
  o.wall = *w;
  o.lo = j.at("span").at(0).get<double>();
  o.hi = j.at("span").at(1).get<double>();
  const auto kind = object_type_from_string(j.at("kind").get<std::string>());
  if (!kind || *kind == ObjectType::other) throw ParseError("opening kind must be door or window");
  o.kind = *kind;
}
inline void to_json(json& j, const Room& r) {
  j = json{{"width", r.width}, {"depth", r.depth}, {"openings", r.openings}};
}
inline void from_json(const json& j, Room& r) {
  r.width = j.at("width").get<double>();
  r.depth = j.at("depth").get<double>();
  r.openings = j.value("openings", std::vector<Opening>{});
}
inline void to_json(json& j, const Placement& p) {
  j = json{{"handle", p.handle},          {"asset_id", p.asset_id},   {"center", p.center},
           {"yaw_deg", p.yaw_deg},        {"dims", p.dims},           {"front_axis", p.front_axis},
           {"elevation", p.elevation},    {"footprint", p.footprint()}};
  j["mounted"] = p.mounted ? json(to_string(*p.mounted)) : json(nullptr);
}
inline void from_json(const json& j, Placement& p) {
  j.at("handle").get_to(p.handle);
  p.asset_id = j.value("asset_id", "");
  j.at("center").get_to(p.center);
  j.at("yaw_deg").get_to(p.yaw_deg);
  j.at("dims").get_to(p.dims);
  p.front_axis = j.value("front_axis", Vec2{0.0, 1.0});
  p.elevation = j.value("elevation", 0.0);
  p.mounted.reset();
  if (j.contains("mounted") && !j["mounted"].is_null()) p.mounted = wall_from_string(j["mounted"].get<std::string>());
}
inline void to_json(json& j, const SceneLayout& l) {
  j = json{{"room", l.room}, {"placements", l.placements}, {"required", l.required_set}, {"score", l.score}};
}
inline void from_json(const json& j, SceneLayout& l) {
  j.at("room").get_to(l.room);
  j.at("placements").get_to(l.placements);
  l.required_set = j.value("required", std::set<std::string>{});
  l.score = j.value("score", 0.0);
}
inline void to_json(json& j, const Camera& c) {
  const auto& k = c.intrinsics;
  j = json{{"position", c.position},
           {"rotation", c.rotation},
           {"intrinsics", {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}}}};
}
inline void from_json(const json& j, Camera& c) {
  j.at("position").get_to(c.position);
  j.at("rotation").get_to(c.rotation);
  const auto& k = j.at("intrinsics");
  c.intrinsics = {k.at("fx").get<double>(), k.at("fy").get<double>(), k.at("cx").get<double>(),
                  k.at("cy").get<double>(), k.at("width").get<int>(),  k.at("height").get<int>()};
}
inline void to_json(json& j, const Trajectory& t) { j = json{{"seed", t.seed}, {"cameras", t.cameras}}; }
inline void from_json(const json& j, Trajectory& t) {
  j.at("seed").get_to(t.seed);
  j.at("cameras").get_to(t.cameras);
}
inline void to_json(json& j, const SubPart& s) { j = json{{"part_id", s.part_id}, {"centroid", s.centroid}, {"corners", s.corners}}; }
inline void from_json(const json& j, SubPart& s) {
  j.at("part_id").get_to(s.part_id);
  j.at("centroid").get_to(s.centroid);
  j.at("corners").get_to(s.corners);
}
inline void to_json(json& j, const TargetGeometry& g) {
  j = json{{"handle", g.handle},     {"asset_id", g.asset_id}, {"part_id", g.part_id},
           {"centroid", g.centroid}, {"corners", g.corners},   {"sub_parts", g.sub_parts}};
}
inline void from_json(const json& j, TargetGeometry& g) {
  j.at("handle").get_to(g.handle);
  j.at("asset_id").get_to(g.asset_id);
  j.at("part_id").get_to(g.part_id);
  j.at("centroid").get_to(g.centroid);
  j.at("corners").get_to(g.corners);
  j.at("sub_parts").get_to(g.sub_parts);
}

inline json manifest_to_json(const SceneManifest& m) {
  json clauses = json::array();
  for (const auto& c : m.clauses) clauses.push_back(to_string(c));
  return json{{"schema_version", m.schema_version},
              {"scene_id", m.scene_id},
              {"task_description", m.task_description},
              {"seed", m.seed},
              {"room", m.layout.room},
              {"placements", m.layout.placements},
              {"required", m.layout.required_set},
              {"score", m.layout.score},
              {"instance_ids", m.instance_ids},
              {"selection", m.selection},
              {"target", m.target},
              {"clauses", clauses},
              {"trajectories", m.trajectories},
              {"camera_convention", "world-to-camera rotation rows: right, down, forward"},
              {"approximations", m.approximations}};
}

inline SceneManifest manifest_from_json(const json& j) {
  SceneManifest m;
  try {
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kManifestVersion)
      throw ParseError("unsupported manifest schema version " + std::to_string(m.schema_version));
    j.at("scene_id").get_to(m.scene_id);
    m.task_description = j.value("task_description", "");
    m.seed = j.value("seed", std::uint64_t{0});
    j.at("room").get_to(m.layout.room);
    j.at("placements").get_to(m.layout.placements);
    m.layout.required_set = j.value("required", std::set<std::string>{});
    m.layout.score = j.value("score", 0.0);
    m.instance_ids = j.value("instance_ids", std::map<std::string, int>{});
    if (j.contains("selection")) j.at("selection").get_to(m.selection);
    if (j.contains("target")) j.at("target").get_to(m.target);
    for (const auto& c : j.value("clauses", json::array())) m.clauses.push_back(parse_clause(c.get<std::string>()));
    m.trajectories = j.value("trajectories", std::vector<Trajectory>{});
    m.approximations = j.value("approximations", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

inline void write_manifest(const SceneManifest& m, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << manifest_to_json(m).dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

inline SceneManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

inline const std::vector<std::string>& default_approximations() {
  static const std::vector<std::string> notes{
      "visibility: line of sight from camera to part centroid against object boxes; no mask rasterization",
      "occupancy: convex hull of the projected part box corners, clipped to the image"};
  return notes;
}

}  // namespace funscene
