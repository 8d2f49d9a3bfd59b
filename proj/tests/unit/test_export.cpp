#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "fixture_world.hpp"
#include "funscene/scene_export.hpp"

using namespace funscene;

namespace {

constexpr double kPi = 3.14159265358979323846;

AnnotationFrame frame(int index = 0) {
  AnnotationFrame f;
  f.index = index;
  f.centroid_px = {960, 720};
  f.distance_m = 1.0;
  f.occupancy = 0.1;
  return f;
}

SceneLayout empty_room_with(const Placement& p) {
  SceneLayout l;
  l.room = {6, 6, {}};
  l.placements = {p};
  l.required_set = {p.handle};
  return l;
}

Placement centered(const std::string& handle, Vec3 dims = {0.8, 0.5, 1.0}) {
  Placement p;
  p.handle = handle;
  p.asset_id = "S_cabinet_3drawer";
  p.center = {3, 3};
  p.dims = dims;
  return p;
}

AssetRecord asset_by_id(const std::string& id) {
  for (const auto& a : fixture::annotated_assets())
    if (a.asset_id == id) return a;
  throw std::runtime_error("no fixture asset " + id);
}

}  // namespace

// Projection

TEST(Project, OpticalAxisHitsPrincipalPoint) {
  const Camera cam = look_at({0, 0, 1}, {3, 0, 1});
  const auto px = project({5, 0, 1}, cam);
  ASSERT_TRUE(px);
  EXPECT_NEAR(px->x, 960, 1e-9);
  EXPECT_NEAR(px->y, 720, 1e-9);
}

TEST(Project, BehindCameraIsNoPixel) {
  const Camera cam = look_at({0, 0, 1}, {3, 0, 1});
  EXPECT_FALSE(project({-1, 0, 1}, cam));
  EXPECT_FALSE(project({0, 0.5, 1}, cam));
}

TEST(Project, MatchesScalarPinhole) {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 pos{rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0.5, 2)};
    const Vec3 target{rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0, 1.5)};
    if (norm(target - pos) < 0.5) continue;
    const Camera cam = look_at(pos, target);
    const Vec3 p{rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0, 2)};
    // Camera basis rebuilt by hand: forward, right = forward x up, down = forward x right.
    const double fl = std::sqrt((target.x - pos.x) * (target.x - pos.x) + (target.y - pos.y) * (target.y - pos.y) +
                                (target.z - pos.z) * (target.z - pos.z));
    const double f[3] = {(target.x - pos.x) / fl, (target.y - pos.y) / fl, (target.z - pos.z) / fl};
    const double rl = std::hypot(f[1], f[0]);
    const double r[3] = {f[1] / rl, -f[0] / rl, 0.0};
    const double d[3] = {f[1] * r[2] - f[2] * r[1], f[2] * r[0] - f[0] * r[2], f[0] * r[1] - f[1] * r[0]};
    const double v[3] = {p.x - pos.x, p.y - pos.y, p.z - pos.z};
    const double X = r[0] * v[0] + r[1] * v[1] + r[2] * v[2];
    const double Y = d[0] * v[0] + d[1] * v[1] + d[2] * v[2];
    const double Z = f[0] * v[0] + f[1] * v[1] + f[2] * v[2];
    const auto px = project(p, cam);
    if (Z <= 1e-6) {
      EXPECT_FALSE(px && Z < 0);
      continue;
    }
    ASSERT_TRUE(px);
    EXPECT_NEAR(px->x, 1432.0 * X / Z + 960.0, 1e-6);
    EXPECT_NEAR(px->y, 1432.0 * Y / Z + 720.0, 1e-6);
  }
}

TEST(Project, UpInTheWorldIsUpInTheImage) {
  const Camera cam = look_at({0, 0, 1}, {3, 0, 1});
  EXPECT_LT(project({3, 0, 2}, cam)->y, 720);
  EXPECT_LT(project({3, 1, 1}, cam)->x, 960);
}

TEST(Intrinsics, Validation) {
  Intrinsics k;
  EXPECT_NO_THROW(validate(k));
  k.fx = 0;
  EXPECT_THROW(validate(k), InvalidArgument);
  k = {};
  k.cx = 2000;
  EXPECT_THROW(validate(k), InvalidArgument);
  EXPECT_THROW(look_at({1, 1, 1}, {1, 1, 1}), InvalidArgument);
  EXPECT_THROW(look_at({1, 1, 1}, {1, 1, 3}), InvalidArgument);
}

// Orbits

TEST(Orbit, TwelveFramesAimedAtTheCentroid) {
  const Placement target = centered("cabinet");
  const SceneLayout layout = empty_room_with(target);
  const Vec3 focus{3, 3.25, 0.8};
  OrbitOptions opt;
  opt.n_frames = 12;
  const auto cams = orbit_trajectory(layout, target, focus, opt, 7);
  ASSERT_EQ(cams.size(), 12u);
  for (const auto& c : cams) {
    const Vec3 to = normalized(focus - c.position);
    const double angle = std::acos(std::clamp(dot(to, c.forward()), -1.0, 1.0)) * 180.0 / kPi;
    EXPECT_LT(angle, 1.0);
    const auto px = project(focus, c);
    ASSERT_TRUE(px);
    EXPECT_NEAR(px->x, 960, 1e-6);
    EXPECT_NEAR(px->y, 720, 1e-6);
    EXPECT_TRUE(detail::camera_position_free(c.position, layout, opt.clearance));
    EXPECT_GT(dot(Vec2{c.position.x - 3, c.position.y - 3}, target.world_front()), 0.0);
  }
}

TEST(Orbit, SeedFixesTheTrajectory) {
  const Placement target = centered("cabinet");
  const SceneLayout layout = empty_room_with(target);
  const auto a = orbit_trajectory(layout, target, {3, 3.25, 0.8}, {}, 11);
  const auto b = orbit_trajectory(layout, target, {3, 3.25, 0.8}, {}, 11);
  const auto c = orbit_trajectory(layout, target, {3, 3.25, 0.8}, {}, 12);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Orbit, RadiusOutsideTheRoomIsAnError) {
  const Placement target = centered("cabinet");
  OrbitOptions opt;
  opt.radius_min = 4.0;
  opt.radius_max = 5.0;
  opt.max_attempts = 50;
  EXPECT_THROW(orbit_trajectory(empty_room_with(target), target, {3, 3.25, 0.8}, opt, 1), Error);
  opt = {};
  opt.n_frames = 0;
  EXPECT_THROW(orbit_trajectory(empty_room_with(target), target, {3, 3.25, 0.8}, opt, 1), InvalidArgument);
}

// Target geometry and occupancy

TEST(TargetGeometry, PartFollowsPlacementYaw) {
  const AssetRecord cabinet = asset_by_id("S_cabinet_3drawer");
  Placement p = centered("cabinet");
  p.elevation = 0.0;
  for (int yaw : {0, 90, 180, 270}) {
    p.yaw_deg = yaw;
    const auto g = target_geometry(cabinet, p, cabinet.root_part->part_id);
    EXPECT_NEAR(g.centroid.x, 3.0, 0.3);
    const Vec2 offset = Vec2{g.corners[0].x, g.corners[0].y} - p.center;
    EXPECT_LE(std::abs(offset.x), 0.4 + 1e-9);
  }
  EXPECT_THROW(target_geometry(cabinet, p, "nope"), InvalidArgument);
}

TEST(Occupancy, BoundedAndGrowsAsTheCameraApproaches) {
  const std::array<Vec3, 8> box = Aabb3{{-0.1, -0.1, 0.9}, {0.1, 0.1, 1.1}}.corners();
  double prev = 0.0;
  for (double d = 6.0; d >= 0.4; d -= 0.2) {
    const double occ = occupancy(box, look_at({-d, 0, 1}, {0, 0, 1}));
    EXPECT_GE(occ, 0.0);
    EXPECT_LE(occ, 1.0);
    EXPECT_GT(occ, prev);
    prev = occ;
  }
  EXPECT_EQ(occupancy(box, look_at({2, 0, 1}, {3, 0, 1})), 0.0);
}

TEST(LineOfSight, OtherObjectsBlock) {
  SceneLayout layout = empty_room_with(centered("cabinet"));
  Placement wall = centered("screen", {0.1, 2.0, 2.0});
  wall.center = {1.5, 3};
  layout.placements.push_back(wall);
  EXPECT_FALSE(line_of_sight({0.5, 3, 1}, {3, 3, 0.5}, layout, "cabinet"));
  EXPECT_TRUE(line_of_sight({3, 5, 1}, {3, 3, 0.5}, layout, "cabinet"));
}

// Filters: each threshold at, just below and just above its limit

struct BoundaryCase {
  const char* name;
  FilterMode mode;
  void (*apply)(AnnotationFrame&);
  bool kept;
  const char* reason;
};

void PrintTo(const BoundaryCase& c, std::ostream* os) { *os << c.name; }

class FilterBoundary : public ::testing::TestWithParam<BoundaryCase> {};

TEST_P(FilterBoundary, Verdict) {
  const BoundaryCase& c = GetParam();
  AnnotationFrame f = frame();
  c.apply(f);
  const FrameVerdict v = filter_frame(f, c.mode);
  EXPECT_EQ(v.kept, c.kept);
  EXPECT_EQ(v.reason, c.reason);
}

constexpr double kTiny = 1e-6;

INSTANTIATE_TEST_SUITE_P(
    Thresholds, FilterBoundary,
    ::testing::Values(
        BoundaryCase{"distance_at_2", FilterMode::real_style, [](AnnotationFrame& f) { f.distance_m = 2.0; }, false, "distance"},
        BoundaryCase{"distance_below_2", FilterMode::real_style, [](AnnotationFrame& f) { f.distance_m = 2.0 - kTiny; }, true, ""},
        BoundaryCase{"distance_above_2", FilterMode::real_style, [](AnnotationFrame& f) { f.distance_m = 2.0 + kTiny; }, false,
                     "distance"},
        BoundaryCase{"distance_example", FilterMode::real_style, [](AnnotationFrame& f) { f.distance_m = 2.5; }, false, "distance"},
        BoundaryCase{"left_at_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.x = 200; }, true, ""},
        BoundaryCase{"left_below_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.x = 200 - kTiny; }, false,
                     "boundary"},
        BoundaryCase{"left_above_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.x = 200 + kTiny; }, true, ""},
        BoundaryCase{"right_at_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.x = 1720; }, true, ""},
        BoundaryCase{"right_inside_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.x = 1720 + kTiny; }, false,
                     "boundary"},
        BoundaryCase{"right_clear_of_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.x = 1720 - kTiny; }, true,
                     ""},
        BoundaryCase{"top_at_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.y = 200; }, true, ""},
        BoundaryCase{"top_below_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.y = 200 - kTiny; }, false,
                     "boundary"},
        BoundaryCase{"top_above_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.y = 200 + kTiny; }, true, ""},
        BoundaryCase{"bottom_at_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.y = 1240; }, true, ""},
        BoundaryCase{"bottom_inside_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.y = 1240 + kTiny; }, false,
                     "boundary"},
        BoundaryCase{"bottom_clear_of_200", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px.y = 1240 - kTiny; },
                     true, ""},
        BoundaryCase{"boundary_example", FilterMode::real_style, [](AnnotationFrame& f) { f.centroid_px = {150, 700}; }, false,
                     "boundary"},
        BoundaryCase{"occupancy_at_min", FilterMode::synthetic_style, [](AnnotationFrame& f) { f.occupancy = 0.0001; }, true, ""},
        BoundaryCase{"occupancy_below_min", FilterMode::synthetic_style,
                     [](AnnotationFrame& f) { f.occupancy = 0.0001 - 1e-9; }, false, "occupancy"},
        BoundaryCase{"occupancy_above_min", FilterMode::synthetic_style,
                     [](AnnotationFrame& f) { f.occupancy = 0.0001 + 1e-9; }, true, ""},
        BoundaryCase{"occupancy_at_max", FilterMode::synthetic_style, [](AnnotationFrame& f) { f.occupancy = 0.25; }, true, ""},
        BoundaryCase{"occupancy_below_max", FilterMode::synthetic_style, [](AnnotationFrame& f) { f.occupancy = 0.25 - kTiny; },
                     true, ""},
        BoundaryCase{"occupancy_above_max", FilterMode::synthetic_style, [](AnnotationFrame& f) { f.occupancy = 0.25 + kTiny; },
                     false, "occupancy"},
        BoundaryCase{"occupancy_example", FilterMode::synthetic_style, [](AnnotationFrame& f) { f.occupancy = 0.30; }, false,
                     "occupancy"},
        BoundaryCase{"synthetic_ignores_distance", FilterMode::synthetic_style, [](AnnotationFrame& f) { f.distance_m = 9; }, true,
                     ""},
        BoundaryCase{"real_ignores_occupancy", FilterMode::real_style, [](AnnotationFrame& f) { f.occupancy = 0.9; }, true, ""},
        BoundaryCase{"behind_camera", FilterMode::synthetic_style, [](AnnotationFrame& f) { f.in_front = false; }, false,
                     "not-visible"},
        BoundaryCase{"occluded", FilterMode::real_style, [](AnnotationFrame& f) { f.line_of_sight = false; }, false, "not-visible"},
        BoundaryCase{"outside_image", FilterMode::synthetic_style, [](AnnotationFrame& f) { f.centroid_px.x = 1920; }, false,
                     "not-visible"},
        BoundaryCase{"sub_part_near_border", FilterMode::real_style, [](AnnotationFrame& f) { f.points_px = {{960, 720}, {100, 720}}; },
                     false, "boundary"}),
    [](const ::testing::TestParamInfo<BoundaryCase>& info) { return std::string(info.param.name); });

TEST(SelectFrames, StrideKeepsMultiples) {
  std::vector<AnnotationFrame> frames;
  for (int i = 0; i < 12; ++i) frames.push_back(frame(i));
  std::vector<int> indices;
  for (const auto& f : select_frames(frames, FilterMode::synthetic_style, 3, 100)) indices.push_back(f.index);
  EXPECT_EQ(indices, (std::vector<int>{0, 3, 6, 9}));
}

TEST(SelectFrames, TopKByOccupancy) {
  std::vector<AnnotationFrame> frames;
  for (int i = 0; i < 10; ++i) {
    frames.push_back(frame(i));
    frames.back().occupancy = 0.01 * ((i * 7) % 10 + 1);
  }
  const auto top = select_frames(frames, FilterMode::synthetic_style, 1, 5);
  ASSERT_EQ(top.size(), 5u);
  for (const auto& f : top) EXPECT_GE(f.occupancy, 0.06 - 1e-12);
  for (std::size_t i = 1; i < top.size(); ++i) EXPECT_LT(top[i - 1].index, top[i].index);
  for (std::size_t k : {4u, 5u, 6u}) EXPECT_EQ(select_frames(frames, FilterMode::synthetic_style, 1, static_cast<int>(k)).size(), k);
}

TEST(SelectFrames, AllRejectedGivesNothing) {
  std::vector<AnnotationFrame> frames;
  for (int i = 0; i < 6; ++i) {
    frames.push_back(frame(i));
    frames.back().distance_m = 3;
  }
  EXPECT_TRUE(select_frames(frames, FilterMode::real_style).empty());
  EXPECT_THROW(select_frames(frames, FilterMode::real_style, 0), InvalidArgument);
}

TEST(SelectFrames, KeptFramesRepassTheirFilters) {
  Rng rng(42);
  std::vector<AnnotationFrame> frames;
  for (int i = 0; i < 200; ++i) {
    AnnotationFrame f = frame(i);
    f.distance_m = rng.uniform(0.5, 3);
    f.centroid_px = {rng.uniform(0, 1920), rng.uniform(0, 1440)};
    f.occupancy = rng.uniform(0, 0.4);
    frames.push_back(f);
  }
  for (const FilterMode mode : {FilterMode::real_style, FilterMode::synthetic_style}) {
    for (const auto& f : select_frames(frames, mode, 3, 50)) {
      EXPECT_EQ(f.index % 3, 0);
      if (mode == FilterMode::real_style) {
        EXPECT_LT(f.distance_m, 2.0);
        EXPECT_GE(std::min({f.centroid_px.x, f.centroid_px.y, 1920 - f.centroid_px.x, 1440 - f.centroid_px.y}), 200.0);
      } else {
        EXPECT_GE(f.occupancy, 0.0001);
        EXPECT_LE(f.occupancy, 0.25);
      }
    }
  }
}

// Pointing samples

TEST(PointingSamples, CentroidAnswer) {
  const auto samples = emit_pointing_samples({frame()}, "open the fridge");
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].assistant, "```json\n[{\"point_2d\":[960,720]}]\n```");
  EXPECT_NE(samples[0].user.find("\"open the fridge\""), std::string::npos);
  EXPECT_EQ(samples[0].user.rfind("Point to the object part I need to interact with", 0), 0u);
  EXPECT_TRUE(emit_pointing_samples({}, "x").empty());
}

TEST(PointingSamples, OnePointPerSubPart) {
  AnnotationFrame f = frame();
  f.points_px = {{700.4, 800.6}, {1200.5, 800}};
  const auto s = emit_pointing_samples({f}, "turn on the oven");
  ASSERT_EQ(s[0].points.size(), 2u);
  EXPECT_EQ(s[0].points[0], (std::array<int, 2>{700, 801}));
  const json line = to_json_line(s[0]);
  EXPECT_EQ(line["points"].size(), 2u);
  EXPECT_EQ(line["conversations"][1]["role"], "assistant");
}

TEST(PointingSamples, TwoKnobTargetYieldsTwoPoints) {
  const AssetRecord oven = fixture::oven("oven_2", "oven with two knobs", 2);
  const PartNode* panel = nullptr;
  visit_parts(*oven.root_part, [&](const PartNode& p, const PartNode*) {
    if (p.label == "panel") panel = &p;
  });
  ASSERT_TRUE(panel);
  Placement p = centered("oven", oven.dims);
  p.asset_id = oven.asset_id;
  const auto g = target_geometry(oven, p, panel->part_id);
  ASSERT_EQ(g.sub_parts.size(), 2u);
  const Camera cam = look_at({3, 5, 1}, g.centroid);
  const auto f = annotate_frame(0, cam, g, empty_room_with(p));
  EXPECT_EQ(f.points_px.size(), 2u);
  EXPECT_EQ(emit_pointing_samples({f}, "turn on the oven")[0].points.size(), 2u);
}

// Manifest

TEST(Manifest, RoundTripsAndAssignsDenseIds) {
  SceneManifest m;
  m.scene_id = "p0001";
  m.task_description = "Open the second drawer of the cabinet";
  m.seed = 77;
  m.layout = empty_room_with(centered("cabinet"));
  m.layout.room.openings.push_back({Wall::W, 1.0, 1.9, ObjectType::door});
  Placement lamp = centered("lamp", {0.3, 0.3, 1.5});
  lamp.center = {0.5, 0.5};
  lamp.yaw_deg = 270;
  lamp.mounted = Wall::S;
  m.layout.placements.push_back(lamp);
  m.layout.score = 2.5;
  m.instance_ids = assign_instance_ids(m.layout);
  m.selection = {"S_cabinet_3drawer", "S_cabinet_3drawer/p4", "second from the top"};
  m.clauses = {parse_clause("cabinet | against-wall N"), parse_clause("lamp, cabinet | near | soft 2")};
  m.trajectories = {{5, {look_at({1, 1, 1}, {3, 3, 0.5})}}};
  m.approximations = default_approximations();
  EXPECT_EQ(m.instance_ids, (std::map<std::string, int>{{"cabinet", 1}, {"lamp", 2}}));

  const auto path = std::filesystem::temp_directory_path() / "funscene_manifest.json";
  write_manifest(m, path);
  EXPECT_EQ(read_manifest(path), m);
  std::filesystem::remove(path);
  EXPECT_EQ(manifest_from_json(manifest_to_json(m)), m);
}

TEST(Manifest, RejectsUnknownVersion) {
  SceneManifest m;
  m.layout = empty_room_with(centered("cabinet"));
  json j = manifest_to_json(m);
  j["schema_version"] = 99;
  EXPECT_THROW(manifest_from_json(j), ParseError);
}
