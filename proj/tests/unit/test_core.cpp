#include <gtest/gtest.h>

#include <filesystem>

#include "fixture_world.hpp"
#include "funscene/core_types.hpp"
#include "funscene/geometry.hpp"
#include "funscene/random.hpp"
#include "funscene/structured.hpp"

using namespace funscene;

namespace {

bool has(const std::vector<std::string>& report, const std::string& needle) {
  for (const auto& r : report)
    if (r.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST(ValidateAsset, ZeroDimensionIsReported) {
  AssetRecord a = fixture::plain_assets().front();
  a.dims = {0.0, 1.0, 1.0};
  EXPECT_TRUE(has(validate_asset(a), "non-positive dimension"));
}

TEST(ValidateAsset, AnnotatedWithoutPartTreeIsReported) {
  AssetRecord a = fixture::annotated_assets().front();
  a.root_part.reset();
  EXPECT_TRUE(has(validate_asset(a), "missing part tree"));
}

TEST(ValidateAsset, FixtureAssetsAreWellFormed) {
  for (const auto& a : fixture::annotated_assets()) EXPECT_TRUE(validate_asset(a).empty()) << a.asset_id;
  for (const auto& a : fixture::plain_assets()) EXPECT_TRUE(validate_asset(a).empty()) << a.asset_id;
}

TEST(ValidateAsset, PartTreeInvariants) {
  AssetRecord a = fixture::annotated_assets().front();
  a.front_axis = {0.0, 2.0};
  a.root_part->children[0].part_id = a.root_part->part_id;
  a.root_part->children[0].children[0].mask_ref.reset();
  a.root_part->children[0].children[0].centroid3 = {9, 9, 9};
  const auto report = validate_asset(a);
  EXPECT_TRUE(has(report, "unit vector"));
  EXPECT_TRUE(has(report, "duplicate part id"));
  EXPECT_TRUE(has(report, "has no mask"));
  EXPECT_TRUE(has(report, "centroid outside box"));
}

TEST(CoreTypes, AssetJsonRoundTrip) {
  for (const auto& a : fixture::annotated_assets()) EXPECT_EQ(json(a).get<AssetRecord>(), a);
  for (const auto& a : fixture::plain_assets()) EXPECT_EQ(json(a).get<AssetRecord>(), a);
}

TEST(CoreTypes, AssetFileRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "funscene_core_rt";
  std::filesystem::create_directories(dir);
  const AssetRecord a = fixture::annotated_assets()[2];
  save_asset_file(a, dir / "a.json");
  EXPECT_EQ(load_asset_file(dir / "a.json"), a);
  const auto catalog = load_asset_catalog(dir);
  ASSERT_EQ(catalog.size(), 1u);
  EXPECT_EQ(catalog.at(a.asset_id), a);
  std::filesystem::remove_all(dir);
}

TEST(CoreTypes, SmallTypesRoundTrip) {
  const TaskParse t{"a bedroom", "Open the drawer", "nightstand", "handle", ObjectType::other};
  EXPECT_EQ(json(t).get<TaskParse>(), t);
  const FunctionalElement e{"handle_1", "handle", "drawer handle", {0.25, 0.75}};
  EXPECT_EQ(json(e).get<FunctionalElement>(), e);
  const MaskSelection m{"S_cabinet_3drawer", "handle_2", "second from the bottom"};
  EXPECT_EQ(json(m).get<MaskSelection>(), m);
}

TEST(CoreTypes, TaskDescriptionRejectsEmpty) {
  EXPECT_THROW(TaskDescription(""), InvalidArgument);
  EXPECT_THROW(TaskDescription("   "), InvalidArgument);
  EXPECT_THROW(TaskDescription("Open the door. Then close it."), InvalidArgument);
  EXPECT_EQ(TaskDescription("  Open the door.\n").text(), "Open the door.");
}

TEST(CoreTypes, ObjectTypeParsing) {
  EXPECT_EQ(object_type_from_string("Door"), ObjectType::door);
  EXPECT_EQ(object_type_from_string("window"), ObjectType::window);
  EXPECT_EQ(object_type_from_string("other"), ObjectType::other);
  EXPECT_FALSE(object_type_from_string("table"));
}

TEST(CoreTypes, PartTreeQueries) {
  const AssetRecord a = fixture::annotated_assets().front();
  const auto leaves = leaf_parts(*a.root_part);
  EXPECT_EQ(leaves.size(), 3u);
  for (const auto* l : leaves) EXPECT_EQ(l->label, "handle");
  EXPECT_NE(find_part(*a.root_part, "drawer_2"), nullptr);
  EXPECT_EQ(find_part(*a.root_part, "nope"), nullptr);
}

TEST(Geometry, QuarterTurnRotationIsExact) {
  const Vec2 v{1.0, 0.0};
  EXPECT_EQ(rotate(v, 90).x, 0.0);
  EXPECT_EQ(rotate(v, 90).y, 1.0);
  EXPECT_EQ(rotate(v, 180).x, -1.0);
  EXPECT_EQ(rotate(v, 270).y, -1.0);
}

TEST(Geometry, RectOverlapIgnoresTouchingEdges) {
  const Rect a{{0, 0}, {1, 1}};
  EXPECT_FALSE(overlaps(a, Rect{{1, 0}, {2, 1}}));
  EXPECT_TRUE(overlaps(a, Rect{{0.99, 0.5}, {2, 1}}));
  EXPECT_TRUE(contains(Rect{{0, 0}, {4, 4}}, a));
}

TEST(Geometry, HullAndClip) {
  const Polygon2 square{{0, 0}, {2, 0}, {2, 2}, {0, 2}, {1, 1}};
  const auto hull = convex_hull(square);
  EXPECT_EQ(hull.size(), 4u);
  EXPECT_NEAR(signed_area(hull), 4.0, 1e-12);
  const auto clipped = clip_to_rect(hull, Rect{{1, 1}, {3, 3}});
  EXPECT_NEAR(std::abs(signed_area(clipped)), 1.0, 1e-12);
}

TEST(Random, SeededStreamsReproduce) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng c(7);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(c.below(5), 5u);
    const double u = c.unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
}

// Structured blocks

TEST(StructuredBlock, OneFencedBlock) {
  const auto doc = parse_structured_block("```yaml\nobject_name: cabinet\nobject_type: other\n```");
  EXPECT_EQ(doc.at("object_name").str(), "cabinet");
  EXPECT_EQ(doc.at("object_type").str(), "other");
}

TEST(StructuredBlock, ProseAroundBlockGivesSameTree) {
  const std::string block = "```yaml\nobject_name: cabinet\nobject_type: other\n```";
  const auto plain = parse_structured_block(block);
  const auto chatty = parse_structured_block("Sure! Here is the parse:\n\n" + block + "\nLet me know if you need more.");
  EXPECT_EQ(plain.at("object_name").str(), chatty.at("object_name").str());
  EXPECT_EQ(plain.entries().size(), chatty.entries().size());
}

TEST(StructuredBlock, EmptyTextHasNoBlock) {
  try {
    parse_structured_block("");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("no structured block"), std::string::npos);
  }
  EXPECT_THROW(parse_structured_block("I cannot help with that."), ParseError);
  EXPECT_THROW(parse_structured_block("```yaml\nkey: value\n"), ParseError);
}

TEST(StructuredBlock, ListsKeepOrder) {
  const auto doc = parse_structured_block(
      "```yaml\nobjects:\n  - name: bed\n    required: true\n  - name: lamp\n    required: false\n  - name: rug\n```");
  const auto& items = doc.at("objects").items();
  ASSERT_EQ(items.size(), 3u);
  EXPECT_EQ(items[0].at("name").str(), "bed");
  EXPECT_TRUE(items[0].at("required").boolean());
  EXPECT_EQ(items[1].at("name").str(), "lamp");
  EXPECT_FALSE(items[1].at("required").boolean());
  EXPECT_EQ(items[2].at("name").str(), "rug");
}

TEST(StructuredBlock, ScalarsAndInlineLists) {
  const auto doc = parse_block_text("a: \"quoted: text\"\nb: [1, 2, 3]\nc: 0.5\n# comment\nd:\n");
  EXPECT_EQ(doc.at("a").str(), "quoted: text");
  EXPECT_EQ(doc.at("b").items().size(), 3u);
  EXPECT_DOUBLE_EQ(doc.at("c").number(), 0.5);
  EXPECT_TRUE(doc.find("d") != nullptr);
  EXPECT_EQ(doc.find("missing"), nullptr);
  EXPECT_THROW(doc.at("missing"), ParseError);
}
