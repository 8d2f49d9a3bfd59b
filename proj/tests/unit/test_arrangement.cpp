#include <gtest/gtest.h>

#include "fixture_world.hpp"
#include "funscene/arrangement.hpp"
#include "funscene/part_meta.hpp"
#include "support.hpp"

using namespace funscene;

namespace {

std::vector<FunctionalElement> at(std::initializer_list<Vec2> points) {
  std::vector<FunctionalElement> out;
  for (const auto& p : points) {
    FunctionalElement e;
    e.part_id = "p" + std::to_string(out.size());
    e.label = "handle";
    e.enriched_label = "drawer handle";
    e.centroid2 = p;
    out.push_back(e);
  }
  return out;
}

AssetRecord asset_by_id(const std::string& id) {
  for (const auto& a : fixture::annotated_assets())
    if (a.asset_id == id) return a;
  throw std::runtime_error("no fixture asset " + id);
}

SpatialQuery mirrored(SpatialQuery q) {
  if (q.kind == QueryKind::leftmost) q.kind = QueryKind::rightmost;
  else if (q.kind == QueryKind::rightmost) q.kind = QueryKind::leftmost;
  else if (q.kind == QueryKind::nth_from_left) q.kind = QueryKind::nth_from_right;
  else if (q.kind == QueryKind::nth_from_right) q.kind = QueryKind::nth_from_left;
  else if (q.kind == QueryKind::grid_cell) q.col = q.col == GridCol::left ? GridCol::right : GridCol::left;
  return q;
}

}  // namespace

TEST(ParseSpatialQuery, Examples) {
  EXPECT_EQ(parse_spatial_query("open the leftmost drawer"), (SpatialQuery{QueryKind::leftmost, 0}));
  EXPECT_EQ(parse_spatial_query("open the second drawer of the nightstand"), (SpatialQuery{QueryKind::nth_vertical, 2}));
  EXPECT_EQ(parse_spatial_query("open the top left drawer"),
            (SpatialQuery{QueryKind::grid_cell, 0, GridRow::top, GridCol::left}));
}

TEST(ParseSpatialQuery, OtherPhrasings) {
  EXPECT_EQ(parse_spatial_query("open the third door from the left").kind, QueryKind::nth_from_left);
  EXPECT_EQ(parse_spatial_query("open the third door from the right").n, 3);
  EXPECT_EQ(parse_spatial_query("open the third drawer from the bottom").kind, QueryKind::nth_from_bottom);
  EXPECT_EQ(parse_spatial_query("open the first drawer from the top").kind, QueryKind::nth_vertical);
  EXPECT_EQ(parse_spatial_query("open the right door").kind, QueryKind::rightmost);
  EXPECT_EQ(parse_spatial_query("open the bottom drawer").kind, QueryKind::bottom);
  EXPECT_EQ(parse_spatial_query("open the lower-right drawer"),
            (SpatialQuery{QueryKind::grid_cell, 0, GridRow::bottom, GridCol::right}));
  EXPECT_EQ(parse_spatial_query("open the fridge").kind, QueryKind::unique);
}

TEST(ParseSpatialQuery, ConflictingCuesAreErrors) {
  EXPECT_THROW(parse_spatial_query("open the left top drawer from the right"), ArrangementError);
  EXPECT_THROW(parse_spatial_query("open the leftmost top drawer"), ArrangementError);
  EXPECT_THROW(parse_spatial_query("open the second leftmost drawer"), ArrangementError);
  EXPECT_THROW(parse_spatial_query("open the drawer from the left"), ArrangementError);
}

TEST(SelectPart, LeftmostIsLargestX) {
  const auto v = select_part(at({{0.2, 0.5}, {0.8, 0.5}}), {QueryKind::leftmost, 0});
  ASSERT_TRUE(v.suitable);
  EXPECT_EQ(v.part_id, "p1");
}

TEST(SelectPart, GridTopLeftIsHighXHighY) {
  const auto v = select_part(at({{0.25, 0.25}, {0.25, 0.75}, {0.75, 0.25}, {0.75, 0.75}}),
                             {QueryKind::grid_cell, 0, GridRow::top, GridCol::left});
  ASSERT_TRUE(v.suitable);
  EXPECT_EQ(v.part_id, "p3");
}

TEST(SelectPart, SingleHandleSecondVerticalIsUnsuitable) {
  EXPECT_FALSE(select_part(at({{0.5, 0.5}}), {QueryKind::nth_vertical, 2}).suitable);
}

TEST(SelectPart, AmbiguityAndTolerance) {
  const auto close = at({{0.50, 0.5}, {0.53, 0.5}, {0.1, 0.5}});
  EXPECT_FALSE(select_part(close, {QueryKind::leftmost, 0}).suitable);
  EXPECT_TRUE(select_part(close, {QueryKind::leftmost, 0}, 0.02).suitable);
  EXPECT_TRUE(select_part(close, {QueryKind::rightmost, 0}).suitable);
  EXPECT_THROW(select_part(close, {QueryKind::leftmost, 0}, 0.0), InvalidArgument);
  EXPECT_THROW(select_part(close, {QueryKind::nth_vertical, 0}), InvalidArgument);
}

TEST(SelectPart, UniqueNeedsExactlyOne) {
  EXPECT_TRUE(select_part(at({{0.3, 0.3}}), {}).suitable);
  EXPECT_FALSE(select_part(at({{0.3, 0.3}, {0.7, 0.7}}), {}).suitable);
  EXPECT_FALSE(select_part({}, {}).suitable);
}

TEST(SelectPart, AgreesWithIndependentComparator) {
  Rng rng(21);
  for (const QueryKind kind : support::all_query_kinds()) {
    std::size_t suitable = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const auto elements = support::random_elements(rng, 1 + rng.below(6));
      for (const auto& q : support::queries_of_kind(kind)) {
        const auto v = select_part(elements, q);
        if (!v.suitable) continue;
        ++suitable;
        EXPECT_TRUE(support::oracle_accepts(elements, q, v.part_id, 0.05)) << to_string(q) << " chose " << v.part_id;
      }
    }
    EXPECT_GT(suitable, 0u) << to_string(SpatialQuery{kind, 1});
  }
}

TEST(SelectPart, MirroringSwapsLeftAndRight) {
  Rng rng(22);
  for (int trial = 0; trial < 300; ++trial) {
    auto elements = support::random_elements(rng, 1 + rng.below(6));
    auto flipped = elements;
    for (auto& e : flipped) e.centroid2.x = 1.0 - e.centroid2.x;
    for (const QueryKind kind : {QueryKind::leftmost, QueryKind::rightmost, QueryKind::nth_from_left,
                                 QueryKind::nth_from_right, QueryKind::grid_cell}) {
      for (const auto& q : support::queries_of_kind(kind)) {
        const auto a = select_part(elements, q);
        const auto b = select_part(flipped, mirrored(q));
        EXPECT_EQ(a.suitable, b.suitable) << to_string(q);
        if (a.suitable && b.suitable) EXPECT_EQ(a.part_id, b.part_id) << to_string(q);
      }
    }
  }
}

TEST(SelectPart, ShortfallIsAlwaysUnsuitable) {
  Rng rng(23);
  for (std::size_t count = 0; count <= 6; ++count) {
    for (const QueryKind kind : support::all_query_kinds()) {
      for (const auto& q : support::queries_of_kind(kind)) {
        if (required_cardinality(q) <= count) continue;
        for (int trial = 0; trial < 10; ++trial)
          EXPECT_FALSE(select_part(support::random_elements(rng, count), q).suitable) << to_string(q) << " " << count;
      }
    }
  }
}

TEST(SelectPart, FixtureCabinetByOrdinal) {
  const auto elements = functional_elements(asset_by_id("S_cabinet_4drawer"), default_functional_labels());
  ASSERT_EQ(elements.size(), 4u);
  const auto top = select_part(elements, parse_spatial_query("open the top drawer"));
  const auto third_bottom = select_part(elements, parse_spatial_query("open the third drawer from the bottom"));
  const auto second = select_part(elements, parse_spatial_query("open the second drawer"));
  ASSERT_TRUE(top.suitable && third_bottom.suitable && second.suitable);
  EXPECT_EQ(third_bottom.part_id, second.part_id);
  EXPECT_NE(top.part_id, second.part_id);
  const auto by_id = [&](const std::string& id) {
    return std::find_if(elements.begin(), elements.end(), [&](const auto& e) { return e.part_id == id; })->centroid2.y;
  };
  for (const auto& e : elements) EXPECT_LE(e.centroid2.y, by_id(top.part_id));
}

TEST(ArrangementListing, RendersIdsNamesAndCentroids) {
  const std::vector<AssetElements> assets{{"A", at({{0.25, 1.0}})}, {"B", {}}};
  EXPECT_EQ(render_arrangement_listing(assets),
            "- id: A\n  parts:\n    - id: p0\n      name: drawer handle\n      centroid: [0.250, 1.000]\n- id: B\n  parts:");
}

TEST(SelectPartLlm, CassetteReplayAgreesWithEngine) {
  const AssetRecord cabinet = asset_by_id("S_cabinet_4drawer");
  const AssetElements asset{cabinet.asset_id, functional_elements(cabinet, default_functional_labels())};
  const std::string prompt = "open the top drawer";

  auto cassette = std::make_shared<Cassette>();
  const LlmClient recorder(std::make_shared<RecordingBackend>(fixture::ScriptedModel({}).backend(), cassette));
  select_part_llm(recorder, asset, "cabinet", "handle", prompt);
  ASSERT_EQ(cassette->size(), 1u);

  const LlmClient replay(std::make_shared<ReplayBackend>(*cassette));
  const auto llm = select_part_llm(replay, asset, "cabinet", "handle", prompt);
  const auto engine = select_part(asset.elements, parse_spatial_query(prompt));
  ASSERT_TRUE(llm.suitable);
  EXPECT_EQ(llm.part_id, engine.part_id);
}

TEST(SelectPartLlm, UnknownIdsAreErrors) {
  const AssetElements asset{"A", at({{0.2, 0.5}, {0.8, 0.5}})};
  auto reply = std::make_shared<std::string>();
  const LlmClient client(std::make_shared<FunctionBackend>([reply](const LlmRequest&) { return *reply; }));
  *reply = "```yaml\n- id: A\n  reasoning: left one\n  suitable: true\n  part_id: p9\n```";
  EXPECT_THROW(select_part_llm(client, asset, "cabinet", "handle", "open the left drawer"), ArrangementError);
  *reply = "```yaml\n- id: Z\n  reasoning: other\n  suitable: false\n  part_id: None\n```";
  EXPECT_THROW(select_part_llm(client, asset, "cabinet", "handle", "open the left drawer"), ArrangementError);
  *reply = "```yaml\n- id: A\n  reasoning: left one\n  suitable: true\n  part_id: p1\n```";
  const auto v = select_part_llm(client, asset, "cabinet", "handle", "open the left drawer");
  EXPECT_TRUE(v.suitable);
  EXPECT_EQ(v.part_id, "p1");
  EXPECT_EQ(v.reasoning, "left one");
}

TEST(SelectPartLlm, EmptyElementListIsUnsuitableWithoutACall) {
  int calls = 0;
  const LlmClient client(std::make_shared<FunctionBackend>([&calls](const LlmRequest&) {
    ++calls;
    return std::string("[]");
  }));
  EXPECT_FALSE(select_part_llm(client, {"A", {}}, "cabinet", "handle", "open it").suitable);
  EXPECT_EQ(calls, 0);
}

TEST(ChooseFinal, SingleAndDeterministic) {
  const std::vector<MaskSelection> one{{"A", "p0", "only"}};
  EXPECT_EQ(choose_final(one, 5).part_id, "p0");
  const std::vector<MaskSelection> three{{"A", "p0", ""}, {"B", "p1", ""}, {"C", "p2", ""}};
  EXPECT_EQ(choose_final(three, 1234).asset_id, choose_final(three, 1234).asset_id);
  EXPECT_EQ(choose_final(three, 1234).asset_id, "C");
  EXPECT_THROW(choose_final({}, 1), InvalidArgument);
}

TEST(ChooseFinal, UniformOverTwo) {
  const std::vector<MaskSelection> two{{"A", "p0", ""}, {"B", "p1", ""}};
  int a = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) a += choose_final(two, mix_seed(99, seed)).asset_id == "A";
  EXPECT_NEAR(a, 5000, 300);
}
