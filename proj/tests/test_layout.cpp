#include <gtest/gtest.h>

#include "sceneforge/pipeline.hpp"
#include "support.hpp"

using namespace sceneforge;

namespace {

struct Pair {
  ModelInstance a, b;
  OrientedBox ba, bb;
};

Pair boxes_at(Vec2 a, double b_yaw) {
  Pair p;
  p.a.id = "a";
  p.b.id = "b";
  p.bb = {{0, 0, 0.5}, {0.5, 0.3, 0.5}, b_yaw};
  p.ba = {{a.x, a.y, 0.2}, {0.1, 0.1, 0.2}, 0.0};
  return p;
}

bool holds(Predicate pred, const Pair& p) { return relation_holds(pred, p.a, p.ba, p.b, p.bb); }

}  // namespace

TEST(Layout, DirectionsAreReadInReferenceFrame) {
  Pair p = boxes_at({-1.5, 0}, 0.0);
  EXPECT_TRUE(holds(Predicate::left_of, p));
  EXPECT_FALSE(holds(Predicate::right_of, p));
  p = boxes_at({-1.5, 0}, kPi);
  EXPECT_TRUE(holds(Predicate::right_of, p));
  p = boxes_at({0, 1.5}, 0.0);
  EXPECT_TRUE(holds(Predicate::in_front_of, p));
  p = boxes_at({0, -1.5}, 0.0);
  EXPECT_TRUE(holds(Predicate::behind, p));
  p = boxes_at({-1.0, 0.9}, 0.0);  // inside the 45 degree sector
  EXPECT_TRUE(holds(Predicate::left_of, p));
  p = boxes_at({-1.0, 1.1}, 0.0);
  EXPECT_FALSE(holds(Predicate::left_of, p));
  EXPECT_TRUE(holds(Predicate::in_front_of, p));
}

TEST(Layout, NearUsesReferenceSize) {
  const double reach = norm(Vec3{0.5, 0.3, 0.5});
  Pair p = boxes_at({0.6 + reach - 0.01, 0}, 0.0);
  EXPECT_TRUE(holds(Predicate::near, p));
  EXPECT_TRUE(holds(Predicate::next_to, p));
  p = boxes_at({0.6 + reach + 0.01, 0}, 0.0);
  EXPECT_FALSE(holds(Predicate::near, p));
}

TEST(Layout, AboveUnderAndIn) {
  Pair p = boxes_at({0, 0}, 0.0);
  p.ba.center.z = 1.2;
  EXPECT_TRUE(holds(Predicate::above, p));
  EXPECT_FALSE(holds(Predicate::under, p));
  p.ba.center = {0, 0, 0.5};
  EXPECT_TRUE(holds(Predicate::in, p));
  p.ba.center = {0.45, 0, 0.5};
  EXPECT_FALSE(holds(Predicate::in, p));
  p.a.placement.supportParent = "b";
  EXPECT_TRUE(holds(Predicate::on, p));
  EXPECT_TRUE(holds(Predicate::supported_by, p));
}

TEST(Layout, ConditionNamesAndFlags) {
  for (Condition c : kAllConditions) EXPECT_EQ(condition_from(to_string(c)), c);
  EXPECT_EQ(flags_for(Condition::basic), (ConditionFlags{false, false, false, false}));
  EXPECT_EQ(flags_for(Condition::full), (ConditionFlags{true, true, true, false}));
  EXPECT_EQ(flags_for(Condition::full_infer), (ConditionFlags{true, true, true, true}));
  try {
    condition_from("fancy");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_condition);
  }
}

TEST(Layout, ConfigValidation) {
  LayoutConfig cfg;
  cfg.samplesPerObject = 0;
  EXPECT_THROW(LayoutEngine(sftest::catalog(), sftest::kb(), cfg), Error);
  cfg.samplesPerObject = 30;
  cfg.lambdaObj = 0.5;
  EXPECT_THROW(LayoutEngine(sftest::catalog(), sftest::kb(), cfg), Error);
}

TEST(Layout, ModelSelectionPrefersRequestedAttributes) {
  const Catalog& c = sftest::catalog();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const std::string id = select_model("lamp", {{AttributeKind::color, "red"}}, c, rng);
    EXPECT_TRUE(c.at(id).attributes.count({AttributeKind::color, "red"})) << id;
  }
  Rng rng(1);
  try {
    select_model("zorgblat", {}, c, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_model_found);
  }
}

TEST(Layout, ScoreIsWeightedSum) {
  const auto g = sftest::generate_text("There is a chair next to a table. A lamp is on the table.", Condition::full, 4);
  EXPECT_NEAR(g.score.L, 0.25 * g.score.L_obj + 0.75 * g.score.L_rel, 1e-12);
  double satisfied = 0;
  for (const auto& rc : g.completed.constraints) satisfied += relation_score(rc, g.scene, sftest::catalog());
  EXPECT_DOUBLE_EQ(g.score.L_rel, satisfied);
  const auto b = sftest::generate_text("There is a chair next to a table. A lamp is on the table.", Condition::basic, 4);
  EXPECT_EQ(b.score.L, 0.0);
}

TEST(Layout, GeneratedScenesAreValid) {
  const Catalog& c = sftest::catalog();
  for (const char* text : {"There is a sandwich on a plate.", "There is a desk with a computer, a monitor and a lamp.",
                           "There are two chairs next to a dining table in the kitchen.",
                           "There is a bed, a nightstand and a painting in the bedroom."}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto g = sftest::generate_text(text, Condition::full, seed);
      const SceneMetrics m = measure_scene(g.scene, g.explicitTemplate, c);
      SCOPED_TRACE(std::string(text) + " seed " + std::to_string(seed));
      if (m.degraded) continue;
      EXPECT_EQ(m.collisions, 0);
      EXPECT_LE(m.overhangMax, 0.05);
      EXPECT_EQ(m.supportValidity, 1.0);
      EXPECT_EQ(g.scene.instances.size(), g.completed.objects.size());
    }
  }
}

TEST(Layout, SameSeedSameScene) {
  const char* text = "There is a table with a bowl and a vase in a living room.";
  const auto a = sftest::generate_text(text, Condition::full, 9);
  const auto b = sftest::generate_text(text, Condition::full, 9);
  const auto d = sftest::generate_text(text, Condition::full, 10);
  EXPECT_EQ(scene_to_json(a.scene).dump(), scene_to_json(b.scene).dump());
  EXPECT_NE(scene_to_json(a.scene).dump(), scene_to_json(d.scene).dump());
}

TEST(Layout, InstanceIdsFollowCategories) {
  const auto g = sftest::generate_text("There are two plates on a table.", Condition::full, 1);
  EXPECT_TRUE(g.scene.find("plate_1"));
  EXPECT_TRUE(g.scene.find("plate_2"));
  EXPECT_TRUE(g.scene.find("table_1"));
  EXPECT_TRUE(g.scene.find("room_1"));
  EXPECT_EQ(*g.scene.find("plate_2")->placement.supportParent, "table_1");
}

TEST(Layout, TraceRecordsEveryPlacement) {
  const auto g = sftest::generate_text("There is a sandwich on a plate.", Condition::full, 2);
  EXPECT_EQ(g.trace.size(), g.scene.instances.size() - 1);
  for (const auto& t : g.trace) {
    if (t.degraded) continue;
    ASSERT_FALSE(t.candidateScores.empty());
    EXPECT_EQ(t.chosenScore, *std::max_element(t.candidateScores.begin(), t.candidateScores.end()));
  }
}
