#include <gtest/gtest.h>

#include <filesystem>

#include "sceneforge/corpus.hpp"
#include "sceneforge/synth.hpp"
#include "support.hpp"

using namespace sceneforge;

TEST(Corpus, ExtractionRecoversGroundTruthSupport) {
  const Catalog& c = sftest::catalog();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SceneCorpus corpus = synthesize_corpus(c, {seed, 2, {"kitchen", "office", "living_room", "bedroom"}});
    for (const auto& cs : corpus.scenes) {
      const auto links = extract_support_hierarchy(cs.scene, c);
      for (const auto& inst : cs.scene.instances) {
        const SupportLink& l = links.at(inst.id);
        SCOPED_TRACE(cs.file + " " + inst.id);
        if (!inst.placement.supportParent) {
          EXPECT_TRUE(l.parentId.empty());
          continue;
        }
        EXPECT_EQ(l.parentId, *inst.placement.supportParent);
        EXPECT_EQ(l.surfaceIndex, inst.placement.supportSurface);
        EXPECT_EQ(l.contactSide, inst.placement.attachmentSide);
      }
    }
  }
}

TEST(Corpus, StackedBoxesGiveOneChildParentSample) {
  const Model room = sftest::room_model();
  const Model table = sftest::box_model("table_x", "table", {0.6, 0.4, 0.37});
  const Model cup = sftest::box_model("cup_x", "cup", {0.05, 0.05, 0.06});
  const Catalog c({room, table, cup}, Taxonomy({{"room", "entity"}, {"table", "entity"}, {"cup", "entity"}}, "entity"));
  GeometricScene s;
  auto add = [&](std::string id, std::string model, std::optional<std::string> parent, Vec2 pos, double yaw) {
    ModelInstance i;
    i.id = std::move(id);
    i.modelId = std::move(model);
    i.category = c.at(i.modelId).category;
    i.placement.supportParent = std::move(parent);
    i.placement.posOnSurface = pos;
    i.placement.yaw = yaw;
    s.instances.push_back(i);
  };
  add("room_1", "room_1", std::nullopt, {0, 0}, 0);
  add("table_1", "table_x", "room_1", {0.5, 0.2}, kPi / 2);
  add("cup_1", "cup_x", "table_1", {0.3, -0.2}, kPi / 2 + 0.25);
  update_all(s, c);
  const ObservationSet obs = extract_scene_observations(s, "kitchen", c);
  EXPECT_EQ(obs.sceneCounts.at("kitchen"), 1);
  EXPECT_EQ(obs.occCounts.size(), 3u);
  EXPECT_EQ((obs.supportCounts.at({"cup", "table"})), 1);
  EXPECT_EQ((obs.supportCounts.at({"table", "room"})), 1);
  const auto& samples = obs.relposSamples.at({"cup", "table", "kitchen", RelationKind::ChildParent});
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_NEAR(samples[0].x, 0.3 / 0.6, 1e-12);
  EXPECT_NEAR(samples[0].y, -0.2 / 0.4, 1e-12);
  EXPECT_NEAR(samples[0].theta, 0.25, 1e-12);
  EXPECT_EQ((obs.surfAttCounts.at({"cup", BoxSide::bottom})), 1);
}

TEST(Corpus, NoContactMeansRoot) {
  const Catalog& c = sftest::catalog();
  GeometricScene s = sftest::camera_fixture(0);
  s.find("plant_1")->transform.translation.z += 0.05;  // floating
  EXPECT_TRUE(extract_support_hierarchy(s, c).at("plant_1").parentId.empty());
}

TEST(Corpus, SaveLoadRoundTrip) {
  const Catalog& c = sftest::catalog();
  const SceneCorpus corpus = synthesize_corpus(c, {3, 1, {"office", "bedroom"}});
  const auto dir = std::filesystem::temp_directory_path() / "sceneforge_corpus_test";
  std::filesystem::remove_all(dir);
  save_corpus(corpus, dir.string(), sftest::kData + "/catalog.json");
  const SceneCorpus back = load_corpus(dir.string());
  ASSERT_EQ(back.scenes.size(), 2u);
  EXPECT_EQ(back.scenes[1].sceneType, "bedroom");
  EXPECT_EQ(extract_observations(back, c), extract_observations(corpus, c));
  std::filesystem::remove_all(dir);
}

TEST(Corpus, MissingManifestIsIoError) {
  try {
    load_corpus("/nonexistent/corpus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
}

TEST(Corpus, ShippedCorpusIsSynthSeedOne) {
  const Catalog& c = sftest::catalog();
  const SceneCorpus shipped = load_corpus(sftest::kData + "/corpus");
  EXPECT_EQ(shipped.scenes.size(), 40u);
  const SceneCorpus fresh = synthesize_corpus(c, {});
  EXPECT_EQ(extract_observations(shipped, c), extract_observations(fresh, c));
}
