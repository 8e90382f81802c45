#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "sceneforge/priors.hpp"
#include "sceneforge/synth.hpp"
#include "support.hpp"

using namespace sceneforge;

namespace {

Taxonomy tableware_taxonomy() {
  return Taxonomy({{"tableware", "entity"}, {"cup", "tableware"}, {"mug", "cup"}, {"furniture", "entity"},
                   {"table", "furniture"}, {"dining_table", "table"}, {"shelf", "furniture"}, {"room", "entity"}},
                  "entity");
}

/// mug seen n times on a table, cup 6 times on a shelf.
KnowledgeBase backoff_kb(long mug_count) {
  ObservationSet obs;
  obs.sceneCounts["kitchen"] = 1;
  obs.supportCounts[{"mug", "table"}] = mug_count;
  obs.childCounts["mug"] = mug_count;
  obs.surfSupCounts[{"mug", {NormalClass::up, Facing::exterior}}] = mug_count;
  obs.surfAttCounts[{"mug", BoxSide::bottom}] = mug_count;
  obs.supportCounts[{"cup", "shelf"}] = 6;
  obs.childCounts["cup"] = 6;
  obs.surfSupCounts[{"cup", {NormalClass::up, Facing::interior}}] = 6;
  obs.surfAttCounts[{"cup", BoxSide::bottom}] = 6;
  return estimate_kb(obs, tableware_taxonomy());
}

}  // namespace

TEST(Priors, TablesMatchBruteForceOracle) {
  const Catalog& c = sftest::catalog();
  for (std::uint64_t seed = 200; seed < 205; ++seed) {
    const SceneCorpus corpus = synthesize_corpus(c, {seed, 3, {"kitchen", "office", "living_room", "bedroom"}});
    const KnowledgeBase kb = learn_kb(corpus, c);
    const sftest::PriorTables want = sftest::brute_force_priors(corpus, c);
    EXPECT_EQ(sftest::table_diff("occ", kb.occ, want.occ), "");
    EXPECT_EQ(sftest::table_diff("support", kb.support, want.support), "");
    EXPECT_EQ(sftest::table_diff("surfSup", kb.surfSup, want.surfSup), "");
    EXPECT_EQ(sftest::table_diff("surfAtt", kb.surfAtt, want.surfAtt), "");
  }
}

TEST(Priors, BackoffBelowThreshold) {
  const KnowledgeBase kb = backoff_kb(4);
  const Distribution d = kb.lookup_support("mug");
  EXPECT_EQ(d.category, "cup");
  EXPECT_FALSE(d.uniformFallback);
  EXPECT_DOUBLE_EQ(d.probs.at("table"), 0.4);
  EXPECT_DOUBLE_EQ(d.probs.at("shelf"), 0.6);
  EXPECT_DOUBLE_EQ(kb.lookup_surf_sup("mug").probs.at("up-interior"), 0.6);
  EXPECT_DOUBLE_EQ(kb.lookup_surf_att("mug").probs.at("bottom"), 1.0);
}

TEST(Priors, OwnStatisticsAtThreshold) {
  const KnowledgeBase kb = backoff_kb(5);
  const Distribution d = kb.lookup_support("mug");
  EXPECT_EQ(d.category, "mug");
  EXPECT_EQ(d.probs.size(), 1u);
  EXPECT_DOUBLE_EQ(d.probs.at("table"), 1.0);
  EXPECT_EQ(kb.lookup_surf_sup("mug").probs.count("up-interior"), 0u);
}

TEST(Priors, UnseenCategoryFallsBackToUniformOverParents) {
  const KnowledgeBase kb = backoff_kb(5);
  const Distribution d = kb.lookup_support("dining_table");
  EXPECT_TRUE(d.uniformFallback);
  EXPECT_EQ(d.category, "entity");
  EXPECT_DOUBLE_EQ(d.probs.at("table"), 0.5);
  EXPECT_DOUBLE_EQ(d.probs.at("shelf"), 0.5);
  EXPECT_TRUE(kb.lookup_surf_sup("dining_table").empty());
}

TEST(Priors, ShippedSupportRowsAreDistributions) {
  for (const auto& [child, row] : sftest::kb().support) {
    double sum = 0.0;
    for (const auto& [p, v] : row) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12) << child;
  }
  for (const auto& [scene, row] : sftest::kb().occ)
    for (const auto& [cat, p] : row) {
      EXPECT_GT(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
}

TEST(Priors, ScottBandwidth) {
  const RelposDensity d = fit_density({{0, 0, 0}, {1, 2, 0.5}, {2, 4, 1.0}});
  const double f = std::pow(3.0, -1.0 / 7.0);
  EXPECT_NEAR(d.bandwidth.x, f * 1.0, 1e-12);
  EXPECT_NEAR(d.bandwidth.y, f * 2.0, 1e-12);
  EXPECT_NEAR(d.bandwidth.z, f * 0.5, 1e-12);
  const RelposDensity one = fit_density({{0.2, 0.1, 1.0}});
  EXPECT_EQ(one.bandwidth, (Vec3{kMinBandwidth, kMinBandwidth, kMinBandwidth}));
}

TEST(Priors, DensityWrapsTheta) {
  const RelposDensity d = fit_density({{0, 0, 0.0}, {0.1, 0.1, 0.2}, {-0.1, 0.05, kTwoPi - 0.2}});
  EXPECT_NEAR(d(0, 0, 1.0), d(0, 0, 1.0 + kTwoPi), 1e-9 * d(0, 0, 1.0));
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const RelposSample s = d.sample(rng);
    EXPECT_GE(s.theta, 0.0);
    EXPECT_LT(s.theta, kTwoPi);
  }
}

TEST(Priors, DensityIntegratesToOne) {
  const RelposDensity& d = sftest::kb().relpos.at({"keyboard", "desk", "office", RelationKind::ChildParent});
  EXPECT_NEAR(sftest::quadrature(d), 1.0, 1e-2);
}

TEST(Priors, RelposBackoffWidensReferenceAndScene) {
  ObservationSet obs;
  obs.sceneCounts["kitchen"] = 1;
  obs.relposSamples[{"mug", "dining_table", "kitchen", RelationKind::ChildParent}] = {{0.1, 0.2, 0.3}, {0.2, 0.1, 0.4}};
  const KnowledgeBase kb = estimate_kb(obs, tableware_taxonomy());
  auto r = kb.resolve_relpos({"mug", "dining_table", "kitchen", RelationKind::ChildParent});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->key.obj, "mug");
  r = kb.resolve_relpos({"mug", "table", "office", RelationKind::ChildParent});
  ASSERT_TRUE(r);
  EXPECT_EQ(r->key, (RelposKey{"mug", "table", kAnyScene, RelationKind::ChildParent}));
  EXPECT_EQ(r->density->samples.size(), 2u);
  EXPECT_FALSE(kb.resolve_relpos({"mug", "dining_table", "kitchen", RelationKind::Sibling}));
  EXPECT_FALSE(kb.resolve_relpos({"mug", "room", "kitchen", RelationKind::ChildParent}));
}

TEST(Priors, JsonRoundTrip) {
  const KnowledgeBase& kb = sftest::kb();
  const std::string text = kb_to_string(kb);
  const KnowledgeBase back = kb_from_json(Json::parse(text));
  EXPECT_TRUE(back == kb);
  EXPECT_EQ(kb_to_string(back), text);
}

TEST(Priors, ShippedKbIsLearnedFromShippedCorpus) {
  const SceneCorpus corpus = load_corpus(sftest::kData + "/corpus");
  EXPECT_EQ(kb_to_string(learn_kb(corpus, sftest::catalog())), detail::read_file(sftest::kData + "/kb.json"));
}

TEST(Priors, VersionAndCorruptionErrors) {
  Json j = Json::parse(kb_to_string(sftest::kb()));
  j["version"] = kKbVersion + 1;
  try {
    kb_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::version_mismatch);
  }
  j["version"] = kKbVersion;
  j.erase("relpos");
  try {
    kb_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::corrupt_file);
  }
  const std::string path = ::testing::TempDir() + "bad_kb.json";
  detail::write_file(path, "{\"version\": 1, \"occ\": [");
  try {
    load_kb(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::corrupt_file);
  }
}

TEST(Priors, EmptyCorpusHasNoData) {
  const auto dir = std::filesystem::temp_directory_path() / "sceneforge_empty_corpus";
  std::filesystem::create_directories(dir);
  detail::write_file((dir / "manifest.json").string(), "{\"scenes\": []}\n");
  try {
    load_corpus(dir.string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_data);
  }
  std::filesystem::remove_all(dir);
}
