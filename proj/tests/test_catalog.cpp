#include <gtest/gtest.h>

#include "sceneforge/catalog.hpp"
#include "support.hpp"

using namespace sceneforge;

namespace {

Json minimal_catalog() {
  return Json::parse(R"({
    "taxonomy": {"furniture": "entity", "table": "furniture", "desk": "furniture", "coffee_table": "table"},
    "models": [
      {"id": "t1", "category": "table", "attributes": {"color": "brown"}, "halfExtents": [0.6, 0.4, 0.37]},
      {"id": "t2", "category": "coffee_table", "attributes": {"color": ["red", "brown"]}, "halfExtents": [0.5, 0.3, 0.2]},
      {"id": "d1", "category": "desk", "tags": ["table"], "halfExtents": [0.7, 0.35, 0.38]}
    ]
  })");
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::io;
}

}  // namespace

TEST(Catalog, ShippedCatalogLoads) {
  const Catalog& c = sftest::catalog();
  EXPECT_GE(c.size(), 60u);
  EXPECT_EQ(c.at("lamp_1").category, "lamp");
  EXPECT_TRUE(c.taxonomy().is_a("coffee_table", "furniture"));
  EXPECT_FALSE(c.taxonomy().is_a("lamp", "furniture"));
  EXPECT_EQ(c.taxonomy().root(), "entity");
}

TEST(Catalog, MissingFieldIsParseError) {
  Json j = minimal_catalog();
  j["models"][0].erase("halfExtents");
  EXPECT_EQ(code_of([&] { catalog_from_json(j); }), ErrorCode::parse);
}

TEST(Catalog, NonPositiveExtentIsParseError) {
  Json j = minimal_catalog();
  j["models"][1]["halfExtents"] = {0.5, 0.0, 0.2};
  EXPECT_EQ(code_of([&] { catalog_from_json(j); }), ErrorCode::parse);
}

TEST(Catalog, UnknownAttributeKindIsParseError) {
  Json j = minimal_catalog();
  j["models"][0]["attributes"] = {{"smell", "nice"}};
  EXPECT_EQ(code_of([&] { catalog_from_json(j); }), ErrorCode::parse);
}

TEST(Catalog, DuplicateIdRejected) {
  Json j = minimal_catalog();
  j["models"][2]["id"] = "t1";
  EXPECT_EQ(code_of([&] { catalog_from_json(j); }), ErrorCode::duplicate_id);
}

TEST(Catalog, TaxonomyCycleRejected) {
  Json j = minimal_catalog();
  j["taxonomy"]["furniture"] = "coffee_table";
  EXPECT_EQ(code_of([&] { catalog_from_json(j); }), ErrorCode::taxonomy_cycle);
  EXPECT_EQ(code_of([] { Taxonomy({{"a", "b"}, {"b", "a"}}, "entity"); }), ErrorCode::taxonomy_cycle);
}

TEST(Catalog, MissingFileIsIoError) {
  EXPECT_EQ(code_of([] { load_catalog("/nonexistent/catalog.json"); }), ErrorCode::io);
}

TEST(Catalog, QueryRanksExactOverHyponymAndCountsAttributes) {
  const Catalog c = catalog_from_json(minimal_catalog());
  auto r = query_models({"table", {}, {}}, c);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].model->id, "t1");
  EXPECT_EQ(r[0].score, 3);
  EXPECT_EQ(r[1].score, 2);

  r = query_models({"table", {{AttributeKind::color, "red"}}, {}}, c);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].score, 3);
  EXPECT_EQ(r[1].score, 3);
  EXPECT_EQ(r[0].model->id, "t1");  // tie broken by id

  r = query_models({"coffee_table", {{AttributeKind::color, "red"}, {AttributeKind::color, "brown"}}, {}}, c);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].score, 5);
}

TEST(Catalog, QueryFallsBackToTagsOnlyWithoutCategoryMatch) {
  const Catalog c = catalog_from_json(minimal_catalog());
  EXPECT_TRUE(query_models({"lamp", {{AttributeKind::color, "brown"}}, {}}, c).empty());
  auto r = query_models({"workbench", {}, {"table"}}, c);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].model->id, "d1");
  // a category match suppresses keyword-only hits
  EXPECT_EQ(query_models({"table", {}, {"table"}}, c).size(), 2u);
}

TEST(Catalog, FallbackSurfaceIsTopFace) {
  const Catalog c = catalog_from_json(minimal_catalog());
  const auto s = fallback_support_surfaces(c.at("t1"));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].normalClass, NormalClass::up);
  EXPECT_EQ(s[0].facing, Facing::exterior);
  EXPECT_DOUBLE_EQ(s[0].rect.center.z, 0.37);
  EXPECT_DOUBLE_EQ(s[0].rect.halfU.x, 0.6);
  EXPECT_DOUBLE_EQ(s[0].rect.halfV.y, 0.4);
}

TEST(Catalog, ShapeClassesAndFallbackSides) {
  EXPECT_EQ(classify_shape({0.02, 0.02, 0.5}), ShapeClass::thin);
  EXPECT_EQ(classify_shape({0.4, 0.02, 0.3}), ShapeClass::flat);
  EXPECT_EQ(classify_shape({0.4, 0.3, 0.3}), ShapeClass::blocky);
  EXPECT_EQ(fallback_attachment_side(sftest::box_model("p", "poster", {0.3, 0.01, 0.4})), BoxSide::back);
  EXPECT_EQ(fallback_attachment_side(sftest::box_model("r", "rug", {1.0, 0.7, 0.01})), BoxSide::bottom);
  EXPECT_EQ(fallback_attachment_side(sftest::box_model("b", "box", {0.3, 0.3, 0.3})), BoxSide::bottom);
  Model m = sftest::box_model("x", "x", {0.3, 0.3, 0.3});
  m.attachmentSide = BoxSide::top;
  EXPECT_EQ(fallback_attachment_side(m), BoxSide::top);
}

TEST(Catalog, ModelJsonCarriesResolvedSurfaces) {
  const auto j = model_to_json(sftest::catalog().at("plate_1"));
  EXPECT_EQ(j["id"], "plate_1");
  EXPECT_GE(j["supportSurfaces"].size(), 1u);
  EXPECT_TRUE(j.contains("attachmentSide"));
}
