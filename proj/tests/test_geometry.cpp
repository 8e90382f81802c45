#include <gtest/gtest.h>

#include "sceneforge/geometry.hpp"
#include "sceneforge/rng.hpp"
#include "support.hpp"

using namespace sceneforge;

namespace {

ModelInstance root_instance(const Model& m) {
  ModelInstance i;
  i.id = m.id;
  i.modelId = m.id;
  i.category = m.category;
  i.transform = compose_transform(i.placement, m, std::nullopt);
  return i;
}

}  // namespace

TEST(Geometry, RootStandsOnGround) {
  const Model room = sftest::room_model();
  const Transform t = compose_transform({}, room, std::nullopt);
  EXPECT_DOUBLE_EQ(t.translation.z, 1.4);
  EXPECT_DOUBLE_EQ(t.translation.x, 0.0);
}

TEST(Geometry, ComposeDecomposeRoundTripOnTop) {
  const Model table = sftest::box_model("table", "table", {0.6, 0.4, 0.37});
  const Model cup = sftest::box_model("cup", "cup", {0.05, 0.05, 0.06});
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    ModelInstance parent = root_instance(table);
    parent.transform.translation = {rng.uniform(-2, 2), rng.uniform(-2, 2), 0.37};
    parent.transform.yaw = rng.uniform(0, kTwoPi);
    const SupportFrame f = support_frame(parent, table);
    Placement p;
    p.supportParent = parent.id;
    p.posOnSurface = {rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3)};
    p.yaw = rng.uniform(0, kTwoPi);
    p.scale = rng.uniform(0.85, 1.15);
    const Transform t = compose_transform(p, cup, f);
    EXPECT_NEAR(t.translation.z, 0.74 + 0.06 * p.scale, 1e-12);
    Placement base;
    base.supportParent = parent.id;
    const Placement back = decompose_transform(t, cup, f, base);
    EXPECT_NEAR(back.posOnSurface.x, p.posOnSurface.x, 1e-12);
    EXPECT_NEAR(back.posOnSurface.y, p.posOnSurface.y, 1e-12);
    EXPECT_NEAR(back.yaw, p.yaw, 1e-12);
    EXPECT_DOUBLE_EQ(back.scale, p.scale);
  }
}

TEST(Geometry, WallAttachmentFacesIntoRoom) {
  const Model room = sftest::room_model();
  const Model poster = sftest::box_model("poster", "poster", {0.3, 0.01, 0.4});
  const ModelInstance r = root_instance(room);
  const SupportFrame f = support_frame(r, room);
  for (int wall = 1; wall <= 4; ++wall) {
    const SurfaceFrame sf = surface_frame(f.surfaces[wall], r.transform);
    Placement p;
    p.supportParent = r.id;
    p.supportSurface = wall;
    p.attachmentSide = BoxSide::back;
    p.yaw = required_yaw(BoxSide::back, sf.normal);
    const Transform t = compose_transform(p, poster, f);
    const OrientedBox b{t.translation, poster.halfExtents, t.yaw};
    // the back face lies on the wall plane
    EXPECT_NEAR(dot(face_center(b, BoxSide::back) - sf.origin, sf.normal), 0.0, 1e-12) << wall;
    EXPECT_NEAR(dot(rotate_z(side_normal(BoxSide::back), t.yaw), sf.normal), -1.0, 1e-12) << wall;
  }
  Placement bad;
  bad.supportParent = r.id;
  bad.supportSurface = 1;
  bad.attachmentSide = BoxSide::bottom;
  EXPECT_THROW(compose_transform(bad, poster, f), Error);
  bad.supportSurface = 9;
  EXPECT_THROW(compose_transform(bad, poster, f), Error);
}

TEST(Geometry, TouchingIsNotCollision) {
  const OrientedBox a{{0, 0, 0.5}, {0.5, 0.5, 0.5}, 0.0};
  OrientedBox b = a;
  b.center.x = 1.0;
  EXPECT_FALSE(collides(a, b));
  b.center.x = 1.0 - kCollisionEpsilon;  // overlap of eps is still contact
  EXPECT_FALSE(collides(a, b));
  b.center.x = 1.0 - 3 * kCollisionEpsilon;
  EXPECT_TRUE(collides(a, b));
  b.center = {0, 0, 1.5};  // stacked
  EXPECT_FALSE(collides(a, b));
  b.center = {0.8, 0.8, 0.5};
  b.yaw = kPi / 4;
  EXPECT_TRUE(collides(a, b));
  b.center = {1.3, 1.3, 0.5};
  EXPECT_FALSE(collides(a, b));
}

TEST(Geometry, CollisionIsSymmetric) {
  Rng rng(5);
  for (int k = 0; k < 500; ++k) {
    const OrientedBox a{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, 1)},
                        {rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5)},
                        rng.uniform(0, kTwoPi)};
    const OrientedBox b{{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, 1)},
                        {rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5), rng.uniform(0.05, 0.5)},
                        rng.uniform(0, kTwoPi)};
    EXPECT_EQ(collides(a, b), collides(b, a));
    if (collides(a, b)) EXPECT_DOUBLE_EQ(box_gap(a, b), 0.0);
  }
}

TEST(Geometry, OverhangFraction) {
  const Rect2 surface{{0, 0}, {0.5, 0.5}, 0.0};
  EXPECT_DOUBLE_EQ(overhang_fraction(Rect2{{0, 0}, {0.1, 0.1}, 0.3}, surface), 0.0);
  EXPECT_NEAR(overhang_fraction(Rect2{{0.5, 0}, {0.1, 0.1}, 0.0}, surface), 0.5, 1e-12);
  EXPECT_NEAR(overhang_fraction(Rect2{{0.5, 0.5}, {0.1, 0.1}, 0.0}, surface), 0.75, 1e-12);
  EXPECT_DOUBLE_EQ(overhang_fraction(Rect2{{2, 2}, {0.1, 0.1}, 0.0}, surface), 1.0);
  EXPECT_THROW(overhang_fraction(Polygon2{{0, 0}, {1, 0}, {2, 0}}, 1, 1), Error);
}

TEST(Geometry, BoxGap) {
  const OrientedBox a{{0, 0, 0.5}, {0.5, 0.5, 0.5}, 0.0};
  EXPECT_NEAR(box_gap(a, {{2, 0, 0.5}, {0.5, 0.5, 0.5}, 0.0}), 1.0, 1e-12);
  EXPECT_NEAR(box_gap(a, {{2, 2, 0.5}, {0.5, 0.5, 0.5}, 0.0}), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(box_gap(a, {{0, 0, 2.5}, {0.5, 0.5, 0.5}, 0.0}), 1.0, 1e-12);
}

TEST(Geometry, SceneHierarchyAndUpdates) {
  const Catalog& c = sftest::catalog();
  GeometricScene s = sftest::camera_fixture(3);
  EXPECT_EQ(s.children_of("room_1").size(), 5u);
  EXPECT_TRUE(s.is_ancestor("room_1", "plant_1"));
  EXPECT_FALSE(s.is_ancestor("plant_1", "room_1"));
  const Vec3 before = s.find("plant_1")->transform.translation;
  s.find("room_1")->placement.posOnSurface.x += 1.0;
  update_subtree(s, c, "room_1");
  EXPECT_NEAR(s.find("plant_1")->transform.translation.x, before.x + 1.0, 1e-12);
  EXPECT_TRUE(colliding_pairs(sftest::camera_fixture(0), c).empty());
}

TEST(Geometry, SceneJsonRoundTrip) {
  const GeometricScene s = sftest::camera_fixture(2);
  const OrderedJson j = scene_to_json(s);
  const GeometricScene back = scene_from_json(Json::parse(j.dump()));
  ASSERT_EQ(back.instances.size(), s.instances.size());
  for (std::size_t k = 0; k < s.instances.size(); ++k) {
    EXPECT_EQ(back.instances[k].id, s.instances[k].id);
    EXPECT_EQ(back.instances[k].placement, s.instances[k].placement);
    EXPECT_EQ(back.instances[k].transform, s.instances[k].transform);
  }
  EXPECT_EQ(scene_to_json(back).dump(), j.dump());
}
