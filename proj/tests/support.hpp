#pragma once

#include <cmath>
#include <string>

#include "sceneforge/catalog.hpp"
#include "sceneforge/geometry.hpp"
#include "sceneforge/pipeline.hpp"
#include "sceneforge/priors.hpp"
#include "sceneforge/rng.hpp"

namespace sftest {

inline const std::string kData = SCENEFORGE_DATA_DIR;

inline const sceneforge::Catalog& catalog() {
  static const sceneforge::Catalog c = sceneforge::load_catalog(kData + "/catalog.json");
  return c;
}

inline const sceneforge::KnowledgeBase& kb() {
  static const sceneforge::KnowledgeBase k = sceneforge::load_kb(kData + "/kb.json");
  return k;
}

/// Box model with its full top face as the only support surface.
inline sceneforge::Model box_model(std::string id, std::string category, sceneforge::Vec3 half) {
  sceneforge::Model m;
  m.id = std::move(id);
  m.category = std::move(category);
  m.halfExtents = half;
  return m;
}

/// Room with a floor and four inward-facing walls, like the shipped one.
inline sceneforge::Model room_model(sceneforge::Vec3 half = {2.5, 2.0, 1.4}) {
  using namespace sceneforge;
  Model m = box_model("room_1", "room", half);
  SurfaceFeature floor;
  floor.normalClass = NormalClass::up;
  floor.facing = Facing::interior;
  floor.rect = {{0, 0, -half.z}, {half.x, 0, 0}, {0, half.y, 0}};
  m.supportSurfaces.push_back(floor);
  auto wall = [&](Vec3 center, Vec3 u) {
    SurfaceFeature w;
    w.normalClass = NormalClass::horizontal;
    w.facing = Facing::interior;
    w.rect = {center, u, {0, 0, half.z}};
    m.supportSurfaces.push_back(w);
  };
  // halfU x halfV points into the room
  wall({0, half.y, 0}, {half.x, 0, 0});
  wall({0, -half.y, 0}, {-half.x, 0, 0});
  wall({half.x, 0, 0}, {0, -half.y, 0});
  wall({-half.x, 0, 0}, {0, half.y, 0});
  return m;
}

/// Pipeline run on the shipped data.
inline sceneforge::GenerateResult generate_text(const std::string& text, sceneforge::Condition cond, std::uint64_t seed) {
  sceneforge::LayoutConfig cfg;
  cfg.flags = sceneforge::flags_for(cond);
  cfg.rngSeed = seed;
  return sceneforge::generate(text, catalog(), kb(), cfg);
}

/// A plant on the floor ringed by 1 to 4 tall occluders at random bearings.
inline sceneforge::GeometricScene camera_fixture(int k) {
  using namespace sceneforge;
  const Catalog& c = catalog();
  GeometricScene s;
  ModelInstance room;
  room.id = room.modelId = "room_1";
  room.category = "room";
  s.instances.push_back(room);
  auto add = [&](const std::string& id, const std::string& model, Vec2 pos, double yaw) {
    ModelInstance i;
    i.id = id;
    i.modelId = model;
    i.category = c.at(model).category;
    i.placement.supportParent = "room_1";
    i.placement.posOnSurface = pos;
    i.placement.yaw = yaw;
    s.instances.push_back(i);
  };
  add("plant_1", "plant_1", {0, 0}, 0);
  Rng rng(100 + static_cast<std::uint64_t>(k));
  const char* occluders[] = {"bookshelf_1", "cabinet_1", "dresser_1", "bookshelf_1"};
  for (int j = 0; j < 1 + k % 4; ++j) {
    const double az = rng.uniform(0, kTwoPi), d = rng.uniform(0.7, 1.1);
    add("occ_" + std::to_string(j), occluders[j], {d * std::cos(az), d * std::sin(az)}, wrap_angle(az + kPi / 2));
  }
  update_all(s, c);
  return s;
}

}  // namespace sftest
