#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/corpus.hpp"
#include "sceneforge/geometry.hpp"
#include "sceneforge/rng.hpp"

// Seeded generator of training scenes with exact contact placements. The
// ground-truth support (parentId, surfaceIndex, attachmentSide) is written
// into each instance so tests can count statistics without geometry.

namespace sceneforge {

struct SynthOptions {
  std::uint64_t seed = 1;
  int scenesPerType = 10;
  std::vector<std::string> sceneTypes = {"kitchen", "office", "living_room", "bedroom"};
};

namespace detail {

class SceneBuilder {
 public:
  SceneBuilder(const Catalog& c, Rng& rng, std::string scene_type) : c_(c), rng_(rng) {
    s_.sceneType = std::move(scene_type);
  }

  GeometricScene& scene() { return s_; }

  std::string model_for(const std::string& category) {
    std::vector<const Model*> pool;
    for (const auto& m : c_.models()) {
      if (m.category == category) pool.push_back(&m);
    }
    if (pool.empty()) throw Error(ErrorCode::no_model_found, "synthetic corpus: no model of category '" + category + "'");
    return pool[rng_.index(pool.size())]->id;
  }

  /// Adds an instance if it neither collides with unrelated instances nor
  /// leaves its surface; returns its id.
  std::optional<std::string> add(const std::string& category, const std::optional<std::string>& parent, int surface,
                                 BoxSide side, Vec2 pos, double yaw, const std::string& model_id = {}) {
    ModelInstance inst;
    inst.modelId = model_id.empty() ? model_for(category) : model_id;
    inst.category = category;
    inst.id = category + "_" + std::to_string(ordinals_[category] + 1);
    inst.placement.supportParent = parent;
    inst.placement.supportSurface = parent ? surface : 0;
    inst.placement.attachmentSide = parent ? side : BoxSide::bottom;
    inst.placement.posOnSurface = pos;
    inst.placement.yaw = wrap_angle(yaw);
    const Model& m = c_.at(inst.modelId);
    inst.transform = compose_transform(inst.placement, m, parent_frame(s_, inst, c_));
    if (parent && instance_overhang(s_, c_, inst) > 0.0) return std::nullopt;
    const OrientedBox box = world_box(inst, m);
    for (const auto& other : s_.instances) {
      if (parent && (other.id == *parent || s_.is_ancestor(other.id, *parent))) continue;
      if (collides(box, world_box(other, c_.at(other.modelId)), 0.0)) return std::nullopt;
    }
    ordinals_[category] += 1;
    s_.instances.push_back(inst);
    return inst.id;
  }

  /// Random position on an up-facing surface, yaw aligned with the parent
  /// up to a quarter turn.
  std::optional<std::string> add_on(const std::string& category, const std::string& parent, int surface = 0,
                                    int tries = 30) {
    const ModelInstance& p = *s_.find(parent);
    const SurfaceFrame f = surface_frame(fallback_support_surfaces(c_.at(p.modelId))[surface], p.transform);
    const std::string model = model_for(category);
    const Vec3 h = c_.at(model).halfExtents;
    for (int t = 0; t < tries; ++t) {
      const int quarter = static_cast<int>(rng_.index(4));
      const double yaw = p.transform.yaw + quarter * kPi / 2;
      const double r = std::max(h.x, h.y);
      if (f.halfU <= r || f.halfV <= r) return std::nullopt;
      const Vec2 pos{rng_.uniform(-f.halfU + r, f.halfU - r), rng_.uniform(-f.halfV + r, f.halfV - r)};
      if (auto id = add(category, parent, surface, BoxSide::bottom, pos, yaw, model)) return id;
    }
    return std::nullopt;
  }

  /// Object standing on the room floor with its back against wall w (1..4).
  std::optional<std::string> add_against_wall(const std::string& category, const std::string& room, int wall,
                                              double along, int tries = 20) {
    const ModelInstance& r = *s_.find(room);
    const auto surfaces = fallback_support_surfaces(c_.at(r.modelId));
    const SurfaceFrame wf = surface_frame(surfaces[wall], r.transform);
    const SurfaceFrame floor = surface_frame(surfaces[0], r.transform);
    const double yaw = required_yaw(BoxSide::back, wf.normal);
    const std::string model = model_for(category);
    const Vec3 h = c_.at(model).halfExtents;
    for (int t = 0; t < tries; ++t) {
      const double a = std::clamp(along + (t ? rng_.uniform(-1.0, 1.0) : 0.0), -wf.halfU + h.x, wf.halfU - h.x);
      const Vec3 p = wf.origin + wf.u * a + wf.normal * (h.y + 0.01);
      const Vec2 pos{dot(p - floor.origin, floor.u), dot(p - floor.origin, floor.v)};
      if (auto id = add(category, room, 0, BoxSide::bottom, pos, yaw, model)) return id;
    }
    return std::nullopt;
  }

  /// Flat object hung on wall w by its back side.
  std::optional<std::string> add_on_wall(const std::string& category, const std::string& room, int wall) {
    const ModelInstance& r = *s_.find(room);
    const SurfaceFrame wf = surface_frame(fallback_support_surfaces(c_.at(r.modelId))[wall], r.transform);
    const double yaw = required_yaw(BoxSide::back, wf.normal);
    const std::string model = model_for(category);
    const Vec3 h = c_.at(model).halfExtents;
    for (int t = 0; t < 20; ++t) {
      const Vec2 pos{rng_.uniform(-wf.halfU + h.x, wf.halfU - h.x), rng_.uniform(0.1, 0.6)};
      if (auto id = add(category, room, wall, BoxSide::back, pos, yaw, model)) return id;
    }
    return std::nullopt;
  }

  /// Floor object placed relative to a reference instance, in its frame.
  std::optional<std::string> add_beside(const std::string& category, const std::string& room, const std::string& ref,
                                        Vec2 local, double rel_yaw) {
    const ModelInstance& r = *s_.find(room);
    const ModelInstance& anchor = *s_.find(ref);
    const SurfaceFrame floor = surface_frame(fallback_support_surfaces(c_.at(r.modelId))[0], r.transform);
    const Vec2 w = anchor.transform.translation.xy() + rotate(local, anchor.transform.yaw);
    const Vec3 p{w.x, w.y, floor.origin.z};
    const Vec2 pos{dot(p - floor.origin, floor.u), dot(p - floor.origin, floor.v)};
    return add(category, room, 0, BoxSide::bottom, pos, anchor.transform.yaw + rel_yaw);
  }

  /// Random free spot on the floor.
  std::optional<std::string> add_on_floor(const std::string& category, const std::string& room, int tries = 40) {
    return add_on(category, room, 0, tries);
  }

  double half_x(const std::string& id) const { return scaled_half(id).x; }
  double half_y(const std::string& id) const { return scaled_half(id).y; }
  bool chance(double p) { return rng_.uniform() < p; }
  Rng& rng() { return rng_; }

 private:
  Vec3 scaled_half(const std::string& id) const {
    const ModelInstance& i = *s_.find(id);
    return c_.at(i.modelId).halfExtents * i.transform.scale;
  }

  const Catalog& c_;
  Rng& rng_;
  GeometricScene s_;
  std::map<std::string, int> ordinals_;
};

inline void dress_table(SceneBuilder& b, const std::string& table) {
  const int plates = 1 + static_cast<int>(b.rng().index(3));
  for (int k = 0; k < plates; ++k) {
    auto plate = b.add_on("plate", table);
    if (!plate) continue;
    const double food = b.rng().uniform();
    if (food < 0.5) b.add_on("sandwich", *plate);
    else if (food < 0.7) b.add_on("cake", *plate);
    else if (food < 0.85) b.add_on("fruit", *plate);
  }
  if (b.chance(0.6)) b.add_on("bowl", table);
  if (b.chance(0.5)) b.add_on(b.chance(0.5) ? "cup" : "mug", table);
  if (b.chance(0.4)) b.add_on("vase", table);
}

inline void build_kitchen(SceneBuilder& b, const std::string& room) {
  const std::string cat = b.chance(0.6) ? "dining_table" : "table";
  auto table = b.add_on_floor(cat, room);
  if (table) {
    const double hx = b.half_x(*table), hy = b.half_y(*table);
    // chairs on the long sides, facing the table
    const std::vector<std::pair<Vec2, double>> seats = {
        {{-hx * 0.5, -(hy + 0.35)}, 0.0}, {{hx * 0.5, -(hy + 0.35)}, 0.0},
        {{-hx * 0.5, hy + 0.35}, kPi},    {{hx * 0.5, hy + 0.35}, kPi}};
    for (const auto& [local, yaw] : seats) {
      if (b.chance(0.75)) b.add_beside("chair", room, *table, local, yaw);
    }
    dress_table(b, *table);
  }
  for (int k = 0; k < 2; ++k) {
    if (b.chance(0.7)) b.add_against_wall("cabinet", room, 1 + static_cast<int>(b.rng().index(4)), b.rng().uniform(-1.5, 1.5));
  }
  if (b.chance(0.3)) b.add_on_wall(b.chance(0.5) ? "poster" : "painting", room, 1 + static_cast<int>(b.rng().index(4)));
  if (b.chance(0.3)) b.add_on_floor("plant", room);
}

inline void build_office(SceneBuilder& b, const std::string& room) {
  const int desks = b.chance(0.3) ? 2 : 1;
  for (int d = 0; d < desks; ++d) {
    auto desk = b.add_against_wall("desk", room, 1 + 2 * d, b.rng().uniform(-1.2, 1.2));
    if (!desk) continue;
    const double hy = b.half_y(*desk);
    b.add_beside(b.chance(0.6) ? "office_chair" : "chair", room, *desk, {0.0, hy + 0.4}, kPi);
    if (b.chance(0.9)) b.add_on(b.chance(0.85) ? "computer" : "laptop", *desk);
    if (b.chance(0.8)) b.add_on("monitor", *desk);
    if (b.chance(0.7)) b.add_on("keyboard", *desk);
    if (b.chance(0.6)) b.add_on(b.chance(0.6) ? "desk_lamp" : "lamp", *desk);
    if (b.chance(0.4)) b.add_on("mug", *desk);
    if (b.chance(0.4)) b.add_on("book", *desk);
  }
  if (b.chance(0.4)) b.add_on_floor("floor_lamp", room);
  if (b.chance(0.7)) b.add_against_wall("bookshelf", room, 2 + static_cast<int>(b.rng().index(3)), b.rng().uniform(-1.5, 1.5));
  if (b.chance(0.5)) b.add_on_floor("plant", room);
  if (b.chance(0.5)) b.add_on_wall(b.chance(0.5) ? "poster" : "painting", room, 2 + static_cast<int>(b.rng().index(3)));
}

inline void build_living_room(SceneBuilder& b, const std::string& room) {
  auto sofa = b.add_against_wall("sofa", room, 1, b.rng().uniform(-1.0, 1.0));
  if (sofa) {
    const double hy = b.half_y(*sofa);
    auto table = b.add_beside("coffee_table", room, *sofa, {0.0, hy + 0.65}, 0.0);
    if (table) {
      if (b.chance(0.6)) b.add_on("vase", *table);
      if (b.chance(0.5)) b.add_on("book", *table);
      if (b.chance(0.4)) b.add_on("bowl", *table);
    }
    if (b.chance(0.5)) b.add_beside("floor_lamp", room, *sofa, {b.half_x(*sofa) + 0.3, 0.0}, 0.0);
  }
  auto stand = b.add_against_wall("tv_stand", room, 2, b.rng().uniform(-1.0, 1.0));
  if (stand && b.chance(0.9)) b.add_on("television", *stand);
  if (b.chance(0.5)) b.add_on_floor("armchair", room);
  if (b.chance(0.5)) b.add_on_floor("rug", room);
  if (b.chance(0.5)) b.add_on_floor("plant", room);
  if (b.chance(0.6)) b.add_on_wall("painting", room, 3 + static_cast<int>(b.rng().index(2)));
}

inline void build_bedroom(SceneBuilder& b, const std::string& room) {
  auto bed = b.add_against_wall("bed", room, 1, b.rng().uniform(-0.8, 0.8));
  if (bed) {
    const double hx = b.half_x(*bed), hy = b.half_y(*bed);
    for (double side : {-1.0, 1.0}) {
      if (!b.chance(0.85)) continue;
      const double gap = b.rng().uniform(0.03, 0.12);
      auto ns = b.add_beside("nightstand", room, *bed, {side * (hx + 0.25 + gap), -hy + 0.25}, 0.0);
      if (ns && b.chance(0.7)) b.add_on("lamp", *ns);
      if (ns && b.chance(0.3)) b.add_on("book", *ns);
    }
  }
  if (b.chance(0.8)) {
    auto dresser = b.add_against_wall("dresser", room, 2 + static_cast<int>(b.rng().index(3)), b.rng().uniform(-1.0, 1.0));
    if (dresser && b.chance(0.5)) b.add_on("vase", *dresser);
    if (dresser && b.chance(0.4)) b.add_on("book", *dresser);
    if (dresser && b.chance(0.3)) b.add_on("lamp", *dresser);
  }
  if (b.chance(0.3)) b.add_on_floor("floor_lamp", room);
  if (b.chance(0.4)) b.add_on_floor("rug", room);
  if (b.chance(0.4)) b.add_on_floor("plant", room);
  if (b.chance(0.5)) b.add_on_wall(b.chance(0.5) ? "painting" : "poster", room, 2 + static_cast<int>(b.rng().index(3)));
}

}  // namespace detail

inline GeometricScene synthesize_scene(const Catalog& c, const std::string& scene_type, Rng& rng) {
  detail::SceneBuilder b(c, rng, scene_type);
  const std::string room = *b.add("room", std::nullopt, 0, BoxSide::bottom, {0, 0}, 0.0);
  if (scene_type == "kitchen") detail::build_kitchen(b, room);
  else if (scene_type == "office") detail::build_office(b, room);
  else if (scene_type == "living_room") detail::build_living_room(b, room);
  else if (scene_type == "bedroom") detail::build_bedroom(b, room);
  else throw Error(ErrorCode::invalid_argument, "no synthetic recipe for scene type '" + scene_type + "'");
  return b.scene();
}

inline SceneCorpus synthesize_corpus(const Catalog& c, const SynthOptions& opt) {
  SceneCorpus corpus;
  Rng rng(opt.seed);
  for (const auto& type : opt.sceneTypes) {
    for (int k = 0; k < opt.scenesPerType; ++k) {
      char name[64];
      std::snprintf(name, sizeof name, "%s_%03d.json", type.c_str(), k);
      corpus.scenes.push_back({synthesize_scene(c, type, rng), type, name});
    }
  }
  return corpus;
}

}  // namespace sceneforge
