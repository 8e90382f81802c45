#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/json_util.hpp"
#include "sceneforge/math.hpp"

namespace sceneforge {

/// Contact tolerance per face for collision tests (meters).
inline constexpr double kCollisionEpsilon = 0.005;

/// Semantic placement of an instance: which surface of which parent it rests
/// on, where on that surface, its world yaw about +Z and its uniform scale.
/// Root instances (no parent) stand on the world ground plane z = 0.
struct Placement {
  std::optional<std::string> supportParent;
  int supportSurface = 0;
  BoxSide attachmentSide = BoxSide::bottom;
  Vec2 posOnSurface;
  double yaw = 0.0;
  double scale = 1.0;
  bool operator==(const Placement&) const = default;
};

/// Rigid transform restricted to yaw, plus uniform scale. The translation is
/// the world position of the model's box center.
struct Transform {
  Vec3 translation;
  double yaw = 0.0;
  double scale = 1.0;
  bool operator==(const Transform&) const = default;

  Vec3 apply(Vec3 local) const { return translation + rotate_z(local * scale, yaw); }
};

struct ModelInstance {
  std::string id;
  std::string modelId;
  std::string category;
  int objectIndex = -1;
  Placement placement;
  Transform transform;
  bool degraded = false;
};

struct OrientedBox {
  Vec3 center;
  Vec3 half;
  double yaw = 0.0;

  double zmin() const { return center.z - half.z; }
  double zmax() const { return center.z + half.z; }
  Vec2 axis_x() const { return {std::cos(yaw), std::sin(yaw)}; }
  Vec2 axis_y() const { return {-std::sin(yaw), std::cos(yaw)}; }

  /// Counter-clockwise footprint in the world xy-plane.
  Polygon2 footprint() const {
    const Vec2 c = center.xy();
    const Vec2 ax = axis_x() * half.x;
    const Vec2 ay = axis_y() * half.y;
    return {c - ax - ay, c + ax - ay, c + ax + ay, c - ax + ay};
  }

  std::array<Vec3, 8> corners() const {
    std::array<Vec3, 8> out;
    int k = 0;
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int sz : {-1, 1})
          out[k++] = center + rotate_z({sx * half.x, sy * half.y, sz * half.z}, yaw);
    return out;
  }

  Vec3 to_local(Vec3 world) const { return rotate_z(world - center, -yaw); }

  bool contains(Vec3 world, double eps = 0.0) const {
    const Vec3 l = to_local(world);
    return std::abs(l.x) <= half.x + eps && std::abs(l.y) <= half.y + eps && std::abs(l.z) <= half.z + eps;
  }
};

/// World-space frame of a support surface on a placed parent.
struct SurfaceFrame {
  Vec3 origin;
  Vec3 u;
  Vec3 v;
  Vec3 normal;
  double halfU = 0.0;
  double halfV = 0.0;
  SurfaceClass cls;
};

inline SurfaceFrame surface_frame(const SurfaceFeature& s, const Transform& parent) {
  SurfaceFrame f;
  f.origin = parent.apply(s.rect.center);
  f.u = rotate_z(normalized(s.rect.halfU), parent.yaw);
  f.v = rotate_z(normalized(s.rect.halfV), parent.yaw);
  f.normal = rotate_z(s.normal(), parent.yaw);
  f.halfU = norm(s.rect.halfU) * parent.scale;
  f.halfV = norm(s.rect.halfV) * parent.scale;
  f.cls = s.surface_class();
  return f;
}

/// The implicit ground plane under root instances.
inline SurfaceFrame ground_frame() {
  SurfaceFrame f;
  f.u = {1, 0, 0};
  f.v = {0, 1, 0};
  f.normal = {0, 0, 1};
  f.halfU = f.halfV = 1e6;
  f.cls = {NormalClass::up, Facing::interior};
  return f;
}

/// Whether a child side can rest against a surface with yaw-only rotation.
inline bool side_compatible(NormalClass n, BoxSide side) {
  switch (n) {
    case NormalClass::up: return side == BoxSide::bottom;
    case NormalClass::down: return side == BoxSide::top;
    case NormalClass::horizontal: return is_lateral(side);
  }
  return false;
}

/// World yaw that turns a lateral side to face into a vertical surface.
inline double required_yaw(BoxSide side, Vec3 surface_normal) {
  const Vec3 s = side_normal(side);
  return wrap_angle(std::atan2(-surface_normal.y, -surface_normal.x) - std::atan2(s.y, s.x));
}

/// Parent information needed to compose a child transform.
struct SupportFrame {
  Transform transform;
  std::vector<SurfaceFeature> surfaces;
};

inline SupportFrame support_frame(const ModelInstance& parent, const Model& parent_model) {
  return {parent.transform, fallback_support_surfaces(parent_model)};
}

namespace detail {

inline SurfaceFrame frame_for(const Placement& p, const std::optional<SupportFrame>& parent) {
  if (!parent) return ground_frame();
  if (p.supportSurface < 0 || p.supportSurface >= static_cast<int>(parent->surfaces.size())) {
    throw Error(ErrorCode::invalid_argument, "invalid support surface index " + std::to_string(p.supportSurface));
  }
  return surface_frame(parent->surfaces[p.supportSurface], parent->transform);
}

}  // namespace detail

/// Places the child so that the center of its attachment face sits on the
/// parent-surface point at posOnSurface, turned by yaw and scaled by scale.
inline Transform compose_transform(const Placement& p, const Model& child, const std::optional<SupportFrame>& parent) {
  if (!(p.scale > 0)) throw Error(ErrorCode::invalid_argument, "placement scale must be positive");
  const SurfaceFrame f = detail::frame_for(p, parent);
  const BoxSide side = parent ? p.attachmentSide : BoxSide::bottom;
  if (!side_compatible(f.cls.normal, side)) {
    throw Error(ErrorCode::invalid_argument, std::string("attachment side ") + to_string(side) + " cannot rest on a " +
                                                 to_string(f.cls.normal) + " surface");
  }
  const Vec3 point = f.origin + f.u * p.posOnSurface.x + f.v * p.posOnSurface.y;
  Transform t;
  t.translation = point + f.normal * (side_depth(child.halfExtents, side) * p.scale);
  t.yaw = wrap_angle(p.yaw);
  t.scale = p.scale;
  return t;
}

/// Inverse of compose_transform for the surface position, yaw and scale.
inline Placement decompose_transform(const Transform& t, const Model& child, const std::optional<SupportFrame>& parent,
                                     Placement base) {
  const SurfaceFrame f = detail::frame_for(base, parent);
  const BoxSide side = parent ? base.attachmentSide : BoxSide::bottom;
  const Vec3 point = t.translation - f.normal * (side_depth(child.halfExtents, side) * t.scale);
  base.posOnSurface = {dot(point - f.origin, f.u), dot(point - f.origin, f.v)};
  base.yaw = t.yaw;
  base.scale = t.scale;
  return base;
}

inline OrientedBox world_box(const ModelInstance& i, const Model& m) {
  return {i.transform.translation, m.halfExtents * i.transform.scale, i.transform.yaw};
}

namespace detail {

/// Projection interval of a convex polygon onto an axis.
inline std::pair<double, double> project(const Polygon2& poly, Vec2 axis) {
  double lo = dot(poly[0], axis), hi = lo;
  for (const auto& p : poly) {
    const double d = dot(p, axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return {lo, hi};
}

inline OrientedBox shrink(const OrientedBox& b, double eps) {
  OrientedBox s = b;
  s.half = {std::max(0.0, b.half.x - eps), std::max(0.0, b.half.y - eps), std::max(0.0, b.half.z - eps)};
  return s;
}

}  // namespace detail

/// Separating-axis overlap of two yaw-only boxes after shrinking each by eps
/// per face; touching contact is not a collision.
inline bool collides(const OrientedBox& a, const OrientedBox& b, double eps = kCollisionEpsilon) {
  const OrientedBox sa = detail::shrink(a, eps), sb = detail::shrink(b, eps);
  if (!(sa.zmax() > sb.zmin() && sb.zmax() > sa.zmin())) return false;
  const Polygon2 pa = sa.footprint(), pb = sb.footprint();
  for (Vec2 axis : {sa.axis_x(), sa.axis_y(), sb.axis_x(), sb.axis_y()}) {
    auto [alo, ahi] = detail::project(pa, axis);
    auto [blo, bhi] = detail::project(pb, axis);
    if (!(ahi > blo && bhi > alo)) return false;
  }
  return true;
}

/// Rectangle in a plane: center, half sizes along its own axes, rotation.
struct Rect2 {
  Vec2 center;
  Vec2 half;
  double angle = 0.0;

  Polygon2 corners() const {
    const Vec2 ax = rotate({half.x, 0}, angle), ay = rotate({0, half.y}, angle);
    return {center - ax - ay, center + ax - ay, center + ax + ay, center - ax + ay};
  }
};

/// Fraction of a polygon's area lying outside the centered axis-aligned
/// rectangle [-hu, hu] x [-hv, hv].
inline double overhang_fraction(const Polygon2& footprint, double hu, double hv) {
  const double area = polygon_area(footprint);
  if (!(area > 0)) throw Error(ErrorCode::invalid_argument, "zero-area footprint");
  const double inside = polygon_area(clip_to_box(footprint, hu, hv));
  return std::clamp(1.0 - inside / area, 0.0, 1.0);
}

inline double overhang_fraction(const Rect2& child, const Rect2& surface) {
  Polygon2 local;
  for (Vec2 p : child.corners()) local.push_back(rotate(p - surface.center, -surface.angle));
  return overhang_fraction(local, surface.half.x, surface.half.y);
}

/// Corners of a box face, as world points.
inline std::array<Vec3, 4> face_corners(const OrientedBox& b, BoxSide side) {
  const Vec3 n = side_normal(side);
  Vec3 a1, a2;
  if (side == BoxSide::top || side == BoxSide::bottom) { a1 = {b.half.x, 0, 0}; a2 = {0, b.half.y, 0}; }
  else if (side == BoxSide::front || side == BoxSide::back) { a1 = {b.half.x, 0, 0}; a2 = {0, 0, b.half.z}; }
  else { a1 = {0, b.half.y, 0}; a2 = {0, 0, b.half.z}; }
  const Vec3 c = {n.x * b.half.x, n.y * b.half.y, n.z * b.half.z};
  std::array<Vec3, 4> out;
  const std::array<std::pair<int, int>, 4> signs = {{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
  for (int k = 0; k < 4; ++k) {
    out[k] = b.center + rotate_z(c + a1 * signs[k].first + a2 * signs[k].second, b.yaw);
  }
  return out;
}

/// World center of a box face.
inline Vec3 face_center(const OrientedBox& b, BoxSide side) {
  const Vec3 n = side_normal(side);
  return b.center + rotate_z({n.x * b.half.x, n.y * b.half.y, n.z * b.half.z}, b.yaw);
}

/// Box face projected into the 2D coordinates of a surface frame.
inline Polygon2 footprint_on(const OrientedBox& b, BoxSide side, const SurfaceFrame& f) {
  Polygon2 out;
  for (const Vec3& p : face_corners(b, side)) out.push_back({dot(p - f.origin, f.u), dot(p - f.origin, f.v)});
  return out;
}

/// Overlap area of two boxes' xy footprints.
inline double footprint_overlap_area(const OrientedBox& a, const OrientedBox& b) {
  Polygon2 local;
  for (Vec2 p : a.footprint()) local.push_back(rotate(p - b.center.xy(), -b.yaw));
  return polygon_area(clip_to_box(local, b.half.x, b.half.y));
}

namespace detail {

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

inline bool polygons_overlap(const Polygon2& a, const Polygon2& b, const OrientedBox& ba, const OrientedBox& bb) {
  for (Vec2 axis : {ba.axis_x(), ba.axis_y(), bb.axis_x(), bb.axis_y()}) {
    auto [alo, ahi] = project(a, axis);
    auto [blo, bhi] = project(b, axis);
    if (ahi < blo || bhi < alo) return false;
  }
  return true;
}

}  // namespace detail

/// Euclidean gap between two boxes (0 when they touch or overlap).
inline double box_gap(const OrientedBox& a, const OrientedBox& b) {
  const Polygon2 pa = a.footprint(), pb = b.footprint();
  double dxy = 0.0;
  if (!detail::polygons_overlap(pa, pb, a, b)) {
    dxy = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        dxy = std::min(dxy, detail::point_segment_distance(pa[i], pb[j], pb[(j + 1) % 4]));
        dxy = std::min(dxy, detail::point_segment_distance(pb[i], pa[j], pa[(j + 1) % 4]));
      }
    }
  }
  const double dz = std::max({0.0, a.zmin() - b.zmax(), b.zmin() - a.zmax()});
  return std::sqrt(dxy * dxy + dz * dz);
}

// ---------------------------------------------------------------------------
// Geometric scene
// ---------------------------------------------------------------------------

struct GeometricScene {
  std::string sceneType = "room";
  std::vector<ModelInstance> instances;
  bool degraded = false;

  int index_of(const std::string& id) const {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      if (instances[i].id == id) return static_cast<int>(i);
    }
    return -1;
  }

  const ModelInstance* find(const std::string& id) const {
    const int i = index_of(id);
    return i < 0 ? nullptr : &instances[i];
  }

  ModelInstance* find(const std::string& id) {
    const int i = index_of(id);
    return i < 0 ? nullptr : &instances[i];
  }

  const ModelInstance* find_object(int objectIndex) const {
    for (const auto& i : instances) {
      if (i.objectIndex == objectIndex) return &i;
    }
    return nullptr;
  }

  /// child id -> parent id for every instance that has a support parent.
  std::map<std::string, std::string> support_edges() const {
    std::map<std::string, std::string> out;
    for (const auto& i : instances) {
      if (i.placement.supportParent) out[i.id] = *i.placement.supportParent;
    }
    return out;
  }

  std::vector<std::string> children_of(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& i : instances) {
      if (i.placement.supportParent && *i.placement.supportParent == id) out.push_back(i.id);
    }
    return out;
  }

  /// id followed by all its transitive support children, parents first.
  std::vector<std::string> subtree(const std::string& id) const {
    std::vector<std::string> out{id};
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (auto& c : children_of(out[k])) out.push_back(c);
    }
    return out;
  }

  /// Strict support ancestors of id, nearest first.
  std::vector<std::string> ancestors(const std::string& id) const {
    std::vector<std::string> out;
    const ModelInstance* cur = find(id);
    std::set<std::string> seen;
    while (cur && cur->placement.supportParent && seen.insert(cur->id).second) {
      out.push_back(*cur->placement.supportParent);
      cur = find(*cur->placement.supportParent);
    }
    return out;
  }

  bool is_ancestor(const std::string& ancestor, const std::string& id) const {
    for (const auto& a : ancestors(id)) {
      if (a == ancestor) return true;
    }
    return false;
  }
};

inline std::optional<SupportFrame> parent_frame(const GeometricScene& s, const ModelInstance& inst, const Catalog& c) {
  if (!inst.placement.supportParent) return std::nullopt;
  const ModelInstance* p = s.find(*inst.placement.supportParent);
  if (!p) throw Error(ErrorCode::invalid_argument, "instance '" + inst.id + "' has unknown parent '" + *inst.placement.supportParent + "'");
  return support_frame(*p, c.at(p->modelId));
}

/// Recomputes the transform of id and all its support descendants from
/// their placements.
inline void update_subtree(GeometricScene& s, const Catalog& c, const std::string& id) {
  for (const auto& sid : s.subtree(id)) {
    ModelInstance& inst = *s.find(sid);
    inst.transform = compose_transform(inst.placement, c.at(inst.modelId), parent_frame(s, inst, c));
  }
}

inline void update_all(GeometricScene& s, const Catalog& c) {
  for (auto& inst : s.instances) {
    if (!inst.placement.supportParent) update_subtree(s, c, inst.id);
  }
}

inline OrientedBox world_box(const GeometricScene& s, const Catalog& c, const std::string& id) {
  const ModelInstance* i = s.find(id);
  if (!i) throw Error(ErrorCode::not_found, "unknown instance '" + id + "'");
  return world_box(*i, c.at(i->modelId));
}

/// World axis-aligned bounds of all instances: {min, max}.
inline std::pair<Vec3, Vec3> scene_bounds(const GeometricScene& s, const Catalog& c) {
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (const auto& i : s.instances) {
    for (const Vec3& p : world_box(i, c.at(i.modelId)).corners()) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
  }
  return {lo, hi};
}

/// Colliding instance pairs, ignoring pairs related by support ancestry.
inline std::vector<std::pair<std::string, std::string>> colliding_pairs(const GeometricScene& s, const Catalog& c) {
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<OrientedBox> boxes;
  for (const auto& i : s.instances) boxes.push_back(world_box(i, c.at(i.modelId)));
  for (std::size_t a = 0; a < s.instances.size(); ++a) {
    for (std::size_t b = a + 1; b < s.instances.size(); ++b) {
      const auto& ia = s.instances[a].id;
      const auto& ib = s.instances[b].id;
      if (s.is_ancestor(ia, ib) || s.is_ancestor(ib, ia)) continue;
      if (collides(boxes[a], boxes[b])) out.emplace_back(ia, ib);
    }
  }
  return out;
}

/// Overhang of an instance's attachment face over its support surface.
inline double instance_overhang(const GeometricScene& s, const Catalog& c, const ModelInstance& inst) {
  auto parent = parent_frame(s, inst, c);
  if (!parent) return 0.0;
  const SurfaceFrame f = detail::frame_for(inst.placement, parent);
  const OrientedBox b = world_box(inst, c.at(inst.modelId));
  return overhang_fraction(footprint_on(b, inst.placement.attachmentSide, f), f.halfU, f.halfV);
}

// ---------------------------------------------------------------------------
// Wire format
// ---------------------------------------------------------------------------

inline OrderedJson instance_to_json(const ModelInstance& i) {
  OrderedJson j;
  j["id"] = i.id;
  j["modelId"] = i.modelId;
  j["category"] = i.category;
  if (i.objectIndex >= 0) j["object"] = i.objectIndex;
  if (i.placement.supportParent) {
    j["parentId"] = *i.placement.supportParent;
    j["surfaceIndex"] = i.placement.supportSurface;
  }
  j["attachmentSide"] = to_string(i.placement.attachmentSide);
  j["posOnSurface"] = detail::to_json(i.placement.posOnSurface);
  j["yaw"] = i.placement.yaw;
  j["scale"] = i.placement.scale;
  j["translation"] = detail::to_json(i.transform.translation);
  if (i.degraded) j["degraded"] = true;
  return j;
}

inline OrderedJson scene_to_json(const GeometricScene& s) {
  OrderedJson j;
  j["sceneType"] = s.sceneType;
  j["degraded"] = s.degraded;
  j["instances"] = OrderedJson::array();
  for (const auto& i : s.instances) j["instances"].push_back(instance_to_json(i));
  return j;
}

/// Reads a scene; transforms come from translation/yaw/scale as stored.
template <class J>
GeometricScene scene_from_json(const J& j, const std::string& where = "scene") {
  GeometricScene s;
  try {
    s.sceneType = j.value("sceneType", std::string("room"));
    s.degraded = j.value("degraded", false);
    const auto& ji = detail::require(j, "instances", where);
    for (std::size_t k = 0; k < ji.size(); ++k) {
      const auto& e = ji[k];
      const std::string w = where + ".instances[" + std::to_string(k) + "]";
      ModelInstance i;
      i.id = detail::require(e, "id", w).template get<std::string>();
      i.modelId = detail::require(e, "modelId", w).template get<std::string>();
      i.category = e.value("category", std::string());
      i.objectIndex = e.value("object", -1);
      if (e.contains("parentId")) {
        i.placement.supportParent = e["parentId"].template get<std::string>();
        i.placement.supportSurface = e.value("surfaceIndex", 0);
      }
      if (e.contains("attachmentSide")) {
        auto side = box_side_from(e["attachmentSide"].template get<std::string>());
        if (!side) throw Error(ErrorCode::parse, w + ".attachmentSide: unknown side");
        i.placement.attachmentSide = *side;
      }
      if (e.contains("posOnSurface")) i.placement.posOnSurface = detail::vec2_from(e["posOnSurface"], w + ".posOnSurface");
      i.placement.yaw = e.value("yaw", 0.0);
      i.placement.scale = e.value("scale", 1.0);
      i.transform.translation = detail::vec3_from(detail::require(e, "translation", w), w + ".translation");
      i.transform.yaw = i.placement.yaw;
      i.transform.scale = i.placement.scale;
      i.degraded = e.value("degraded", false);
      s.instances.push_back(std::move(i));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, where + ": " + e.what());
  }
  return s;
}

}  // namespace sceneforge
