#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sceneforge/camera.hpp"
#include "sceneforge/catalog.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/geometry.hpp"
#include "sceneforge/inference.hpp"
#include "sceneforge/lang.hpp"
#include "sceneforge/layout.hpp"
#include "sceneforge/priors.hpp"
#include "sceneforge/rng.hpp"
#include "sceneforge/scene_template.hpp"

namespace sceneforge {

inline constexpr int kMoveHalvings = 4;

struct SceneState {
  GeometricScene scene;
  std::set<std::string> selection;
  Camera camera;
  SceneTemplate tmpl;
};

/// Scene wire format: scene, camera, selection and the current template.
inline OrderedJson state_to_json(const SceneState& z) {
  OrderedJson j = scene_to_json(z.scene);
  j["camera"] = to_json(z.camera);
  j["selection"] = OrderedJson::array();
  for (const auto& id : z.selection) j["selection"].push_back(id);
  j["template"] = to_json(z.tmpl);
  return j;
}

inline std::string state_to_string(const SceneState& z) { return state_to_json(z).dump(1) + "\n"; }

/// A room with nothing in it.
inline SceneState empty_state(const Catalog& c) {
  SceneState z;
  const int room = z.tmpl.add_object(kRoomCategory);
  ModelInstance inst;
  inst.id = "room_1";
  Rng rng(0);
  inst.modelId = select_model(kRoomCategory, {}, c, rng);
  inst.category = kRoomCategory;
  inst.objectIndex = room;
  inst.transform = compose_transform(inst.placement, c.at(inst.modelId), std::nullopt);
  z.scene.instances.push_back(inst);
  return z;
}

namespace detail {

inline AttributeSet instance_attributes(const SceneState& z, const Catalog& c, const ModelInstance& inst) {
  AttributeSet out = c.at(inst.modelId).attributes;
  if (inst.objectIndex >= 0 && inst.objectIndex < static_cast<int>(z.tmpl.objects.size())) {
    const auto& a = z.tmpl.objects[inst.objectIndex].attributes;
    out.insert(a.begin(), a.end());
  }
  return out;
}

inline bool matches(const SceneState& z, const Catalog& c, const ModelInstance& inst, const std::string& category,
                    const AttributeSet& attrs) {
  if (!c.taxonomy().is_a(inst.category, category)) return false;
  const AttributeSet have = instance_attributes(z, c, inst);
  return std::includes(have.begin(), have.end(), attrs.begin(), attrs.end());
}

/// Horizontal camera axes: right and forward.
inline std::pair<Vec2, Vec2> camera_axes(const Camera& cam) {
  Vec3 f = cam.target - cam.position;
  Vec2 fw = normalized(Vec2{f.x, f.y});
  if (norm(Vec2{f.x, f.y}) < 1e-12) fw = {0, 1};
  return {Vec2{fw.y, -fw.x}, fw};
}

/// Direction in the ground plane for a view-centric predicate. "In front"
/// means toward the viewer.
inline Vec2 view_direction(const Camera& cam, Predicate p) {
  auto [right, forward] = camera_axes(cam);
  switch (p) {
    case Predicate::left_of: return -right;
    case Predicate::right_of: return right;
    case Predicate::in_front_of: return -forward;
    case Predicate::behind: return forward;
    default: return {0, 0};
  }
}

/// Predicate(a, b) as seen from the camera for directions, object-centric
/// otherwise.
inline bool view_relation(const Camera& cam, Predicate p, const ModelInstance& a, const OrientedBox& ba,
                          const ModelInstance& b, const OrientedBox& bb) {
  if (!is_directional(p)) return relation_holds(p, a, ba, b, bb);
  return in_sector(ba.center.xy() - bb.center.xy(), view_direction(cam, p));
}

}  // namespace detail

/// Instances a reference denotes. Definite references yield the single best
/// candidate (nearest to the camera); indefinite ones yield nothing.
inline std::vector<std::string> resolve_objects(const ObjectReference& ref, const SceneState& z, const Catalog& c) {
  if (!ref.definite) return {};
  std::vector<const ModelInstance*> cands;
  for (const auto& inst : z.scene.instances) {
    if (detail::matches(z, c, inst, ref.category, ref.attributes)) cands.push_back(&inst);
  }
  if (ref.spatialQualifier && !cands.empty()) {
    const auto& q = *ref.spatialQualifier;
    std::vector<const ModelInstance*> kept;
    for (const auto* cand : cands) {
      const OrientedBox cb = world_box(*cand, c.at(cand->modelId));
      for (const auto& other : z.scene.instances) {
        if (other.id == cand->id || !detail::matches(z, c, other, q.referentCategory, q.referentAttributes)) continue;
        if (detail::view_relation(z.camera, q.predicate, *cand, cb, other, world_box(other, c.at(other.modelId)))) {
          kept.push_back(cand);
          break;
        }
      }
    }
    cands = std::move(kept);
  }
  if (cands.empty()) throw Error(ErrorCode::not_found, "no " + ref.category + " matches the reference");
  const ModelInstance* best = nullptr;
  double best_d = 0.0;
  for (const auto* cand : cands) {
    const double d = norm(cand->transform.translation - z.camera.position);
    if (!best || d < best_d || (d == best_d && cand->id < best->id)) {
      best = cand;
      best_d = d;
    }
  }
  return {best->id};
}

struct InteractContext {
  const Catalog& catalog;
  const KnowledgeBase& kb;
  LayoutConfig layout;
};

struct OperationResult {
  SceneState state;
  std::vector<std::string> changed;
  std::vector<Warning> warnings;
};

/// Ids added, removed or moved between two scenes, sorted.
inline std::vector<std::string> changed_ids(const GeometricScene& before, const GeometricScene& after) {
  std::set<std::string> out;
  for (const auto& a : after.instances) {
    const ModelInstance* b = before.find(a.id);
    if (!b || !(b->transform == a.transform) || b->modelId != a.modelId) out.insert(a.id);
  }
  for (const auto& b : before.instances) {
    if (!after.find(b.id)) out.insert(b.id);
  }
  return {out.begin(), out.end()};
}

namespace detail {

inline std::string next_instance_id(const GeometricScene& s, const std::string& category) {
  int k = 0;
  for (const auto& i : s.instances) {
    const auto pos = i.id.rfind('_');
    if (pos == std::string::npos || i.id.substr(0, pos) != category) continue;
    try {
      k = std::max(k, std::stoi(i.id.substr(pos + 1)));
    } catch (const std::exception&) {
    }
  }
  return category + "_" + std::to_string(k + 1);
}

/// Removes template object idx and every constraint that mentions it;
/// instance object indices are renumbered to match.
inline void erase_object(SceneState& z, int idx) {
  auto& t = z.tmpl;
  t.objects.erase(t.objects.begin() + idx);
  for (auto& o : t.objects) {
    if (o.index > idx) --o.index;
  }
  std::erase_if(t.constraints, [&](const RelationConstraint& c) { return c.a == idx || c.b == idx; });
  for (auto& c : t.constraints) {
    if (c.a > idx) --c.a;
    if (c.b > idx) --c.b;
  }
  for (auto& inst : z.scene.instances) {
    if (inst.objectIndex == idx) inst.objectIndex = -1;
    else if (inst.objectIndex > idx) --inst.objectIndex;
  }
}

class Interactor {
 public:
  Interactor(const InteractContext& ctx, SceneState z, Rng& rng)
      : ctx_(ctx), c_(ctx.catalog), z_(std::move(z)), rng_(rng), engine_(ctx.catalog, ctx.kb, ctx.layout) {}

  OperationResult apply(const SceneOperation& op) {
    const GeometricScene before = z_.scene;
    switch (op.kind) {
      case OperationKind::Select: z_.selection = resolve_set(op.target); break;
      case OperationKind::LookAt:
        z_.selection = resolve_set(op.target);
        z_.camera = lookat(z_.scene, c_, z_.selection);
        break;
      case OperationKind::Insert: insert(op); break;
      case OperationKind::Remove: remove(op); break;
      case OperationKind::Replace: replace(op); break;
      case OperationKind::Move: move(op); break;
      case OperationKind::Scale: scale(op); break;
    }
    OperationResult r;
    r.changed = changed_ids(before, z_.scene);
    std::erase_if(z_.selection, [&](const std::string& id) { return !z_.scene.find(id); });
    r.state = std::move(z_);
    r.warnings = std::move(warnings_);
    return r;
  }

 private:
  std::vector<std::string> resolve(ObjectReference ref) {
    ref.definite = true;
    return resolve_objects(ref, z_, c_);
  }

  std::set<std::string> resolve_set(const ObjectReference& ref) {
    const auto ids = resolve(ref);
    return {ids.begin(), ids.end()};
  }

  void warn(const std::string& msg) { warnings_.push_back({msg, {}}); }

  ModelInstance& instance(const std::string& id) {
    ModelInstance* i = z_.scene.find(id);
    if (!i) throw Error(ErrorCode::not_found, "unknown instance '" + id + "'");
    return *i;
  }

  /// Takes id and its descendants out of the scene, places id again per req
  /// and puts everything back in its old slots. Descendants follow the new
  /// placement.
  void replace_instance(const std::string& old_id, PlaceRequest req) {
    const auto subtree = z_.scene.subtree(old_id);
    std::vector<std::pair<int, ModelInstance>> lifted;
    for (const auto& id : subtree) lifted.emplace_back(z_.scene.index_of(id), *z_.scene.find(id));
    std::sort(lifted.begin(), lifted.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto it = lifted.rbegin(); it != lifted.rend(); ++it) z_.scene.instances.erase(z_.scene.instances.begin() + it->first);
    engine_.place(z_.scene, z_.tmpl, req, rng_);
    ModelInstance placed = z_.scene.instances.back();
    z_.scene.instances.pop_back();
    for (auto& [slot, inst] : lifted) {
      if (inst.id == old_id) {
        inst = placed;
      } else if (inst.placement.supportParent && *inst.placement.supportParent == old_id) {
        inst.placement.supportParent = placed.id;
      }
      z_.scene.instances.insert(z_.scene.instances.begin() + slot, inst);
    }
    z_.scene.degraded = z_.scene.degraded || placed.degraded;
    update_subtree(z_.scene, c_, placed.id);
  }

  PlaceRequest request_for(const ModelInstance& inst, const std::string& parent_id) const {
    PlaceRequest req;
    req.id = inst.id;
    req.objectIndex = inst.objectIndex;
    req.category = inst.category;
    req.modelId = inst.modelId;
    req.parentId = parent_id;
    return req;
  }

  /// Request for a child whose parent changed: same scale, and the old
  /// position and yaw on the surface when they are still free.
  PlaceRequest follow_request(const ModelInstance& inst, const std::string& parent_id) const {
    PlaceRequest req = request_for(inst, parent_id);
    req.keepPos = inst.placement.posOnSurface;
    req.keepYaw = inst.placement.yaw;
    req.scale = inst.placement.scale;
    return req;
  }

  /// Places template objects that have no instance yet, parents first.
  void place_new_objects() {
    bool progress = true;
    while (progress) {
      progress = false;
      for (const auto& o : z_.tmpl.objects) {
        if (z_.scene.find_object(o.index)) continue;
        const int p = support_parent(z_.tmpl, o.index);
        const ModelInstance* parent = p >= 0 ? z_.scene.find_object(p) : nullptr;
        if (!parent) continue;
        PlaceRequest req;
        req.id = next_instance_id(z_.scene, o.category);
        req.objectIndex = o.index;
        req.category = o.category;
        req.modelId = select_model(o.category, o.attributes, c_, rng_);
        req.parentId = parent->id;
        engine_.place(z_.scene, z_.tmpl, req, rng_);
        progress = true;
      }
    }
  }

  int object_of(const std::string& id) {
    const int idx = instance(id).objectIndex;
    if (idx < 0) throw Error(ErrorCode::invalid_argument, "instance '" + id + "' has no template object");
    return idx;
  }

  InferenceConfig reparent_config(bool carriers) const {
    InferenceConfig ic;
    ic.addCarriers = carriers;
    ic.useSupportPriors = ctx_.layout.flags.useSupportPriors;
    ic.seed = ctx_.layout.rngSeed;
    return ic;
  }

  void insert(const SceneOperation& op) {
    std::optional<int> anchor;
    if (op.secondary) anchor = object_of(resolve(*op.secondary).front());
    const int copies = std::max(1, op.target.count);
    for (int k = 0; k < copies; ++k) {
      const int idx = z_.tmpl.add_object(op.target.category, op.target.attributes);
      for (const auto& rc : op.constraints) {
        if (rc.b == kViewer || rc.a == kViewer) {
          if (k == 0) warn(std::string("ignored view-centric ") + to_string(rc.predicate) + " for a new object");
          continue;
        }
        if (!anchor) continue;
        z_.tmpl.constraints.push_back({rc.predicate, rc.a == 0 ? idx : *anchor, rc.b == 0 ? idx : *anchor, false});
      }
    }
    z_.tmpl = infer_support_parents(std::move(z_.tmpl), ctx_.kb, reparent_config(true));
    place_new_objects();
  }

  void remove(const SceneOperation& op) {
    for (const auto& id : resolve(op.target)) {
      if (!instance(id).placement.supportParent) throw Error(ErrorCode::invalid_argument, "the room cannot be removed");
      const auto children = z_.scene.children_of(id);
      const int idx = object_of(id);
      z_.scene.instances.erase(z_.scene.instances.begin() + z_.scene.index_of(id));
      erase_object(z_, idx);
      z_.tmpl = infer_support_parents(std::move(z_.tmpl), ctx_.kb, reparent_config(false));
      place_new_objects();
      // point every orphan at its new parent before any of them is scored
      std::vector<std::string> parents;
      for (const auto& child : children) {
        const ModelInstance* parent = z_.scene.find_object(support_parent(z_.tmpl, instance(child).objectIndex));
        if (!parent) throw Error(ErrorCode::hierarchy_cycle, "no support parent for '" + child + "'");
        parents.push_back(parent->id);
        instance(child).placement.supportParent = parent->id;
      }
      for (std::size_t k = 0; k < children.size(); ++k) {
        replace_instance(children[k], follow_request(instance(children[k]), parents[k]));
      }
    }
  }

  void replace(const SceneOperation& op) {
    if (!op.secondary) throw Error(ErrorCode::invalid_argument, "replace needs a new object");
    const std::string old_id = resolve(op.target).front();
    const ModelInstance old = instance(old_id);
    if (!old.placement.supportParent) throw Error(ErrorCode::invalid_argument, "the room cannot be replaced");
    const int idx = object_of(old_id);
    auto& spec = z_.tmpl.objects[idx];
    spec.category = op.secondary->category;
    spec.attributes = op.secondary->attributes;
    spec.inferred = false;

    const ModelInstance& parent = instance(*old.placement.supportParent);
    const auto surfaces = fallback_support_surfaces(c_.at(parent.modelId));
    PlaceRequest req;
    req.id = next_instance_id(z_.scene, spec.category);
    req.objectIndex = idx;
    req.category = spec.category;
    req.modelId = select_model(spec.category, spec.attributes, c_, rng_);
    req.parentId = parent.id;
    req.surface = old.placement.supportSurface;
    req.side = engine_.choose_side(spec.category, c_.at(req.modelId), {surfaces.at(old.placement.supportSurface)});
    req.keepPos = old.placement.posOnSurface;
    req.keepYaw = old.placement.yaw;
    req.scale = 1.0;
    const auto children = z_.scene.children_of(old_id);
    replace_instance(old_id, req);
    if (z_.selection.erase(old_id)) z_.selection.insert(req.id);
    // children move onto the new object's surfaces
    for (const auto& child : children) replace_instance(child, follow_request(instance(child), req.id));
  }

  void move(const SceneOperation& op) {
    const std::string id = resolve(op.target).front();
    if (!instance(id).placement.supportParent) throw Error(ErrorCode::invalid_argument, "the room cannot be moved");
    const int idx = object_of(id);
    for (const auto& rc : op.constraints) {
      if (rc.b == kViewer) {
        step(id, rc.predicate);
        continue;
      }
      if (!op.secondary) throw Error(ErrorCode::invalid_argument, "move needs a reference object");
      const std::string ref_id = resolve(*op.secondary).front();
      if (ref_id == id || z_.scene.is_ancestor(id, ref_id)) {
        throw Error(ErrorCode::invalid_argument, "cannot move an object relative to itself or onto its own child");
      }
      const int ref = object_of(ref_id);
      // "in" a non-room object makes it the new parent, like "on"
      const bool support =
          is_support_predicate(rc.predicate) || (rc.predicate == Predicate::in && instance(ref_id).placement.supportParent);
      std::erase_if(z_.tmpl.constraints, [&](const RelationConstraint& c) {
        return c.a == idx && (c.b == ref || (support && is_support_predicate(c.predicate)));
      });
      std::string parent_id = *instance(id).placement.supportParent;
      if (support) {
        parent_id = ref_id;
        if (rc.predicate == Predicate::in) z_.tmpl.constraints.push_back({Predicate::supported_by, idx, ref, true});
      }
      z_.tmpl.constraints.push_back({rc.predicate, idx, ref, false});
      replace_instance(id, request_for(instance(id), parent_id));
    }
  }

  /// View-centric step of half the horizontal diagonal, halved on collision.
  void step(const std::string& id, Predicate p) {
    ModelInstance& inst = instance(id);
    const Model& m = c_.at(inst.modelId);
    const auto pframe = parent_frame(z_.scene, inst, c_);
    const SurfaceFrame f = detail::frame_for(inst.placement, pframe);
    const Vec2 dir = view_direction(z_.camera, p);
    const OrientedBox box0 = world_box(inst, m);
    double len = norm(Vec2{box0.half.x, box0.half.y});
    const Placement original = inst.placement;
    const auto skip = z_.scene.subtree(id);
    std::vector<std::string> parents = z_.scene.ancestors(id);

    // extents of the attachment face along the surface axes
    double ru = 0.0, rv = 0.0;
    for (const Vec3& q : face_corners(box0, original.attachmentSide)) {
      const Vec3 d = q - face_center(box0, original.attachmentSide);
      ru = std::max(ru, std::abs(dot(d, f.u)));
      rv = std::max(rv, std::abs(dot(d, f.v)));
    }
    for (int h = 0; h <= kMoveHalvings; ++h, len *= 0.5) {
      const Vec3 d{dir.x * len, dir.y * len, 0.0};
      Placement pl = original;
      pl.posOnSurface = original.posOnSurface + Vec2{dot(d, f.u), dot(d, f.v)};
      pl.posOnSurface.x = f.halfU > ru ? std::clamp(pl.posOnSurface.x, -f.halfU + ru, f.halfU - ru) : 0.0;
      pl.posOnSurface.y = f.halfV > rv ? std::clamp(pl.posOnSurface.y, -f.halfV + rv, f.halfV - rv) : 0.0;
      ModelInstance cand = inst;
      cand.placement = pl;
      cand.transform = compose_transform(pl, m, pframe);
      const OrientedBox box = world_box(cand, m);
      bool clear = true;
      for (const auto& o : z_.scene.instances) {
        if (std::find(skip.begin(), skip.end(), o.id) != skip.end()) continue;
        if (std::find(parents.begin(), parents.end(), o.id) != parents.end()) continue;
        if (collides(box, world_box(o, c_.at(o.modelId)))) {
          clear = false;
          break;
        }
      }
      if (clear) {
        inst.placement = pl;
        update_subtree(z_.scene, c_, id);
        return;
      }
    }
    warn("no free space to move " + id);
  }

  void scale(const SceneOperation& op) {
    if (!op.scalar || !(*op.scalar > 0)) throw Error(ErrorCode::invalid_argument, "scale needs a positive factor");
    for (const auto& id : resolve(op.target)) {
      ModelInstance& inst = instance(id);
      if (!inst.placement.supportParent) throw Error(ErrorCode::invalid_argument, "the room cannot be scaled");
      inst.placement.scale *= *op.scalar;
      update_subtree(z_.scene, c_, id);
      const ModelInstance& cur = instance(id);
      const OrientedBox box = world_box(cur, c_.at(cur.modelId));
      const auto skip = z_.scene.subtree(id);
      const auto parents = z_.scene.ancestors(id);
      bool ok = instance_overhang(z_.scene, c_, cur) <= ctx_.layout.overhangMax;
      for (const auto& o : z_.scene.instances) {
        if (!ok) break;
        if (std::find(skip.begin(), skip.end(), o.id) != skip.end()) continue;
        if (std::find(parents.begin(), parents.end(), o.id) != parents.end()) continue;
        if (collides(box, world_box(o, c_.at(o.modelId)))) ok = false;
      }
      if (ok) continue;
      PlaceRequest req = request_for(cur, *cur.placement.supportParent);
      req.surface = cur.placement.supportSurface;
      req.side = cur.placement.attachmentSide;
      req.scale = cur.placement.scale;
      req.keepYaw = cur.placement.yaw;
      replace_instance(id, req);
    }
  }

  const InteractContext& ctx_;
  const Catalog& c_;
  SceneState z_;
  Rng& rng_;
  LayoutEngine engine_;
  std::vector<Warning> warnings_;
};

}  // namespace detail

/// Applies one operation; the input state is left untouched.
inline OperationResult apply_operation(const SceneOperation& op, const SceneState& z, const InteractContext& ctx,
                                       Rng& rng) {
  return detail::Interactor(ctx, z, rng).apply(op);
}

}  // namespace sceneforge
