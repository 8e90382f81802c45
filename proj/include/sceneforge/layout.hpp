#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/corpus.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/geometry.hpp"
#include "sceneforge/inference.hpp"
#include "sceneforge/priors.hpp"
#include "sceneforge/rng.hpp"
#include "sceneforge/scene_template.hpp"

namespace sceneforge {

inline constexpr double kDensityCap = 10.0;
inline constexpr int kTopModels = 10;

struct ConditionFlags {
  bool useSupportPriors = true;
  bool useSpatialConstraints = true;
  bool useRelposPriors = true;
  bool useInference = false;
  bool operator==(const ConditionFlags&) const = default;
};

enum class Condition { basic, sup, sup_spat, sup_prior, full, full_infer };

inline constexpr std::array<Condition, 6> kAllConditions = {Condition::basic,     Condition::sup,
                                                            Condition::sup_spat,  Condition::sup_prior,
                                                            Condition::full,      Condition::full_infer};

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::basic: return "basic";
    case Condition::sup: return "+sup";
    case Condition::sup_spat: return "+sup+spat";
    case Condition::sup_prior: return "+sup+prior";
    case Condition::full: return "full";
    case Condition::full_infer: return "full+infer";
  }
  return "?";
}

inline Condition condition_from(std::string_view s) {
  for (Condition c : kAllConditions) {
    if (s == to_string(c)) return c;
  }
  throw Error(ErrorCode::unknown_condition, "unknown condition '" + std::string(s) + "'");
}

inline ConditionFlags flags_for(Condition c) {
  switch (c) {
    case Condition::basic: return {false, false, false, false};
    case Condition::sup: return {true, false, false, false};
    case Condition::sup_spat: return {true, true, false, false};
    case Condition::sup_prior: return {true, false, true, false};
    case Condition::full: return {true, true, true, false};
    case Condition::full_infer: return {true, true, true, true};
  }
  return {};
}

struct LayoutConfig {
  int samplesPerObject = 30;
  double lambdaObj = 0.25;
  double lambdaRel = 0.75;
  double overhangMax = 0.05;
  double sigmaMin = 0.85;
  double sigmaMax = 1.15;
  std::uint64_t rngSeed = 1;
  ConditionFlags flags;

  void validate() const {
    if (samplesPerObject < 1) throw Error(ErrorCode::invalid_argument, "samplesPerObject must be at least 1");
    if (std::abs(lambdaObj + lambdaRel - 1.0) > 1e-12) throw Error(ErrorCode::invalid_argument, "lambdas must sum to 1");
    if (!(sigmaMin > 0 && sigmaMin <= sigmaMax)) throw Error(ErrorCode::invalid_argument, "invalid sigma range");
  }
};

struct LayoutScore {
  double L = 0.0;
  double L_obj = 0.0;
  double L_rel = 0.0;
};

// ---------------------------------------------------------------------------
// Relations
// ---------------------------------------------------------------------------

namespace detail {

/// Within 45 degrees of the unit axis.
inline bool in_sector(Vec2 d, Vec2 axis) {
  const double n = norm(d);
  if (n < 1e-9) return false;
  return dot(d, axis) >= n * std::cos(kPi / 4) - 1e-12;
}

inline bool above(const OrientedBox& a, const OrientedBox& b) {
  if (a.zmin() < b.zmax() - 0.01) return false;
  const double smaller = 4.0 * std::min(a.half.x * a.half.y, b.half.x * b.half.y);
  return footprint_overlap_area(a, b) >= 0.3 * smaller;
}

inline Vec2 direction_axis(Predicate p) {
  switch (p) {
    case Predicate::left_of: return {-1, 0};
    case Predicate::right_of: return {1, 0};
    case Predicate::in_front_of: return {0, 1};
    case Predicate::behind: return {0, -1};
    default: return {0, 0};
  }
}

}  // namespace detail

/// Geometric test of predicate(a, b) on world boxes. Directions are read in
/// b's local frame.
inline bool relation_holds(Predicate p, const ModelInstance& a, const OrientedBox& ba, const ModelInstance& b,
                           const OrientedBox& bb) {
  switch (p) {
    case Predicate::on:
    case Predicate::supported_by: return a.placement.supportParent && *a.placement.supportParent == b.id;
    case Predicate::in:
      for (const Vec3& corner : ba.corners()) {
        if (!bb.contains(corner, 0.01)) return false;
      }
      return true;
    case Predicate::above: return detail::above(ba, bb);
    case Predicate::under: return detail::above(bb, ba);
    case Predicate::left_of:
    case Predicate::right_of:
    case Predicate::in_front_of:
    case Predicate::behind:
      return detail::in_sector(rotate(ba.center.xy() - bb.center.xy(), -bb.yaw), detail::direction_axis(p));
    case Predicate::near:
    case Predicate::next_to: return box_gap(ba, bb) <= 0.5 * 2.0 * norm(bb.half);
  }
  return false;
}

/// 1 when the constraint holds in the scene, else 0.
inline double relation_score(const RelationConstraint& rc, const GeometricScene& s, const Catalog& c) {
  const ModelInstance* a = s.find_object(rc.a);
  const ModelInstance* b = s.find_object(rc.b);
  if (!a || !b) {
    throw Error(ErrorCode::invalid_argument, "constraint " + std::string(to_string(rc.predicate)) + "(" +
                                                 std::to_string(rc.a) + ", " + std::to_string(rc.b) + ") does not resolve");
  }
  return relation_holds(rc.predicate, *a, world_box(*a, c.at(a->modelId)), *b, world_box(*b, c.at(b->modelId))) ? 1.0
                                                                                                                : 0.0;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

namespace detail {

/// Computes the layout score; density values of pairs not involving the
/// volatile instance are memoized across calls.
class Scorer {
 public:
  Scorer(const Catalog& c, const KnowledgeBase& kb, const LayoutConfig& cfg) : c_(c), kb_(kb), cfg_(cfg) {}

  void set_volatile(std::string id) { volatile_ = std::move(id); }
  void forget(const std::string& id) {
    std::erase_if(cache_, [&](const auto& e) { return e.first.first == id || e.first.second == id; });
  }

  LayoutScore score(const GeometricScene& s, const SceneTemplate& t) {
    std::vector<OrientedBox> boxes;
    boxes.reserve(s.instances.size());
    for (const auto& i : s.instances) boxes.push_back(world_box(i, c_.at(i.modelId)));
    LayoutScore out;
    if (cfg_.flags.useRelposPriors) out.L_obj = l_obj(s, boxes);
    if (cfg_.flags.useSpatialConstraints) out.L_rel = l_rel(s, t, boxes);
    out.L = cfg_.lambdaObj * out.L_obj + cfg_.lambdaRel * out.L_rel;
    return out;
  }

 private:
  double p_surf(const GeometricScene& s, const ModelInstance& inst) const {
    if (!cfg_.flags.useSupportPriors) return 1.0;
    const Distribution d = kb_.lookup_surf_sup(inst.category);
    if (d.empty()) return 1.0;
    const ModelInstance* parent = s.find(*inst.placement.supportParent);
    const auto surfaces = fallback_support_surfaces(c_.at(parent->modelId));
    const auto& surface = surfaces.at(inst.placement.supportSurface);
    auto it = d.probs.find(to_string(surface.surface_class()));
    return it == d.probs.end() ? 0.0 : it->second;
  }

  double density(const GeometricScene& s, std::size_t i, std::size_t j, RelationKind rel,
                 const std::vector<OrientedBox>& boxes) {
    const auto& a = s.instances[i];
    const auto& b = s.instances[j];
    const auto key = std::make_pair(a.id, b.id);
    const bool cacheable = a.id != volatile_ && b.id != volatile_;
    if (cacheable) {
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    const RelposSample pose = relative_pose(boxes[i], boxes[j]);
    const double d =
        std::min(kDensityCap, kb_.relpos_density({a.category, b.category, s.sceneType, rel}, pose));
    if (cacheable) cache_[key] = d;
    return d;
  }

  double l_obj(const GeometricScene& s, const std::vector<OrientedBox>& boxes) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.instances.size(); ++i) {
      const auto& inst = s.instances[i];
      if (!inst.placement.supportParent) continue;
      double sum = 0.0;
      int n = 0;
      for (std::size_t j = 0; j < s.instances.size(); ++j) {
        if (j == i) continue;
        const auto& other = s.instances[j];
        if (other.id == *inst.placement.supportParent) {
          sum += density(s, i, j, RelationKind::ChildParent, boxes);
          ++n;
        } else if (other.placement.supportParent && *other.placement.supportParent == *inst.placement.supportParent) {
          sum += density(s, i, j, RelationKind::Sibling, boxes);
          ++n;
        }
      }
      if (n > 0) total += p_surf(s, inst) * sum / n;
    }
    return total;
  }

  double l_rel(const GeometricScene& s, const SceneTemplate& t, const std::vector<OrientedBox>& boxes) const {
    double total = 0.0;
    for (const auto& rc : t.constraints) {
      const int a = index_of_object(s, rc.a);
      const int b = index_of_object(s, rc.b);
      if (a < 0 || b < 0) continue;
      if (relation_holds(rc.predicate, s.instances[a], boxes[a], s.instances[b], boxes[b])) total += 1.0;
    }
    return total;
  }

  static int index_of_object(const GeometricScene& s, int object) {
    if (object < 0) return -1;
    for (std::size_t k = 0; k < s.instances.size(); ++k) {
      if (s.instances[k].objectIndex == object) return static_cast<int>(k);
    }
    return -1;
  }

  const Catalog& c_;
  const KnowledgeBase& kb_;
  const LayoutConfig& cfg_;
  std::string volatile_;
  std::map<std::pair<std::string, std::string>, double> cache_;
};

}  // namespace detail

/// L = lambdaObj * L_obj + lambdaRel * L_rel over the placed instances;
/// constraints whose arguments are not placed contribute nothing.
inline LayoutScore score_layout(const GeometricScene& s, const SceneTemplate& t, const KnowledgeBase& kb,
                                const Catalog& c, const LayoutConfig& cfg) {
  return detail::Scorer(c, kb, cfg).score(s, t);
}

// ---------------------------------------------------------------------------
// Model selection
// ---------------------------------------------------------------------------

/// Uniform draw from the top ranked models; when the object asks for
/// attributes, models carrying all of them are preferred within the top.
inline std::string select_model(const std::string& category, const AttributeSet& attrs, const Catalog& c, Rng& rng) {
  const auto ranked = query_models({category, attrs, {}}, c);
  if (ranked.empty()) throw Error(ErrorCode::no_model_found, "no model found for category '" + category + "'");
  std::vector<const Model*> pool;
  for (std::size_t k = 0; k < ranked.size() && k < static_cast<std::size_t>(kTopModels); ++k) pool.push_back(ranked[k].model);
  if (!attrs.empty()) {
    std::vector<const Model*> matching;
    for (const Model* m : pool) {
      if (std::includes(m->attributes.begin(), m->attributes.end(), attrs.begin(), attrs.end())) matching.push_back(m);
    }
    if (!matching.empty()) pool = std::move(matching);
  }
  return pool[rng.index(pool.size())]->id;
}

inline std::map<int, std::string> select_models(const SceneTemplate& t, const Catalog& c, Rng& rng) {
  std::map<int, std::string> out;
  for (const auto& o : t.objects) out[o.index] = select_model(o.category, o.attributes, c, rng);
  return out;
}

// ---------------------------------------------------------------------------
// Placement
// ---------------------------------------------------------------------------

/// Record of one greedy placement step.
struct PlacementTrace {
  std::string instanceId;
  std::vector<double> candidateScores;  // accepted candidates, in draw order
  double chosenScore = 0.0;
  int rejected = 0;
  bool degraded = false;
};

/// What to place and where.
struct PlaceRequest {
  std::string id;
  int objectIndex = -1;
  std::string category;
  std::string modelId;
  std::string parentId;
  std::optional<int> surface;      // fixed support surface
  std::optional<BoxSide> side;     // fixed attachment side
  std::optional<Vec2> keepPos;     // committed as is when free, sampled otherwise
  std::optional<double> keepYaw;
  std::optional<double> scale;     // fixed scale instead of a draw
  std::vector<RelationConstraint> extra;  // scored in addition to the template
  std::vector<std::string> ignore;         // not treated as obstacles
};

class LayoutEngine {
 public:
  LayoutEngine(const Catalog& c, const KnowledgeBase& kb, LayoutConfig cfg) : c_(c), kb_(kb), cfg_(cfg) {
    cfg_.validate();
  }

  const LayoutConfig& config() const { return cfg_; }

  /// Instance ids by object index: category_k, numbered in index order.
  static std::map<int, std::string> instance_ids(const SceneTemplate& t, const GeometricScene* existing = nullptr) {
    std::map<std::string, int> next;
    if (existing) {
      for (const auto& i : existing->instances) {
        const auto pos = i.id.rfind('_');
        if (pos == std::string::npos) continue;
        try {
          const int k = std::stoi(i.id.substr(pos + 1));
          next[i.id.substr(0, pos)] = std::max(next[i.id.substr(0, pos)], k);
        } catch (const std::exception&) {
        }
      }
    }
    std::map<int, std::string> out;
    for (const auto& o : t.objects) out[o.index] = o.category + "_" + std::to_string(++next[o.category]);
    return out;
  }

  /// Depth-first placement from the room, largest child first.
  GeometricScene place_scene(const SceneTemplate& t, const SupportTree& tree, const std::map<int, std::string>& models,
                             Rng& rng, std::vector<PlacementTrace>* trace = nullptr) const {
    GeometricScene s;
    s.sceneType = t.sceneType;
    const auto ids = instance_ids(t);
    ModelInstance room;
    room.id = ids.at(tree.root);
    room.modelId = models.at(tree.root);
    room.category = t.objects[tree.root].category;
    room.objectIndex = tree.root;
    room.transform = compose_transform(room.placement, c_.at(room.modelId), std::nullopt);
    s.instances.push_back(room);

    detail::Scorer scorer(c_, kb_, cfg_);
    std::vector<int> stack{tree.root};
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node != tree.root) {
        PlaceRequest req;
        req.id = ids.at(node);
        req.objectIndex = node;
        req.category = t.objects[node].category;
        req.modelId = models.at(node);
        req.parentId = ids.at(tree.parent[node]);
        place(s, t, req, rng, scorer, trace);
      }
      std::vector<int> kids = tree.children[node];
      std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
        const double va = c_.at(models.at(a)).volume(), vb = c_.at(models.at(b)).volume();
        if (va != vb) return va > vb;
        return a < b;
      });
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
    }
    return s;
  }

  /// Places one instance against the current scene and appends it.
  const ModelInstance& place(GeometricScene& s, const SceneTemplate& t, const PlaceRequest& req, Rng& rng,
                             std::vector<PlacementTrace>* trace = nullptr) const {
    detail::Scorer scorer(c_, kb_, cfg_);
    return place(s, t, req, rng, scorer, trace);
  }

  LayoutScore score(const GeometricScene& s, const SceneTemplate& t) const { return score_layout(s, t, kb_, c_, cfg_); }

  /// Attachment side: most likely observed side with a compatible surface
  /// on the parent, else the geometric fallback, else bottom.
  BoxSide choose_side(const std::string& category, const Model& m, const std::vector<SurfaceFeature>& surfaces) const {
    std::vector<BoxSide> order;
    if (cfg_.flags.useSupportPriors) {
      const Distribution d = kb_.lookup_surf_att(category);
      std::vector<std::pair<double, BoxSide>> rows;
      for (BoxSide side : kAllSides) {
        auto it = d.probs.find(to_string(side));
        if (it != d.probs.end() && it->second > 0) rows.emplace_back(it->second, side);
      }
      std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      for (const auto& r : rows) order.push_back(r.second);
    }
    order.push_back(fallback_attachment_side(m));
    order.push_back(BoxSide::bottom);
    for (BoxSide side : order) {
      for (const auto& f : surfaces) {
        if (side_compatible(f.normalClass, side)) return side;
      }
    }
    for (const auto& f : surfaces) {
      for (BoxSide side : kAllSides) {
        if (side_compatible(f.normalClass, side)) return side;
      }
    }
    throw Error(ErrorCode::invalid_argument, "parent has no usable support surface");
  }

  /// Surface drawn in proportion to the category's surface-class prior;
  /// uniform without data.
  int choose_surface(const std::string& category, const std::vector<SurfaceFeature>& surfaces, BoxSide side,
                     Rng& rng) const {
    std::vector<int> ok;
    for (std::size_t k = 0; k < surfaces.size(); ++k) {
      if (side_compatible(surfaces[k].normalClass, side)) ok.push_back(static_cast<int>(k));
    }
    if (ok.empty()) throw Error(ErrorCode::invalid_argument, "no surface accepts side " + std::string(to_string(side)));
    std::vector<double> w(ok.size(), 0.0);
    double total = 0.0;
    if (cfg_.flags.useSupportPriors) {
      const Distribution d = kb_.lookup_surf_sup(category);
      for (std::size_t k = 0; k < ok.size(); ++k) {
        auto it = d.probs.find(to_string(surfaces[ok[k]].surface_class()));
        if (it != d.probs.end()) w[k] = it->second;
        total += w[k];
      }
    }
    if (!(total > 0)) {
      std::fill(w.begin(), w.end(), 1.0);
      total = static_cast<double>(ok.size());
    }
    double u = rng.uniform() * total;
    for (std::size_t k = 0; k < ok.size(); ++k) {
      u -= w[k];
      if (u < 0) return ok[k];
    }
    return ok.back();
  }

 private:
  struct Candidate {
    Vec2 pos;
    double yaw = 0.0;
    double scale = 1.0;
  };

  const ModelInstance& place(GeometricScene& s, const SceneTemplate& t, const PlaceRequest& req, Rng& rng,
                             detail::Scorer& scorer, std::vector<PlacementTrace>* trace) const {
    const ModelInstance* found = s.find(req.parentId);
    if (!found) throw Error(ErrorCode::invalid_argument, "unknown parent '" + req.parentId + "'");
    const ModelInstance parent_copy = *found;  // s.instances grows while scoring
    const ModelInstance* parent = &parent_copy;
    const Model& model = c_.at(req.modelId);
    const auto surfaces = fallback_support_surfaces(c_.at(parent->modelId));
    const BoxSide side = req.side ? *req.side : choose_side(req.category, model, surfaces);
    const int surface = req.surface ? *req.surface : choose_surface(req.category, surfaces, side, rng);
    const SupportFrame pframe = support_frame(*parent, c_.at(parent->modelId));
    const SurfaceFrame frame = surface_frame(surfaces.at(surface), parent->transform);
    const bool lateral = is_lateral(side) && frame.cls.normal == NormalClass::horizontal;

    ModelInstance inst;
    inst.id = req.id;
    inst.modelId = req.modelId;
    inst.category = req.category;
    inst.objectIndex = req.objectIndex;
    inst.placement.supportParent = req.parentId;
    inst.placement.supportSurface = surface;
    inst.placement.attachmentSide = side;

    // obstacles: everything except the parent chain and ignored instances
    std::vector<OrientedBox> obstacles;
    {
      std::vector<std::string> skip = s.ancestors(req.parentId);
      skip.push_back(req.parentId);
      skip.insert(skip.end(), req.ignore.begin(), req.ignore.end());
      for (const auto& o : s.instances) {
        if (std::find(skip.begin(), skip.end(), o.id) != skip.end()) continue;
        if (s.is_ancestor(req.id, o.id)) continue;
        obstacles.push_back(world_box(o, c_.at(o.modelId)));
      }
    }

    // relpos references for prior-guided draws
    std::vector<std::pair<std::size_t, RelationKind>> refs;  // indices: the vector grows while scoring
    if (cfg_.flags.useRelposPriors && !lateral && frame.cls.normal == NormalClass::up) {
      for (std::size_t k = 0; k < s.instances.size(); ++k) {
        const auto& o = s.instances[k];
        RelationKind rel;
        if (o.id == req.parentId) rel = RelationKind::ChildParent;
        else if (o.placement.supportParent && *o.placement.supportParent == req.parentId) rel = RelationKind::Sibling;
        else continue;
        if (kb_.resolve_relpos({req.category, o.category, s.sceneType, rel})) refs.emplace_back(k, rel);
      }
    }

    SceneTemplate scored = t;
    scored.constraints.insert(scored.constraints.end(), req.extra.begin(), req.extra.end());
    scorer.set_volatile(req.id);
    scorer.forget(req.id);

    PlacementTrace tr;
    tr.instanceId = req.id;
    std::optional<Candidate> best;
    double best_score = 0.0;

    auto draw = [&](int k) {
      Candidate cand;
      cand.scale = req.scale ? *req.scale : rng.uniform(cfg_.sigmaMin, cfg_.sigmaMax);
      if (!refs.empty() && k % 2 == 1) {
        const auto [k_ref, rel] = refs[rng.index(refs.size())];
        const ModelInstance& ref = s.instances[k_ref];
        const RelposSample r = kb_.sample_relpos({req.category, ref.category, s.sceneType, rel}, rng);
        const OrientedBox rb = world_box(ref, c_.at(ref.modelId));
        const Vec2 w = rb.center.xy() + rotate({r.x * rb.half.x, r.y * rb.half.y}, rb.yaw);
        const Vec3 p{w.x, w.y, frame.origin.z};
        cand.pos = {dot(p - frame.origin, frame.u), dot(p - frame.origin, frame.v)};
        cand.yaw = rb.yaw + r.theta;
      } else {
        cand.pos = {rng.uniform(-frame.halfU, frame.halfU), rng.uniform(-frame.halfV, frame.halfV)};
        cand.yaw = parent->transform.yaw + static_cast<double>(rng.index(4)) * kPi / 2;
      }
      if (lateral) cand.yaw = required_yaw(side, frame.normal);
      return cand;
    };

    auto realize = [&](const Candidate& cand) {
      ModelInstance out = inst;
      out.placement.posOnSurface = cand.pos;
      out.placement.yaw = wrap_angle(cand.yaw);
      out.placement.scale = cand.scale;
      out.transform = compose_transform(out.placement, model, pframe);
      return out;
    };

    auto acceptable = [&](const ModelInstance& cand) {
      const OrientedBox box = world_box(cand, model);
      const double overhang =
          overhang_fraction(footprint_on(box, side, frame), frame.halfU, frame.halfV);
      if (overhang > cfg_.overhangMax) return false;
      for (const auto& o : obstacles) {
        if (collides(box, o)) return false;
      }
      return true;
    };

    if (req.keepPos) {
      Candidate kept;
      kept.pos = *req.keepPos;
      kept.yaw = lateral ? required_yaw(side, frame.normal) : req.keepYaw.value_or(parent->transform.yaw);
      kept.scale = req.scale.value_or(1.0);
      const ModelInstance cand = realize(kept);
      if (acceptable(cand)) {
        s.instances.push_back(cand);
        best_score = scorer.score(s, scored).L;
        s.instances.pop_back();
        tr.candidateScores.push_back(best_score);
        best = kept;
      }
    }

    for (int round = 0; round < 2 && !best; ++round) {
      const int n = cfg_.samplesPerObject * (round == 0 ? 1 : 2);
      for (int k = 0; k < n; ++k) {
        const ModelInstance cand = realize(draw(k));
        if (!acceptable(cand)) {
          ++tr.rejected;
          continue;
        }
        s.instances.push_back(cand);
        const double score = scorer.score(s, scored).L;
        s.instances.pop_back();
        tr.candidateScores.push_back(score);
        if (!best || score > best_score) {
          best = Candidate{cand.placement.posOnSurface, cand.placement.yaw, cand.placement.scale};
          best_score = score;
        }
      }
    }

    ModelInstance chosen;
    if (best) {
      chosen = realize(*best);
    } else {
      Candidate fallback;
      fallback.scale = req.scale ? *req.scale : 1.0;
      fallback.yaw = lateral ? required_yaw(side, frame.normal) : parent->transform.yaw;
      chosen = realize(fallback);
      chosen.degraded = true;
      s.degraded = true;
      tr.degraded = true;
    }
    s.instances.push_back(chosen);
    scorer.set_volatile({});
    scorer.forget(req.id);
    tr.chosenScore = best ? best_score : scorer.score(s, scored).L;
    if (trace) trace->push_back(std::move(tr));
    return s.instances.back();
  }

  const Catalog& c_;
  const KnowledgeBase& kb_;
  LayoutConfig cfg_;
};

}  // namespace sceneforge
