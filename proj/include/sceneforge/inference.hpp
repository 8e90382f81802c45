#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/priors.hpp"
#include "sceneforge/rng.hpp"
#include "sceneforge/scene_template.hpp"

namespace sceneforge {

inline const std::string kRoomCategory = "room";

// Existing objects are considered as parents down to this fraction of the
// most likely parent's probability.
inline constexpr double kExistingParentRatio = 0.1;

struct InferenceConfig {
  bool sampleSupport = false;  // sample the parent category instead of argmax
  std::uint64_t seed = 0;
  double occThreshold = 0.5;
  int maxSceneObjects = 5;
  bool useSupportPriors = true;  // off: unsupported objects go straight to the room
  bool addCarriers = true;       // off: only existing objects or the room can carry
};

/// Splits every object with count n into n objects of count 1. A constraint
/// on a multi-count object applies to each copy; a multi-count referent is
/// represented by its first copy.
inline SceneTemplate expand_counts(const SceneTemplate& t) {
  SceneTemplate out;
  out.sceneType = t.sceneType;
  std::vector<std::vector<int>> copies(t.objects.size());
  for (const auto& o : t.objects) {
    for (int k = 0; k < std::max(1, o.count); ++k) {
      copies[o.index].push_back(out.add_object(o.category, o.attributes, 1, o.inferred));
    }
  }
  for (const auto& c : t.constraints) {
    for (int a : copies.at(c.a)) {
      RelationConstraint e{c.predicate, a, copies.at(c.b).front(), c.inferred};
      if (e.a != e.b && std::find(out.constraints.begin(), out.constraints.end(), e) == out.constraints.end()) {
        out.constraints.push_back(e);
      }
    }
  }
  return out;
}

/// Drops explicit relations other than support; used when spatial
/// constraints are disabled.
inline SceneTemplate without_spatial_constraints(SceneTemplate t) {
  std::erase_if(t.constraints, [](const RelationConstraint& c) { return !is_support_predicate(c.predicate); });
  return t;
}

namespace detail {

/// Support parent of object i according to the template, or -1.
inline int support_parent(const SceneTemplate& t, int i) {
  const int k = t.support_constraint(i);
  return k < 0 ? -1 : t.constraints[k].b;
}

/// True when j rests (transitively) on i.
inline bool rests_on(const SceneTemplate& t, int j, int i) {
  std::set<int> seen;
  for (int p = support_parent(t, j); p >= 0 && seen.insert(p).second; p = support_parent(t, p)) {
    if (p == i) return true;
  }
  return false;
}

inline int ensure_room(SceneTemplate& t) {
  const int r = t.find_category(kRoomCategory);
  return r >= 0 ? r : t.add_object(kRoomCategory, {}, 1, true);
}

/// Parent categories ordered by preference, with their probabilities. A
/// sampled parent, when requested, comes first.
inline std::vector<std::pair<std::string, double>> parent_candidates(const Distribution& d, const std::string& child,
                                                                     Rng* rng) {
  std::vector<std::pair<std::string, double>> rows(d.probs.begin(), d.probs.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::pair<std::string, double>> out;
  if (rng && !rows.empty()) {
    double total = 0.0;
    for (const auto& r : rows) total += r.second;
    double u = rng->uniform() * total;
    for (const auto& r : rows) {
      u -= r.second;
      if (u < 0) {
        if (r.first != child) out.push_back(r);
        break;
      }
    }
  }
  for (const auto& r : rows) {
    if (r.second > 0 && r.first != child) out.push_back(r);
  }
  return out;
}

class SupportInferrer {
 public:
  SupportInferrer(SceneTemplate& t, const KnowledgeBase& kb, const InferenceConfig& cfg)
      : t_(t), kb_(kb), cfg_(cfg), rng_(cfg.seed) {}

  void run() {
    room_ = ensure_room(t_);
    for (int i = 0; i < static_cast<int>(t_.objects.size()); ++i) {
      if (i == room_ || t_.support_constraint(i) >= 0) continue;
      attach(i, {t_.objects[i].category});
    }
  }

 private:
  void link(int child, int parent) {
    t_.constraints.push_back({Predicate::supported_by, child, parent, true});
  }

  /// Existing object that can carry child: exact category first, then a
  /// hyponym, then a hypernym other than the room (a plain table can stand
  /// in for a dining table). Never the child itself or anything on it.
  std::optional<int> existing(const std::string& category, int child) const {
    for (int pass = 0; pass < 3; ++pass) {
      for (const auto& o : t_.objects) {
        if (o.index == child || o.index == room_ || rests_on(t_, o.index, child)) continue;
        bool hit = false;
        if (pass == 0) hit = o.category == category;
        else if (pass == 1) hit = kb_.taxonomy.is_a(o.category, category);
        else hit = kb_.taxonomy.is_a(category, o.category) && kb_.taxonomy.parent(o.category).has_value();
        if (hit) return o.index;
      }
    }
    return std::nullopt;
  }

  void attach(int i, std::set<std::string> chain) {
    const std::string category = t_.objects[i].category;
    // an explicit "in" a container decides the parent when support is unstated
    for (const auto& c : t_.constraints) {
      if (c.a == i && c.predicate == Predicate::in && c.b != room_ && !rests_on(t_, c.b, i)) {
        link(i, c.b);
        return;
      }
    }
    if (!cfg_.useSupportPriors) {
      link(i, room_);
      return;
    }
    const Distribution d = kb_.lookup_support(category);
    if (d.uniformFallback || d.empty()) {
      link(i, room_);
      return;
    }
    const auto cands = parent_candidates(d, category, cfg_.sampleSupport ? &rng_ : nullptr);
    // a plausible parent already in the scene beats a new carrier; the room
    // ends the search when it ranks higher
    const double floor = cands.empty() ? 0.0 : kExistingParentRatio * cands.front().second;
    for (const auto& [parent, p] : cands) {
      if (parent == kRoomCategory) break;
      if (p < floor) continue;
      if (auto j = existing(parent, i)) {
        link(i, *j);
        return;
      }
    }
    for (const auto& [parent, p] : cands) {
      if (parent == kRoomCategory) break;
      if (chain.count(parent) || !cfg_.addCarriers) continue;
      const int k = t_.add_object(parent, {}, 1, true);
      link(i, k);
      chain.insert(parent);
      attach(k, chain);
      return;
    }
    link(i, room_);
  }

  SceneTemplate& t_;
  const KnowledgeBase& kb_;
  const InferenceConfig& cfg_;
  Rng rng_;
  int room_ = -1;
};

}  // namespace detail

/// Gives every object a support parent, adding inferred carrier objects
/// down to the room as needed.
inline SceneTemplate infer_support_parents(SceneTemplate t, const KnowledgeBase& kb, const InferenceConfig& cfg = {}) {
  detail::SupportInferrer(t, kb, cfg).run();
  return t;
}

/// Adds likely objects of the scene type, then supports them.
inline SceneTemplate infer_scene_objects(SceneTemplate t, const KnowledgeBase& kb, bool enable,
                                         const InferenceConfig& cfg = {}) {
  if (!enable) return t;
  auto row = kb.occ.find(t.sceneType);
  if (row == kb.occ.end()) return t;
  std::vector<std::pair<std::string, double>> likely;
  for (const auto& [category, p] : row->second) {
    if (p >= cfg.occThreshold && category != kRoomCategory && t.find_category(category) < 0) likely.emplace_back(category, p);
  }
  std::stable_sort(likely.begin(), likely.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (static_cast<int>(likely.size()) > cfg.maxSceneObjects) likely.resize(cfg.maxSceneObjects);
  for (const auto& [category, p] : likely) t.add_object(category, {}, 1, true);
  return infer_support_parents(std::move(t), kb, cfg);
}

/// Support tree over object indices, rooted at the room object.
struct SupportTree {
  int root = -1;
  std::vector<int> parent;
  std::vector<std::vector<int>> children;

  /// Pre-order traversal from the root.
  std::vector<int> dfs_order() const {
    std::vector<int> out, stack{root};
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      out.push_back(n);
      for (auto it = children[n].rbegin(); it != children[n].rend(); ++it) stack.push_back(*it);
    }
    return out;
  }
};

/// Children sorted by descending mean catalog volume of their category,
/// then by index.
inline SupportTree build_hierarchy(const SceneTemplate& t, const Catalog& catalog) {
  SupportTree tree;
  const int n = static_cast<int>(t.objects.size());
  tree.root = t.find_category(kRoomCategory);
  if (tree.root < 0) throw Error(ErrorCode::invalid_argument, "template has no room object");
  tree.parent.assign(n, -1);
  tree.children.assign(n, {});
  for (int i = 0; i < n; ++i) {
    if (i == tree.root) continue;
    const int p = detail::support_parent(t, i);
    if (p < 0) throw Error(ErrorCode::invalid_argument, "object " + std::to_string(i) + " has no support parent");
    tree.parent[i] = p;
  }
  for (int i = 0; i < n; ++i) {
    std::set<int> seen{i};
    for (int p = tree.parent[i]; p >= 0; p = tree.parent[p]) {
      if (!seen.insert(p).second) {
        throw Error(ErrorCode::hierarchy_cycle, "support cycle through '" + t.objects[i].category + "'");
      }
    }
    if (i != tree.root && tree.parent[i] >= 0) {
      int top = i;
      while (tree.parent[top] >= 0) top = tree.parent[top];
      if (top != tree.root) throw Error(ErrorCode::hierarchy_cycle, "object '" + t.objects[i].category + "' is not under the room");
    }
  }
  for (int i = 0; i < n; ++i) {
    if (tree.parent[i] >= 0) tree.children[tree.parent[i]].push_back(i);
  }
  for (auto& ch : tree.children) {
    std::stable_sort(ch.begin(), ch.end(), [&](int a, int b) {
      const double va = catalog.category_mean_volume(t.objects[a].category);
      const double vb = catalog.category_mean_volume(t.objects[b].category);
      if (va != vb) return va > vb;
      return a < b;
    });
  }
  return tree;
}

}  // namespace sceneforge
