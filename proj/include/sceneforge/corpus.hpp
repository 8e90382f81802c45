#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/geometry.hpp"
#include "sceneforge/json_util.hpp"

namespace sceneforge {

/// Maximum contact gap for support recovery (meters).
inline constexpr double kSupportGap = 0.010;
/// Minimum fraction of the child's contact face that must overlap the surface.
inline constexpr double kSupportOverlap = 0.5;

enum class RelationKind { Sibling, ChildParent };

inline const char* to_string(RelationKind r) { return r == RelationKind::Sibling ? "Sibling" : "ChildParent"; }

struct RelposKey {
  std::string obj;
  std::string ref;
  std::string sceneType;
  RelationKind relation = RelationKind::Sibling;
  auto operator<=>(const RelposKey&) const = default;
};

inline std::string to_string(const RelposKey& k) {
  return k.obj + "|" + k.ref + "|" + k.sceneType + "|" + to_string(k.relation);
}

/// Object pose in the reference's yaw frame; x and y are divided by the
/// reference's (scaled) half extents, theta is the yaw difference.
struct RelposSample {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  bool operator==(const RelposSample&) const = default;
};

inline RelposSample relative_pose(const OrientedBox& obj, const OrientedBox& ref) {
  const Vec2 local = rotate(obj.center.xy() - ref.center.xy(), -ref.yaw);
  return {local.x / ref.half.x, local.y / ref.half.y, wrap_angle(obj.yaw - ref.yaw)};
}

struct ObservationSet {
  std::map<std::pair<std::string, std::string>, long> occCounts;  // (category, sceneType)
  std::map<std::string, long> sceneCounts;                        // sceneType
  std::map<std::pair<std::string, std::string>, long> supportCounts;  // (child, parent)
  std::map<std::string, long> childCounts;                            // supported instances per category
  std::map<std::pair<std::string, SurfaceClass>, long> surfSupCounts;
  std::map<std::pair<std::string, BoxSide>, long> surfAttCounts;
  std::map<RelposKey, std::vector<RelposSample>> relposSamples;

  void merge(const ObservationSet& o) {
    for (const auto& [k, v] : o.occCounts) occCounts[k] += v;
    for (const auto& [k, v] : o.sceneCounts) sceneCounts[k] += v;
    for (const auto& [k, v] : o.supportCounts) supportCounts[k] += v;
    for (const auto& [k, v] : o.childCounts) childCounts[k] += v;
    for (const auto& [k, v] : o.surfSupCounts) surfSupCounts[k] += v;
    for (const auto& [k, v] : o.surfAttCounts) surfAttCounts[k] += v;
    for (const auto& [k, v] : o.relposSamples) {
      auto& dst = relposSamples[k];
      dst.insert(dst.end(), v.begin(), v.end());
    }
  }

  bool operator==(const ObservationSet&) const = default;
};

struct CorpusScene {
  GeometricScene scene;
  std::string sceneType;
  std::string file;
};

struct SceneCorpus {
  std::vector<CorpusScene> scenes;
  std::string catalogPath;
};

/// Recovered support relation of one instance. An empty parentId means the
/// instance rests on the world root.
struct SupportLink {
  std::string parentId;
  int surfaceIndex = -1;
  BoxSide contactSide = BoxSide::bottom;
  SurfaceClass surfaceClass;
  double gap = 0.0;
  double overlap = 0.0;
};

namespace detail {

/// Side of the box whose outward normal opposes the surface normal, if any.
inline std::optional<BoxSide> opposing_side(const OrientedBox& b, Vec3 surface_normal) {
  for (BoxSide s : kAllSides) {
    if (dot(rotate_z(side_normal(s), b.yaw), surface_normal) < -0.999) return s;
  }
  return std::nullopt;
}

inline bool better_link(const SupportLink& a, const SupportLink& b) {
  const double ga = std::abs(a.gap), gb = std::abs(b.gap);
  if (ga != gb) return ga < gb;
  if (a.overlap != b.overlap) return a.overlap > b.overlap;
  if (a.parentId != b.parentId) return a.parentId < b.parentId;
  return a.surfaceIndex < b.surfaceIndex;
}

}  // namespace detail

/// Recovers static support from geometry: a child rests on a parent surface
/// when its opposing face lies within kSupportGap of the surface plane and at
/// least half of that face overlaps the surface rectangle. Up-facing surfaces
/// take precedence; among candidates the smallest gap wins, then the larger
/// overlap, then the parent id.
inline std::map<std::string, SupportLink> extract_support_hierarchy(const GeometricScene& s, const Catalog& c) {
  std::vector<OrientedBox> boxes;
  std::vector<std::vector<SurfaceFeature>> surfaces;
  for (const auto& i : s.instances) {
    const Model& m = c.at(i.modelId);
    boxes.push_back(world_box(i, m));
    surfaces.push_back(fallback_support_surfaces(m));
  }
  std::map<std::string, SupportLink> out;
  for (std::size_t ci = 0; ci < s.instances.size(); ++ci) {
    std::optional<SupportLink> best_up, best_other;
    for (std::size_t pi = 0; pi < s.instances.size(); ++pi) {
      if (pi == ci) continue;
      for (std::size_t si = 0; si < surfaces[pi].size(); ++si) {
        const SurfaceFrame f = surface_frame(surfaces[pi][si], s.instances[pi].transform);
        const auto side = detail::opposing_side(boxes[ci], f.normal);
        if (!side) continue;
        SupportLink link;
        link.gap = dot(face_center(boxes[ci], *side) - f.origin, f.normal);
        if (!(std::abs(link.gap) < kSupportGap)) continue;
        const Polygon2 fp = footprint_on(boxes[ci], *side, f);
        const double area = polygon_area(fp);
        if (!(area > 0)) continue;
        link.overlap = polygon_area(clip_to_box(fp, f.halfU, f.halfV)) / area;
        if (link.overlap < kSupportOverlap) continue;
        link.parentId = s.instances[pi].id;
        link.surfaceIndex = static_cast<int>(si);
        link.contactSide = *side;
        link.surfaceClass = f.cls;
        auto& best = f.cls.normal == NormalClass::up ? best_up : best_other;
        if (!best || detail::better_link(link, *best)) best = link;
      }
    }
    if (best_up) out[s.instances[ci].id] = *best_up;
    else if (best_other) out[s.instances[ci].id] = *best_other;
    else out[s.instances[ci].id] = SupportLink{};
  }
  return out;
}

/// Observations of one scene of the given type.
inline ObservationSet extract_scene_observations(const GeometricScene& s, const std::string& scene_type, const Catalog& c) {
  ObservationSet obs;
  std::vector<std::string> cats;
  std::vector<OrientedBox> boxes;
  for (const auto& i : s.instances) {
    const Model* m = c.find(i.modelId);
    if (!m) throw Error(ErrorCode::not_found, "scene instance '" + i.id + "' has unresolvable model '" + i.modelId + "'");
    cats.push_back(m->category);
    boxes.push_back(world_box(i, *m));
  }
  obs.sceneCounts[scene_type] += 1;
  for (const auto& cat : std::set<std::string>(cats.begin(), cats.end())) obs.occCounts[{cat, scene_type}] += 1;

  const auto links = extract_support_hierarchy(s, c);
  std::map<std::string, std::vector<std::size_t>> children;
  for (std::size_t ci = 0; ci < s.instances.size(); ++ci) {
    const SupportLink& l = links.at(s.instances[ci].id);
    if (l.parentId.empty()) continue;
    const int pi = s.index_of(l.parentId);
    const std::string& cc = cats[ci];
    const std::string& pc = cats[pi];
    obs.supportCounts[{cc, pc}] += 1;
    obs.childCounts[cc] += 1;
    obs.surfSupCounts[{cc, l.surfaceClass}] += 1;
    obs.surfAttCounts[{cc, l.contactSide}] += 1;
    obs.relposSamples[{cc, pc, scene_type, RelationKind::ChildParent}].push_back(relative_pose(boxes[ci], boxes[pi]));
    children[l.parentId].push_back(ci);
  }
  for (const auto& [parent, kids] : children) {
    for (std::size_t a : kids) {
      for (std::size_t b : kids) {
        if (a == b) continue;
        obs.relposSamples[{cats[a], cats[b], scene_type, RelationKind::Sibling}].push_back(relative_pose(boxes[a], boxes[b]));
      }
    }
  }
  return obs;
}

inline ObservationSet extract_observations(const SceneCorpus& corpus, const Catalog& c) {
  ObservationSet obs;
  for (const auto& cs : corpus.scenes) obs.merge(extract_scene_observations(cs.scene, cs.sceneType, c));
  return obs;
}

// ---------------------------------------------------------------------------
// Corpus files: a directory with manifest.json and one scene JSON per entry.
// ---------------------------------------------------------------------------

inline SceneCorpus load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  if (!fs::exists(manifest_path)) throw Error(ErrorCode::io, "corpus '" + dir + "' has no manifest.json");
  const Json manifest = detail::parse_json(detail::read_file(manifest_path.string()), manifest_path.string());
  SceneCorpus corpus;
  if (manifest.contains("catalog")) {
    fs::path cat = manifest["catalog"].get<std::string>();
    corpus.catalogPath = (cat.is_absolute() ? cat : fs::path(dir) / cat).lexically_normal().string();
  }
  const auto& entries = detail::require(manifest, "scenes", manifest_path.string());
  for (const auto& e : entries) {
    CorpusScene cs;
    cs.file = detail::require(e, "file", manifest_path.string()).get<std::string>();
    cs.sceneType = detail::require(e, "sceneType", manifest_path.string()).get<std::string>();
    const std::string path = (fs::path(dir) / cs.file).string();
    cs.scene = scene_from_json(detail::parse_json(detail::read_file(path), path), path);
    cs.scene.sceneType = cs.sceneType;
    corpus.scenes.push_back(std::move(cs));
  }
  if (corpus.scenes.empty()) throw Error(ErrorCode::no_data, "corpus '" + dir + "' contains no scenes");
  return corpus;
}

inline void save_corpus(const SceneCorpus& corpus, const std::string& dir, const std::string& catalog_ref) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  OrderedJson manifest;
  manifest["catalog"] = catalog_ref;
  manifest["scenes"] = OrderedJson::array();
  for (const auto& cs : corpus.scenes) {
    detail::write_file((fs::path(dir) / cs.file).string(), scene_to_json(cs.scene).dump(1) + "\n");
    manifest["scenes"].push_back({{"file", cs.file}, {"sceneType", cs.sceneType}});
  }
  detail::write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(1) + "\n");
}

}  // namespace sceneforge
