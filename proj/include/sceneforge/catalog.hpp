#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sceneforge/error.hpp"
#include "sceneforge/json_util.hpp"
#include "sceneforge/math.hpp"

namespace sceneforge {

// ---------------------------------------------------------------------------
// Attributes, box sides and support surfaces
// ---------------------------------------------------------------------------

enum class AttributeKind { color, material, shape };

inline const char* to_string(AttributeKind k) {
  switch (k) {
    case AttributeKind::color: return "color";
    case AttributeKind::material: return "material";
    case AttributeKind::shape: return "shape";
  }
  return "?";
}

inline std::optional<AttributeKind> attribute_kind_from(std::string_view s) {
  if (s == "color") return AttributeKind::color;
  if (s == "material") return AttributeKind::material;
  if (s == "shape") return AttributeKind::shape;
  return std::nullopt;
}

struct Attribute {
  AttributeKind kind = AttributeKind::color;
  std::string value;
  auto operator<=>(const Attribute&) const = default;
};

using AttributeSet = std::set<Attribute>;

/// Model-local convention: +Z up, +Y front, +X right (so "left" is -X).
enum class BoxSide { top, bottom, front, back, left, right };

inline constexpr std::array<BoxSide, 6> kAllSides = {BoxSide::top,  BoxSide::bottom, BoxSide::front,
                                                     BoxSide::back, BoxSide::left,   BoxSide::right};

inline const char* to_string(BoxSide s) {
  switch (s) {
    case BoxSide::top: return "top";
    case BoxSide::bottom: return "bottom";
    case BoxSide::front: return "front";
    case BoxSide::back: return "back";
    case BoxSide::left: return "left";
    case BoxSide::right: return "right";
  }
  return "?";
}

inline std::optional<BoxSide> box_side_from(std::string_view s) {
  for (BoxSide side : kAllSides) {
    if (s == to_string(side)) return side;
  }
  return std::nullopt;
}

/// Outward unit normal of a box side in model-local coordinates.
inline Vec3 side_normal(BoxSide s) {
  switch (s) {
    case BoxSide::top: return {0, 0, 1};
    case BoxSide::bottom: return {0, 0, -1};
    case BoxSide::front: return {0, 1, 0};
    case BoxSide::back: return {0, -1, 0};
    case BoxSide::left: return {-1, 0, 0};
    case BoxSide::right: return {1, 0, 0};
  }
  return {};
}

/// Half extent of a box along the axis of the given side.
inline double side_depth(Vec3 half, BoxSide s) {
  switch (s) {
    case BoxSide::top:
    case BoxSide::bottom: return half.z;
    case BoxSide::front:
    case BoxSide::back: return half.y;
    case BoxSide::left:
    case BoxSide::right: return half.x;
  }
  return 0.0;
}

inline bool is_lateral(BoxSide s) { return s != BoxSide::top && s != BoxSide::bottom; }

enum class NormalClass { up, down, horizontal };
enum class Facing { interior, exterior };

inline const char* to_string(NormalClass n) {
  switch (n) {
    case NormalClass::up: return "up";
    case NormalClass::down: return "down";
    case NormalClass::horizontal: return "horizontal";
  }
  return "?";
}
inline const char* to_string(Facing f) { return f == Facing::interior ? "interior" : "exterior"; }

/// The featurization of a support surface used by the surface priors.
struct SurfaceClass {
  NormalClass normal = NormalClass::up;
  Facing facing = Facing::exterior;
  auto operator<=>(const SurfaceClass&) const = default;
};

inline std::string to_string(SurfaceClass c) { return std::string(to_string(c.normal)) + "-" + to_string(c.facing); }

/// Planar rectangle: center plus two orthogonal in-plane half-axes. The
/// surface normal is normalize(halfU x halfV).
struct SurfaceRect {
  Vec3 center;
  Vec3 halfU;
  Vec3 halfV;
  bool operator==(const SurfaceRect&) const = default;
};

struct SurfaceFeature {
  NormalClass normalClass = NormalClass::up;
  Facing facing = Facing::exterior;
  SurfaceRect rect;

  SurfaceClass surface_class() const { return {normalClass, facing}; }
  Vec3 normal() const { return normalized(cross(rect.halfU, rect.halfV)); }
  bool operator==(const SurfaceFeature&) const = default;
};

struct Model {
  std::string id;
  std::string category;
  std::vector<std::string> tags;
  AttributeSet attributes;
  Vec3 halfExtents;
  std::vector<SurfaceFeature> supportSurfaces;
  std::optional<BoxSide> attachmentSide;

  double volume() const { return 8.0 * halfExtents.x * halfExtents.y * halfExtents.z; }
};

// ---------------------------------------------------------------------------
// Taxonomy
// ---------------------------------------------------------------------------

class Taxonomy {
 public:
  Taxonomy() = default;

  /// Validates that the child->parent map is acyclic and rooted.
  explicit Taxonomy(std::map<std::string, std::string> parent_of, std::string root = {})
      : parentOf_(std::move(parent_of)), root_(std::move(root)) {
    if (root_.empty()) {
      std::set<std::string> tops;
      for (const auto& [child, parent] : parentOf_) {
        if (!parentOf_.count(parent)) tops.insert(parent);
      }
      if (tops.size() > 1) {
        throw Error(ErrorCode::taxonomy_cycle, "taxonomy has several roots: " + *tops.begin() + ", " + *std::next(tops.begin()));
      }
      root_ = tops.empty() ? std::string("entity") : *tops.begin();
    }
    if (parentOf_.count(root_)) throw Error(ErrorCode::taxonomy_cycle, "taxonomy root '" + root_ + "' has a parent");
    for (const auto& [child, parent] : parentOf_) {
      std::string cur = child;
      std::size_t steps = 0;
      while (cur != root_) {
        auto it = parentOf_.find(cur);
        if (it == parentOf_.end()) {
          throw Error(ErrorCode::taxonomy_cycle, "category '" + cur + "' does not reach root '" + root_ + "'");
        }
        cur = it->second;
        if (++steps > parentOf_.size()) throw Error(ErrorCode::taxonomy_cycle, "taxonomy cycle through '" + child + "'");
      }
    }
  }

  const std::string& root() const { return root_; }
  const std::map<std::string, std::string>& parent_of() const { return parentOf_; }

  bool contains(const std::string& c) const { return c == root_ || parentOf_.count(c) > 0; }

  /// Parent category; unknown categories hang directly under the root.
  std::optional<std::string> parent(const std::string& c) const {
    if (c == root_) return std::nullopt;
    auto it = parentOf_.find(c);
    return it == parentOf_.end() ? root_ : it->second;
  }

  /// Strict ancestors of c, nearest first, ending with the root.
  std::vector<std::string> ancestors(const std::string& c) const {
    std::vector<std::string> out;
    for (auto p = parent(c); p; p = parent(*p)) out.push_back(*p);
    return out;
  }

  /// True when c equals ancestor or lies below it.
  bool is_a(const std::string& c, const std::string& ancestor) const {
    if (c == ancestor) return true;
    for (auto p = parent(c); p; p = parent(*p)) {
      if (*p == ancestor) return true;
    }
    return false;
  }

  std::set<std::string> categories() const {
    std::set<std::string> out{root_};
    for (const auto& [c, p] : parentOf_) {
      out.insert(c);
      out.insert(p);
    }
    return out;
  }

  bool operator==(const Taxonomy&) const = default;

 private:
  std::map<std::string, std::string> parentOf_;
  std::string root_ = "entity";
};

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

struct ObjectQuery {
  std::string category;
  AttributeSet attributes;
  std::vector<std::string> keywords;
};

class Catalog {
 public:
  Catalog() = default;

  Catalog(std::vector<Model> models, Taxonomy taxonomy) : models_(std::move(models)), taxonomy_(std::move(taxonomy)) {
    for (std::size_t i = 0; i < models_.size(); ++i) {
      validate(models_[i], "models[" + std::to_string(i) + "]");
      if (!index_.emplace(models_[i].id, i).second) {
        throw Error(ErrorCode::duplicate_id, "duplicate model id '" + models_[i].id + "'");
      }
    }
  }

  const std::vector<Model>& models() const { return models_; }
  const Taxonomy& taxonomy() const { return taxonomy_; }
  std::size_t size() const { return models_.size(); }

  const Model* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &models_[it->second];
  }

  const Model& at(const std::string& id) const {
    if (const Model* m = find(id)) return *m;
    throw Error(ErrorCode::not_found, "unknown model id '" + id + "'");
  }

  /// Mean volume of models of the category (or its hyponyms when none match
  /// exactly); 0 when the catalog has nothing for it.
  double category_mean_volume(const std::string& category) const {
    double sum = 0.0;
    int n = 0;
    for (const auto& m : models_) {
      if (m.category == category) { sum += m.volume(); ++n; }
    }
    if (n == 0) {
      for (const auto& m : models_) {
        if (taxonomy_.is_a(m.category, category)) { sum += m.volume(); ++n; }
      }
    }
    return n ? sum / n : 0.0;
  }

 private:
  static void validate(const Model& m, const std::string& where) {
    if (m.id.empty()) throw Error(ErrorCode::parse, where + ".id: empty");
    if (m.category.empty()) throw Error(ErrorCode::parse, where + ".category: empty");
    if (!(m.halfExtents.x > 0 && m.halfExtents.y > 0 && m.halfExtents.z > 0)) {
      throw Error(ErrorCode::parse, where + ".halfExtents: must be strictly positive");
    }
    for (std::size_t s = 0; s < m.supportSurfaces.size(); ++s) {
      const auto& r = m.supportSurfaces[s].rect;
      const double nu = norm(r.halfU), nv = norm(r.halfV);
      if (nu <= 0 || nv <= 0 || std::abs(dot(r.halfU, r.halfV)) > 1e-9 * nu * nv) {
        throw Error(ErrorCode::parse, where + ".supportSurfaces[" + std::to_string(s) + "]: half-axes must be orthogonal and nonzero");
      }
    }
  }

  std::vector<Model> models_;
  std::map<std::string, std::size_t> index_;
  Taxonomy taxonomy_;
};

namespace detail {

template <class J>
AttributeSet attributes_from(const J& j, const std::string& where) {
  AttributeSet out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw Error(ErrorCode::parse, where + ": expected object {kind: value}");
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto kind = attribute_kind_from(it.key());
    if (!kind) throw Error(ErrorCode::parse, where + ": unknown attribute kind '" + it.key() + "'");
    if (it.value().is_string()) {
      out.insert({*kind, it.value().template get<std::string>()});
    } else if (it.value().is_array()) {
      for (const auto& v : it.value()) out.insert({*kind, v.template get<std::string>()});
    } else {
      throw Error(ErrorCode::parse, where + "." + it.key() + ": expected string");
    }
  }
  return out;
}

inline OrderedJson attributes_to_json(const AttributeSet& attrs) {
  OrderedJson j = OrderedJson::object();
  for (const auto& a : attrs) {
    const char* k = to_string(a.kind);
    if (!j.contains(k)) {
      j[k] = a.value;
    } else {
      if (!j[k].is_array()) j[k] = OrderedJson::array({j[k]});
      j[k].push_back(a.value);
    }
  }
  return j;
}

template <class J>
SurfaceFeature surface_from(const J& j, const std::string& where) {
  SurfaceFeature s;
  const std::string normal = require(j, "normal", where).template get<std::string>();
  if (normal == "up") s.normalClass = NormalClass::up;
  else if (normal == "down") s.normalClass = NormalClass::down;
  else if (normal == "horizontal") s.normalClass = NormalClass::horizontal;
  else throw Error(ErrorCode::parse, where + ".normal: unknown '" + normal + "'");
  const std::string facing = require(j, "facing", where).template get<std::string>();
  if (facing == "interior") s.facing = Facing::interior;
  else if (facing == "exterior") s.facing = Facing::exterior;
  else throw Error(ErrorCode::parse, where + ".facing: unknown '" + facing + "'");
  s.rect.center = vec3_from(require(j, "center", where), where + ".center");
  s.rect.halfU = vec3_from(require(j, "halfU", where), where + ".halfU");
  s.rect.halfV = vec3_from(require(j, "halfV", where), where + ".halfV");
  return s;
}

}  // namespace detail

inline Catalog catalog_from_json(const Json& root) {
  if (!root.is_object()) throw Error(ErrorCode::parse, "catalog: expected top-level object");
  std::map<std::string, std::string> parent_of;
  if (root.contains("taxonomy")) {
    for (auto it = root["taxonomy"].begin(); it != root["taxonomy"].end(); ++it) {
      if (!it.value().is_string()) throw Error(ErrorCode::parse, "taxonomy." + it.key() + ": expected string");
      parent_of[it.key()] = it.value().get<std::string>();
    }
  }
  std::string root_name = root.value("taxonomyRoot", std::string());
  const auto& jm = detail::require(root, "models", std::string("catalog"));
  if (!jm.is_array()) throw Error(ErrorCode::parse, "models: expected array");
  std::vector<Model> models;
  for (std::size_t i = 0; i < jm.size(); ++i) {
    const std::string where = "models[" + std::to_string(i) + "]";
    const auto& j = jm[i];
    Model m;
    try {
      m.id = detail::require(j, "id", where).get<std::string>();
      m.category = detail::require(j, "category", where).get<std::string>();
      if (j.contains("tags")) m.tags = j["tags"].get<std::vector<std::string>>();
      if (j.contains("attributes")) m.attributes = detail::attributes_from(j["attributes"], where + ".attributes");
      m.halfExtents = detail::vec3_from(detail::require(j, "halfExtents", where), where + ".halfExtents");
      if (j.contains("supportSurfaces")) {
        const auto& js = j["supportSurfaces"];
        for (std::size_t s = 0; s < js.size(); ++s) {
          m.supportSurfaces.push_back(detail::surface_from(js[s], where + ".supportSurfaces[" + std::to_string(s) + "]"));
        }
      }
      if (j.contains("attachmentSide")) {
        auto side = box_side_from(j["attachmentSide"].get<std::string>());
        if (!side) throw Error(ErrorCode::parse, where + ".attachmentSide: unknown side");
        m.attachmentSide = side;
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse, where + ": " + e.what());
    }
    models.push_back(std::move(m));
  }
  return Catalog(std::move(models), Taxonomy(std::move(parent_of), root_name));
}

inline Catalog load_catalog(const std::string& path) {
  const std::string text = detail::read_file(path);
  return catalog_from_json(detail::parse_json(text, path));
}

// ---------------------------------------------------------------------------
// Query and geometric fallbacks
// ---------------------------------------------------------------------------

struct ScoredModel {
  const Model* model = nullptr;
  int score = 0;
};

/// Match score: exact category 3, hyponym 2, +1 per matched attribute, +1
/// per tag equal to a keyword.
inline int match_score(const ObjectQuery& q, const Model& m, const Taxonomy& t) {
  int score = 0;
  if (m.category == q.category) score += 3;
  else if (t.is_a(m.category, q.category)) score += 2;
  for (const auto& a : q.attributes) {
    if (m.attributes.count(a)) score += 1;
  }
  for (const auto& tag : m.tags) {
    if (std::find(q.keywords.begin(), q.keywords.end(), tag) != q.keywords.end()) score += 1;
  }
  return score;
}

/// Ranked models for a query. Models whose category neither equals nor
/// descends from the query category are only returned when nothing matches
/// by category, and then only if some tag matches a keyword; attribute
/// matches alone never qualify a model.
inline std::vector<ScoredModel> query_models(const ObjectQuery& q, const Catalog& c, const Taxonomy& t) {
  std::vector<ScoredModel> by_category, by_keyword;
  for (const auto& m : c.models()) {
    const int s = match_score(q, m, t);
    if (s <= 0) continue;
    if (t.is_a(m.category, q.category)) {
      by_category.push_back({&m, s});
    } else {
      const bool tag_hit = std::any_of(m.tags.begin(), m.tags.end(), [&](const std::string& tag) {
        return std::find(q.keywords.begin(), q.keywords.end(), tag) != q.keywords.end();
      });
      if (tag_hit) by_keyword.push_back({&m, s});
    }
  }
  auto& out = by_category.empty() ? by_keyword : by_category;
  std::sort(out.begin(), out.end(), [](const ScoredModel& a, const ScoredModel& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.model->id < b.model->id;
  });
  return out;
}

inline std::vector<ScoredModel> query_models(const ObjectQuery& q, const Catalog& c) {
  return query_models(q, c, c.taxonomy());
}

/// Annotated surfaces, or the full top face of the bounding box.
inline std::vector<SurfaceFeature> fallback_support_surfaces(const Model& m) {
  if (!m.supportSurfaces.empty()) return m.supportSurfaces;
  SurfaceFeature top;
  top.normalClass = NormalClass::up;
  top.facing = Facing::exterior;
  top.rect.center = {0, 0, m.halfExtents.z};
  top.rect.halfU = {m.halfExtents.x, 0, 0};
  top.rect.halfV = {0, m.halfExtents.y, 0};
  return {top};
}

enum class ShapeClass { thin, flat, blocky };

/// Thin: two small dimensions. Flat: one small dimension. Ratio 0.2.
inline ShapeClass classify_shape(Vec3 half) {
  std::array<double, 3> d = {half.x, half.y, half.z};
  std::sort(d.begin(), d.end());
  if (d[0] < 0.2 * d[2] && d[1] < 0.2 * d[2]) return ShapeClass::thin;
  if (d[0] < 0.2 * d[1]) return ShapeClass::flat;
  return ShapeClass::blocky;
}

inline BoxSide fallback_attachment_side(const Model& m) {
  if (m.attachmentSide) return *m.attachmentSide;
  const Vec3 h = m.halfExtents;
  switch (classify_shape(h)) {
    case ShapeClass::thin: return BoxSide::left;
    case ShapeClass::flat: return (h.z >= h.x && h.z >= h.y) ? BoxSide::back : BoxSide::bottom;
    case ShapeClass::blocky: return BoxSide::bottom;
  }
  return BoxSide::bottom;
}

/// Model as stored in the catalog file, plus the resolved surfaces.
inline OrderedJson model_to_json(const Model& m) {
  OrderedJson j;
  j["id"] = m.id;
  j["category"] = m.category;
  j["tags"] = m.tags;
  j["attributes"] = detail::attributes_to_json(m.attributes);
  j["halfExtents"] = detail::to_json(m.halfExtents);
  j["supportSurfaces"] = OrderedJson::array();
  for (const auto& s : fallback_support_surfaces(m)) {
    j["supportSurfaces"].push_back({{"normal", to_string(s.normalClass)},
                                    {"facing", to_string(s.facing)},
                                    {"center", detail::to_json(s.rect.center)},
                                    {"halfU", detail::to_json(s.rect.halfU)},
                                    {"halfV", detail::to_json(s.rect.halfV)}});
  }
  j["attachmentSide"] = to_string(fallback_attachment_side(m));
  return j;
}

}  // namespace sceneforge
