#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/json_util.hpp"

namespace sceneforge {

enum class Predicate { on, in, under, above, left_of, right_of, in_front_of, behind, near, next_to, supported_by };

inline constexpr std::array<Predicate, 11> kAllPredicates = {
    Predicate::on,       Predicate::in,     Predicate::under,   Predicate::above,
    Predicate::left_of,  Predicate::right_of, Predicate::in_front_of, Predicate::behind,
    Predicate::near,     Predicate::next_to,  Predicate::supported_by};

inline const char* to_string(Predicate p) {
  switch (p) {
    case Predicate::on: return "on";
    case Predicate::in: return "in";
    case Predicate::under: return "under";
    case Predicate::above: return "above";
    case Predicate::left_of: return "left_of";
    case Predicate::right_of: return "right_of";
    case Predicate::in_front_of: return "in_front_of";
    case Predicate::behind: return "behind";
    case Predicate::near: return "near";
    case Predicate::next_to: return "next_to";
    case Predicate::supported_by: return "supported_by";
  }
  return "?";
}

inline std::optional<Predicate> predicate_from(std::string_view s) {
  for (Predicate p : kAllPredicates) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

/// Predicates that fix the support parent of their first argument.
inline bool is_support_predicate(Predicate p) { return p == Predicate::on || p == Predicate::supported_by; }

inline bool is_directional(Predicate p) {
  return p == Predicate::left_of || p == Predicate::right_of || p == Predicate::in_front_of || p == Predicate::behind;
}

/// Constraint argument standing for the viewer in view-centric commands
/// such as "move the chair to the left".
inline constexpr int kViewer = -1;

struct ObjectSpec {
  int index = 0;
  std::string category;
  AttributeSet attributes;
  int count = 1;
  bool inferred = false;
  bool operator==(const ObjectSpec&) const = default;
};

struct RelationConstraint {
  Predicate predicate = Predicate::on;
  int a = 0;
  int b = 0;
  bool inferred = false;
  bool operator==(const RelationConstraint&) const = default;
};

struct SceneTemplate {
  std::vector<ObjectSpec> objects;
  std::vector<RelationConstraint> constraints;
  std::string sceneType = "room";
  bool operator==(const SceneTemplate&) const = default;

  int add_object(std::string category, AttributeSet attrs = {}, int count = 1, bool inferred = false) {
    const int idx = static_cast<int>(objects.size());
    objects.push_back({idx, std::move(category), std::move(attrs), count, inferred});
    return idx;
  }

  /// Index of the support constraint of object i, or -1.
  int support_constraint(int i) const {
    for (std::size_t k = 0; k < constraints.size(); ++k) {
      if (constraints[k].a == i && is_support_predicate(constraints[k].predicate)) return static_cast<int>(k);
    }
    return -1;
  }

  int find_category(const std::string& category) const {
    for (const auto& o : objects) {
      if (o.category == category) return o.index;
    }
    return -1;
  }
};

struct SpatialQualifier {
  Predicate predicate = Predicate::left_of;
  std::string referentCategory;
  AttributeSet referentAttributes;
  bool referentDefinite = true;
  bool operator==(const SpatialQualifier&) const = default;
};

struct ObjectReference {
  std::string category;
  AttributeSet attributes;
  std::optional<SpatialQualifier> spatialQualifier;
  bool definite = false;
  int count = 1;
  bool operator==(const ObjectReference&) const = default;
};

enum class OperationKind { Select, LookAt, Insert, Remove, Replace, Move, Scale };

inline const char* to_string(OperationKind k) {
  switch (k) {
    case OperationKind::Select: return "Select";
    case OperationKind::LookAt: return "LookAt";
    case OperationKind::Insert: return "Insert";
    case OperationKind::Remove: return "Remove";
    case OperationKind::Replace: return "Replace";
    case OperationKind::Move: return "Move";
    case OperationKind::Scale: return "Scale";
  }
  return "?";
}

inline std::optional<OperationKind> operation_kind_from(std::string_view s) {
  for (auto k : {OperationKind::Select, OperationKind::LookAt, OperationKind::Insert, OperationKind::Remove,
                 OperationKind::Replace, OperationKind::Move, OperationKind::Scale}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

/// Constraint indices: 0 is the target, 1 the secondary reference, kViewer
/// the camera.
struct SceneOperation {
  OperationKind kind = OperationKind::Select;
  ObjectReference target;
  std::optional<ObjectReference> secondary;
  std::vector<RelationConstraint> constraints;
  std::optional<double> scalar;
  bool operator==(const SceneOperation&) const = default;
};

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline OrderedJson to_json(const ObjectSpec& o) {
  OrderedJson j;
  j["index"] = o.index;
  j["category"] = o.category;
  j["attributes"] = detail::attributes_to_json(o.attributes);
  j["count"] = o.count;
  j["inferred"] = o.inferred;
  return j;
}

inline OrderedJson to_json(const RelationConstraint& c) {
  return {{"predicate", to_string(c.predicate)}, {"args", {c.a, c.b}}, {"inferred", c.inferred}};
}

inline OrderedJson to_json(const SceneTemplate& t) {
  OrderedJson j;
  j["sceneType"] = t.sceneType;
  j["objects"] = OrderedJson::array();
  for (const auto& o : t.objects) j["objects"].push_back(to_json(o));
  j["constraints"] = OrderedJson::array();
  for (const auto& c : t.constraints) j["constraints"].push_back(to_json(c));
  return j;
}

inline OrderedJson to_json(const ObjectReference& r) {
  OrderedJson j;
  j["category"] = r.category;
  j["attributes"] = detail::attributes_to_json(r.attributes);
  j["definite"] = r.definite;
  if (r.count != 1) j["count"] = r.count;
  if (r.spatialQualifier) {
    const auto& q = *r.spatialQualifier;
    j["spatialQualifier"] = {{"predicate", to_string(q.predicate)},
                             {"referentCategory", q.referentCategory},
                             {"referentAttributes", detail::attributes_to_json(q.referentAttributes)},
                             {"referentDefinite", q.referentDefinite}};
  }
  return j;
}

inline OrderedJson to_json(const SceneOperation& op) {
  OrderedJson j;
  j["kind"] = to_string(op.kind);
  j["target"] = to_json(op.target);
  if (op.secondary) j["secondary"] = to_json(*op.secondary);
  j["constraints"] = OrderedJson::array();
  for (const auto& c : op.constraints) j["constraints"].push_back(to_json(c));
  if (op.scalar) j["scalar"] = *op.scalar;
  return j;
}

namespace detail {

template <class J>
RelationConstraint constraint_from_json(const J& j) {
  auto p = predicate_from(j.at("predicate").template get<std::string>());
  if (!p) throw Error(ErrorCode::parse, "unknown predicate '" + j.at("predicate").template get<std::string>() + "'");
  return {*p, j.at("args").at(0).template get<int>(), j.at("args").at(1).template get<int>(), j.value("inferred", false)};
}

template <class J>
ObjectReference reference_from_json(const J& j) {
  ObjectReference r;
  r.category = j.at("category").template get<std::string>();
  r.attributes = detail::attributes_from(j.at("attributes"), "reference");
  r.definite = j.at("definite").template get<bool>();
  r.count = j.value("count", 1);
  if (j.contains("spatialQualifier")) {
    const auto& q = j["spatialQualifier"];
    SpatialQualifier s;
    auto p = predicate_from(q.at("predicate").template get<std::string>());
    if (!p) throw Error(ErrorCode::parse, "unknown predicate in spatial qualifier");
    s.predicate = *p;
    s.referentCategory = q.at("referentCategory").template get<std::string>();
    s.referentAttributes = detail::attributes_from(q.at("referentAttributes"), "spatialQualifier");
    s.referentDefinite = q.at("referentDefinite").template get<bool>();
    r.spatialQualifier = s;
  }
  return r;
}

}  // namespace detail

template <class J>
SceneTemplate template_from_json(const J& j) {
  SceneTemplate t;
  try {
    t.sceneType = j.at("sceneType").template get<std::string>();
    for (const auto& o : j.at("objects")) {
      ObjectSpec s;
      s.index = o.at("index").template get<int>();
      s.category = o.at("category").template get<std::string>();
      s.attributes = detail::attributes_from(o.at("attributes"), "object");
      s.count = o.value("count", 1);
      s.inferred = o.value("inferred", false);
      t.objects.push_back(std::move(s));
    }
    for (const auto& c : j.at("constraints")) t.constraints.push_back(detail::constraint_from_json(c));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("template: ") + e.what());
  }
  return t;
}

template <class J>
SceneOperation operation_from_json(const J& j) {
  SceneOperation op;
  try {
    auto k = operation_kind_from(j.at("kind").template get<std::string>());
    if (!k) throw Error(ErrorCode::parse, "unknown operation kind");
    op.kind = *k;
    op.target = detail::reference_from_json(j.at("target"));
    if (j.contains("secondary")) op.secondary = detail::reference_from_json(j["secondary"]);
    for (const auto& c : j.at("constraints")) op.constraints.push_back(detail::constraint_from_json(c));
    if (j.contains("scalar")) op.scalar = j["scalar"].template get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("operation: ") + e.what());
  }
  return op;
}

}  // namespace sceneforge
