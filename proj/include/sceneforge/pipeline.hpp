#pragma once

#include <string>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/geometry.hpp"
#include "sceneforge/inference.hpp"
#include "sceneforge/lang.hpp"
#include "sceneforge/layout.hpp"
#include "sceneforge/priors.hpp"
#include "sceneforge/rng.hpp"

// Text to scene: parse, expand counts, infer, select models, place.

namespace sceneforge {

struct GenerateResult {
  SceneTemplate parsed;
  SceneTemplate explicitTemplate;  // parsed with counts expanded; metrics refer to it
  SceneTemplate completed;
  GeometricScene scene;
  LayoutScore score;
  std::vector<Warning> warnings;
  std::vector<PlacementTrace> trace;
};

inline InferenceConfig inference_config(const LayoutConfig& cfg) {
  InferenceConfig ic;
  ic.useSupportPriors = cfg.flags.useSupportPriors;
  ic.seed = mix_seed(cfg.rngSeed, 3);
  return ic;
}

inline GenerateResult generate_from_template(const SceneTemplate& parsed, const Catalog& c, const KnowledgeBase& kb,
                                             const LayoutConfig& cfg) {
  GenerateResult r;
  r.parsed = parsed;
  r.explicitTemplate = expand_counts(parsed);
  SceneTemplate working = cfg.flags.useSpatialConstraints ? r.explicitTemplate
                                                          : without_spatial_constraints(r.explicitTemplate);
  const InferenceConfig ic = inference_config(cfg);
  working = infer_support_parents(std::move(working), kb, ic);
  r.completed = infer_scene_objects(std::move(working), kb, cfg.flags.useInference, ic);
  const SupportTree tree = build_hierarchy(r.completed, c);
  Rng model_rng(mix_seed(cfg.rngSeed, 1));
  const auto models = select_models(r.completed, c, model_rng);
  LayoutEngine engine(c, kb, cfg);
  Rng place_rng(mix_seed(cfg.rngSeed, 2));
  r.scene = engine.place_scene(r.completed, tree, models, place_rng, &r.trace);
  r.score = engine.score(r.scene, r.completed);
  return r;
}

inline GenerateResult generate(const std::string& text, const Catalog& c, const KnowledgeBase& kb,
                               const LayoutConfig& cfg, const Lexicon& lx = default_lexicon()) {
  DescriptionParse p = parse_description_ex(text, &c.taxonomy(), lx);
  GenerateResult r = generate_from_template(p.tmpl, c, kb, cfg);
  r.warnings = std::move(p.warnings);
  return r;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

struct SceneMetrics {
  int instances = 0;
  int explicitConstraints = 0;
  int satisfied = 0;
  double constraintSatisfaction = 1.0;  // 1 when nothing was asked for
  int collisions = 0;
  double supportValidity = 1.0;
  double overhangMax = 0.0;
  bool degraded = false;
};

/// An instance is validly supported when its parent exists, its side fits
/// the surface, its transform matches its placement and it overhangs by at
/// most overhang_max.
inline bool support_valid(const GeometricScene& s, const Catalog& c, const ModelInstance& inst, double overhang_max) {
  if (!inst.placement.supportParent) return false;
  const ModelInstance* parent = s.find(*inst.placement.supportParent);
  if (!parent) return false;
  try {
    const Transform t = compose_transform(inst.placement, c.at(inst.modelId), parent_frame(s, inst, c));
    if (norm(t.translation - inst.transform.translation) > 1e-9) return false;
    return instance_overhang(s, c, inst) <= overhang_max + 1e-12;
  } catch (const Error&) {
    return false;
  }
}

inline SceneMetrics measure_scene(const GeometricScene& s, const SceneTemplate& explicit_template, const Catalog& c,
                                  double overhang_max = 0.05) {
  SceneMetrics m;
  m.instances = static_cast<int>(s.instances.size());
  m.degraded = s.degraded;
  for (const auto& rc : explicit_template.constraints) {
    if (rc.inferred) continue;
    ++m.explicitConstraints;
    if (s.find_object(rc.a) && s.find_object(rc.b) && relation_score(rc, s, c) > 0) ++m.satisfied;
  }
  if (m.explicitConstraints > 0) m.constraintSatisfaction = static_cast<double>(m.satisfied) / m.explicitConstraints;
  m.collisions = static_cast<int>(colliding_pairs(s, c).size());
  int supported = 0, valid = 0;
  for (const auto& inst : s.instances) {
    if (inst.category == kRoomCategory && !inst.placement.supportParent) continue;
    ++supported;
    if (support_valid(s, c, inst, overhang_max)) ++valid;
    if (inst.placement.supportParent) m.overhangMax = std::max(m.overhangMax, instance_overhang(s, c, inst));
  }
  if (supported > 0) m.supportValidity = static_cast<double>(valid) / supported;
  return m;
}

}  // namespace sceneforge
