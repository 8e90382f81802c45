#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/corpus.hpp"
#include "sceneforge/json_util.hpp"
#include "sceneforge/rng.hpp"

namespace sceneforge {

inline constexpr int kBackoffK = 5;
inline constexpr int kKbVersion = 1;
inline constexpr double kMinBandwidth = 1e-3;
/// Wrap images on each side for the wrapped Gaussian in theta.
inline constexpr int kThetaWraps = 3;
/// Scene-type wildcard used by relpos back-off.
inline const std::string kAnyScene = "any";

// ---------------------------------------------------------------------------
// Relative-position density
// ---------------------------------------------------------------------------

/// Gaussian product KDE over (x, y, theta), theta wrapped.
struct RelposDensity {
  std::vector<RelposSample> samples;
  Vec3 bandwidth{kMinBandwidth, kMinBandwidth, kMinBandwidth};

  double operator()(double x, double y, double theta) const {
    if (samples.empty()) return 0.0;
    const double hx = bandwidth.x, hy = bandwidth.y, ht = bandwidth.z;
    const double norm = 1.0 / (std::pow(2.0 * kPi, 1.5) * hx * hy * ht);
    double sum = 0.0;
    for (const auto& s : samples) {
      const double dx = (x - s.x) / hx, dy = (y - s.y) / hy;
      const double exy = std::exp(-0.5 * (dx * dx + dy * dy));
      if (exy == 0.0) continue;
      double et = 0.0;
      const double off = wrap_angle(theta - s.theta + kPi) - kPi;
      for (int k = -kThetaWraps; k <= kThetaWraps; ++k) {
        const double dt = (off + kTwoPi * k) / ht;
        et += std::exp(-0.5 * dt * dt);
      }
      sum += exy * et;
    }
    return norm * sum / static_cast<double>(samples.size());
  }

  /// A stored sample plus kernel noise; theta wrapped to [0, 2pi).
  RelposSample sample(Rng& rng) const {
    if (samples.empty()) throw Error(ErrorCode::no_data, "cannot sample an empty relative-position density");
    const RelposSample& s = samples[rng.index(samples.size())];
    const double nx = rng.normal(), ny = rng.normal(), nt = rng.normal();
    return {s.x + bandwidth.x * nx, s.y + bandwidth.y * ny, wrap_angle(s.theta + bandwidth.z * nt)};
  }

  bool operator==(const RelposDensity&) const = default;
};

namespace detail {

inline double scott_bandwidth(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return kMinBandwidth;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return std::max(kMinBandwidth, std::pow(static_cast<double>(n), -1.0 / 7.0) * sd);
}

}  // namespace detail

/// Scott's rule per dimension for d = 3, floored at kMinBandwidth.
inline RelposDensity fit_density(std::vector<RelposSample> samples) {
  RelposDensity d;
  std::vector<double> xs, ys, ts;
  for (const auto& s : samples) {
    xs.push_back(s.x);
    ys.push_back(s.y);
    ts.push_back(s.theta);
  }
  d.bandwidth = {detail::scott_bandwidth(xs), detail::scott_bandwidth(ys), detail::scott_bandwidth(ts)};
  d.samples = std::move(samples);
  return d;
}

// ---------------------------------------------------------------------------
// Knowledge base
// ---------------------------------------------------------------------------

using ProbRow = std::map<std::string, double>;
using CountRow = std::map<std::string, long>;

/// Result of a back-off lookup.
struct Distribution {
  ProbRow probs;
  std::string category;  // category whose statistics were used
  bool uniformFallback = false;
  bool empty() const { return probs.empty(); }
};

struct ResolvedRelpos {
  RelposKey key;  // the key at which data was found
  std::shared_ptr<const RelposDensity> density;
};

class KnowledgeBase {
 public:
  int version = kKbVersion;
  Taxonomy taxonomy;
  std::map<std::string, ProbRow> occ;      // sceneType -> category -> P
  std::map<std::string, ProbRow> support;  // child -> parent -> P
  std::map<std::string, ProbRow> surfSup;  // child -> surface class -> P
  std::map<std::string, ProbRow> surfAtt;  // child -> box side -> P
  std::map<RelposKey, RelposDensity> relpos;

  std::map<std::string, long> sceneCounts;
  std::map<std::string, CountRow> occCounts;  // sceneType -> category -> scenes
  std::map<std::string, long> childCounts;
  std::map<std::string, CountRow> supportCounts;
  std::map<std::string, CountRow> surfSupCounts;
  std::map<std::string, CountRow> surfAttCounts;

  KnowledgeBase() = default;
  KnowledgeBase(const KnowledgeBase& o) { *this = o; }
  KnowledgeBase& operator=(const KnowledgeBase& o) {
    if (this == &o) return *this;
    version = o.version;
    taxonomy = o.taxonomy;
    occ = o.occ;
    support = o.support;
    surfSup = o.surfSup;
    surfAtt = o.surfAtt;
    relpos = o.relpos;
    sceneCounts = o.sceneCounts;
    occCounts = o.occCounts;
    childCounts = o.childCounts;
    supportCounts = o.supportCounts;
    surfSupCounts = o.surfSupCounts;
    surfAttCounts = o.surfAttCounts;
    std::lock_guard lock(mutex_);
    cache_.clear();
    return *this;
  }

  bool operator==(const KnowledgeBase& o) const {
    return version == o.version && taxonomy == o.taxonomy && occ == o.occ && support == o.support &&
           surfSup == o.surfSup && surfAtt == o.surfAtt && relpos == o.relpos && sceneCounts == o.sceneCounts &&
           occCounts == o.occCounts && childCounts == o.childCounts && supportCounts == o.supportCounts &&
           surfSupCounts == o.surfSupCounts && surfAttCounts == o.surfAttCounts;
  }

  double p_occ(const std::string& category, const std::string& scene_type) const {
    auto it = occ.find(scene_type);
    if (it == occ.end()) return 0.0;
    auto jt = it->second.find(category);
    return jt == it->second.end() ? 0.0 : jt->second;
  }

  /// Supported-instance count of a category, pooled over its taxonomy subtree.
  long pooled_count(const std::string& category) const {
    long n = 0;
    for (const auto& [c, k] : childCounts) {
      if (taxonomy.is_a(c, category)) n += k;
    }
    return n;
  }

  Distribution lookup_support(const std::string& child) const { return lookup(child, supportCounts, support, true); }
  Distribution lookup_surf_sup(const std::string& child) const { return lookup(child, surfSupCounts, surfSup, false); }
  Distribution lookup_surf_att(const std::string& child) const { return lookup(child, surfAttCounts, surfAtt, false); }

  /// Categories observed as a support parent anywhere in the corpus.
  std::set<std::string> observed_parents() const {
    std::set<std::string> out;
    for (const auto& [c, row] : supportCounts) {
      for (const auto& [p, n] : row) out.insert(p);
    }
    return out;
  }

  /// Relpos with back-off: the object category is generalized first, then
  /// the reference category, then the scene type widens to any scene.
  /// Ancestor levels pool all samples from their taxonomy subtree.
  std::optional<ResolvedRelpos> resolve_relpos(const RelposKey& key) const {
    {
      std::lock_guard lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    std::optional<ResolvedRelpos> found = resolve_uncached(key);
    std::lock_guard lock(mutex_);
    cache_.emplace(key, found);
    return found;
  }

  double relpos_density(const RelposKey& key, const RelposSample& p) const {
    auto r = resolve_relpos(key);
    return r ? (*r->density)(p.x, p.y, p.theta) : 0.0;
  }

  RelposSample sample_relpos(const RelposKey& key, Rng& rng) const {
    auto r = resolve_relpos(key);
    if (!r) throw Error(ErrorCode::no_data, "no relative-position data for " + to_string(key));
    return r->density->sample(rng);
  }

 private:
  std::vector<std::string> chain(const std::string& c) const {
    std::vector<std::string> out{c};
    for (const auto& a : taxonomy.ancestors(c)) {
      if (a != taxonomy.root()) out.push_back(a);
    }
    return out;
  }

  Distribution lookup(const std::string& child, const std::map<std::string, CountRow>& counts,
                      const std::map<std::string, ProbRow>& rows, bool uniform_over_parents) const {
    Distribution d;
    auto own = childCounts.find(child);
    if (own != childCounts.end() && own->second >= kBackoffK) {
      d.category = child;
      auto r = rows.find(child);
      if (r != rows.end()) d.probs = r->second;
      return d;
    }
    for (const auto& a : taxonomy.ancestors(child)) {
      if (a == taxonomy.root()) break;
      const long total = pooled_count(a);
      if (total < kBackoffK) continue;
      CountRow pooled;
      for (const auto& [c, row] : counts) {
        if (!taxonomy.is_a(c, a)) continue;
        for (const auto& [k, n] : row) pooled[k] += n;
      }
      d.category = a;
      for (const auto& [k, n] : pooled) d.probs[k] = static_cast<double>(n) / static_cast<double>(total);
      return d;
    }
    d.category = taxonomy.root();
    d.uniformFallback = true;
    if (uniform_over_parents) {
      const auto parents = observed_parents();
      for (const auto& p : parents) d.probs[p] = 1.0 / static_cast<double>(parents.size());
    }
    return d;
  }

  std::optional<ResolvedRelpos> resolve_uncached(const RelposKey& key) const {
    const auto objs = chain(key.obj);
    const auto refs = chain(key.ref);
    for (const std::string& scene : {key.sceneType, kAnyScene}) {
      for (const auto& ref : refs) {
        for (const auto& obj : objs) {
          const RelposKey level{obj, ref, scene, key.relation};
          auto it = relpos.find(level);
          if (it != relpos.end() && !it->second.samples.empty()) {
            return ResolvedRelpos{level, std::make_shared<const RelposDensity>(it->second)};
          }
          const bool exact = obj == key.obj && ref == key.ref && scene != kAnyScene;
          if (exact) continue;
          std::vector<RelposSample> pooled;
          for (const auto& [k, d] : relpos) {
            if (k.relation != key.relation) continue;
            if (scene != kAnyScene && k.sceneType != scene) continue;
            if (!taxonomy.is_a(k.obj, obj) || !taxonomy.is_a(k.ref, ref)) continue;
            pooled.insert(pooled.end(), d.samples.begin(), d.samples.end());
          }
          if (!pooled.empty()) {
            return ResolvedRelpos{level, std::make_shared<const RelposDensity>(fit_density(std::move(pooled)))};
          }
        }
      }
    }
    return std::nullopt;
  }

  mutable std::mutex mutex_;
  mutable std::map<RelposKey, std::optional<ResolvedRelpos>> cache_;
};

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

inline std::map<std::string, ProbRow> estimate_occurrence(const ObservationSet& obs) {
  std::map<std::string, ProbRow> out;
  for (const auto& [key, n] : obs.occCounts) {
    const auto& [cat, scene] = key;
    auto it = obs.sceneCounts.find(scene);
    if (it == obs.sceneCounts.end() || it->second <= 0) continue;
    out[scene][cat] = static_cast<double>(n) / static_cast<double>(it->second);
  }
  return out;
}

namespace detail {

template <class K>
std::map<std::string, ProbRow> ratio_rows(const std::map<std::pair<std::string, K>, long>& counts,
                                          const std::map<std::string, long>& totals) {
  std::map<std::string, ProbRow> out;
  for (const auto& [key, n] : counts) {
    const long total = totals.at(key.first);
    std::string col;
    if constexpr (std::is_same_v<K, std::string>) col = key.second;
    else col = to_string(key.second);
    out[key.first][col] = static_cast<double>(n) / static_cast<double>(total);
  }
  return out;
}

template <class K>
std::map<std::string, CountRow> count_rows(const std::map<std::pair<std::string, K>, long>& counts) {
  std::map<std::string, CountRow> out;
  for (const auto& [key, n] : counts) {
    if constexpr (std::is_same_v<K, std::string>) out[key.first][key.second] += n;
    else out[key.first][to_string(key.second)] += n;
  }
  return out;
}

}  // namespace detail

inline std::map<std::string, ProbRow> estimate_support(const ObservationSet& obs) {
  return detail::ratio_rows(obs.supportCounts, obs.childCounts);
}

inline std::pair<std::map<std::string, ProbRow>, std::map<std::string, ProbRow>> estimate_surface_priors(
    const ObservationSet& obs) {
  return {detail::ratio_rows(obs.surfSupCounts, obs.childCounts), detail::ratio_rows(obs.surfAttCounts, obs.childCounts)};
}

inline std::map<RelposKey, RelposDensity> fit_relpos(const ObservationSet& obs) {
  std::map<RelposKey, RelposDensity> out;
  for (const auto& [key, samples] : obs.relposSamples) {
    if (!samples.empty()) out.emplace(key, fit_density(samples));
  }
  return out;
}

inline KnowledgeBase estimate_kb(const ObservationSet& obs, const Taxonomy& taxonomy) {
  KnowledgeBase kb;
  kb.taxonomy = taxonomy;
  kb.occ = estimate_occurrence(obs);
  kb.support = estimate_support(obs);
  std::tie(kb.surfSup, kb.surfAtt) = estimate_surface_priors(obs);
  kb.relpos = fit_relpos(obs);
  kb.sceneCounts = obs.sceneCounts;
  for (const auto& [key, n] : obs.occCounts) kb.occCounts[key.second][key.first] += n;
  kb.childCounts = obs.childCounts;
  kb.supportCounts = detail::count_rows(obs.supportCounts);
  kb.surfSupCounts = detail::count_rows(obs.surfSupCounts);
  kb.surfAttCounts = detail::count_rows(obs.surfAttCounts);
  return kb;
}

inline KnowledgeBase learn_kb(const SceneCorpus& corpus, const Catalog& catalog) {
  return estimate_kb(extract_observations(corpus, catalog), catalog.taxonomy());
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::optional<RelposKey> parse_relpos_key(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '|') {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() != 4) return std::nullopt;
  RelposKey k{parts[0], parts[1], parts[2], RelationKind::Sibling};
  if (parts[3] == "ChildParent") k.relation = RelationKind::ChildParent;
  else if (parts[3] != "Sibling") return std::nullopt;
  return k;
}

inline OrderedJson kb_to_json(const KnowledgeBase& kb) {
  OrderedJson j;
  j["version"] = kb.version;
  j["taxonomy"] = {{"root", kb.taxonomy.root()}, {"parentOf", kb.taxonomy.parent_of()}};
  j["occ"] = kb.occ;
  j["support"] = kb.support;
  j["surfSup"] = kb.surfSup;
  j["surfAtt"] = kb.surfAtt;
  OrderedJson rel = OrderedJson::object();
  for (const auto& [k, d] : kb.relpos) {
    OrderedJson samples = OrderedJson::array();
    for (const auto& s : d.samples) samples.push_back({s.x, s.y, s.theta});
    rel[to_string(k)] = {{"samples", samples}, {"bandwidth", detail::to_json(d.bandwidth)}};
  }
  j["relpos"] = rel;
  j["counts"] = {{"scenes", kb.sceneCounts},         {"occ", kb.occCounts},         {"children", kb.childCounts},
                 {"support", kb.supportCounts},      {"surfSup", kb.surfSupCounts}, {"surfAtt", kb.surfAttCounts}};
  return j;
}

inline KnowledgeBase kb_from_json(const Json& j, const std::string& where = "kb") {
  KnowledgeBase kb;
  try {
    if (!j.is_object() || !j.contains("version")) throw Error(ErrorCode::corrupt_file, where + ": missing version");
    const int version = j["version"].get<int>();
    if (version != kKbVersion) {
      throw Error(ErrorCode::version_mismatch,
                  where + ": knowledge base version " + std::to_string(version) + ", expected " + std::to_string(kKbVersion));
    }
    for (const char* key : {"taxonomy", "occ", "support", "surfSup", "surfAtt", "relpos", "counts"}) {
      if (!j.contains(key)) throw Error(ErrorCode::corrupt_file, where + ": missing '" + key + "'");
    }
    kb.version = version;
    kb.taxonomy = Taxonomy(j["taxonomy"]["parentOf"].get<std::map<std::string, std::string>>(),
                           j["taxonomy"]["root"].get<std::string>());
    kb.occ = j["occ"].get<std::map<std::string, ProbRow>>();
    kb.support = j["support"].get<std::map<std::string, ProbRow>>();
    kb.surfSup = j["surfSup"].get<std::map<std::string, ProbRow>>();
    kb.surfAtt = j["surfAtt"].get<std::map<std::string, ProbRow>>();
    for (auto it = j["relpos"].begin(); it != j["relpos"].end(); ++it) {
      auto key = parse_relpos_key(it.key());
      if (!key) throw Error(ErrorCode::corrupt_file, where + ": bad relpos key '" + it.key() + "'");
      RelposDensity d;
      for (const auto& s : it.value().at("samples")) {
        d.samples.push_back({s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()});
      }
      d.bandwidth = detail::vec3_from(it.value().at("bandwidth"), where + ".relpos.bandwidth");
      kb.relpos.emplace(*key, std::move(d));
    }
    const auto& c = j["counts"];
    kb.sceneCounts = c.at("scenes").get<std::map<std::string, long>>();
    kb.occCounts = c.at("occ").get<std::map<std::string, CountRow>>();
    kb.childCounts = c.at("children").get<std::map<std::string, long>>();
    kb.supportCounts = c.at("support").get<std::map<std::string, CountRow>>();
    kb.surfSupCounts = c.at("surfSup").get<std::map<std::string, CountRow>>();
    kb.surfAttCounts = c.at("surfAtt").get<std::map<std::string, CountRow>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::corrupt_file, where + ": " + e.what());
  }
  return kb;
}

inline std::string kb_to_string(const KnowledgeBase& kb) { return kb_to_json(kb).dump(1) + "\n"; }

inline void save_kb(const KnowledgeBase& kb, const std::string& path) { detail::write_file(path, kb_to_string(kb)); }

inline KnowledgeBase load_kb(const std::string& path) {
  const std::string text = detail::read_file(path);
  return kb_from_json(detail::parse_json(text, path, ErrorCode::corrupt_file), path);
}

}  // namespace sceneforge
