#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/layout.hpp"
#include "sceneforge/pipeline.hpp"
#include "sceneforge/priors.hpp"

// Batch evaluation of descriptions under the condition variants.

namespace sceneforge {

struct EvalRow {
  Condition condition = Condition::full;
  int description = 0;  // index into the suite
  std::uint64_t seed = 0;
  SceneMetrics metrics;
  LayoutScore score;
};

struct EvalOptions {
  std::vector<Condition> conditions{Condition::basic, Condition::full};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int samplesPerObject = 30;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline std::vector<std::uint64_t> seed_range(int n, std::uint64_t first = 1) {
  std::vector<std::uint64_t> out;
  for (int k = 0; k < n; ++k) out.push_back(first + static_cast<std::uint64_t>(k));
  return out;
}

/// One description per line; blank lines and lines starting with '#' are
/// skipped.
inline std::vector<std::string> load_descriptions(const std::string& path) {
  std::istringstream in(detail::read_file(path));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  if (out.empty()) throw Error(ErrorCode::empty_input, path + ": no descriptions");
  return out;
}

inline EvalRow evaluate_one(const std::string& text, int index, Condition cond, std::uint64_t seed, const Catalog& c,
                            const KnowledgeBase& kb, int samples) {
  LayoutConfig cfg;
  cfg.flags = flags_for(cond);
  cfg.rngSeed = seed;
  cfg.samplesPerObject = samples;
  const GenerateResult g = generate(text, c, kb, cfg);
  EvalRow row;
  row.condition = cond;
  row.description = index;
  row.seed = seed;
  row.metrics = measure_scene(g.scene, g.explicitTemplate, c, cfg.overhangMax);
  row.score = g.score;
  return row;
}

/// Rows sorted by (condition, description, seed) whatever the thread count.
inline std::vector<EvalRow> run_eval(const std::vector<std::string>& descriptions, const Catalog& c,
                                     const KnowledgeBase& kb, const EvalOptions& opt) {
  struct Job {
    std::size_t cond, desc, seed;
  };
  std::vector<Job> jobs;
  for (std::size_t ci = 0; ci < opt.conditions.size(); ++ci)
    for (std::size_t d = 0; d < descriptions.size(); ++d)
      for (std::size_t s = 0; s < opt.seeds.size(); ++s) jobs.push_back({ci, d, s});
  std::vector<EvalRow> rows(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& j = jobs[k];
      try {
        rows[k] = evaluate_one(descriptions[j.desc], static_cast<int>(j.desc), opt.conditions[j.cond], opt.seeds[j.seed],
                               c, kb, opt.samplesPerObject);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, opt.threads ? opt.threads : std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

inline const char* kEvalCsvHeader =
    "condition,description,seed,instances,explicit_constraints,satisfied,constraint_satisfaction,collisions,"
    "support_validity,overhang_max,degraded,L,L_obj,L_rel";

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

inline std::string eval_csv(const std::vector<EvalRow>& rows) {
  std::ostringstream out;
  out << kEvalCsvHeader << "\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out << to_string(r.condition) << ',' << r.description << ',' << r.seed << ',' << m.instances << ','
        << m.explicitConstraints << ',' << m.satisfied << ',' << detail::fmt(m.constraintSatisfaction) << ','
        << m.collisions << ',' << detail::fmt(m.supportValidity) << ',' << detail::fmt(m.overhangMax) << ','
        << (m.degraded ? 1 : 0) << ',' << detail::fmt(r.score.L) << ',' << detail::fmt(r.score.L_obj) << ','
        << detail::fmt(r.score.L_rel) << "\n";
  }
  return out.str();
}

struct ConditionSummary {
  Condition condition = Condition::full;
  int rows = 0;
  double constraintSatisfaction = 0.0;  // mean over rows with explicit constraints
  int collisions = 0;
  double supportValidity = 0.0;  // mean over non-degraded rows
  int degraded = 0;
  double L = 0.0;
};

inline std::vector<ConditionSummary> summarize(const std::vector<EvalRow>& rows) {
  std::map<Condition, ConditionSummary> acc;
  std::map<Condition, int> with_constraints, clean;
  for (const auto& r : rows) {
    auto& s = acc[r.condition];
    s.condition = r.condition;
    ++s.rows;
    if (r.metrics.explicitConstraints > 0) {
      s.constraintSatisfaction += r.metrics.constraintSatisfaction;
      ++with_constraints[r.condition];
    }
    s.collisions += r.metrics.collisions;
    if (r.metrics.degraded) {
      ++s.degraded;
    } else {
      s.supportValidity += r.metrics.supportValidity;
      ++clean[r.condition];
    }
    s.L += r.score.L;
  }
  std::vector<ConditionSummary> out;
  for (auto& [cond, s] : acc) {
    if (with_constraints[cond]) s.constraintSatisfaction /= with_constraints[cond];
    s.supportValidity = clean[cond] ? s.supportValidity / clean[cond] : 1.0;
    s.L /= s.rows;
    out.push_back(s);
  }
  return out;
}

inline std::string summary_table(const std::vector<ConditionSummary>& rows) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %6s %10s %10s %10s %9s %8s\n", "condition", "rows", "satisfied", "collisions",
                "support", "degraded", "mean L");
  out << buf;
  for (const auto& s : rows) {
    std::snprintf(buf, sizeof buf, "%-12s %6d %10.4f %10d %10.4f %9d %8.4f\n", to_string(s.condition), s.rows,
                  s.constraintSatisfaction, s.collisions, s.supportValidity, s.degraded, s.L);
    out << buf;
  }
  return out.str();
}

}  // namespace sceneforge
