#pragma once

#include <chrono>
#include <ctime>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/interact.hpp"
#include "sceneforge/json_util.hpp"
#include "sceneforge/lang.hpp"
#include "sceneforge/layout.hpp"
#include "sceneforge/pipeline.hpp"
#include "sceneforge/priors.hpp"
#include "sceneforge/rng.hpp"

// Sessions: a scene state plus the journal of utterances that produced it.

namespace sceneforge {

inline constexpr int kSessionFileVersion = 1;

struct SessionConfig {
  std::uint64_t seed = 1;
  Condition condition = Condition::full;
  int samplesPerObject = 30;
};

template <class J>
SessionConfig session_config_from_json(const J& j) {
  SessionConfig c;
  if (!j.is_object()) throw Error(ErrorCode::parse, "session config must be an object");
  try {
    c.seed = j.value("seed", c.seed);
    c.condition = condition_from(j.value("condition", std::string(to_string(c.condition))));
    c.samplesPerObject = j.value("samplesPerObject", c.samplesPerObject);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("session config: ") + e.what());
  }
  if (c.samplesPerObject < 1) throw Error(ErrorCode::invalid_argument, "samplesPerObject must be at least 1");
  return c;
}

inline OrderedJson to_json(const SessionConfig& c) {
  return {{"seed", c.seed}, {"condition", to_string(c.condition)}, {"samplesPerObject", c.samplesPerObject}};
}

struct JournalEntry {
  std::string timestamp;
  std::string rawText;
  OrderedJson parsed;  // template for descriptions, operation list for commands
  std::vector<std::string> changedIds;
};

inline OrderedJson to_json(const JournalEntry& e) {
  return {{"timestamp", e.timestamp}, {"rawText", e.rawText}, {"parsedOp", e.parsed}, {"changedIds", e.changedIds}};
}

struct SubmitResult {
  OrderedJson parsed;
  std::vector<std::string> changedIds;
  std::vector<Warning> warnings;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Shared, immutable inputs of every session.
struct ServiceContext {
  const Catalog& catalog;
  const KnowledgeBase& kb;
  const Lexicon& lexicon = default_lexicon();
};

class Session {
 public:
  Session(std::string id, SessionConfig cfg, const ServiceContext& ctx)
      : id_(std::move(id)), cfg_(cfg), ctx_(ctx), state_(empty_state(ctx.catalog)) {
    createdAt_ = updatedAt_ = utc_timestamp();
  }

  const std::string& id() const { return id_; }
  const SessionConfig& config() const { return cfg_; }
  const SceneState& state() const { return state_; }
  const std::vector<JournalEntry>& journal() const { return journal_; }
  const std::string& created_at() const { return createdAt_; }
  const std::string& updated_at() const { return updatedAt_; }
  std::mutex& mutex() { return mutex_; }

  /// Seeds every utterance from (session seed, journal length) so replay
  /// reproduces the state exactly. The state is untouched on error.
  SubmitResult submit(const std::string& text) {
    const std::uint64_t seed = mix_seed(cfg_.seed, journal_.size());
    LayoutConfig lc;
    lc.flags = flags_for(cfg_.condition);
    lc.samplesPerObject = cfg_.samplesPerObject;
    lc.rngSeed = seed;
    SubmitResult r;
    SceneState next;
    if (!is_command(text, ctx_.lexicon, &ctx_.catalog.taxonomy())) {
      GenerateResult g = generate(text, ctx_.catalog, ctx_.kb, lc, ctx_.lexicon);
      next.scene = std::move(g.scene);
      next.tmpl = std::move(g.completed);
      r.parsed = to_json(g.parsed);
      r.warnings = std::move(g.warnings);
      r.changedIds = changed_ids(state_.scene, next.scene);
    } else {
      CommandParse p = parse_command_ex(text, &ctx_.catalog.taxonomy(), ctx_.lexicon);
      r.parsed = OrderedJson::array();
      for (const auto& op : p.operations) r.parsed.push_back(to_json(op));
      r.warnings = std::move(p.warnings);
      next = state_;
      InteractContext ic{ctx_.catalog, ctx_.kb, lc};
      Rng rng(seed);
      std::set<std::string> changed;
      for (const auto& op : p.operations) {
        OperationResult o = apply_operation(op, next, ic, rng);
        next = std::move(o.state);
        changed.insert(o.changed.begin(), o.changed.end());
        r.warnings.insert(r.warnings.end(), o.warnings.begin(), o.warnings.end());
      }
      r.changedIds.assign(changed.begin(), changed.end());
    }
    state_ = std::move(next);
    updatedAt_ = utc_timestamp();
    journal_.push_back({updatedAt_, text, r.parsed, r.changedIds});
    return r;
  }

  OrderedJson journal_json() const {
    OrderedJson j = OrderedJson::array();
    for (const auto& e : journal_) j.push_back(to_json(e));
    return j;
  }

  OrderedJson to_file_json() const {
    OrderedJson j;
    j["version"] = kSessionFileVersion;
    j["id"] = id_;
    j["config"] = to_json(cfg_);
    j["createdAt"] = createdAt_;
    j["updatedAt"] = updatedAt_;
    j["journal"] = journal_json();
    return j;
  }

 private:
  std::string id_;
  SessionConfig cfg_;
  const ServiceContext& ctx_;
  SceneState state_;
  std::vector<JournalEntry> journal_;
  std::string createdAt_, updatedAt_;
  std::mutex mutex_;
};

inline void save_session(const Session& s, const std::string& path) {
  detail::write_file(path, s.to_file_json().dump(1) + "\n");
}

/// Rebuilds a session by replaying its journal; the recorded changed ids
/// must come out the same.
inline std::unique_ptr<Session> load_session(const std::string& path, const ServiceContext& ctx) {
  Json j;
  try {
    j = Json::parse(detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::corrupt_file, path + ": " + e.what());
  }
  std::unique_ptr<Session> s;
  try {
    if (!j.is_object() || !j.contains("journal") || !j["journal"].is_array()) {
      throw Error(ErrorCode::corrupt_file, path + ": not a session file");
    }
    if (j.value("version", 0) != kSessionFileVersion) {
      throw Error(ErrorCode::version_mismatch, path + ": unsupported session file version");
    }
    s = std::make_unique<Session>(j.at("id").get<std::string>(), session_config_from_json(j.at("config")), ctx);
    for (const auto& e : j["journal"]) {
      const SubmitResult r = s->submit(e.at("rawText").get<std::string>());
      if (e.contains("changedIds") && e["changedIds"].get<std::vector<std::string>>() != r.changedIds) {
        throw Error(ErrorCode::corrupt_file, path + ": replay diverged at '" + e["rawText"].get<std::string>() + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::corrupt_file, path + ": " + e.what());
  }
  return s;
}

class SessionManager {
 public:
  explicit SessionManager(ServiceContext ctx) : ctx_(ctx) {}

  const ServiceContext& context() const { return ctx_; }

  std::string create(const SessionConfig& cfg = {}) {
    std::lock_guard lock(mutex_);
    std::string id;
    do {
      id = new_id();
    } while (sessions_.count(id));
    sessions_[id] = std::make_shared<Session>(id, cfg, ctx_);
    return id;
  }

  std::shared_ptr<Session> get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::unknown_session, "unknown session '" + id + "'");
    return it->second;
  }

  /// Commands on one session never interleave: a submission that finds the
  /// session busy is rejected.
  std::pair<SubmitResult, OrderedJson> submit(const std::string& id, const std::string& text) {
    auto s = get(id);
    std::unique_lock lock(s->mutex(), std::try_to_lock);
    if (!lock.owns_lock()) throw Error(ErrorCode::busy, "session '" + id + "' is busy");
    SubmitResult r = s->submit(text);
    return {std::move(r), state_to_json(s->state())};
  }

  OrderedJson scene(const std::string& id) const {
    auto s = get(id);
    std::lock_guard lock(s->mutex());
    return state_to_json(s->state());
  }

  OrderedJson journal(const std::string& id) const {
    auto s = get(id);
    std::lock_guard lock(s->mutex());
    return s->journal_json();
  }

  void adopt(std::shared_ptr<Session> s) {
    std::lock_guard lock(mutex_);
    sessions_[s->id()] = std::move(s);
  }

 private:
  std::string new_id() {
    static const char* hex = "0123456789abcdef";
    std::string out = "s";
    std::uint64_t v = id_rng_();
    for (int k = 0; k < 16; ++k, v >>= 4) out += hex[v & 15];
    return out;
  }

  ServiceContext ctx_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 id_rng_{std::random_device{}()};
};

}  // namespace sceneforge
