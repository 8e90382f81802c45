// Command-line front end: synth, learn, generate, repl, eval, replay, serve.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sceneforge/catalog.hpp"
#include "sceneforge/corpus.hpp"
#include "sceneforge/eval.hpp"
#include "sceneforge/http_service.hpp"
#include "sceneforge/pipeline.hpp"
#include "sceneforge/priors.hpp"
#include "sceneforge/service.hpp"
#include "sceneforge/synth.hpp"

namespace fs = std::filesystem;
using namespace sceneforge;

namespace {

const std::string kDefaultData = SCENEFORGE_DATA_DIR;

struct Common {
  std::string catalog = kDefaultData + "/catalog.json";
  std::string kb = kDefaultData + "/kb.json";
  std::uint64_t seed = 1;
  std::string condition = "full";
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c, bool kb = true) {
  cmd->add_option("--catalog", c.catalog, "Model catalog JSON")->capture_default_str();
  if (kb) cmd->add_option("--kb", c.kb, "Knowledge base JSON")->capture_default_str();
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    detail::write_file(out, text);
    spdlog::info("wrote {}", out);
  }
}

std::string read_text_arg(const std::string& text, const std::string& file) {
  if (!file.empty()) return detail::read_file(file);
  if (text.empty()) throw Error(ErrorCode::empty_input, "no description given");
  return text;
}

/// Support tree with placements, one instance per line.
std::string render_state(const SceneState& z) {
  std::ostringstream out;
  const auto& s = z.scene;
  std::function<void(const std::string&, int)> walk = [&](const std::string& id, int depth) {
    const ModelInstance* i = s.find(id);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%*s%s [%s]", depth * 2, "", i->id.c_str(), i->modelId.c_str());
    out << buf;
    if (i->placement.supportParent) {
      std::snprintf(buf, sizeof buf, " surface %d %s pos (%.3f, %.3f) yaw %.1f scale %.2f", i->placement.supportSurface,
                    to_string(i->placement.attachmentSide), i->placement.posOnSurface.x, i->placement.posOnSurface.y,
                    i->placement.yaw * 180.0 / kPi, i->placement.scale);
      out << buf;
    }
    if (z.selection.count(id)) out << " *";
    if (i->degraded) out << " (degraded)";
    out << "\n";
    for (const auto& child : s.children_of(id)) walk(child, depth + 1);
  };
  for (const auto& i : s.instances) {
    if (!i.placement.supportParent) walk(i.id, 0);
  }
  return out.str();
}

int cmd_synth(const Common& c, int scenes) {
  const Catalog catalog = load_catalog(c.catalog);
  SynthOptions opt;
  opt.seed = c.seed;
  opt.scenesPerType = scenes;
  const SceneCorpus corpus = synthesize_corpus(catalog, opt);
  if (c.out.empty()) throw Error(ErrorCode::invalid_argument, "synth needs --out DIR");
  const fs::path rel = fs::relative(fs::absolute(c.catalog), fs::absolute(c.out));
  save_corpus(corpus, c.out, rel.string());
  std::cout << "scenes " << corpus.scenes.size() << "\n";
  return 0;
}

int cmd_learn(const Common& c, const std::string& corpus_dir) {
  const Catalog catalog = load_catalog(c.catalog);
  const SceneCorpus corpus = load_corpus(corpus_dir);
  const KnowledgeBase kb = learn_kb(corpus, catalog);
  if (c.out.empty()) throw Error(ErrorCode::invalid_argument, "learn needs --out FILE");
  save_kb(kb, c.out);
  std::size_t support = 0, surf_sup = 0, surf_att = 0, occ = 0;
  for (const auto& [k, row] : kb.occ) occ += row.size();
  for (const auto& [k, row] : kb.support) support += row.size();
  for (const auto& [k, row] : kb.surfSup) surf_sup += row.size();
  for (const auto& [k, row] : kb.surfAtt) surf_att += row.size();
  std::cout << "scenes " << corpus.scenes.size() << "\n"
            << "occurrence " << occ << "\n"
            << "support " << support << "\n"
            << "surface_support " << surf_sup << "\n"
            << "surface_attachment " << surf_att << "\n"
            << "relpos_keys " << kb.relpos.size() << "\n";
  return 0;
}

int cmd_generate(const Common& c, const std::string& text, const std::string& file, int samples) {
  const Catalog catalog = load_catalog(c.catalog);
  const KnowledgeBase kb = load_kb(c.kb);
  LayoutConfig cfg;
  cfg.flags = flags_for(condition_from(c.condition));
  cfg.rngSeed = c.seed;
  cfg.samplesPerObject = samples;
  const GenerateResult g = generate(read_text_arg(text, file), catalog, kb, cfg);
  for (const auto& w : g.warnings) spdlog::warn("{}", w.message);
  const SceneMetrics m = measure_scene(g.scene, g.explicitTemplate, catalog, cfg.overhangMax);
  if (c.format == "text") {
    SceneState z;
    z.scene = g.scene;
    std::ostringstream out;
    out << render_state(z);
    out << "L " << g.score.L << " L_obj " << g.score.L_obj << " L_rel " << g.score.L_rel << " collisions "
        << m.collisions << " overhangMax " << m.overhangMax << "\n";
    emit(c.out, out.str());
    return 0;
  }
  OrderedJson j;
  j["condition"] = c.condition;
  j["seed"] = c.seed;
  j["template"] = to_json(g.completed);
  j["scene"] = scene_to_json(g.scene);
  j["score"] = {{"L", g.score.L}, {"L_obj", g.score.L_obj}, {"L_rel", g.score.L_rel}};
  j["report"] = {{"collisions", m.collisions},
                 {"overhangMax", m.overhangMax},
                 {"constraintSatisfaction", m.constraintSatisfaction},
                 {"supportValidity", m.supportValidity},
                 {"degraded", m.degraded}};
  emit(c.out, j.dump(1) + "\n");
  return 0;
}

int cmd_repl(const Common& c) {
  const Catalog catalog = load_catalog(c.catalog);
  const KnowledgeBase kb = load_kb(c.kb);
  ServiceContext ctx{catalog, kb};
  SessionConfig sc;
  sc.seed = c.seed;
  sc.condition = condition_from(c.condition);
  Session session("repl", sc, ctx);
  std::cout << render_state(session.state()) << std::flush;
  for (std::string line; std::cout << "> " << std::flush, std::getline(std::cin, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line == ":quit" || line == ":q") return 0;
    if (line.rfind(":save", 0) == 0) {
      const std::string path = line.size() > 6 ? line.substr(6) : "session.json";
      try {
        save_session(session, path);
        std::cout << "saved " << path << "\n";
      } catch (const Error& e) {
        std::cout << "error: " << e.what() << "\n";
      }
      continue;
    }
    if (line == ":scene") {
      std::cout << state_to_string(session.state());
      continue;
    }
    try {
      const SubmitResult r = session.submit(line);
      for (const auto& w : r.warnings) std::cout << "warning: " << w.message << "\n";
      std::cout << render_state(session.state());
    } catch (const Error& e) {
      std::cout << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    }
  }
  return 0;
}

int cmd_eval(const Common& c, const std::string& descriptions, const std::vector<std::string>& conditions, int seeds,
             int samples, unsigned threads) {
  const Catalog catalog = load_catalog(c.catalog);
  const KnowledgeBase kb = load_kb(c.kb);
  EvalOptions opt;
  opt.conditions.clear();
  for (const auto& name : conditions) opt.conditions.push_back(condition_from(name));
  opt.seeds = seed_range(seeds, c.seed);
  opt.samplesPerObject = samples;
  opt.threads = threads;
  const auto rows = run_eval(load_descriptions(descriptions), catalog, kb, opt);
  const auto summary = summarize(rows);
  if (c.format == "csv") {
    emit(c.out, eval_csv(rows));
  } else {
    OrderedJson j;
    j["rows"] = OrderedJson::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"condition", to_string(r.condition)},
                           {"description", r.description},
                           {"seed", r.seed},
                           {"instances", r.metrics.instances},
                           {"explicitConstraints", r.metrics.explicitConstraints},
                           {"satisfied", r.metrics.satisfied},
                           {"constraintSatisfaction", r.metrics.constraintSatisfaction},
                           {"collisions", r.metrics.collisions},
                           {"supportValidity", r.metrics.supportValidity},
                           {"overhangMax", r.metrics.overhangMax},
                           {"degraded", r.metrics.degraded},
                           {"L", r.score.L},
                           {"L_obj", r.score.L_obj},
                           {"L_rel", r.score.L_rel}});
    }
    emit(c.out, j.dump(1) + "\n");
  }
  std::cerr << summary_table(summary);
  return 0;
}

int cmd_replay(const Common& c, const std::string& session_file) {
  const Catalog catalog = load_catalog(c.catalog);
  const KnowledgeBase kb = load_kb(c.kb);
  const auto session = load_session(session_file, ServiceContext{catalog, kb});
  emit(c.out, state_to_string(session->state()));
  return 0;
}

int cmd_serve(const Common& c, const std::string& host, int port) {
  const Catalog catalog = load_catalog(c.catalog);
  const KnowledgeBase kb = load_kb(c.kb);
  SessionManager sessions(ServiceContext{catalog, kb});
  httplib::Server server;
  install_routes(server, sessions);
  server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::info("{} {} {}", req.method, req.path, res.status);
  });
  spdlog::info("listening on {}:{}", host, port);
  if (!server.listen(host, port)) throw Error(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("sceneforge");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("SCENEFORGE_LOG")) spdlog::set_level(spdlog::level::from_str(level));

  CLI::App app{"Text to 3D scene generation and editing"};
  app.require_subcommand(1);
  Common c;

  auto* synth = app.add_subcommand("synth", "Write a synthetic scene corpus");
  int scenes = SynthOptions{}.scenesPerType;
  add_common(synth, c, false);
  synth->add_option("--seed", c.seed)->capture_default_str();
  synth->add_option("--scenes-per-type", scenes)->capture_default_str();
  synth->add_option("--out", c.out, "Output directory")->required();

  auto* learn = app.add_subcommand("learn", "Learn a knowledge base from a corpus");
  std::string corpus_dir;
  add_common(learn, c, false);
  learn->add_option("corpus", corpus_dir, "Corpus directory")->required();
  learn->add_option("--out", c.out, "Output KB file")->required();

  auto* gen = app.add_subcommand("generate", "Generate a scene from a description");
  std::string text, file;
  int samples = LayoutConfig{}.samplesPerObject;
  add_common(gen, c);
  gen->add_option("text", text, "Description");
  gen->add_option("--file", file, "Read the description from a file");
  gen->add_option("--seed", c.seed)->capture_default_str();
  gen->add_option("--condition", c.condition)->capture_default_str();
  gen->add_option("--samples", samples)->capture_default_str();
  gen->add_option("--out", c.out, "Output file (stdout if omitted)");
  gen->add_option("--format", c.format)->check(CLI::IsMember({"json", "text"}))->capture_default_str();

  auto* repl = app.add_subcommand("repl", "Interactive session on standard input");
  add_common(repl, c);
  repl->add_option("--seed", c.seed)->capture_default_str();
  repl->add_option("--condition", c.condition)->capture_default_str();

  auto* ev = app.add_subcommand("eval", "Evaluate a description suite under several conditions");
  std::string descriptions = kDefaultData + "/descriptions.txt";
  std::vector<std::string> conditions{"basic", "full"};
  int seeds = 5;
  unsigned threads = 0;
  add_common(ev, c);
  ev->add_option("descriptions", descriptions, "One description per line")->capture_default_str();
  ev->add_option("--conditions", conditions)->delimiter(',')->capture_default_str();
  ev->add_option("--seeds", seeds, "Number of seeds")->capture_default_str();
  ev->add_option("--seed", c.seed, "First seed")->capture_default_str();
  ev->add_option("--samples", samples)->capture_default_str();
  ev->add_option("--threads", threads, "0 = hardware concurrency")->capture_default_str();
  ev->add_option("--out", c.out, "Output file (stdout if omitted)");
  ev->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto* replay = app.add_subcommand("replay", "Replay a saved session and print its final state");
  std::string session_file;
  add_common(replay, c);
  replay->add_option("session", session_file, "Session file written by :save")->required();
  replay->add_option("--out", c.out, "Output file (stdout if omitted)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string host = "127.0.0.1";
  int port = 8080;
  add_common(serve, c);
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth) return cmd_synth(c, scenes);
    if (*learn) return cmd_learn(c, corpus_dir);
    if (*gen) return cmd_generate(c, text, file, samples);
    if (*repl) return cmd_repl(c);
    if (*ev) return cmd_eval(c, descriptions, conditions, seeds, samples, threads);
    if (*replay) return cmd_replay(c, session_file);
    if (*serve) return cmd_serve(c, host, port);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
