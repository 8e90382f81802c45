#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/json_util.hpp"
#include "sceneforge/lexicon_data.hpp"
#include "sceneforge/scene_template.hpp"

namespace sceneforge {

/// Word lists of the controlled grammar. Multi-word entries are stored with
/// single spaces between words.
struct Lexicon {
  std::map<std::string, std::string> verbs;  // phrase -> operation name or "PlaceOrMove"
  std::map<std::string, double> scaleFactors;
  std::map<std::string, Predicate> prepositions;
  std::map<std::string, Predicate> directions;
  std::map<std::string, Attribute> attributes;
  std::map<std::string, std::string> attributeWords;  // "kind:value" -> preferred adjective
  std::map<std::string, std::string> aliases;
  std::map<std::string, std::string> plurals;
  std::map<std::string, int> numbers;
  std::map<std::string, std::string> sceneTypes;
  std::set<std::string> definite;
  std::set<std::string> indefinite;
  std::set<std::string> pronouns;
  std::set<std::string> stopwords;
  std::set<std::string> compounds;  // multi-word category names, spaced

  /// Adjective that parses back to the attribute.
  std::string word_for(const Attribute& a) const {
    auto it = attributeWords.find(std::string(to_string(a.kind)) + ":" + a.value);
    return it != attributeWords.end() ? it->second : a.value;
  }

  /// Adds the multi-word categories of a taxonomy to the compound list.
  void add_compounds(const Taxonomy& t) {
    for (const auto& c : t.categories()) {
      if (c.find('_') == std::string::npos) continue;
      std::string spaced = c;
      for (auto& ch : spaced) {
        if (ch == '_') ch = ' ';
      }
      compounds.insert(spaced);
    }
  }
};

namespace detail {

template <class V, class J, class F>
std::map<std::string, V> map_from(const J& j, F convert) {
  std::map<std::string, V> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = convert(it.value());
  return out;
}

}  // namespace detail

inline Lexicon lexicon_from_json(const Json& j) {
  Lexicon lx;
  try {
    auto str = [](const Json& v) { return v.get<std::string>(); };
    auto pred = [](const Json& v) {
      auto p = predicate_from(v.get<std::string>());
      if (!p) throw Error(ErrorCode::parse, "lexicon: unknown predicate '" + v.get<std::string>() + "'");
      return *p;
    };
    lx.verbs = detail::map_from<std::string>(j.at("verbs"), str);
    lx.scaleFactors = detail::map_from<double>(j.at("scaleFactors"), [](const Json& v) { return v.get<double>(); });
    lx.prepositions = detail::map_from<Predicate>(j.at("prepositions"), pred);
    lx.directions = detail::map_from<Predicate>(j.at("directions"), pred);
    lx.attributes = detail::map_from<Attribute>(j.at("attributes"), [](const Json& v) {
      auto kind = attribute_kind_from(v.at(0).get<std::string>());
      if (!kind) throw Error(ErrorCode::parse, "lexicon: unknown attribute kind");
      return Attribute{*kind, v.at(1).get<std::string>()};
    });
    if (j.contains("attributeWords")) lx.attributeWords = detail::map_from<std::string>(j["attributeWords"], str);
    lx.aliases = detail::map_from<std::string>(j.at("aliases"), str);
    lx.plurals = detail::map_from<std::string>(j.at("plurals"), str);
    lx.numbers = detail::map_from<int>(j.at("numbers"), [](const Json& v) { return v.get<int>(); });
    lx.sceneTypes = detail::map_from<std::string>(j.at("sceneTypes"), str);
    for (const auto& w : j.at("determiners").at("definite")) lx.definite.insert(w.get<std::string>());
    for (const auto& w : j.at("determiners").at("indefinite")) lx.indefinite.insert(w.get<std::string>());
    for (const auto& w : j.at("pronouns")) lx.pronouns.insert(w.get<std::string>());
    for (const auto& w : j.at("stopwords")) lx.stopwords.insert(w.get<std::string>());
    if (j.contains("compounds")) {
      for (const auto& w : j["compounds"]) lx.compounds.insert(w.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, std::string("lexicon: ") + e.what());
  }
  for (const auto& [k, v] : lx.aliases) {
    if (k.find(' ') != std::string::npos) lx.compounds.insert(k);
  }
  for (const auto& [k, v] : lx.sceneTypes) {
    if (k.find(' ') != std::string::npos) lx.compounds.insert(k);
  }
  return lx;
}

inline Lexicon load_lexicon(const std::string& path) {
  return lexicon_from_json(detail::parse_json(detail::read_file(path), path));
}

/// The lexicon compiled into the library.
inline const Lexicon& default_lexicon() {
  static const Lexicon lx = lexicon_from_json(Json::parse(detail::kBuiltinLexicon));
  return lx;
}

}  // namespace sceneforge
