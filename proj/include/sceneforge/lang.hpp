#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/lexicon.hpp"
#include "sceneforge/scene_template.hpp"

namespace sceneforge {

struct Warning {
  std::string message;
  Span span;
};

struct DescriptionParse {
  SceneTemplate tmpl;
  std::vector<Warning> warnings;
};

struct CommandParse {
  std::vector<SceneOperation> operations;
  std::vector<Warning> warnings;
};

namespace detail {

struct Token {
  std::string text;  // lowercased
  std::size_t begin = 0;
  std::size_t end = 0;
  bool punct = false;
  bool number = false;
};

inline std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) { ++i; continue; }
    Token t;
    t.begin = i;
    if (std::isdigit(c)) {
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) ||
                              (s[i] == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]))))) {
        ++i;
      }
      t.number = true;
    } else if (std::isalpha(c) || c >= 0x80 || c == '\'' || c == '-' || c == '_') {
      while (i < s.size()) {
        const unsigned char d = static_cast<unsigned char>(s[i]);
        if (!(std::isalnum(d) || d >= 0x80 || d == '\'' || d == '-' || d == '_')) break;
        ++i;
      }
    } else {
      ++i;
      t.punct = true;
    }
    t.end = i;
    t.text = s.substr(t.begin, t.end - t.begin);
    for (auto& ch : t.text) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    out.push_back(std::move(t));
  }
  return out;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline std::string join(const std::vector<std::string>& words, char sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ' || ch == '_') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace detail

/// Singular form of one lowercase word by suffix rules.
inline std::string singularize(const std::string& w, const Lexicon& lx = default_lexicon()) {
  using detail::ends_with;
  for (const auto& [plural, singular] : lx.plurals) {
    if (ends_with(w, plural)) return w.substr(0, w.size() - plural.size()) + singular;
  }
  if (w.size() > 3 && ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  for (const char* s : {"sses", "xes", "zes", "ches", "shes"}) {
    if (ends_with(w, s)) return w.substr(0, w.size() - 2);
  }
  if (w.size() > 2 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is")) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

/// Plural used by the canonical renderer; singularize inverts it.
inline std::string pluralize(const std::string& w) {
  using detail::ends_with;
  if (w.size() > 1 && ends_with(w, "y") && std::string("aeiou").find(w[w.size() - 2]) == std::string::npos) {
    return w.substr(0, w.size() - 1) + "ies";
  }
  for (const char* s : {"ss", "x", "z", "ch", "sh"}) {
    if (ends_with(w, s)) return w + "es";
  }
  return w + "s";
}

/// Category for a noun phrase head: lowercase, singularize the last word,
/// apply aliases; unknown nouns pass through.
inline std::string normalize_category(const std::string& noun, const Taxonomy* taxonomy = nullptr,
                                      const Lexicon& lx = default_lexicon()) {
  std::vector<std::string> words = detail::split_words(noun);
  if (words.empty()) return {};
  auto known = [&](const std::vector<std::string>& ws) {
    const std::string spaced = detail::join(ws, ' ');
    if (lx.aliases.count(spaced)) return std::optional<std::string>(lx.aliases.at(spaced));
    const std::string joined = detail::join(ws, '_');
    if ((taxonomy && taxonomy->contains(joined)) || lx.compounds.count(spaced)) return std::optional<std::string>(joined);
    return std::optional<std::string>();
  };
  if (auto k = known(words)) return *k;
  words.back() = singularize(words.back(), lx);
  if (auto k = known(words)) return *k;
  return detail::join(words, '_');
}

namespace detail {

class Parser {
 public:
  Parser(const std::string& text, const Lexicon& lx, const Taxonomy* taxonomy)
      : text_(text), lx_(lx), taxonomy_(taxonomy), toks_(tokenize(text)) {}

  DescriptionParse description() {
    if (toks_.empty()) throw Error(ErrorCode::empty_input, "empty input");
    DescriptionParse out;
    out_ = &out;
    while (pos_ < toks_.size()) {
      const std::size_t end = sentence_end(pos_, false);
      end_ = end;
      if (pos_ < end) sentence(out.tmpl);
      pos_ = end + 1;
    }
    if (out.tmpl.objects.empty()) throw Error(ErrorCode::no_visualizable_object, "no visualizable object in input", full_span());
    return out;
  }

  CommandParse commands() {
    if (toks_.empty()) throw Error(ErrorCode::empty_input, "empty input");
    CommandParse out;
    out_desc_ = nullptr;
    cmd_ = &out;
    while (pos_ < toks_.size()) {
      const std::size_t end = sentence_end(pos_, true);
      end_ = end;
      if (pos_ < end) out.operations.push_back(command());
      pos_ = end;
      // skip the separator: ';' '.' or 'and' ['then'], or 'then'
      while (pos_ < toks_.size() && (is(pos_, ";") || is(pos_, ".") || is(pos_, ",") || is(pos_, "and") || is(pos_, "then"))) {
        ++pos_;
      }
    }
    if (out.operations.empty()) throw Error(ErrorCode::empty_input, "empty input");
    return out;
  }

  /// First verb phrase length at i, 0 if none.
  std::size_t verb_at(std::size_t i, std::string* verb = nullptr) const { return match(lx_.verbs, i, verb); }

  const std::vector<Token>& tokens() const { return toks_; }

 private:
  struct NP {
    std::string category;
    AttributeSet attrs;
    int count = 1;
    bool definite = false;
    bool hasArticle = false;
    bool pronoun = false;
    bool plural = false;
    std::optional<std::string> sceneType;
    Span span;
  };

  // ---- token helpers ------------------------------------------------------

  bool is(std::size_t i, const char* w) const { return i < toks_.size() && toks_[i].text == w; }
  bool at_end() const { return pos_ >= end_; }

  Span full_span() const { return {0, text_.size()}; }
  Span span_at(std::size_t i) const {
    if (i < toks_.size()) return {toks_[i].begin, toks_[i].end};
    return {text_.size(), text_.size()};
  }
  Span span_of(std::size_t a, std::size_t b) const {
    if (a >= b) return span_at(a);
    return {toks_[a].begin, toks_[b - 1].end};
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t i) const {
    throw Error(ErrorCode::grammar, msg, span_at(i));
  }

  void warn(const std::string& msg, Span s) {
    if (out_) out_->warnings.push_back({msg, s});
    else if (cmd_) cmd_->warnings.push_back({msg, s});
  }

  /// Longest phrase of the table starting at token i, in words.
  template <class Map>
  std::size_t match(const Map& table, std::size_t i, std::string* key = nullptr, std::size_t limit = SIZE_MAX) const {
    std::size_t best = 0;
    std::string phrase;
    for (std::size_t n = 1; i + n <= std::min(toks_.size(), limit) && n <= 5; ++n) {
      if (toks_[i + n - 1].punct) break;
      if (n > 1) phrase += ' ';
      phrase += toks_[i + n - 1].text;
      if (table.count(phrase)) {
        best = n;
        if (key) *key = phrase;
      }
    }
    return best;
  }

  std::size_t sentence_end(std::size_t from, bool commands) const {
    for (std::size_t i = from; i < toks_.size(); ++i) {
      const auto& t = toks_[i].text;
      if (toks_[i].punct && (t == "." || t == "!" || t == "?" || t == ";")) return i;
      if (commands && i > from) {
        // "and" or "then" followed by a verb starts a new clause
        std::size_t j = i;
        if (t == "," || t == "and" || t == "then") {
          while (j < toks_.size() && (toks_[j].text == "," || toks_[j].text == "and" || toks_[j].text == "then")) ++j;
          if (j > i && j < toks_.size() && verb_at(j) > 0) return i;
        }
      }
    }
    return toks_.size();
  }

  bool starts_pp(std::size_t i) const { return i < end_ && match(lx_.prepositions, i, nullptr, end_) > 0; }
  bool starts_direction(std::size_t i) const { return i < end_ && match(lx_.directions, i, nullptr, end_) > 0; }

  bool np_stop(std::size_t i) const {
    if (i >= end_) return true;
    const Token& t = toks_[i];
    if (t.punct) return true;
    if (t.text == "and" || t.text == "with" || t.text == "is" || t.text == "are" || t.text == "has" ||
        t.text == "have" || t.text == "then" || t.text == "by") {
      return true;
    }
    if (starts_pp(i)) return true;
    if (cmd_ && starts_direction(i)) return true;
    return false;
  }

  // ---- noun phrases -------------------------------------------------------

  NP noun_phrase() {
    NP np;
    const std::size_t start = pos_;
    if (pos_ < end_ && lx_.definite.count(toks_[pos_].text)) {
      np.definite = np.hasArticle = true;
      ++pos_;
    } else if (pos_ < end_ && lx_.indefinite.count(toks_[pos_].text)) {
      np.hasArticle = true;
      ++pos_;
    }
    bool counted = false;
    if (pos_ < end_ && toks_[pos_].number) {
      np.count = std::max(1, static_cast<int>(std::stod(toks_[pos_].text)));
      counted = true;
      ++pos_;
    } else if (pos_ < end_ && lx_.numbers.count(toks_[pos_].text)) {
      np.count = lx_.numbers.at(toks_[pos_].text);
      counted = true;
      ++pos_;
    }
    if (pos_ < end_ && lx_.pronouns.count(toks_[pos_].text)) {
      np.pronoun = true;
      np.span = span_of(start, pos_ + 1);
      ++pos_;
      return np;
    }
    const std::size_t words_begin = pos_;
    while (!np_stop(pos_)) ++pos_;
    if (pos_ == words_begin) fail("expected a noun phrase", pos_);
    np.span = span_of(start, pos_);

    std::vector<std::string> words;
    for (std::size_t i = words_begin; i < pos_; ++i) words.push_back(toks_[i].text);
    // head: longest known multi-word suffix, else the last word
    std::size_t head_len = 1;
    for (std::size_t n = std::min<std::size_t>(3, words.size()); n >= 2; --n) {
      std::vector<std::string> tail(words.end() - static_cast<long>(n), words.end());
      if (known_compound(tail)) { head_len = n; break; }
    }
    std::vector<std::string> head(words.end() - static_cast<long>(head_len), words.end());
    const std::string last_singular = singularize(head.back(), lx_);
    np.plural = last_singular != head.back() && !is_known_word(head.back());
    if (np.plural && !counted && !np.definite) np.count = 2;
    if (counted && np.count > 1) np.plural = true;

    std::vector<std::string> head_singular = head;
    if (np.plural) head_singular.back() = last_singular;
    const std::string spaced = join(head_singular, ' ');
    if (lx_.sceneTypes.count(spaced)) {
      np.sceneType = lx_.sceneTypes.at(spaced);
      np.category = "room";
    } else {
      np.category = normalize_category(join(head, ' '), taxonomy_, lx_);
    }
    for (std::size_t i = 0; i + head_len < words.size(); ++i) {
      const std::string& w = words[i];
      const std::size_t tok = words_begin + i;
      if (lx_.attributes.count(w)) {
        np.attrs.insert(lx_.attributes.at(w));
      } else if (lx_.numbers.count(w) && !counted) {
        np.count = lx_.numbers.at(w);
        counted = true;
      } else {
        warn("ignored unknown word '" + w + "'", span_at(tok));
      }
    }
    if (lx_.stopwords.count(np.category)) fail("expected a noun phrase", words_begin);
    return np;
  }

  bool is_known_word(const std::string& w) const {
    return lx_.aliases.count(w) || lx_.sceneTypes.count(w) || (taxonomy_ && taxonomy_->contains(w));
  }

  bool known_compound(std::vector<std::string> ws) const {
    auto check = [&](const std::vector<std::string>& v) {
      const std::string spaced = join(v, ' ');
      return lx_.compounds.count(spaced) || lx_.aliases.count(spaced) || lx_.sceneTypes.count(spaced) ||
             (taxonomy_ && taxonomy_->contains(join(v, '_')));
    };
    if (check(ws)) return true;
    ws.back() = singularize(ws.back(), lx_);
    return check(ws);
  }

  // ---- descriptions -------------------------------------------------------

  /// Object index for a noun phrase: definite phrases and scene types
  /// corefer with an existing object of the same category.
  int object_for(SceneTemplate& t, const NP& np) {
    if (np.pronoun) {
      if (last_object_ < 0) fail("pronoun without an antecedent", pos_ ? pos_ - 1 : 0);
      return last_object_;
    }
    if (np.sceneType) {
      if (*np.sceneType != "room" || t.sceneType == "room") t.sceneType = *np.sceneType;
      const int existing = t.find_category("room");
      if (existing >= 0) return last_object_ = existing;
      return last_object_ = t.add_object("room");
    }
    if (np.definite) {
      for (auto& o : t.objects) {
        if (o.category != np.category) continue;
        if (!std::includes(o.attributes.begin(), o.attributes.end(), np.attrs.begin(), np.attrs.end())) continue;
        return last_object_ = o.index;
      }
    }
    return last_object_ = t.add_object(np.category, np.attrs, np.count);
  }

  void add_constraint(SceneTemplate& t, Predicate p, int a, int b, Span s) {
    if (a == b) {
      warn("ignored relation of an object to itself", s);
      return;
    }
    RelationConstraint c{p, a, b, false};
    if (std::find(t.constraints.begin(), t.constraints.end(), c) == t.constraints.end()) t.constraints.push_back(c);
  }

  /// "with"/"has": contents of a room are in it, anything else rests on it.
  void add_with(SceneTemplate& t, int holder, int content, Span s) {
    const bool room = t.objects[holder].category == "room";
    add_constraint(t, room ? Predicate::in : Predicate::on, content, holder, s);
  }

  /// NP (PP)* ((","|"and") NP (PP)*)*. A PP group applies to every NP
  /// since the previous group. Returns the subject indices.
  std::vector<int> np_list(SceneTemplate& t) {
    std::vector<int> subjects, pending;
    while (true) {
      const int obj = object_for(t, noun_phrase());
      subjects.push_back(obj);
      pending.push_back(obj);
      bool had_pp = false;
      while (!at_end()) {
        std::string key;
        if (is(pos_, "with")) {
          ++pos_;
          const std::size_t s = pos_;
          const int saved = last_object_;
          for (int c : with_list(t)) {
            for (int holder : pending) add_with(t, holder, c, span_of(s, pos_));
          }
          last_object_ = saved;
          had_pp = true;
        } else if (std::size_t n = match(lx_.prepositions, pos_, &key, end_)) {
          const std::size_t s = pos_;
          pos_ += n;
          const Predicate p = lx_.prepositions.at(key);
          const int saved = last_object_;
          const int ref = object_for(t, noun_phrase());
          last_object_ = saved;
          for (int a : pending) add_constraint(t, p, a, ref, span_of(s, pos_));
          had_pp = true;
        } else {
          break;
        }
      }
      if (had_pp) pending.clear();
      if (at_end()) break;
      if (is(pos_, ",") || is(pos_, "and")) {
        while (is(pos_, ",") || is(pos_, "and")) ++pos_;
        if (at_end()) fail("expected a noun phrase", pos_);
        continue;
      }
      if (is(pos_, "is") || is(pos_, "are") || is(pos_, "has") || is(pos_, "have")) break;
      fail("unexpected '" + toks_[pos_].text + "'", pos_);
    }
    return subjects;
  }

  /// Objects introduced after "with"/"has": NP ((","|"and") NP)*, each
  /// possibly followed by its own PPs.
  std::vector<int> with_list(SceneTemplate& t) {
    std::vector<int> out;
    while (true) {
      const int obj = object_for(t, noun_phrase());
      out.push_back(obj);
      while (!at_end()) {
        std::string key;
        const std::size_t n = match(lx_.prepositions, pos_, &key, end_);
        if (!n) break;
        const std::size_t s = pos_;
        pos_ += n;
        const int saved = last_object_;
        const int ref = object_for(t, noun_phrase());
        last_object_ = saved;
        add_constraint(t, lx_.prepositions.at(key), obj, ref, span_of(s, pos_));
      }
      if (at_end()) break;
      if (is(pos_, ",") || is(pos_, "and")) {
        while (is(pos_, ",") || is(pos_, "and")) ++pos_;
        if (at_end()) fail("expected a noun phrase", pos_);
        continue;
      }
      fail("unexpected '" + toks_[pos_].text + "'", pos_);
    }
    return out;
  }

  void sentence(SceneTemplate& t) {
    // leading PP: "In the kitchen, there is ..."
    std::optional<std::pair<Predicate, int>> lead;
    std::size_t lead_begin = pos_;
    std::string key;
    if (std::size_t n = match(lx_.prepositions, pos_, &key, end_); n && !is(pos_, "there")) {
      pos_ += n;
      lead = {lx_.prepositions.at(key), object_for(t, noun_phrase())};
      if (is(pos_, ",")) ++pos_;
    }
    const std::size_t lead_end = pos_;
    std::vector<int> subjects;
    if (is(pos_, "there") && (is(pos_ + 1, "is") || is(pos_ + 1, "are"))) {
      pos_ += 2;
      if (at_end()) fail("expected a noun phrase", pos_);
      subjects = np_list(t);
      if (!at_end()) fail("unexpected '" + toks_[pos_].text + "'", pos_);
    } else {
      subjects = np_list(t);
      if (is(pos_, "is") || is(pos_, "are")) {
        ++pos_;
        if (at_end()) fail("expected a prepositional phrase", pos_);
        while (!at_end()) {
          const std::size_t s = pos_;
          const std::size_t n = match(lx_.prepositions, pos_, &key, end_);
          if (!n) fail("expected a prepositional phrase", pos_);
          pos_ += n;
          const Predicate p = lx_.prepositions.at(key);
          const int ref = object_for(t, noun_phrase());
          for (int a : subjects) add_constraint(t, p, a, ref, span_of(s, pos_));
          if (is(pos_, "and") || is(pos_, ",")) ++pos_;
        }
      } else if (is(pos_, "has") || is(pos_, "have")) {
        ++pos_;
        const std::size_t s = pos_;
        if (at_end()) fail("expected a noun phrase", pos_);
        const auto contents = with_list(t);
        for (int holder : subjects) {
          for (int c : contents) add_with(t, holder, c, span_of(s, pos_));
        }
      } else if (!at_end()) {
        fail("unexpected '" + toks_[pos_].text + "'", pos_);
      }
    }
    if (lead) {
      for (int a : subjects) add_constraint(t, lead->first, a, lead->second, span_of(lead_begin, lead_end));
    }
  }

  // ---- commands -----------------------------------------------------------

  ObjectReference reference(const NP& np) const {
    ObjectReference r;
    r.category = np.category;
    r.attributes = np.attrs;
    r.definite = np.definite;
    r.count = np.count;
    return r;
  }

  NP command_np() {
    NP np = noun_phrase();
    if (np.pronoun) fail("pronouns are not supported in commands", pos_ - 1);
    return np;
  }

  /// NP with an optional spatial qualifier PP.
  ObjectReference qualified_reference(bool stop_at_with) {
    ObjectReference r = reference(command_np());
    std::string key;
    if (!at_end() && !(stop_at_with && is(pos_, "with"))) {
      if (std::size_t n = match(lx_.prepositions, pos_, &key, end_)) {
        pos_ += n;
        const NP ref = command_np();
        r.spatialQualifier = SpatialQualifier{lx_.prepositions.at(key), ref.category, ref.attrs, ref.definite};
      }
    }
    return r;
  }

  /// Destination after the target of Insert/Move: a PP or a view-centric
  /// direction. Returns false when nothing follows.
  bool destination(SceneOperation& op) {
    if (at_end()) return false;
    std::string pkey, dkey;
    const std::size_t np_ = match(lx_.prepositions, pos_, &pkey, end_);
    const std::size_t nd = match(lx_.directions, pos_, &dkey, end_);
    if (nd > np_) {
      pos_ += nd;
      op.constraints.push_back({lx_.directions.at(dkey), 0, kViewer, false});
      return true;
    }
    if (np_ == 0) fail("expected a prepositional phrase or direction", pos_);
    pos_ += np_;
    const NP ref = command_np();
    op.secondary = reference(ref);
    op.constraints.push_back({lx_.prepositions.at(pkey), 0, 1, false});
    return true;
  }

  void expect_end() {
    if (!at_end()) fail("unexpected '" + toks_[pos_].text + "'", pos_);
  }

  SceneOperation command() {
    std::string verb;
    const std::size_t verb_pos = pos_;
    const std::size_t n = match(lx_.verbs, pos_, &verb, end_);
    if (!n) {
      throw Error(ErrorCode::unknown_verb, "unknown verb '" + toks_[pos_].text + "'", span_at(pos_));
    }
    pos_ += n;
    if (at_end()) fail("expected an object after '" + verb + "'", pos_);
    const std::string kind = lx_.verbs.at(verb);
    SceneOperation op;
    if (kind == "Select" || kind == "LookAt" || kind == "Remove") {
      op.kind = *operation_kind_from(kind);
      op.target = qualified_reference(false);
      expect_end();
    } else if (kind == "Scale") {
      op.kind = OperationKind::Scale;
      op.target = qualified_reference(false);
      op.scalar = lx_.scaleFactors.count(verb) ? lx_.scaleFactors.at(verb) : 1.5;
      expect_end();
    } else if (kind == "Replace") {
      op.kind = OperationKind::Replace;
      op.target = qualified_reference(true);
      if (!is(pos_, "with") || pos_ >= end_) fail("replace needs 'with' and a new object", pos_);
      ++pos_;
      if (at_end()) fail("expected a noun phrase", pos_);
      op.secondary = reference(command_np());
      expect_end();
    } else if (kind == "Insert" || kind == "Move" || kind == "PlaceOrMove") {
      const std::size_t np_begin = pos_;
      const NP target = command_np();
      if (kind == "PlaceOrMove") {
        op.kind = target.definite ? OperationKind::Move : OperationKind::Insert;
        if (!target.hasArticle) {
          warn("no article after '" + verb + "'; treating as a new object", span_of(np_begin, pos_));
        }
      } else {
        op.kind = kind == "Insert" ? OperationKind::Insert : OperationKind::Move;
      }
      op.target = reference(target);
      const bool has_dest = destination(op);
      if (op.kind == OperationKind::Move && !has_dest) fail("move needs a destination", pos_);
      expect_end();
    } else {
      throw Error(ErrorCode::unknown_verb, "unknown verb '" + verb + "'", span_of(verb_pos, pos_));
    }
    return op;
  }

  const std::string& text_;
  const Lexicon& lx_;
  const Taxonomy* taxonomy_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  int last_object_ = -1;
  DescriptionParse* out_ = nullptr;
  DescriptionParse* out_desc_ = nullptr;
  CommandParse* cmd_ = nullptr;
};

}  // namespace detail

inline DescriptionParse parse_description_ex(const std::string& text, const Taxonomy* taxonomy = nullptr,
                                             const Lexicon& lx = default_lexicon()) {
  return detail::Parser(text, lx, taxonomy).description();
}

/// Description text to a scene template.
inline SceneTemplate parse_description(const std::string& text, const Taxonomy* taxonomy = nullptr,
                                       const Lexicon& lx = default_lexicon()) {
  return parse_description_ex(text, taxonomy, lx).tmpl;
}

inline CommandParse parse_command_ex(const std::string& text, const Taxonomy* taxonomy = nullptr,
                                     const Lexicon& lx = default_lexicon()) {
  return detail::Parser(text, lx, taxonomy).commands();
}

/// Command text to the ordered list of operations it names.
inline std::vector<SceneOperation> parse_command(const std::string& text, const Taxonomy* taxonomy = nullptr,
                                                 const Lexicon& lx = default_lexicon()) {
  return parse_command_ex(text, taxonomy, lx).operations;
}

/// True for imperative input. Descriptions open with "there is/are", with
/// a word a noun phrase or prepositional phrase can start with, or contain
/// a copula; anything else is read as a command so that an unknown verb is
/// reported as such.
inline bool is_command(const std::string& text, const Lexicon& lx = default_lexicon(),
                       const Taxonomy* taxonomy = nullptr) {
  const auto toks = detail::tokenize(text);
  if (toks.empty()) return false;
  if (toks[0].text == "there" && toks.size() > 1 && (toks[1].text == "is" || toks[1].text == "are")) return false;
  detail::Parser p(text, lx, nullptr);
  if (p.verb_at(0) > 0) return true;
  for (const auto& t : toks) {
    if (t.text == "is" || t.text == "are" || t.text == "has" || t.text == "have") return false;
  }
  const std::string& w = toks[0].text;
  if (lx.definite.count(w) || lx.indefinite.count(w) || lx.numbers.count(w) || lx.attributes.count(w) ||
      lx.stopwords.count(w) || lx.sceneTypes.count(w) || lx.aliases.count(w)) {
    return false;
  }
  for (const auto& [phrase, pred] : lx.prepositions) {
    if (phrase == w || phrase.rfind(w + " ", 0) == 0) return false;
  }
  for (const auto& c : lx.compounds) {
    if (c.rfind(w, 0) == 0) return false;
  }
  if (taxonomy && taxonomy->contains(normalize_category(w, taxonomy, lx))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Canonical rendering
// ---------------------------------------------------------------------------

namespace detail {

inline const char* canonical_preposition(Predicate p) {
  switch (p) {
    case Predicate::on: return "on";
    case Predicate::in: return "in";
    case Predicate::under: return "under";
    case Predicate::above: return "above";
    case Predicate::left_of: return "to the left of";
    case Predicate::right_of: return "to the right of";
    case Predicate::in_front_of: return "in front of";
    case Predicate::behind: return "behind";
    case Predicate::near: return "near";
    case Predicate::next_to: return "next to";
    case Predicate::supported_by: return "supported by";
  }
  return "near";
}

inline std::string noun_words(const std::string& category) {
  std::string s = category;
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

inline std::string scene_words(const std::string& scene_type, const Lexicon& lx) {
  for (const auto& [words, type] : lx.sceneTypes) {
    if (type == scene_type) return words;
  }
  return noun_words(scene_type);
}

}  // namespace detail

/// Text that parses back to the template (for templates produced by the
/// parser with distinguishable objects).
inline std::string render_template(const SceneTemplate& t, const Lexicon& lx = default_lexicon()) {
  std::string out;
  auto adjectives = [&](const AttributeSet& attrs) {
    std::string s;
    for (const auto& a : attrs) s += lx.word_for(a) + " ";
    return s;
  };
  auto noun = [&](const ObjectSpec& o) {
    if (o.category == "room") return detail::scene_words(t.sceneType, lx);
    std::string n = detail::noun_words(o.category);
    if (o.count > 1) {
      const auto pos = n.rfind(' ');
      const std::string last = pos == std::string::npos ? n : n.substr(pos + 1);
      n = (pos == std::string::npos ? std::string() : n.substr(0, pos + 1)) + pluralize(last);
    }
    return n;
  };
  for (const auto& o : t.objects) {
    if (!out.empty()) out += " ";
    if (o.count > 1) out += "There are " + std::to_string(o.count) + " " + adjectives(o.attributes) + noun(o) + ".";
    else {
      const std::string words = adjectives(o.attributes) + noun(o);
      const bool vowel = std::string("aeiou").find(words.front()) != std::string::npos;
      out += std::string("There is ") + (vowel ? "an " : "a ") + words + ".";
    }
  }
  for (const auto& c : t.constraints) {
    const ObjectSpec& a = t.objects.at(c.a);
    const ObjectSpec& b = t.objects.at(c.b);
    out += " The " + adjectives(a.attributes) + noun(a) + (a.count > 1 ? " are " : " is ") +
           detail::canonical_preposition(c.predicate) + " the " + adjectives(b.attributes) + noun(b) + ".";
  }
  return out;
}

}  // namespace sceneforge
