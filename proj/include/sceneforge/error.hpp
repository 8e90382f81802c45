#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace sceneforge {

enum class ErrorCode {
  io,
  parse,
  duplicate_id,
  taxonomy_cycle,
  invalid_argument,
  version_mismatch,
  corrupt_file,
  no_data,
  no_model_found,
  not_found,
  unknown_verb,
  grammar,
  empty_input,
  no_visualizable_object,
  hierarchy_cycle,
  unknown_condition,
  unknown_session,
  busy,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::duplicate_id: return "duplicate_id";
    case ErrorCode::taxonomy_cycle: return "taxonomy_cycle";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::corrupt_file: return "corrupt_file";
    case ErrorCode::no_data: return "no_data";
    case ErrorCode::no_model_found: return "no_model_found";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::unknown_verb: return "unknown_verb";
    case ErrorCode::grammar: return "grammar";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::no_visualizable_object: return "no_visualizable_object";
    case ErrorCode::hierarchy_cycle: return "hierarchy_cycle";
    case ErrorCode::unknown_condition: return "unknown_condition";
    case ErrorCode::unknown_session: return "unknown_session";
    case ErrorCode::busy: return "busy";
  }
  return "unknown";
}

/// Half-open character range [begin, end) into the text that was parsed.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<Span> span = std::nullopt)
      : std::runtime_error(message), code_(code), span_(span) {}

  ErrorCode code() const { return code_; }
  const std::optional<Span>& span() const { return span_; }

 private:
  ErrorCode code_;
  std::optional<Span> span_;
};

}  // namespace sceneforge
