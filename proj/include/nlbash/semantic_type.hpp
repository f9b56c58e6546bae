#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace nlbash {

// Argument categories used for command templates. Enum and Command only
// appear as flag value types in the spec db: an Enum value is kept literal
// in templates and a Command value is a nested command (find -exec).
enum class SemanticType {
  File,
  Directory,
  Path,
  Regex,
  Number,
  Size,
  Timespan,
  DateTime,
  Permission,
  String,
  Unknown,
  Enum,
  Command,
};

std::string_view to_string(SemanticType type);

// Accepts the spelling produced by to_string, case-sensitive.
std::optional<SemanticType> parse_semantic_type(std::string_view text);

// Lowercase slot text, e.g. "[regex]".
std::string slot_text(SemanticType type);

}  // namespace nlbash
