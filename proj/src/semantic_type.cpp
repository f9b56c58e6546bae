#include "nlbash/semantic_type.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace nlbash {

namespace {

constexpr std::array<std::pair<SemanticType, std::string_view>, 13> kNames{{
    {SemanticType::File, "File"},
    {SemanticType::Directory, "Directory"},
    {SemanticType::Path, "Path"},
    {SemanticType::Regex, "Regex"},
    {SemanticType::Number, "Number"},
    {SemanticType::Size, "Size"},
    {SemanticType::Timespan, "Timespan"},
    {SemanticType::DateTime, "DateTime"},
    {SemanticType::Permission, "Permission"},
    {SemanticType::String, "String"},
    {SemanticType::Unknown, "Unknown"},
    {SemanticType::Enum, "Enum"},
    {SemanticType::Command, "Command"},
}};

}  // namespace

std::string_view to_string(SemanticType type) {
  for (const auto& [value, name] : kNames) {
    if (value == type) return name;
  }
  return "Unknown";
}

std::optional<SemanticType> parse_semantic_type(std::string_view text) {
  for (const auto& [value, name] : kNames) {
    if (name == text) return value;
  }
  return std::nullopt;
}

std::string slot_text(SemanticType type) {
  std::string out = "[";
  for (char c : to_string(type)) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  out.push_back(']');
  return out;
}

}  // namespace nlbash
