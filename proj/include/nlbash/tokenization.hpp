#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nlbash/ast.hpp"

namespace nlbash {

inline constexpr std::string_view kSubStart = "SUB_START";
inline constexpr std::string_view kSubEnd = "SUB_END";

class TokenizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Splits a constant into maximal letter runs (Unicode letters), maximal ASCII
// digit runs and single other characters, wrapped in SUB_START ... SUB_END.
// Bytes that are not valid UTF-8 become single sub-tokens.
std::vector<std::string> to_subtokens(std::string_view constant);

// Inverse of to_subtokens for one constant, or for a whole sequence: atomic
// items outside marker pairs become their own words and words are joined by
// single spaces. Throws TokenizationError on unbalanced or nested markers.
std::string detokenize_subtokens(const std::vector<std::string>& items);
// Same, returning the words.
std::vector<std::string> detokenize_words(const std::vector<std::string>& items);

// Atomic items equal to a marker are escaped with a leading backslash.
std::string escape_marker(std::string_view item);
std::string unescape_marker(std::string_view item);

enum class Granularity { token, character, subtoken };

std::string_view to_string(Granularity g);
std::optional<Granularity> parse_granularity(std::string_view text);

struct TokenSequence {
  Granularity granularity = Granularity::token;
  std::vector<std::string> items;
  // [SUB_START index, SUB_END index] pairs, subtoken granularity only.
  std::vector<std::pair<std::size_t, std::size_t>> boundary_markers;
};

// Command side: token granularity is the AST token stream; subtoken expands
// every argument and keeps utilities, flags and reserved tokens atomic. Char
// granularity splits `text` into UTF-8 characters.
TokenSequence encode_command(std::string_view text, const CommandAst& ast, Granularity g);
// NL side: token granularity is tokenize_nl; subtoken expands every word.
TokenSequence encode_nl(std::string_view text, Granularity g);

// Splits into UTF-8 characters; invalid bytes stand alone.
std::vector<std::string> utf8_chars(std::string_view text);

// One JSONL record of the encoded dataset dump.
nlohmann::json encoded_record(const std::string& id, const TokenSequence& nl,
                              const TokenSequence& cmd);

}  // namespace nlbash
