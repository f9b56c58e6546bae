#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nlbash/ast.hpp"

namespace nlbash::detail {

enum class LexKind { word, op, redirect, newline };

struct SubstSpan {
  NodeKind kind = NodeKind::command_subst;  // or process_subst
  std::size_t inner_begin = 0;              // absolute offsets into the source
  std::size_t inner_end = 0;
};

struct LexToken {
  LexKind kind = LexKind::word;
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<SubstSpan> substitutions;  // words only, outermost level
  bool quoted = false;                   // any quoting or escaping in the word
  bool whole_substitution = false;       // the word is exactly one substitution
};

struct LexError {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string detail;
};

struct LexOutput {
  std::vector<LexToken> tokens;
  std::vector<LexError> errors;
};

// Tokenizes source[begin, end). Offsets in the output are absolute.
LexOutput lex(std::string_view source, std::size_t begin, std::size_t end);

}  // namespace nlbash::detail
