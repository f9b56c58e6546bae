#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlbash/ast.hpp"
#include "nlbash/spec_db.hpp"

namespace nlbash {

enum class ViolationKind {
  io_redirection,
  variable_assignment,
  compound_statement,
  nested_interpreter,
  multi_statement,
  unknown_utility,
  unknown_flag,
  syntax_error,
};

std::string_view to_string(ViolationKind kind);

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
};

struct ScopeViolation {
  ViolationKind kind = ViolationKind::syntax_error;
  Span span;
  std::string detail;
};

struct ParseOptions {
  // Records unknown utilities and flags in the AST instead of rejecting them.
  // Used when scoring model output, which may be ill-formed.
  bool permissive = false;
};

class ParseResult {
 public:
  ParseResult(std::optional<CommandAst> ast, std::vector<ScopeViolation> violations)
      : ast_(std::move(ast)), violations_(std::move(violations)) {}

  bool ok() const { return ast_.has_value() && violations_.empty(); }
  // Precondition: ok().
  const CommandAst& ast() const { return *ast_; }
  // Best-effort tree built despite violations, if the input was not empty.
  const std::optional<CommandAst>& partial_ast() const { return ast_; }
  const std::vector<ScopeViolation>& violations() const { return violations_; }

 private:
  std::optional<CommandAst> ast_;
  std::vector<ScopeViolation> violations_;
};

// Parses a one-liner against the in-scope grammar: single commands, &&, ||,
// parentheses, pipelines, command and process substitution. Every detected
// violation is reported, not just the first.
ParseResult parse_command(std::string_view raw, const SpecDb& db, ParseOptions options = {});

struct ScopeClassification {
  bool in_scope = false;
  std::vector<ScopeViolation> violations;
};

ScopeClassification classify_scope(std::string_view raw, const SpecDb& db);

// Strips surrounding whitespace, prompt characters ("$ ", "# ") and a leading
// sudo, and replaces absolute utility paths with their base names.
std::string clean_command(std::string_view raw);

}  // namespace nlbash
