#pragma once

#include "json.hpp"
#include "nlbash/ast.hpp"
#include "nlbash/bash_parser.hpp"

namespace nlbash {

// JSON form of an AST; the schema is described in docs/ast_schema.md.
nlohmann::json to_json(const Node& node);
inline nlohmann::json to_json(const CommandAst& ast) { return to_json(ast.root); }
nlohmann::json to_json(const ScopeViolation& violation);

}  // namespace nlbash
