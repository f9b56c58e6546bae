#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlbash/ast.hpp"
#include "nlbash/semantic_type.hpp"
#include "nlbash/spec_db.hpp"

namespace nlbash {

// Where an argument sits: the utility, the flag taking it (canonical form),
// or its index among the utility's positional arguments.
struct ArgContext {
  std::string utility;
  std::optional<std::string> flag;
  std::size_t positional_index = 0;
};

// Type from the argument text alone: glob or regex characters -> Regex,
// "/" -> Path, digits -> Number, digits with a size suffix -> Size, symbolic
// or octal mode -> Permission (only octal with a leading 0), else String.
SemanticType surface_type(std::string_view text);

// Flag value type from the db, then the utility's positional signature, then
// surface_type.
SemanticType infer_arg_type(const Arg& arg, const ArgContext& context, const SpecDb& db);

struct CommandTemplate {
  std::string templatized;
  std::vector<SemanticType> slot_types;
  std::vector<std::string> slot_values;  // original argument text per slot
  // Literal text around the slots; pieces.size() == slot_types.size() + 1.
  std::vector<std::string> pieces;
};

// Replaces each open-vocabulary argument with "[type]". Enumerated flag values
// ("-type f"), "{}" and find operators stay literal, and an argument that is
// exactly one substitution is rendered as $(...) around the inner template.
CommandTemplate extract_template(const CommandAst& ast, const SpecDb& db);

// Puts `values` into the slots; with slot_values this reproduces serialize(ast).
std::string fill_template(const CommandTemplate& tmpl, const std::vector<std::string>& values);

// Canonical comparison key: long flags mapped to short forms, flags of one
// utility sorted (within operator-delimited groups for find-like utilities),
// argument order kept.
std::string template_key(const CommandAst& ast, const SpecDb& db);

bool template_equal(const CommandAst& a, const CommandAst& b, const SpecDb& db);

}  // namespace nlbash
