#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nlbash/semantic_type.hpp"

namespace nlbash {

enum class Arity { none, required_value, optional_value };

enum class ScopeClass { in_scope, nested_interpreter, multi_statement, out_of_scope };

std::string_view to_string(Arity arity);
std::string_view to_string(ScopeClass scope);

struct FlagSpec {
  std::string short_form;                // "-l"; long-only flags keep their "--" spelling here
  std::optional<std::string> long_form;  // "--target-directory"
  Arity arity = Arity::none;
  SemanticType value_type = SemanticType::Unknown;
  std::string pattern;  // idiomatic form descriptor, e.g. "exec_terminator"

  bool takes_command() const { return pattern == "exec_terminator"; }
  bool replaces_positional() const { return pattern == "replaces_positional"; }
  // Number of value words consumed by a required_value flag ("values:N").
  int value_count() const;
};

// Words starting with "-" that are positional for a utility, e.g. chmod -x.
struct DashArgRule {
  SemanticType type = SemanticType::String;
  std::string pattern;
  std::regex compiled;
};

struct UtilitySpec {
  std::string name;
  ScopeClass scope = ScopeClass::in_scope;
  std::vector<FlagSpec> flags;
  std::vector<std::string> options;  // no_bundling, command_tail[:N], ...
  std::vector<SemanticType> positional;
  bool positional_repeats = false;  // last positional type repeats
  std::string positional_text;      // signature as written
  std::optional<DashArgRule> dash_arg;

  bool in_scope() const { return scope == ScopeClass::in_scope; }
  bool has_option(std::string_view option) const;
  bool allows_bundling() const { return !has_option("no_bundling"); }
  bool has_expression_operators() const { return has_option("expression_operators"); }
  // Number of positional words preceding a trailing command, if the utility runs one.
  std::optional<int> command_tail() const;

  const FlagSpec* find_short(std::string_view flag) const;
  const FlagSpec* find_long(std::string_view flag) const;
  // Unique long-option prefix match ("--recur" -> "--recursive").
  const FlagSpec* find_long_prefix(std::string_view prefix) const;
  // Type of the n-th positional argument (0-based), Unknown if unspecified.
  SemanticType positional_type(std::size_t index) const;
  // Distinct flag strings, counting short and long spellings separately.
  std::size_t flag_string_count() const;

 private:
  friend class SpecDb;
  std::unordered_map<std::string, std::size_t> by_short_;
  std::unordered_map<std::string, std::size_t> by_long_;
};

struct ValidationResult {
  enum class Kind { valid, unknown_flag, unknown_utility };
  Kind kind = Kind::unknown_utility;
  std::string canonical;  // canonical short form when valid

  bool ok() const { return kind == Kind::valid; }
};

class SpecDbError : public std::runtime_error {
 public:
  SpecDbError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Immutable after load; concurrent readers need no synchronization.
class SpecDb {
 public:
  static SpecDb load(const std::filesystem::path& path);
  static SpecDb parse(std::string_view text);
  // Database bundled with the repository (NLBASH_DATA_DIR/spec_db.tsv).
  static const SpecDb& bundled();

  const UtilitySpec* lookup(std::string_view name) const;
  ValidationResult validate_flag(std::string_view utility, std::string_view flag) const;

  std::size_t size() const { return utilities_.size(); }
  std::size_t in_scope_count() const;
  const std::vector<UtilitySpec>& utilities() const { return utilities_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Canonical text form: header comments followed by one block per utility.
  std::string serialize() const;

 private:
  std::vector<std::string> header_;
  std::vector<UtilitySpec> utilities_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> warnings_;
};

// Directory holding the bundled data files; overridable with NLBASH_DATA_DIR.
std::filesystem::path data_dir();

}  // namespace nlbash
