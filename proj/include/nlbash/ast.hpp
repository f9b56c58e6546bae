#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlbash/semantic_type.hpp"

namespace nlbash {

// Heap-allocated value with deep-copy semantics, for recursive variants.
template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(implicit)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct Node;

// An argument word, kept verbatim (quotes and escapes included).
struct Arg {
  std::string text;
  std::optional<SemanticType> type;  // filled by template inference
  // Command/process substitutions appearing inside the word.
  std::vector<Node> substitutions;
  // The word is exactly one substitution, e.g. $(find . -name x).
  bool whole_substitution = false;
  // Value of an enumerated flag (find -type f); kept literal in templates.
  bool enumerated = false;

  friend bool operator==(const Arg& a, const Arg& b);
};

// How a flag's value is attached to it in the source word.
enum class Joint { separate, equals, attached };

struct FlagBinding {
  std::string text;       // as written, e.g. "--target-directory" or "-c"
  std::string canonical;  // canonical short form ("-t"), or text if unknown
  bool known = true;
  bool bundled = false;   // glued to the previous flag in one word ("-cvf")
  Joint joint = Joint::separate;
  std::vector<Arg> values;
  // find -exec style: a nested command followed by a terminator word.
  std::vector<Node> command;
  std::string terminator;

  friend bool operator==(const FlagBinding& a, const FlagBinding& b);
};

// Closed-vocabulary word inside a command: find operators, "{}".
struct Reserved {
  std::string text;
  friend bool operator==(const Reserved& a, const Reserved& b) { return a.text == b.text; }
};

// Command run by a utility such as xargs; always a utility node.
struct TailCommand {
  Box<Node> node;
  friend bool operator==(const TailCommand& a, const TailCommand& b) { return a.node == b.node; }
};

using Item = std::variant<FlagBinding, Arg, Reserved, TailCommand>;

enum class NodeKind { utility, pipeline, logical, group, command_subst, process_subst };
enum class LogicalOp { and_op, or_op };

struct Node {
  NodeKind kind = NodeKind::utility;

  // utility
  std::string name;
  bool unknown_utility = false;
  std::vector<Item> items;

  // logical
  LogicalOp op = LogicalOp::and_op;

  // pipeline stages, logical [left, right], group/substitution [inner]
  std::vector<Node> children;

  friend bool operator==(const Node& a, const Node& b);
};

struct CommandAst {
  Node root;
  friend bool operator==(const CommandAst& a, const CommandAst& b) { return a.root == b.root; }
};

const char* to_string(NodeKind kind);

// Canonical single-line rendering.
std::string serialize(const Node& node);
inline std::string serialize(const CommandAst& ast) { return serialize(ast.root); }

enum class TokenClass { utility, flag, argument, reserved };

struct CommandToken {
  std::string text;
  TokenClass cls = TokenClass::argument;
  std::string canonical;  // flags: canonical short form; others: text
};

// Token stream with bundled flags split apart and "=value" separated.
std::vector<CommandToken> command_tokens(const Node& node);
inline std::vector<CommandToken> command_tokens(const CommandAst& ast) {
  return command_tokens(ast.root);
}

// Visits every utility node, including nested ones, in source order.
template <class F>
void for_each_utility(const Node& node, F&& fn);

// Reserved tokens counted by corpus statistics, in a fixed documented order.
const std::vector<std::string>& reserved_token_inventory();
// Maps an operator spelling to its inventory entry ("\(" -> "("), if any.
std::optional<std::string> reserved_class(const std::string& text);

namespace detail {
template <class F>
void visit_args(const std::vector<Arg>& args, F& fn);

template <class F>
void for_each_utility_impl(const Node& node, F& fn) {
  if (node.kind == NodeKind::utility) {
    fn(node);
    for (const auto& item : node.items) {
      if (const auto* flag = std::get_if<FlagBinding>(&item)) {
        visit_args(flag->values, fn);
        for (const auto& c : flag->command) for_each_utility_impl(c, fn);
      } else if (const auto* arg = std::get_if<Arg>(&item)) {
        for (const auto& s : arg->substitutions) for_each_utility_impl(s, fn);
      } else if (const auto* tail = std::get_if<TailCommand>(&item)) {
        for_each_utility_impl(*tail->node, fn);
      }
    }
    return;
  }
  for (const auto& child : node.children) for_each_utility_impl(child, fn);
}

template <class F>
void visit_args(const std::vector<Arg>& args, F& fn) {
  for (const auto& a : args) {
    for (const auto& s : a.substitutions) for_each_utility_impl(s, fn);
  }
}
}  // namespace detail

template <class F>
void for_each_utility(const Node& node, F&& fn) {
  detail::for_each_utility_impl(node, fn);
}

}  // namespace nlbash
