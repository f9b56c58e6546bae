#include "nlbash/ast.hpp"

#include <algorithm>

namespace nlbash {

// Inferred types are annotations, not structure.
bool operator==(const Arg& a, const Arg& b) {
  return a.text == b.text && a.substitutions == b.substitutions &&
         a.whole_substitution == b.whole_substitution && a.enumerated == b.enumerated;
}

bool operator==(const FlagBinding& a, const FlagBinding& b) {
  return a.text == b.text && a.canonical == b.canonical && a.known == b.known &&
         a.bundled == b.bundled && a.joint == b.joint && a.values == b.values &&
         a.command == b.command && a.terminator == b.terminator;
}

bool operator==(const Node& a, const Node& b) {
  return a.kind == b.kind && a.name == b.name && a.unknown_utility == b.unknown_utility &&
         a.items == b.items && a.op == b.op && a.children == b.children;
}

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::utility: return "utility";
    case NodeKind::pipeline: return "pipeline";
    case NodeKind::logical: return "logical";
    case NodeKind::group: return "group";
    case NodeKind::command_subst: return "command_subst";
    case NodeKind::process_subst: return "process_subst";
  }
  return "utility";
}

namespace {

void serialize_flag(const FlagBinding& flag, std::string& out) {
  if (flag.bundled && flag.text.size() > 1) {
    out.append(flag.text, 1);
  } else {
    out.push_back(' ');
    out += flag.text;
  }
  for (std::size_t i = 0; i < flag.values.size(); ++i) {
    if (i == 0 && flag.joint == Joint::equals) {
      out.push_back('=');
    } else if (!(i == 0 && flag.joint == Joint::attached)) {
      out.push_back(' ');
    }
    out += flag.values[i].text;
  }
  if (!flag.command.empty()) {
    out.push_back(' ');
    out += serialize(flag.command.front());
    out.push_back(' ');
    out += flag.terminator;
  }
}

void serialize_into(const Node& node, std::string& out) {
  switch (node.kind) {
    case NodeKind::utility:
      out += node.name;
      for (const auto& item : node.items) {
        if (const auto* flag = std::get_if<FlagBinding>(&item)) {
          serialize_flag(*flag, out);
        } else if (const auto* arg = std::get_if<Arg>(&item)) {
          out.push_back(' ');
          out += arg->text;
        } else if (const auto* res = std::get_if<Reserved>(&item)) {
          out.push_back(' ');
          out += res->text;
        } else if (const auto* tail = std::get_if<TailCommand>(&item)) {
          out.push_back(' ');
          serialize_into(*tail->node, out);
        }
      }
      break;
    case NodeKind::pipeline:
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out += " | ";
        serialize_into(node.children[i], out);
      }
      break;
    case NodeKind::logical:
      serialize_into(node.children.at(0), out);
      out += node.op == LogicalOp::and_op ? " && " : " || ";
      serialize_into(node.children.at(1), out);
      break;
    case NodeKind::group:
      out += "( ";
      serialize_into(node.children.at(0), out);
      out += " )";
      break;
    case NodeKind::command_subst:
      out += "$(";
      serialize_into(node.children.at(0), out);
      out += ")";
      break;
    case NodeKind::process_subst:
      out += "<(";
      serialize_into(node.children.at(0), out);
      out += ")";
      break;
  }
}

void push_reserved(std::vector<CommandToken>& out, std::string text) {
  auto canonical = reserved_class(text).value_or(text);
  out.push_back({std::move(text), TokenClass::reserved, std::move(canonical)});
}

void tokens_into(const Node& node, std::vector<CommandToken>& out);

void arg_tokens(const Arg& arg, std::vector<CommandToken>& out) {
  if (arg.whole_substitution && arg.substitutions.size() == 1) {
    tokens_into(arg.substitutions.front(), out);
    return;
  }
  if (arg.text == "{}") {
    push_reserved(out, arg.text);
    return;
  }
  out.push_back({arg.text, TokenClass::argument, arg.text});
}

void tokens_into(const Node& node, std::vector<CommandToken>& out) {
  switch (node.kind) {
    case NodeKind::utility:
      out.push_back({node.name, TokenClass::utility, node.name});
      for (const auto& item : node.items) {
        if (const auto* flag = std::get_if<FlagBinding>(&item)) {
          if (flag->canonical == "-NUM" && flag->values.size() == 1) {
            out.push_back({flag->text + flag->values.front().text, TokenClass::flag, "-NUM"});
            continue;
          }
          out.push_back({flag->text, TokenClass::flag, flag->canonical});
          for (const auto& v : flag->values) arg_tokens(v, out);
          if (!flag->command.empty()) {
            tokens_into(flag->command.front(), out);
            push_reserved(out, flag->terminator);
          }
        } else if (const auto* arg = std::get_if<Arg>(&item)) {
          arg_tokens(*arg, out);
        } else if (const auto* res = std::get_if<Reserved>(&item)) {
          push_reserved(out, res->text);
        } else if (const auto* tail = std::get_if<TailCommand>(&item)) {
          tokens_into(*tail->node, out);
        }
      }
      break;
    case NodeKind::pipeline:
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) push_reserved(out, "|");
        tokens_into(node.children[i], out);
      }
      break;
    case NodeKind::logical:
      tokens_into(node.children.at(0), out);
      push_reserved(out, node.op == LogicalOp::and_op ? "&&" : "||");
      tokens_into(node.children.at(1), out);
      break;
    case NodeKind::group:
      push_reserved(out, "(");
      tokens_into(node.children.at(0), out);
      push_reserved(out, ")");
      break;
    case NodeKind::command_subst:
    case NodeKind::process_subst:
      push_reserved(out, node.kind == NodeKind::command_subst ? "$(" : "<(");
      tokens_into(node.children.at(0), out);
      push_reserved(out, ")");
      break;
  }
}

}  // namespace

std::string serialize(const Node& node) {
  std::string out;
  serialize_into(node, out);
  return out;
}

std::vector<CommandToken> command_tokens(const Node& node) {
  std::vector<CommandToken> out;
  tokens_into(node, out);
  return out;
}

const std::vector<std::string>& reserved_token_inventory() {
  static const std::vector<std::string> inventory{
      "|", "&&", "||", "(", ")", "$(", "<(", "{}", "\\;", ";", "!", "$", "\"", "'", "+"};
  return inventory;
}

std::optional<std::string> reserved_class(const std::string& text) {
  if (text == "\\(") return "(";
  if (text == "\\)") return ")";
  if (text == "\\!") return "!";
  if (text == "';'" || text == "\";\"") return "\\;";
  const auto& inv = reserved_token_inventory();
  if (std::find(inv.begin(), inv.end(), text) != inv.end()) return text;
  return std::nullopt;
}

}  // namespace nlbash
