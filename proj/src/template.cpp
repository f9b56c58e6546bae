#include "nlbash/template.hpp"

#include <algorithm>
#include <regex>

namespace nlbash {

namespace {

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

bool slot_type(SemanticType t) {
  return t != SemanticType::Unknown && t != SemanticType::Enum && t != SemanticType::Command;
}

}  // namespace

SemanticType surface_type(std::string_view raw) {
  static const std::regex number(R"([+-]?[0-9]+(\.[0-9]+)?)");
  static const std::regex size(R"([+-]?[0-9]+(\.[0-9]+)?[cwbkKMGTP]i?[bB]?)");
  static const std::regex symbolic_mode(R"([ugoa]*([-+=][rwxXstugo]*)+(,[ugoa]*([-+=][rwxXstugo]*)+)*)");
  static const std::regex octal_mode(R"(0[0-7]{3})");
  const std::string text(unquote(raw));
  if (text.find_first_of("*?[]^|\\") != std::string::npos) return SemanticType::Regex;
  if (text.find('/') != std::string::npos) return SemanticType::Path;
  if (std::regex_match(text, octal_mode)) return SemanticType::Permission;
  if (std::regex_match(text, number)) return SemanticType::Number;
  if (std::regex_match(text, size)) return SemanticType::Size;
  if (!text.empty() && std::regex_match(text, symbolic_mode) &&
      text.find_first_of("+-=") != std::string::npos && text != "-" && text != "+" &&
      text != "=") {
    return SemanticType::Permission;
  }
  return SemanticType::String;
}

SemanticType infer_arg_type(const Arg& arg, const ArgContext& context, const SpecDb& db) {
  const UtilitySpec* spec = db.lookup(context.utility);
  if (spec && context.flag) {
    const FlagSpec* f = spec->find_short(*context.flag);
    if (!f) f = spec->find_long(*context.flag);
    if (f && f->value_type != SemanticType::Unknown) return f->value_type;
  }
  if (spec && !context.flag) {
    const auto t = spec->positional_type(context.positional_index);
    if (slot_type(t)) return t;
  }
  return surface_type(arg.text);
}

namespace {

// Builds the template text while tracking slot boundaries.
class Renderer {
 public:
  explicit Renderer(const SpecDb& db) : db_(db) { tmpl_.pieces.emplace_back(); }

  CommandTemplate finish() {
    std::string text;
    for (std::size_t i = 0; i < tmpl_.pieces.size(); ++i) {
      text += tmpl_.pieces[i];
      if (i < tmpl_.slot_types.size()) text += slot_text(tmpl_.slot_types[i]);
    }
    tmpl_.templatized = std::move(text);
    return std::move(tmpl_);
  }

  void node(const Node& n) {
    switch (n.kind) {
      case NodeKind::utility: utility(n); break;
      case NodeKind::pipeline:
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i) lit(" | ");
          node(n.children[i]);
        }
        break;
      case NodeKind::logical:
        node(n.children.at(0));
        lit(n.op == LogicalOp::and_op ? " && " : " || ");
        node(n.children.at(1));
        break;
      case NodeKind::group:
        lit("( ");
        node(n.children.at(0));
        lit(" )");
        break;
      case NodeKind::command_subst:
      case NodeKind::process_subst:
        lit(n.kind == NodeKind::command_subst ? "$(" : "<(");
        node(n.children.at(0));
        lit(")");
        break;
    }
  }

 private:
  void lit(std::string_view s) { tmpl_.pieces.back() += s; }

  void slot(SemanticType t, const std::string& value) {
    tmpl_.slot_types.push_back(t);
    tmpl_.slot_values.push_back(value);
    tmpl_.pieces.emplace_back();
  }

  void arg(const Arg& a, const ArgContext& ctx) {
    if (a.whole_substitution && a.substitutions.size() == 1) {
      node(a.substitutions.front());
      return;
    }
    if (a.enumerated || a.text == "{}") {
      lit(a.text);
      return;
    }
    auto t = infer_arg_type(a, ctx, db_);
    if (!slot_type(t)) t = surface_type(a.text);
    slot(t, a.text);
  }

  void utility(const Node& n) {
    lit(n.name);
    std::size_t positional = 0;
    for (const auto& item : n.items) {
      if (const auto* flag = std::get_if<FlagBinding>(&item)) {
        if (!(flag->bundled && flag->text.size() > 1)) lit(" ");
        lit(flag->bundled && flag->text.size() > 1 ? flag->text.substr(1) : flag->text);
        for (std::size_t i = 0; i < flag->values.size(); ++i) {
          if (i == 0 && flag->joint == Joint::equals) {
            lit("=");
          } else if (!(i == 0 && flag->joint == Joint::attached)) {
            lit(" ");
          }
          arg(flag->values[i], {n.name, flag->canonical, 0});
        }
        if (!flag->command.empty()) {
          lit(" ");
          node(flag->command.front());
          lit(" ");
          lit(flag->terminator);
        }
      } else if (const auto* a = std::get_if<Arg>(&item)) {
        lit(" ");
        arg(*a, {n.name, std::nullopt, positional++});
      } else if (const auto* res = std::get_if<Reserved>(&item)) {
        lit(" ");
        lit(res->text);
      } else if (const auto* tail = std::get_if<TailCommand>(&item)) {
        lit(" ");
        node(*tail->node);
      }
    }
  }

  const SpecDb& db_;
  CommandTemplate tmpl_;
};

// Key of one node; flags of a utility are sorted, everything else in order.
class KeyBuilder {
 public:
  explicit KeyBuilder(const SpecDb& db) : db_(db) {}

  std::string node(const Node& n) {
    switch (n.kind) {
      case NodeKind::utility: return utility(n);
      case NodeKind::pipeline: {
        std::string out = "P(";
        for (const auto& c : n.children) out += node(c) + "|";
        return out + ")";
      }
      case NodeKind::logical:
        return std::string(n.op == LogicalOp::and_op ? "A(" : "O(") + node(n.children.at(0)) +
               "," + node(n.children.at(1)) + ")";
      case NodeKind::group: return "G(" + node(n.children.at(0)) + ")";
      case NodeKind::command_subst: return "C(" + node(n.children.at(0)) + ")";
      case NodeKind::process_subst: return "R(" + node(n.children.at(0)) + ")";
    }
    return {};
  }

 private:
  std::string arg(const Arg& a, const ArgContext& ctx) {
    if (a.whole_substitution && a.substitutions.size() == 1) return node(a.substitutions.front());
    if (a.enumerated || a.text == "{}") return "'" + a.text + "'";
    auto t = infer_arg_type(a, ctx, db_);
    if (!slot_type(t)) t = surface_type(a.text);
    return slot_text(t);
  }

  static bool is_operator_flag(const FlagBinding& f) {
    return f.canonical == "-o" || f.canonical == "-or" || f.canonical == "-a" ||
           f.canonical == "-and" || f.canonical == "-not";
  }

  std::string utility(const Node& n) {
    const UtilitySpec* spec = db_.lookup(n.name);
    const bool grouped = spec && spec->has_expression_operators();
    std::string out = "U(" + n.name;
    std::vector<std::string> flags;
    std::vector<std::string> rest;
    auto flush = [&] {
      std::sort(flags.begin(), flags.end());
      for (auto& f : flags) out += " F" + f;
      flags.clear();
    };
    std::size_t positional = 0;
    for (const auto& item : n.items) {
      if (const auto* flag = std::get_if<FlagBinding>(&item)) {
        std::string key = flag->canonical;
        for (const auto& v : flag->values) key += "=" + arg(v, {n.name, flag->canonical, 0});
        if (!flag->command.empty()) key += "{" + node(flag->command.front()) + "}";
        if (grouped && is_operator_flag(*flag)) {
          flush();
          out += " " + key;
        } else {
          flags.push_back(std::move(key));
        }
      } else if (const auto* a = std::get_if<Arg>(&item)) {
        rest.push_back(arg(*a, {n.name, std::nullopt, positional++}));
      } else if (const auto* res = std::get_if<Reserved>(&item)) {
        if (grouped) {
          flush();
          out += " " + (reserved_class(res->text).value_or(res->text));
        } else {
          rest.push_back(res->text);
        }
      } else if (const auto* tail = std::get_if<TailCommand>(&item)) {
        rest.push_back("T" + node(*tail->node));
      }
    }
    flush();
    for (const auto& r : rest) out += " " + r;
    return out + ")";
  }

  const SpecDb& db_;
};

}  // namespace

CommandTemplate extract_template(const CommandAst& ast, const SpecDb& db) {
  Renderer r(db);
  r.node(ast.root);
  return r.finish();
}

std::string fill_template(const CommandTemplate& tmpl, const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.pieces.size(); ++i) {
    out += tmpl.pieces[i];
    if (i < values.size() && i + 1 < tmpl.pieces.size()) out += values[i];
  }
  return out;
}

std::string template_key(const CommandAst& ast, const SpecDb& db) {
  return KeyBuilder(db).node(ast.root);
}

bool template_equal(const CommandAst& a, const CommandAst& b, const SpecDb& db) {
  return template_key(a, db) == template_key(b, db);
}

}  // namespace nlbash
