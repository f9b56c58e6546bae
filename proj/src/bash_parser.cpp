#include "nlbash/bash_parser.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "lexer.hpp"

namespace nlbash {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::io_redirection: return "io_redirection";
    case ViolationKind::variable_assignment: return "variable_assignment";
    case ViolationKind::compound_statement: return "compound_statement";
    case ViolationKind::nested_interpreter: return "nested_interpreter";
    case ViolationKind::multi_statement: return "multi_statement";
    case ViolationKind::unknown_utility: return "unknown_utility";
    case ViolationKind::unknown_flag: return "unknown_flag";
    case ViolationKind::syntax_error: return "syntax_error";
  }
  return "syntax_error";
}

namespace {

using detail::LexKind;
using detail::LexToken;

const std::set<std::string, std::less<>> kCompoundKeywords{
    "if", "then", "elif", "else", "fi", "for", "while", "until", "do", "done",
    "case", "esac", "select", "function", "{", "}", "[[", "]]"};

const std::set<std::string, std::less<>> kExpressionOperators{"\\(", "\\)", "!", "\\!", ",",
                                                                "'('", "')'", "\"(\"", "\")\"",
                                                                "'!'"};

const std::set<std::string, std::less<>> kExecTerminators{"\\;", "';'", "\";\"", "+"};

bool is_assignment(const LexToken& word) {
  static const std::regex pattern(R"(^[A-Za-z_][A-Za-z0-9_]*(\[[^\]]*\])?\+?=)");
  return std::regex_search(word.text, pattern);
}

bool is_numeric_flag(std::string_view word) {
  return word.size() > 1 && word[0] == '-' &&
         std::all_of(word.begin() + 1, word.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

class Parser {
 public:
  Parser(std::string_view source, const SpecDb& db, ParseOptions options)
      : src_(source), db_(db), options_(options) {}

  std::optional<Node> parse_range(std::size_t begin, std::size_t end) {
    auto lexed = detail::lex(src_, begin, end);
    for (auto& e : lexed.errors) {
      report(ViolationKind::syntax_error, e.begin, e.end, e.detail);
    }
    Cursor cur{std::move(lexed.tokens), 0};
    if (cur.tokens.empty()) {
      report(ViolationKind::syntax_error, begin, std::max(begin, end), "empty command");
      return std::nullopt;
    }
    auto node = parse_list(cur);
    while (!cur.done()) {
      const auto& t = cur.peek();
      report(ViolationKind::syntax_error, t.begin, t.end, "unexpected \"" + t.text + "\"");
      cur.pos++;
      if (!cur.done()) parse_list(cur);
    }
    return node;
  }

  std::vector<ScopeViolation> take_violations() { return std::move(violations_); }

 private:
  struct Cursor {
    std::vector<LexToken> tokens;
    std::size_t pos = 0;
    bool done() const { return pos >= tokens.size(); }
    const LexToken& peek() const { return tokens[pos]; }
    bool at_op(std::string_view op) const {
      return !done() && tokens[pos].kind == LexKind::op && tokens[pos].text == op;
    }
  };

  void report(ViolationKind kind, std::size_t begin, std::size_t end, std::string detail) {
    begin = std::min(begin, src_.size());
    end = std::clamp(end, begin, src_.size());
    violations_.push_back({kind, {begin, end}, std::move(detail)});
  }

  std::optional<Node> parse_list(Cursor& cur) {
    auto node = parse_and_or(cur);
    while (!cur.done()) {
      const auto& t = cur.peek();
      const bool separator = t.kind == LexKind::newline ||
                             (t.kind == LexKind::op && (t.text == ";" || t.text == "&" ||
                                                        t.text == ";;"));
      if (!separator) break;
      report(ViolationKind::compound_statement, t.begin, t.end,
             t.kind == LexKind::newline ? "multiple lines" : "statement separator \"" + t.text + "\"");
      cur.pos++;
      if (!cur.done() && !cur.at_op(")")) parse_and_or(cur);
    }
    return node;
  }

  std::optional<Node> parse_and_or(Cursor& cur) {
    auto left = parse_pipeline(cur);
    while (cur.at_op("&&") || cur.at_op("||")) {
      const auto& t = cur.peek();
      const auto op = t.text == "&&" ? LogicalOp::and_op : LogicalOp::or_op;
      const auto op_begin = t.begin;
      const auto op_end = t.end;
      cur.pos++;
      auto right = parse_pipeline(cur);
      if (!right) {
        report(ViolationKind::syntax_error, op_begin, op_end, "missing command after operator");
        return left;
      }
      if (!left) {
        left = std::move(right);
        continue;
      }
      Node node;
      node.kind = NodeKind::logical;
      node.op = op;
      node.children.push_back(std::move(*left));
      node.children.push_back(std::move(*right));
      left = std::move(node);
    }
    return left;
  }

  std::optional<Node> parse_pipeline(Cursor& cur) {
    std::vector<Node> stages;
    auto first = parse_command(cur);
    if (first) stages.push_back(std::move(*first));
    while (cur.at_op("|") || cur.at_op("|&")) {
      const auto t = cur.peek();
      if (t.text == "|&") {
        report(ViolationKind::io_redirection, t.begin, t.end, "stderr pipe \"|&\"");
      }
      cur.pos++;
      auto next = parse_command(cur);
      if (!next) {
        report(ViolationKind::syntax_error, t.begin, t.end, "missing command after \"|\"");
        break;
      }
      stages.push_back(std::move(*next));
    }
    if (stages.empty()) return std::nullopt;
    if (stages.size() == 1) return std::move(stages.front());
    Node node;
    node.kind = NodeKind::pipeline;
    node.children = std::move(stages);
    return node;
  }

  std::optional<Node> parse_command(Cursor& cur) {
    if (cur.done()) return std::nullopt;
    const auto& t = cur.peek();
    if (t.kind == LexKind::op && t.text == "(") {
      const auto open = t;
      cur.pos++;
      auto inner = parse_list(cur);
      if (!cur.at_op(")")) {
        report(ViolationKind::syntax_error, open.begin, open.end, "unbalanced \"(\"");
      } else {
        cur.pos++;
      }
      skip_redirections(cur);
      if (!inner) return std::nullopt;
      Node group;
      group.kind = NodeKind::group;
      group.children.push_back(std::move(*inner));
      return group;
    }
    return parse_simple(cur);
  }

  void skip_redirections(Cursor& cur) {
    while (!cur.done() && cur.peek().kind == LexKind::redirect) {
      const auto t = cur.peek();
      cur.pos++;
      std::size_t end = t.end;
      if (!cur.done() && cur.peek().kind == LexKind::word) {
        end = cur.peek().end;
        cur.pos++;
      }
      report(ViolationKind::io_redirection, t.begin, end, "redirection \"" + t.text + "\"");
    }
  }

  std::optional<Node> parse_simple(Cursor& cur) {
    std::vector<LexToken> words;
    std::size_t first_begin = cur.done() ? src_.size() : cur.peek().begin;
    while (!cur.done()) {
      const auto& t = cur.peek();
      if (t.kind == LexKind::word) {
        words.push_back(t);
        cur.pos++;
      } else if (t.kind == LexKind::redirect) {
        skip_redirections(cur);
      } else if (t.kind == LexKind::op && t.text == "(") {
        // name ( ) { ... } or a stray parenthesis after words
        if (!words.empty()) {
          report(ViolationKind::compound_statement, t.begin, t.end, "function definition");
          cur.pos++;
          if (cur.at_op(")")) cur.pos++;
          while (!cur.done() && cur.peek().kind == LexKind::word) cur.pos++;
          if (cur.at_op("(")) {
            // unreachable in practice; stop here to avoid looping
          }
          break;
        }
        break;
      } else {
        break;
      }
    }
    if (words.empty()) {
      if (!cur.done()) {
        const auto& t = cur.peek();
        if (!(t.kind == LexKind::op && t.text == "(")) {
          report(ViolationKind::syntax_error, t.begin, t.end, "expected a command before \"" +
                                                                  t.text + "\"");
        }
      } else {
        report(ViolationKind::syntax_error, first_begin, first_begin, "expected a command");
      }
      return std::nullopt;
    }
    return build_statement(words);
  }

  // Statement-level checks (assignments, keywords), then the utility itself.
  std::optional<Node> build_statement(const std::vector<LexToken>& words) {
    std::size_t start = 0;
    while (start < words.size() && is_assignment(words[start])) {
      report(ViolationKind::variable_assignment, words[start].begin, words[start].end,
             "assignment \"" + words[start].text + "\"");
      ++start;
    }
    if (start == words.size()) return std::nullopt;
    const auto& head = words[start];
    if (!head.quoted && kCompoundKeywords.count(head.text)) {
      report(ViolationKind::compound_statement, head.begin, head.end,
             "compound statement \"" + head.text + "\"");
      return std::nullopt;
    }
    return build_utility(words, start, words.size());
  }

  Arg make_arg(const LexToken& word) {
    Arg arg;
    arg.text = word.text;
    arg.whole_substitution = word.whole_substitution;
    for (const auto& s : word.substitutions) {
      auto inner = parse_range(s.inner_begin, s.inner_end);
      if (!inner) continue;
      Node sub;
      sub.kind = s.kind;
      sub.children.push_back(std::move(*inner));
      arg.substitutions.push_back(std::move(sub));
    }
    if (arg.whole_substitution && arg.substitutions.size() != 1) arg.whole_substitution = false;
    return arg;
  }

  Node build_utility(const std::vector<LexToken>& words, std::size_t begin, std::size_t end) {
    const auto& head = words[begin];
    Node node;
    node.kind = NodeKind::utility;
    node.name = head.text;

    const UtilitySpec* spec = head.quoted || !head.substitutions.empty()
                                  ? nullptr
                                  : db_.lookup(head.text);
    if (!spec) {
      node.unknown_utility = true;
      if (!options_.permissive) {
        report(ViolationKind::unknown_utility, head.begin, head.end,
               "unknown utility \"" + head.text + "\"");
      }
    } else if (spec->scope == ScopeClass::nested_interpreter) {
      report(ViolationKind::nested_interpreter, head.begin, head.end,
             "\"" + head.text + "\" runs a program in another language");
    } else if (spec->scope == ScopeClass::multi_statement) {
      report(ViolationKind::multi_statement, head.begin, head.end,
             "\"" + head.text + "\" is used in multi-statement scripts");
    } else if (spec->scope == ScopeClass::out_of_scope) {
      node.unknown_utility = true;
      if (!options_.permissive) {
        report(ViolationKind::unknown_utility, head.begin, head.end,
               "\"" + head.text + "\" is outside the supported utility list");
      }
    }
    // Substitutions in the utility position are still parsed for violations.
    if (!head.substitutions.empty()) make_arg(head);

    const bool validate = spec && spec->scope == ScopeClass::in_scope;
    std::size_t positional = 0;
    bool options_ended = false;
    const auto tail_after = validate ? spec->command_tail() : std::nullopt;
    const bool env_assignments = validate && spec->has_option("env_assignments");

    std::size_t i = begin + 1;
    while (i < end) {
      const auto& w = words[i];

      if (tail_after && positional >= static_cast<std::size_t>(*tail_after) &&
          !(w.text.size() > 1 && w.text[0] == '-' && !options_ended) &&
          !(env_assignments && is_assignment(w))) {
        auto nested = build_utility(words, i, end);
        node.items.emplace_back(TailCommand{Box<Node>(std::move(nested))});
        break;
      }

      const bool dashed = !options_ended && !w.quoted && w.text.size() > 1 && w.text[0] == '-';
      if (dashed && w.text == "--") {
        options_ended = true;
        node.items.emplace_back(Reserved{w.text});
        ++i;
        continue;
      }
      if (dashed && !(validate && is_dash_arg(*spec, w.text))) {
        i = parse_flag_word(node, spec, validate, words, i, end);
        continue;
      }
      if (validate && spec->has_expression_operators() && kExpressionOperators.count(w.text)) {
        node.items.emplace_back(Reserved{w.text});
        ++i;
        continue;
      }
      if (w.text == "{}") {
        node.items.emplace_back(Reserved{w.text});
        ++i;
        continue;
      }
      node.items.emplace_back(make_arg(w));
      ++positional;
      ++i;
    }
    return node;
  }

  static bool is_dash_arg(const UtilitySpec& spec, const std::string& word) {
    if (!spec.dash_arg) return false;
    if (spec.find_short(word) || (word.rfind("--", 0) == 0 && spec.find_long(word))) return false;
    return std::regex_match(word, spec.dash_arg->compiled);
  }

  void unknown_flag(Node& node, bool validate, const LexToken& w) {
    FlagBinding flag;
    flag.text = w.text;
    flag.canonical = w.text;
    flag.known = false;
    if (validate && !options_.permissive) {
      report(ViolationKind::unknown_flag, w.begin, w.end,
             "unknown flag \"" + w.text + "\" for " + node.name);
    }
    node.items.emplace_back(std::move(flag));
  }

  // Consumes the value words of `spec`; returns the next word index.
  std::size_t take_values(FlagBinding& flag, const FlagSpec& spec, const std::vector<LexToken>& words,
                          std::size_t next, std::size_t end, const LexToken& flag_word) {
    if (spec.takes_command()) {
      std::size_t stop = next;
      while (stop < end && !kExecTerminators.count(words[stop].text)) ++stop;
      if (stop == end || stop == next) {
        report(ViolationKind::syntax_error, flag_word.begin, words[end - 1].end,
               stop == next ? "missing command after " + flag.text
                            : "missing terminator for " + flag.text);
        for (std::size_t k = next; k < end; ++k) flag.values.push_back(make_arg(words[k]));
        return end;
      }
      flag.command.push_back(build_utility(words, next, stop));
      flag.terminator = words[stop].text;
      return stop + 1;
    }
    if (spec.arity != Arity::required_value) return next;
    const int needed = spec.value_count() - static_cast<int>(flag.values.size());
    for (int k = 0; k < needed; ++k) {
      if (next >= end) {
        report(ViolationKind::syntax_error, flag_word.begin, flag_word.end,
               "flag " + flag.text + " requires a value");
        break;
      }
      Arg value = make_arg(words[next]);
      value.enumerated = spec.value_type == SemanticType::Enum;
      flag.values.push_back(std::move(value));
      ++next;
    }
    return next;
  }

  Arg attached_value(const std::string& text, const FlagSpec& spec) {
    Arg arg;
    arg.text = text;
    arg.enumerated = spec.value_type == SemanticType::Enum;
    return arg;
  }

  std::size_t parse_flag_word(Node& node, const UtilitySpec* spec, bool validate,
                              const std::vector<LexToken>& words, std::size_t i, std::size_t end) {
    const auto& w = words[i];
    if (!validate) {
      // Unknown or out-of-scope utility: keep the word as an unvalidated flag.
      unknown_flag(node, false, w);
      return i + 1;
    }

    // Long option, possibly with "=value".
    if (w.text.rfind("--", 0) == 0) {
      const auto eq = w.text.find('=');
      const std::string name = w.text.substr(0, eq);
      const FlagSpec* f = spec->find_long(name);
      if (!f) f = spec->find_long_prefix(name);
      if (!f) {
        unknown_flag(node, validate, w);
        return i + 1;
      }
      FlagBinding flag;
      flag.text = name;
      flag.canonical = f->short_form;
      if (eq != std::string::npos) {
        if (f->arity == Arity::none) {
          unknown_flag(node, validate, w);
          return i + 1;
        }
        flag.joint = Joint::equals;
        flag.values.push_back(attached_value(w.text.substr(eq + 1), *f));
        if (f->value_count() <= 1) {
          node.items.emplace_back(std::move(flag));
          return i + 1;
        }
      }
      const auto next = take_values(flag, *f, words, i + 1, end, w);
      node.items.emplace_back(std::move(flag));
      return next;
    }

    // Whole-word single-dash flag (find's -name, ls -1, ...).
    if (const FlagSpec* f = spec->find_short(w.text)) {
      FlagBinding flag;
      flag.text = w.text;
      flag.canonical = f->short_form;
      const auto next = take_values(flag, *f, words, i + 1, end, w);
      node.items.emplace_back(std::move(flag));
      return next;
    }

    // -5 for head/tail and friends.
    if (is_numeric_flag(w.text)) {
      if (const FlagSpec* f = spec->find_short("-NUM")) {
        FlagBinding flag;
        flag.text = "-";
        flag.canonical = f->short_form;
        flag.joint = Joint::attached;
        flag.values.push_back(attached_value(w.text.substr(1), *f));
        node.items.emplace_back(std::move(flag));
        return i + 1;
      }
    }

    // Bundled short flags ("-cvf") and attached values ("-n5", "-k2").
    if (spec->allows_bundling() && w.text[1] != '-') {
      std::vector<FlagBinding> parts;
      std::size_t next = i + 1;
      bool ok = true;
      for (std::size_t k = 1; k < w.text.size(); ++k) {
        const std::string letter = std::string("-") + w.text[k];
        const FlagSpec* f = spec->find_short(letter);
        if (!f) {
          ok = false;
          break;
        }
        FlagBinding flag;
        flag.text = letter;
        flag.canonical = f->short_form;
        flag.bundled = k > 1;
        const std::string rest = w.text.substr(k + 1);
        if (f->arity != Arity::none && !rest.empty()) {
          flag.joint = Joint::attached;
          flag.values.push_back(attached_value(rest, *f));
          if (f->value_count() > 1) next = take_values(flag, *f, words, next, end, w);
          parts.push_back(std::move(flag));
          break;
        }
        if (f->arity == Arity::required_value || f->takes_command()) {
          if (k + 1 != w.text.size()) {
            ok = false;
            break;
          }
          next = take_values(flag, *f, words, next, end, w);
        }
        parts.push_back(std::move(flag));
      }
      if (ok && !parts.empty()) {
        for (auto& p : parts) node.items.emplace_back(std::move(p));
        return next;
      }
    }

    unknown_flag(node, validate, w);
    return i + 1;
  }

  std::string_view src_;
  const SpecDb& db_;
  ParseOptions options_;
  std::vector<ScopeViolation> violations_;
};

}  // namespace

ParseResult parse_command(std::string_view raw, const SpecDb& db, ParseOptions options) {
  Parser parser(raw, db, options);
  auto node = parser.parse_range(0, raw.size());
  auto violations = parser.take_violations();
  std::stable_sort(violations.begin(), violations.end(),
                   [](const ScopeViolation& a, const ScopeViolation& b) {
                     return a.span.begin < b.span.begin;
                   });
  std::optional<CommandAst> ast;
  if (node) ast = CommandAst{std::move(*node)};
  return ParseResult(std::move(ast), std::move(violations));
}

ScopeClassification classify_scope(std::string_view raw, const SpecDb& db) {
  auto result = parse_command(raw, db);
  return {result.ok(), result.violations()};
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Drops a leading "sudo" together with its own options.
std::string_view strip_sudo(std::string_view s) {
  if (s.substr(0, 4) != "sudo" || (s.size() > 4 && !is_space(s[4]))) return s;
  if (s.size() == 4) return {};
  s = trim(s.substr(4));
  while (s.size() > 1 && s[0] == '-') {
    const auto space = s.find_first_of(" \t");
    const auto opt = s.substr(0, space);
    s = space == std::string_view::npos ? std::string_view{} : trim(s.substr(space));
    if ((opt == "-u" || opt == "-g") && !s.empty()) {
      const auto next = s.find_first_of(" \t");
      s = next == std::string_view::npos ? std::string_view{} : trim(s.substr(next));
    }
  }
  return s;
}

// Replaces "/usr/bin/find" with "find" wherever a command starts.
std::string strip_utility_paths(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool command_start = true;
  char quote = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (quote) {
      out.push_back(c);
      if (c == '\\' && quote == '"' && i + 1 < s.size()) out.push_back(s[++i]);
      else if (c == quote) quote = 0;
      ++i;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
      command_start = false;
      out.push_back(c);
      ++i;
      continue;
    }
    if (c == '\\' && i + 1 < s.size()) {
      out.push_back(c);
      out.push_back(s[i + 1]);
      command_start = false;
      i += 2;
      continue;
    }
    if (is_space(c)) {
      out.push_back(c);
      ++i;
      continue;
    }
    if (c == '|' || c == '&' || c == ';' || c == '(' || c == '`') {
      out.push_back(c);
      command_start = true;
      ++i;
      continue;
    }
    if (command_start && c == '/') {
      std::size_t j = i;
      while (j < s.size() && !is_space(s[j]) && s[j] != '|' && s[j] != '&' && s[j] != ';' &&
             s[j] != '(' && s[j] != ')' && s[j] != '$' && s[j] != '`' && s[j] != '<' && s[j] != '>' &&
             s[j] != '\'' && s[j] != '"' && s[j] != '\\') {
        ++j;
      }
      const auto word = s.substr(i, j - i);
      const auto slash = word.find_last_of('/');
      if (slash + 1 < word.size()) {
        out.append(word.substr(slash + 1));
      } else {
        out.append(word);
      }
      command_start = false;
      i = j;
      continue;
    }
    command_start = false;
    out.push_back(c);
    ++i;
  }
  return out;
}

}  // namespace

std::string clean_command(std::string_view raw) {
  std::string_view s = trim(raw);
  while (true) {
    const auto before = s;
    if (!s.empty() && (s[0] == '$' || s[0] == '#') && (s.size() == 1 || is_space(s[1]))) {
      s = trim(s.substr(1));
    }
    s = strip_sudo(s);
    if (s == before) break;
  }
  return strip_utility_paths(s);
}

}  // namespace nlbash
