#include "lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

namespace nlbash::detail {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

bool is_meta(char c) {
  return is_blank(c) || c == '\n' || c == '|' || c == '&' || c == ';' || c == '(' || c == ')' ||
         c == '<' || c == '>';
}

// Longest operators first.
constexpr std::array<std::string_view, 9> kControlOps{"&&", "||", "|&", ";;", "|",
                                                      ";",  "&",  "(",  ")"};
constexpr std::array<std::string_view, 12> kRedirectOps{
    "&>>", "<<<", "<<-", "&>", "<<", "<>", "<&", ">>", ">|", ">&", "<", ">"};

class Scanner {
 public:
  Scanner(std::string_view src, std::size_t end, LexOutput& out) : src_(src), end_(end), out_(out) {}

  // Skips a single-quoted string starting at pos (on the quote). Returns index past it.
  std::optional<std::size_t> skip_single(std::size_t pos) {
    const auto close = src_.find('\'', pos + 1);
    if (close == std::string_view::npos || close >= end_) return std::nullopt;
    return close + 1;
  }

  // Skips a double-quoted string; records substitutions when `spans` is set.
  std::optional<std::size_t> skip_double(std::size_t pos, std::vector<SubstSpan>* spans) {
    std::size_t i = pos + 1;
    while (i < end_) {
      const char c = src_[i];
      if (c == '\\') {
        i += 2;
      } else if (c == '"') {
        return i + 1;
      } else if (c == '$' && i + 1 < end_ && src_[i + 1] == '(') {
        auto next = skip_dollar_paren(i, spans);
        if (!next) return std::nullopt;
        i = *next;
      } else if (c == '$' && i + 1 < end_ && src_[i + 1] == '{') {
        auto next = skip_braces(i + 1);
        if (!next) return std::nullopt;
        i = *next;
      } else if (c == '`') {
        auto next = skip_backtick(i, spans);
        if (!next) return std::nullopt;
        i = *next;
      } else {
        ++i;
      }
    }
    return std::nullopt;
  }

  std::optional<std::size_t> skip_backtick(std::size_t pos, std::vector<SubstSpan>* spans) {
    std::size_t i = pos + 1;
    while (i < end_) {
      if (src_[i] == '\\') {
        i += 2;
      } else if (src_[i] == '`') {
        if (spans) spans->push_back({NodeKind::command_subst, pos + 1, i});
        return i + 1;
      } else {
        ++i;
      }
    }
    return std::nullopt;
  }

  std::optional<std::size_t> skip_braces(std::size_t pos) {
    int depth = 0;
    for (std::size_t i = pos; i < end_; ++i) {
      if (src_[i] == '\\') {
        ++i;
      } else if (src_[i] == '{') {
        ++depth;
      } else if (src_[i] == '}') {
        if (--depth == 0) return i + 1;
      }
    }
    return std::nullopt;
  }

  // Index just past the ")" matching the "(" at open.
  std::optional<std::size_t> skip_parens(std::size_t open) {
    int depth = 0;
    std::size_t i = open;
    while (i < end_) {
      const char c = src_[i];
      if (c == '\\') {
        i += 2;
        continue;
      }
      if (c == '\'') {
        auto next = skip_single(i);
        if (!next) return std::nullopt;
        i = *next;
        continue;
      }
      if (c == '"') {
        auto next = skip_double(i, nullptr);
        if (!next) return std::nullopt;
        i = *next;
        continue;
      }
      if (c == '`') {
        auto next = skip_backtick(i, nullptr);
        if (!next) return std::nullopt;
        i = *next;
        continue;
      }
      if (c == '(') ++depth;
      if (c == ')' && --depth == 0) return i + 1;
      ++i;
    }
    return std::nullopt;
  }

  // "$(" at pos: command substitution, "$((" arithmetic (literal).
  std::optional<std::size_t> skip_dollar_paren(std::size_t pos, std::vector<SubstSpan>* spans) {
    const bool arithmetic = pos + 2 < end_ && src_[pos + 2] == '(';
    auto close = skip_parens(pos + 1);
    if (!close) return std::nullopt;
    if (!arithmetic && spans) spans->push_back({NodeKind::command_subst, pos + 2, *close - 1});
    return close;
  }

  void error(std::size_t begin, std::size_t end, std::string detail) {
    out_.errors.push_back({begin, end, std::move(detail)});
  }

  // Reads a word starting at pos; returns the end offset.
  std::size_t read_word(std::size_t pos, LexToken& tok) {
    std::size_t i = pos;
    while (i < end_) {
      const char c = src_[i];
      if ((c == '<' || c == '>') && i + 1 < end_ && src_[i + 1] == '(' && i == pos) {
        auto close = skip_parens(i + 1);
        if (!close) {
          error(i, end_, "unterminated process substitution");
          return end_;
        }
        tok.substitutions.push_back({NodeKind::process_subst, i + 2, *close - 1});
        i = *close;
        continue;
      }
      if (is_meta(c)) break;
      if (c == '\\') {
        tok.quoted = true;
        i = std::min(i + 2, end_);
      } else if (c == '\'') {
        tok.quoted = true;
        auto next = skip_single(i);
        if (!next) {
          error(i, end_, "unterminated single quote");
          return end_;
        }
        i = *next;
      } else if (c == '"') {
        tok.quoted = true;
        auto next = skip_double(i, &tok.substitutions);
        if (!next) {
          error(i, end_, "unterminated double quote");
          return end_;
        }
        i = *next;
      } else if (c == '$' && i + 1 < end_ && src_[i + 1] == '(') {
        auto next = skip_dollar_paren(i, &tok.substitutions);
        if (!next) {
          error(i, end_, "unterminated command substitution");
          return end_;
        }
        i = *next;
      } else if (c == '$' && i + 1 < end_ && src_[i + 1] == '{') {
        auto next = skip_braces(i + 1);
        if (!next) {
          error(i, end_, "unterminated parameter expansion");
          return end_;
        }
        i = *next;
      } else if (c == '`') {
        auto next = skip_backtick(i, &tok.substitutions);
        if (!next) {
          error(i, end_, "unterminated backquote");
          return end_;
        }
        i = *next;
      } else {
        ++i;
      }
    }
    return i;
  }

  void run(std::size_t begin) {
    std::size_t i = begin;
    while (i < end_) {
      const char c = src_[i];
      if (is_blank(c)) {
        ++i;
        continue;
      }
      if (c == '\n') {
        out_.tokens.push_back({LexKind::newline, "\n", i, i + 1, {}, false, false});
        ++i;
        continue;
      }
      const auto rest = src_.substr(i, end_ - i);
      const bool proc_subst = (c == '<' || c == '>') && rest.size() > 1 && rest[1] == '(';
      if (!proc_subst) {
        if (auto op = match(rest, kRedirectOps)) {
          out_.tokens.push_back({LexKind::redirect, std::string(*op), i, i + op->size(), {}, false,
                                 false});
          i += op->size();
          continue;
        }
        if (auto op = match(rest, kControlOps)) {
          out_.tokens.push_back({LexKind::op, std::string(*op), i, i + op->size(), {}, false,
                                 false});
          i += op->size();
          continue;
        }
      }

      LexToken tok;
      tok.kind = LexKind::word;
      tok.begin = i;
      tok.end = read_word(i, tok);
      tok.text = std::string(src_.substr(tok.begin, tok.end - tok.begin));
      i = tok.end;

      // "2>file": an all-digit word glued to a redirection operator.
      if (i < end_ && (src_[i] == '<' || src_[i] == '>') && !tok.quoted && !tok.text.empty() &&
          std::all_of(tok.text.begin(), tok.text.end(),
                      [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
        const auto after = src_.substr(i, end_ - i);
        if (auto op = match(after, kRedirectOps)) {
          out_.tokens.push_back({LexKind::redirect, tok.text + std::string(*op), tok.begin,
                                 i + op->size(), {}, false, false});
          i += op->size();
          continue;
        }
      }

      if (tok.substitutions.size() == 1) {
        const auto& s = tok.substitutions.front();
        const bool dollar = s.kind == NodeKind::command_subst && s.inner_begin == tok.begin + 2 &&
                            s.inner_end + 1 == tok.end && src_[tok.begin] == '$';
        const bool backtick = s.kind == NodeKind::command_subst &&
                              s.inner_begin == tok.begin + 1 && s.inner_end + 1 == tok.end &&
                              src_[tok.begin] == '`';
        const bool process = s.kind == NodeKind::process_subst &&
                             s.inner_begin == tok.begin + 2 && s.inner_end + 1 == tok.end;
        tok.whole_substitution = dollar || backtick || process;
      }
      out_.tokens.push_back(std::move(tok));
    }
  }

 private:
  template <std::size_t N>
  static std::optional<std::string_view> match(std::string_view rest,
                                               const std::array<std::string_view, N>& ops) {
    for (auto op : ops) {
      if (!op.empty() && rest.substr(0, op.size()) == op) return op;
    }
    return std::nullopt;
  }

  std::string_view src_;
  std::size_t end_;
  LexOutput& out_;
};

}  // namespace

LexOutput lex(std::string_view source, std::size_t begin, std::size_t end) {
  LexOutput out;
  Scanner scanner(source, std::min(end, source.size()), out);
  scanner.run(begin);
  return out;
}

}  // namespace nlbash::detail
