#include "nlbash/tokenization.hpp"

#include <locale>

#include "nlbash/nl_pipeline.hpp"

namespace nlbash {

namespace {

// Length of the UTF-8 sequence at s[i] and its code point, or 0 if invalid.
std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 0;
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

const std::ctype<wchar_t>* unicode_ctype() {
  static const std::locale* loc = []() -> const std::locale* {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        return new std::locale(name);
      } catch (const std::runtime_error&) {
      }
    }
    return nullptr;
  }();
  return loc ? &std::use_facet<std::ctype<wchar_t>>(*loc) : nullptr;
}

enum class CharClass { letter, digit, other };

CharClass classify(char32_t cp) {
  if (cp >= '0' && cp <= '9') return CharClass::digit;
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return CharClass::letter;
  if (cp < 0x80) return CharClass::other;
  const auto* facet = unicode_ctype();
  // Without a UTF-8 locale every non-ASCII character counts as a letter.
  if (!facet) return CharClass::letter;
  return facet->is(std::ctype_base::alpha, static_cast<wchar_t>(cp)) ? CharClass::letter
                                                                     : CharClass::other;
}

bool is_marker_like(std::string_view item) {
  while (!item.empty() && item.front() == '\\') item.remove_prefix(1);
  return item == kSubStart || item == kSubEnd;
}

}  // namespace

std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = 0;
    std::size_t len = decode_utf8(text, i, cp);
    if (len == 0) len = 1;
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

std::vector<std::string> to_subtokens(std::string_view constant) {
  std::vector<std::string> out{std::string(kSubStart)};
  std::optional<CharClass> run;
  std::size_t i = 0;
  while (i < constant.size()) {
    char32_t cp = 0;
    std::size_t len = decode_utf8(constant, i, cp);
    CharClass cls = CharClass::other;
    if (len == 0) {
      len = 1;
    } else {
      cls = classify(cp);
    }
    const auto piece = constant.substr(i, len);
    if (cls != CharClass::other && run == cls) {
      out.back() += piece;
    } else {
      out.emplace_back(piece);
    }
    run = cls == CharClass::other ? std::nullopt : std::optional<CharClass>(cls);
    i += len;
  }
  out.emplace_back(kSubEnd);
  return out;
}

std::string escape_marker(std::string_view item) {
  if (is_marker_like(item)) return "\\" + std::string(item);
  return std::string(item);
}

std::string unescape_marker(std::string_view item) {
  if (!item.empty() && item.front() == '\\' && is_marker_like(item)) {
    return std::string(item.substr(1));
  }
  return std::string(item);
}

std::vector<std::string> detokenize_words(const std::vector<std::string>& items) {
  std::vector<std::string> words;
  std::optional<std::string> open;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    if (item == kSubStart) {
      if (open) throw TokenizationError("nested SUB_START at item " + std::to_string(i));
      open.emplace();
    } else if (item == kSubEnd) {
      if (!open) throw TokenizationError("SUB_END without SUB_START at item " + std::to_string(i));
      words.push_back(std::move(*open));
      open.reset();
    } else if (open) {
      *open += item;
    } else {
      words.push_back(unescape_marker(item));
    }
  }
  if (open) throw TokenizationError("unclosed SUB_START");
  return words;
}

std::string detokenize_subtokens(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& w : detokenize_words(items)) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::token: return "token";
    case Granularity::character: return "char";
    case Granularity::subtoken: return "subtoken";
  }
  return "token";
}

std::optional<Granularity> parse_granularity(std::string_view text) {
  if (text == "token") return Granularity::token;
  if (text == "char" || text == "character") return Granularity::character;
  if (text == "subtoken" || text == "sub-token") return Granularity::subtoken;
  return std::nullopt;
}

namespace {

void append_subtokens(TokenSequence& seq, std::string_view constant) {
  const auto begin = seq.items.size();
  for (auto& s : to_subtokens(constant)) seq.items.push_back(std::move(s));
  seq.boundary_markers.emplace_back(begin, seq.items.size() - 1);
}

}  // namespace

TokenSequence encode_command(std::string_view text, const CommandAst& ast, Granularity g) {
  TokenSequence seq;
  seq.granularity = g;
  if (g == Granularity::character) {
    seq.items = utf8_chars(text);
    return seq;
  }
  for (const auto& tok : command_tokens(ast)) {
    if (g == Granularity::subtoken && tok.cls == TokenClass::argument) {
      append_subtokens(seq, tok.text);
    } else {
      seq.items.push_back(escape_marker(tok.text));
    }
  }
  return seq;
}

TokenSequence encode_nl(std::string_view text, Granularity g) {
  TokenSequence seq;
  seq.granularity = g;
  if (g == Granularity::character) {
    seq.items = utf8_chars(text);
    return seq;
  }
  for (const auto& tok : tokenize_nl(text)) {
    if (g == Granularity::subtoken) {
      append_subtokens(seq, tok);
    } else {
      seq.items.push_back(escape_marker(tok));
    }
  }
  return seq;
}

nlohmann::json encoded_record(const std::string& id, const TokenSequence& nl,
                              const TokenSequence& cmd) {
  return nlohmann::json{{"id", id},
                        {"nl_tokens", nl.items},
                        {"cmd_tokens", cmd.items},
                        {"granularity", std::string(to_string(cmd.granularity))}};
}

}  // namespace nlbash
