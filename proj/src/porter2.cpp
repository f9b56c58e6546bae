#include "nlbash/porter2.hpp"

#include <algorithm>
#include <array>
#include <string_view>
#include <utility>

namespace nlbash {

namespace {

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_double(const std::string& s) {
  if (s.size() < 2) return false;
  const char c = s.back();
  if (c != s[s.size() - 2]) return false;
  return c == 'b' || c == 'd' || c == 'f' || c == 'g' || c == 'm' || c == 'n' || c == 'p' ||
         c == 'r' || c == 't';
}

bool is_li_ending(char c) {
  return c == 'c' || c == 'd' || c == 'e' || c == 'g' || c == 'h' || c == 'k' || c == 'm' ||
         c == 'n' || c == 'r' || c == 't';
}

// Region after the first non-vowel following a vowel, starting at `from`.
std::size_t region_after(const std::string& w, std::size_t from) {
  for (std::size_t i = from + 1; i < w.size(); ++i) {
    if (!is_vowel(w[i]) && is_vowel(w[i - 1])) return i + 1;
  }
  return w.size();
}

// Short syllable at the end of w[0, end).
bool ends_short_syllable(std::string_view w) {
  const std::size_t n = w.size();
  if (n >= 3 && !is_vowel(w[n - 3]) && is_vowel(w[n - 2]) && !is_vowel(w[n - 1]) &&
      w[n - 1] != 'w' && w[n - 1] != 'x' && w[n - 1] != 'Y') {
    return true;
  }
  if (n == 2 && is_vowel(w[0]) && !is_vowel(w[1])) return true;
  return n >= 4 && w.substr(n - 4) == "past";
}

struct Stemmer {
  std::string w;
  std::size_t r1 = 0;
  std::size_t r2 = 0;

  bool in_r1(std::size_t suffix_len) const { return w.size() - suffix_len >= r1; }
  bool in_r2(std::size_t suffix_len) const { return w.size() - suffix_len >= r2; }
  void replace(std::size_t suffix_len, std::string_view with) {
    w.erase(w.size() - suffix_len);
    w += with;
  }
  bool has_vowel_before(std::size_t suffix_len) const {
    return std::any_of(w.begin(), w.end() - static_cast<std::ptrdiff_t>(suffix_len), is_vowel);
  }

  void step0() {
    for (std::string_view s : {"'s'", "'s", "'"}) {
      if (ends_with(w, s)) {
        replace(s.size(), "");
        return;
      }
    }
  }

  void step1a() {
    if (ends_with(w, "sses")) {
      replace(4, "ss");
    } else if (ends_with(w, "ied") || ends_with(w, "ies")) {
      replace(3, w.size() > 4 ? "i" : "ie");
    } else if (ends_with(w, "us") || ends_with(w, "ss")) {
      // unchanged
    } else if (ends_with(w, "s")) {
      if (w.size() >= 3 && has_vowel_before(2)) replace(1, "");
    }
  }

  void step1b() {
    static constexpr std::array<std::string_view, 6> kSuffixes{"eedly", "ingly", "edly",
                                                               "eed",   "ing",   "ed"};
    for (auto suffix : kSuffixes) {
      if (!ends_with(w, suffix)) continue;
      const std::string_view stem(w.data(), w.size() - suffix.size());
      if (suffix == "eed" || suffix == "eedly") {
        if (in_r1(suffix.size()) && stem != "succ" && stem != "proc" && stem != "exc") {
          replace(suffix.size(), "ee");
        }
        return;
      }
      if (suffix == "ing") {
        if (stem.size() == 2 && stem[1] == 'y' && !is_vowel(stem[0])) {
          replace(4, "ie");
          return;
        }
        if (stem == "inn" || stem == "out" || stem == "cann" || stem == "herr" || stem == "earr" ||
            stem == "even") {
          return;
        }
      }
      if (!has_vowel_before(suffix.size())) return;
      replace(suffix.size(), "");
      if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
        w += 'e';
      } else if (is_double(w)) {
        const bool kept = w.size() == 3 && (w[0] == 'a' || w[0] == 'e' || w[0] == 'o');
        if (!kept) w.pop_back();
      } else if (r1 == w.size() && ends_short_syllable(w)) {
        w += 'e';
      }
      return;
    }
  }

  void step1c() {
    if (w.size() > 2 && (w.back() == 'y' || w.back() == 'Y') && !is_vowel(w[w.size() - 2])) {
      w.back() = 'i';
    }
  }

  void step2() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 25> kRules{{
        {"ization", "ize"}, {"ational", "ate"}, {"fulness", "ful"}, {"ousness", "ous"},
        {"iveness", "ive"}, {"tional", "tion"}, {"biliti", "ble"},  {"lessli", "less"},
        {"ogist", "og"},    {"entli", "ent"},   {"ation", "ate"},   {"alism", "al"},    {"aliti", "al"},
        {"ousli", "ous"},   {"iviti", "ive"},   {"fulli", "ful"},   {"enci", "ence"},
        {"anci", "ance"},   {"abli", "able"},   {"izer", "ize"},    {"ator", "ate"},
        {"alli", "al"},     {"bli", "ble"},     {"ogi", "og"},      {"li", ""},
    }};
    for (const auto& [suffix, repl] : kRules) {
      if (!ends_with(w, suffix)) continue;
      if (!in_r1(suffix.size())) return;
      if (suffix == "ogi") {
        if (w.size() >= 4 && w[w.size() - 4] == 'l') replace(3, "og");
      } else if (suffix == "li") {
        if (w.size() >= 3 && is_li_ending(w[w.size() - 3])) replace(2, "");
      } else {
        replace(suffix.size(), repl);
      }
      return;
    }
  }

  void step3() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 9> kRules{{
        {"ational", "ate"}, {"tional", "tion"}, {"alize", "al"}, {"icate", "ic"},
        {"iciti", "ic"},    {"ative", ""},      {"ical", "ic"},  {"ness", ""},
        {"ful", ""},
    }};
    for (const auto& [suffix, repl] : kRules) {
      if (!ends_with(w, suffix)) continue;
      if (!in_r1(suffix.size())) return;
      if (suffix == "ative") {
        if (in_r2(suffix.size())) replace(suffix.size(), "");
      } else {
        replace(suffix.size(), repl);
      }
      return;
    }
  }

  void step4() {
    static constexpr std::array<std::string_view, 18> kSuffixes{
        "ement", "ance", "ence", "able", "ible", "ment", "ant", "ent", "ism",
        "ate",   "iti",  "ous",  "ive",  "ize",  "ion",  "al",  "er",  "ic"};
    for (auto s : kSuffixes) {
      if (!ends_with(w, s)) continue;
      if (!in_r2(s.size())) return;
      if (s == "ion") {
        if (w.size() >= 4 && (w[w.size() - 4] == 's' || w[w.size() - 4] == 't')) replace(3, "");
      } else {
        replace(s.size(), "");
      }
      return;
    }
  }

  void step5() {
    if (ends_with(w, "e")) {
      if (in_r2(1)) {
        w.pop_back();
      } else if (in_r1(1)) {
        if (!ends_short_syllable(std::string_view(w.data(), w.size() - 1))) w.pop_back();
      }
    } else if (ends_with(w, "l")) {
      if (in_r2(1) && w.size() >= 2 && w[w.size() - 2] == 'l') w.pop_back();
    }
  }
};

const std::pair<std::string_view, std::string_view>* exception1(std::string_view w) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 15> kExceptions{{
      {"skis", "ski"},     {"skies", "sky"},   {"idly", "idl"},    {"gently", "gentl"}, {"ugly", "ugli"},
      {"early", "earli"},  {"only", "onli"},   {"singly", "singl"}, {"sky", "sky"},
      {"news", "news"},    {"howe", "howe"},   {"atlas", "atlas"}, {"cosmos", "cosmos"},
      {"bias", "bias"},    {"andes", "andes"},
  }};
  for (const auto& e : kExceptions) {
    if (e.first == w) return &e;
  }
  return nullptr;
}

}  // namespace

std::string porter2_stem(std::string_view word) {
  if (word.size() <= 2) return std::string(word);
  if (!std::all_of(word.begin(), word.end(),
                   [](char c) { return (c >= 'a' && c <= 'z') || c == '\''; })) {
    return std::string(word);
  }
  if (const auto* e = exception1(word)) return std::string(e->second);

  Stemmer s;
  s.w = std::string(word);
  if (s.w.front() == '\'') s.w.erase(0, 1);
  if (s.w.empty()) return s.w;
  if (s.w[0] == 'y') s.w[0] = 'Y';
  for (std::size_t i = 1; i < s.w.size(); ++i) {
    if (s.w[i] == 'y' && is_vowel(s.w[i - 1])) s.w[i] = 'Y';
  }

  static constexpr std::array<std::string_view, 9> kPrefixes{"arsen", "commun", "emerg", "gener", "inter",
                                                          "later", "organ", "past",  "univers"};
  s.r1 = s.w.size();
  bool prefixed = false;
  for (auto p : kPrefixes) {
    if (s.w.rfind(p, 0) == 0) {
      s.r1 = p.size();
      prefixed = true;
      break;
    }
  }
  if (!prefixed) s.r1 = region_after(s.w, 0);
  s.r2 = s.r1 < s.w.size() ? region_after(s.w, s.r1) : s.w.size();
  if (s.r1 > s.w.size()) s.r1 = s.w.size();

  s.step0();
  s.step1a();
  s.step1b();
  s.step1c();
  s.step2();
  s.step3();
  s.step4();
  s.step5();
  for (auto& c : s.w) {
    if (c == 'Y') c = 'y';
  }
  return s.w;
}

}  // namespace nlbash
