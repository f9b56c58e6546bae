#include "nlbash/nl_pipeline.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "nlbash/porter2.hpp"
#include "nlbash/spec_db.hpp"

namespace nlbash {

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword list " + path.string());
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    words.insert(line);
  }
  return words;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet words = load_stopwords(data_dir() / "stopwords.txt");
  return words;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_sentence_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
}

bool is_quote(char c) { return c == '"' || c == '\'' || c == '`'; }

// Index one past the closing quote of a quoted span opening at `open`, or npos.
std::size_t quoted_end(std::string_view s, std::size_t open) {
  const char q = s[open];
  for (std::size_t i = open + 1; i < s.size(); ++i) {
    if (s[i] != q) continue;
    std::size_t j = i + 1;
    while (j < s.size() && (is_sentence_punct(s[j]) || s[j] == ')')) ++j;
    if (j == s.size() || is_space(s[j])) return i + 1;
  }
  return std::string_view::npos;
}

std::string trim_word(std::string word) {
  const std::string original = word;
  while (true) {
    const auto before = word.size();
    while (!word.empty() && is_sentence_punct(word.back())) word.pop_back();
    const auto open = std::count(word.begin(), word.end(), '(');
    const auto close = std::count(word.begin(), word.end(), ')');
    if (!word.empty() && word.back() == ')' && close > open) word.pop_back();
    if (!word.empty() && word.front() == '(' && open > close) word.erase(0, 1);
    if (word.size() == before) break;
  }
  return word.empty() ? original : word;
}

bool all_letters(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

std::vector<std::string> tokenize_nl(std::string_view raw) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (is_space(raw[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    // An opening parenthesis before a quote belongs to the sentence, not the constant.
    while (start < raw.size() && raw[start] == '(') ++start;
    if (start < raw.size() && is_quote(raw[start])) {
      const auto end = quoted_end(raw, start);
      if (end != std::string_view::npos) {
        tokens.emplace_back(raw.substr(start, end - start));
        i = end;
        while (i < raw.size() && !is_space(raw[i])) ++i;
        continue;
      }
    }
    std::size_t end = i;
    while (end < raw.size() && !is_space(raw[end])) ++end;
    tokens.push_back(trim_word(std::string(raw.substr(i, end - i))));
    i = end;
  }
  return tokens;
}

std::string stem_token(std::string_view token) {
  if (!all_letters(token)) return std::string(token);
  std::string current(token);
  while (true) {
    auto next = porter2_stem(current);
    if (next == current) return current;
    current = std::move(next);
  }
}

namespace {

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string key_from_tokens(const std::vector<std::string>& tokens, const StopwordSet& stopwords) {
  std::string key;
  for (const auto& t : tokens) {
    if (stopwords.count(t)) continue;
    const auto stem = stem_token(t);
    if (stopwords.count(stem)) continue;
    if (!key.empty()) key.push_back(' ');
    key += stem;
  }
  return key;
}

}  // namespace

std::string normalize_for_clustering(std::string_view raw, const StopwordSet& stopwords) {
  return key_from_tokens(tokenize_nl(ascii_lower(raw)), stopwords);
}

NlSentence make_sentence(std::string_view raw, const StopwordSet& stopwords) {
  NlSentence s;
  s.raw = std::string(raw);
  s.tokens = tokenize_nl(ascii_lower(raw));
  s.normalized_key = key_from_tokens(s.tokens, stopwords);
  return s;
}

std::size_t Vocabulary::frequency(const std::string& token) const {
  const auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

std::string Vocabulary::encode(const std::string& token) const {
  return retained(token) ? token : std::string(kOov);
}

std::vector<std::string> Vocabulary::retained_words() const {
  std::vector<std::string> out;
  for (const auto& [word, count] : counts_) {
    if (count >= cutoff_) out.push_back(word);
  }
  return out;
}

std::string Vocabulary::to_tsv() const {
  std::vector<std::pair<std::string, std::size_t>> rows;
  std::size_t dropped = 0;
  for (const auto& [word, count] : counts_) {
    if (count >= cutoff_) {
      rows.emplace_back(word, count);
    } else {
      dropped += count;
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::string out;
  for (const auto& [word, count] : rows) out += word + "\t" + std::to_string(count) + "\n";
  out += std::string(kOov) + "\t" + std::to_string(dropped) + "\n";
  return out;
}

Vocabulary build_vocab(const std::vector<NlSentence>& corpus, std::size_t cutoff) {
  if (cutoff < 1) throw std::invalid_argument("vocabulary cutoff must be at least 1");
  Vocabulary vocab(cutoff);
  for (const auto& s : corpus) {
    for (const auto& t : s.tokens) vocab.add(t);
  }
  return vocab;
}

namespace {

constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz";
constexpr std::size_t kMaxSuggestLength = 16;

std::vector<std::string> edits1(const std::string& w) {
  std::vector<std::string> out;
  out.reserve(54 * w.size() + 26);
  for (std::size_t i = 0; i < w.size(); ++i) out.push_back(w.substr(0, i) + w.substr(i + 1));
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    auto t = w;
    std::swap(t[i], t[i + 1]);
    out.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (char c : kAlphabet) {
      if (c == w[i]) continue;
      auto t = w;
      t[i] = c;
      out.push_back(std::move(t));
    }
  }
  for (std::size_t i = 0; i <= w.size(); ++i) {
    for (char c : kAlphabet) out.push_back(w.substr(0, i) + c + w.substr(i));
  }
  return out;
}

// Most frequent known word among candidates; ties go to the smaller string.
std::optional<std::string> best_known(const std::vector<std::string>& candidates,
                                      const Vocabulary& model, std::size_t min_count) {
  std::optional<std::string> best;
  std::size_t best_count = 0;
  for (const auto& c : candidates) {
    const auto n = model.frequency(c);
    if (n < min_count) continue;
    if (!best || n > best_count || (n == best_count && c < *best)) {
      best = c;
      best_count = n;
    }
  }
  return best;
}

bool looks_constant(std::string_view word) {
  return std::any_of(word.begin(), word.end(), [](char c) {
    return c == '/' || c == '*' || c == '$' || (c >= '0' && c <= '9');
  });
}

// Each edit changes the letter multiset by at most two, so two edits change
// it by at most four. Cheap necessary condition for reachability.
bool within_two_edits_by_counts(const std::string& a, const std::string& b) {
  const auto diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  if (diff > 2) return false;
  std::array<int, 256> counts{};
  for (unsigned char c : a) ++counts[c];
  for (unsigned char c : b) --counts[c];
  int total = 0;
  for (int n : counts) total += n < 0 ? -n : n;
  return total <= 4;
}

// Words e with k in edits1(e), restricted to alphabet `sigma`.
bool preimage_hits(const std::string& k, const std::string& sigma,
                   const std::unordered_set<std::string>& targets) {
  auto lower = [](char c) { return c >= 'a' && c <= 'z'; };
  for (std::size_t i = 0; i < k.size(); ++i) {
    // k came from inserting a letter into e.
    if (lower(k[i]) && targets.count(k.substr(0, i) + k.substr(i + 1))) return true;
    // k came from replacing e[i] with a letter.
    if (lower(k[i])) {
      auto t = k;
      for (char c : sigma) {
        if (c == k[i]) continue;
        t[i] = c;
        if (targets.count(t)) return true;
      }
    }
    if (i + 1 < k.size()) {
      auto t = k;
      std::swap(t[i], t[i + 1]);
      if (targets.count(t)) return true;
    }
  }
  // k came from deleting a character of e.
  for (std::size_t i = 0; i <= k.size(); ++i) {
    for (char c : sigma) {
      if (targets.count(k.substr(0, i) + c + k.substr(i))) return true;
    }
  }
  return false;
}

// Words seen at least min_count times count as known. The second stage finds
// the same words as scanning edits1(edits1(w)), without building that set.
std::string correct(const std::string& w, const Vocabulary& model, std::size_t min_count) {
  if (w.empty() || looks_constant(w) || model.frequency(w) >= min_count) return w;
  const auto first = edits1(w);
  if (auto best = best_known(first, model, min_count)) return *best;
  const std::unordered_set<std::string> first_set(first.begin(), first.end());
  std::string sigma(kAlphabet);
  for (char c : w) {
    if (sigma.find(c) == std::string::npos) sigma.push_back(c);
  }
  std::optional<std::string> best;
  std::size_t best_count = 0;
  for (const auto& [k, n] : model.frequencies()) {
    if (n < min_count || (best && n < best_count)) continue;
    if (!within_two_edits_by_counts(w, k) || !preimage_hits(k, sigma, first_set)) continue;
    if (!best || n > best_count) {  // map order: ties keep the smaller word
      best = k;
      best_count = n;
    }
  }
  return best.value_or(w);
}

}  // namespace

std::string spell_correct(std::string_view word, const Vocabulary& model) {
  return correct(std::string(word), model, 1);
}

std::vector<SpellSuggestion> spelling_suggestions(const std::vector<std::string>& tokens,
                                                  const Vocabulary& model) {
  std::vector<SpellSuggestion> out;
  for (const auto& t : tokens) {
    if (t.size() < 3 || t.size() > kMaxSuggestLength || !all_letters(t)) continue;
    auto fixed = correct(t, model, std::max<std::size_t>(model.cutoff(), 1));
    // Inflections of a frequent word ("file" for "files") are not misspellings.
    if (fixed != t && stem_token(fixed) != stem_token(t)) out.push_back({t, std::move(fixed)});
  }
  return out;
}

}  // namespace nlbash
