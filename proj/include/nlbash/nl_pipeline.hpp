#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace nlbash {

using StopwordSet = std::unordered_set<std::string>;

// One word per line; blank lines and "#" comments are ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);
// The list shipped in data/stopwords.txt.
const StopwordSet& default_stopwords();

// Whitespace tokenizer that keeps quoted strings, paths and globs whole and
// strips sentence punctuation and unmatched parentheses from word edges.
std::vector<std::string> tokenize_nl(std::string_view raw);

// Porter2 stem repeated until it no longer changes. Words with non-letters
// (paths, numbers, quoted constants) are returned unchanged.
std::string stem_token(std::string_view token);

// lowercase, tokenize, stem, drop stopwords, join with single spaces.
std::string normalize_for_clustering(std::string_view raw, const StopwordSet& stopwords);

struct NlSentence {
  std::string raw;
  std::vector<std::string> tokens;  // tokenize_nl of the lowercased text
  std::string normalized_key;
};

NlSentence make_sentence(std::string_view raw, const StopwordSet& stopwords);

class Vocabulary {
 public:
  static constexpr std::string_view kOov = "<UNK>";

  explicit Vocabulary(std::size_t cutoff = 4) : cutoff_(cutoff) {}

  void add(const std::string& token, std::size_t count = 1) { counts_[token] += count; }

  std::size_t cutoff() const { return cutoff_; }
  std::size_t frequency(const std::string& token) const;
  // Retained tokens occur at least `cutoff` times.
  bool retained(const std::string& token) const { return frequency(token) >= cutoff_; }
  // The token itself when retained, kOov otherwise.
  std::string encode(const std::string& token) const;

  bool empty() const { return counts_.empty(); }
  const std::map<std::string, std::size_t>& frequencies() const { return counts_; }
  std::vector<std::string> retained_words() const;

  // Retained words by descending count (ties by word), then the OOV row with
  // the total count of dropped occurrences.
  std::string to_tsv() const;

 private:
  std::size_t cutoff_;
  std::map<std::string, std::size_t> counts_;
};

// Counts tokens verbatim. Precondition: cutoff >= 1.
Vocabulary build_vocab(const std::vector<NlSentence>& corpus, std::size_t cutoff = 4);

// Norvig-style correction against the raw frequency counts of `model`
// (the cutoff does not apply). Words with "/", "*", "$" or digits are kept.
std::string spell_correct(std::string_view word, const Vocabulary& model);

enum class SpellMode { suggest, apply };

struct SpellSuggestion {
  std::string word;
  std::string suggestion;
};

// Corpus report mode: a word of 3 to 16 letters seen fewer than `cutoff`
// times is matched against words seen at least `cutoff` times, since a model
// built from the corpus itself knows every word. Suggestions with the same
// stem as the word are dropped.
std::vector<SpellSuggestion> spelling_suggestions(const std::vector<std::string>& tokens,
                                                  const Vocabulary& model);

}  // namespace nlbash
