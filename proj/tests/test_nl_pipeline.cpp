#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>

#include "doctest.h"
#include "nlbash/nl_pipeline.hpp"

using namespace nlbash;
using Tokens = std::vector<std::string>;

namespace {

// Unrestricted Damerau-Levenshtein distance (Lowrance-Wagner).
std::size_t damerau(const std::string& a, const std::string& b) {
  const std::size_t inf = a.size() + b.size();
  std::vector<std::vector<std::size_t>> d(a.size() + 2, std::vector<std::size_t>(b.size() + 2));
  d[0][0] = inf;
  for (std::size_t i = 0; i <= a.size(); ++i) {
    d[i + 1][0] = inf;
    d[i + 1][1] = i;
  }
  for (std::size_t j = 0; j <= b.size(); ++j) {
    d[0][j + 1] = inf;
    d[1][j + 1] = j;
  }
  std::map<char, std::size_t> last_row;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t last_col = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t i1 = last_row.count(b[j - 1]) ? last_row[b[j - 1]] : 0;
      const std::size_t j1 = last_col;
      std::size_t cost = 1;
      if (a[i - 1] == b[j - 1]) {
        cost = 0;
        last_col = j;
      }
      d[i + 1][j + 1] = std::min({d[i][j] + cost, d[i + 1][j] + 1, d[i][j + 1] + 1,
                                  d[i1][j1] + (i - i1 - 1) + 1 + (j - j1 - 1)});
    }
    last_row[a[i - 1]] = i;
  }
  return d[a.size() + 1][b.size() + 1];
}

std::string oracle_correct(const std::string& w, const Vocabulary& model) {
  if (model.frequency(w) > 0) return w;
  for (std::size_t dist = 1; dist <= 2; ++dist) {
    std::string best;
    std::size_t best_n = 0;
    for (const auto& [cand, n] : model.frequencies()) {
      if (damerau(w, cand) != dist) continue;
      if (n > best_n) {
        best = cand;
        best_n = n;
      }
    }
    if (best_n) return best;
  }
  return w;
}

}  // namespace

TEST_CASE("tokenize_nl") {
  CHECK(tokenize_nl("display the 5 largest files in the current directory") ==
        Tokens{"display", "the", "5", "largest", "files", "in", "the", "current", "directory"});
  CHECK(tokenize_nl("").empty());
  CHECK(tokenize_nl("   ").empty());
  CHECK(tokenize_nl(R"(search for "TODO" in *.java files)") ==
        Tokens{"search", "for", "\"TODO\"", "in", "*.java", "files"});
  CHECK(tokenize_nl("list files in /tmp/dir, then stop.") ==
        Tokens{"list", "files", "in", "/tmp/dir", "then", "stop"});
  CHECK(tokenize_nl("rename \"my file.txt\" to 'new name'.") ==
        Tokens{"rename", "\"my file.txt\"", "to", "'new name'"});
  CHECK(tokenize_nl("files (excluding .git) only") ==
        Tokens{"files", "excluding", ".git", "only"});
  CHECK(tokenize_nl("don't touch it") == Tokens{"don't", "touch", "it"});
  CHECK(tokenize_nl("print f(x) and ...") == Tokens{"print", "f(x)", "and", "..."});
  CHECK(tokenize_nl("files named ~/a.b?") == Tokens{"files", "named", "~/a.b"});
}

TEST_CASE("normalize_for_clustering") {
  const auto& sw = default_stopwords();
  CHECK(sw.size() >= 100);
  CHECK(normalize_for_clustering("Find all .java files", sw) ==
        normalize_for_clustering("find all .java file", sw));
  CHECK(normalize_for_clustering("display the 5 largest files", sw) == "display 5 largest file");
  CHECK(normalize_for_clustering("", sw) == "");
}

TEST_CASE("normalize_for_clustering is idempotent") {
  const auto& sw = default_stopwords();
  std::mt19937_64 rng(11);
  const Tokens words{"Find",   "the",  "files", "Having", "generously", "directories", "\"a b\"",
                     "*.java", "(x",   "y)",    "...",    "does",       "skies",       "'q'.",
                     "5",      "MB.",  "cries", "dying",  "ourselves",  "is",          "/tmp/"};
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const int n = static_cast<int>(rng() % 10);
    for (int j = 0; j < n; ++j) s += words[rng() % words.size()] + (rng() % 3 ? " " : "  ");
    const auto once = normalize_for_clustering(s, sw);
    CAPTURE(s);
    CHECK(normalize_for_clustering(once, sw) == once);
  }
}

TEST_CASE("spell_correct") {
  Vocabulary model(1);
  model.add("files", 50);
  model.add("file", 10);
  model.add("fills", 2);
  model.add("directory", 30);
  CHECK(spell_correct("fiels", model) == "files");
  CHECK(spell_correct("files", model) == "files");
  CHECK(spell_correct("fills", model) == "fills");
  CHECK(spell_correct("*.java", model) == "*.java");
  CHECK(spell_correct("dir2", model) == "dir2");
  CHECK(spell_correct("drectoyr", model) == "directory");
  CHECK(spell_correct("zzzzzz", model) == "zzzzzz");
}

TEST_CASE("spell_correct agrees with a brute-force edit distance oracle") {
  std::mt19937_64 rng(5);
  const std::string letters = "abcde";
  auto random_word = [&](std::size_t lo, std::size_t hi) {
    std::string w;
    const auto n = lo + rng() % (hi - lo + 1);
    for (std::size_t i = 0; i < n; ++i) w.push_back(letters[rng() % letters.size()]);
    return w;
  };
  for (int round = 0; round < 40; ++round) {
    Vocabulary model(1);
    std::map<std::size_t, int> used;
    for (int i = 0; i < 30; ++i) {
      // Distinct counts keep the argmax unique, so no tie rule is exercised here.
      std::size_t n;
      do {
        n = 1 + rng() % 1000;
      } while (used[n]++);
      const auto w = random_word(2, 6);
      if (model.frequency(w) == 0) model.add(w, n);
    }
    for (int q = 0; q < 25; ++q) {
      const auto w = random_word(1, 7);
      CAPTURE(w);
      CHECK(spell_correct(w, model) == oracle_correct(w, model));
    }
  }
}

TEST_CASE("spell_correct matches literal two-edit enumeration, ties included") {
  // Plain Norvig: all strings one or two edits away over a-z.
  auto edits = [](const std::string& w) {
    std::set<std::string> out;
    const std::string az = "abcdefghijklmnopqrstuvwxyz";
    for (std::size_t i = 0; i <= w.size(); ++i) {
      for (char c : az) out.insert(w.substr(0, i) + c + w.substr(i));
      if (i == w.size()) break;
      out.insert(w.substr(0, i) + w.substr(i + 1));
      for (char c : az) out.insert(w.substr(0, i) + c + w.substr(i + 1));
      if (i + 1 < w.size()) out.insert(w.substr(0, i) + w[i + 1] + w[i] + w.substr(i + 2));
    }
    out.erase(w);
    return out;
  };
  auto pick = [](const std::set<std::string>& cands, const Vocabulary& model) {
    std::optional<std::string> best;
    for (const auto& c : cands) {  // ascending, so ">" keeps the smaller on ties
      if (model.frequency(c) && (!best || model.frequency(c) > model.frequency(*best))) best = c;
    }
    return best;
  };
  std::mt19937_64 rng(11);
  const std::string letters = "ab-c";
  auto random_word = [&](std::size_t lo, std::size_t hi) {
    std::string w;
    const auto n = lo + rng() % (hi - lo + 1);
    for (std::size_t i = 0; i < n; ++i) w.push_back(letters[rng() % letters.size()]);
    return w;
  };
  for (int round = 0; round < 30; ++round) {
    Vocabulary model(1);
    for (int i = 0; i < 25; ++i) model.add(random_word(1, 5), 1 + rng() % 3);
    for (int q = 0; q < 10; ++q) {
      const auto w = random_word(1, 5);
      CAPTURE(w);
      std::string expected = w;
      if (!model.frequency(w)) {
        const auto one = edits(w);
        if (auto b = pick(one, model)) {
          expected = *b;
        } else {
          std::set<std::string> two;
          for (const auto& e : one) {
            for (auto& x : edits(e)) two.insert(x);
          }
          two.erase(w);
          if (auto b2 = pick(two, model)) expected = *b2;
        }
      }
      CHECK(spell_correct(w, model) == expected);
    }
  }
}

TEST_CASE("spell_correct never changes a known word") {
  Vocabulary model(4);
  for (const auto& w : Tokens{"a", "ab", "abc", "file", "files", "x"}) model.add(w);
  for (const auto& [w, n] : model.frequencies()) CHECK(spell_correct(w, model) == w);
}

TEST_CASE("spelling_suggestions target rare words only") {
  Vocabulary model(4);
  model.add("directory", 40);
  model.add("directroy", 1);
  model.add("xyz", 1);
  const auto s = spelling_suggestions({"directroy", "directory", "xyz", "dir2"}, model);
  REQUIRE(s.size() == 1);
  CHECK(s[0].word == "directroy");
  CHECK(s[0].suggestion == "directory");

  // "file" is one edit from "files" but shares its stem.
  model.add("files", 40);
  model.add("file", 1);
  CHECK(spelling_suggestions({"file"}, model).empty());
}

TEST_CASE("build_vocab") {
  const auto& sw = default_stopwords();
  std::vector<NlSentence> corpus;
  for (int i = 0; i < 3; ++i) corpus.push_back(make_sentence("files and files", sw));
  corpus.push_back(make_sentence("rare rare rare", sw));
  const auto v = build_vocab(corpus);
  CHECK(v.cutoff() == 4);
  CHECK(v.frequency("files") == 6);
  CHECK(v.retained("files"));
  CHECK(v.frequency("rare") == 3);
  CHECK(v.encode("rare") == std::string(Vocabulary::kOov));
  CHECK(v.encode("files") == "files");
  for (const auto& w : v.retained_words()) CHECK(v.frequency(w) >= v.cutoff());
  CHECK(v.to_tsv() == "files\t6\n<UNK>\t6\n");
  CHECK(build_vocab({}).empty());
  CHECK_THROWS(build_vocab({}, 0));
}
