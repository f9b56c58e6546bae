#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlbash/ast.hpp"
#include "nlbash/bash_parser.hpp"
#include "nlbash/nl_pipeline.hpp"
#include "nlbash/spec_db.hpp"

namespace nlbash {

// One input line of the corpus: {id, nl, cmd, source_url}.
struct RawRecord {
  std::string id;
  std::string nl;
  std::string cmd;
  std::optional<std::string> source_url;
  std::size_t line = 0;  // 1-based line in the input file, 0 if synthetic
};

class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& message, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::vector<RawRecord> read_corpus_jsonl(std::istream& in);
std::vector<RawRecord> read_corpus_jsonl(const std::filesystem::path& path);
// Parallel line files (one description per line, one command per line).
std::vector<RawRecord> read_parallel_files(const std::filesystem::path& nl_path,
                                           const std::filesystem::path& cmd_path);

enum class PairStatus { kept, filtered };

// Filter rules, in the order they are reported.
enum class FilterRule {
  none,
  empty,               // blank description or command
  nested_interpreter,  // awk, sed, python, ...
  multi_statement,     // alias, set, ...
  out_of_scope,        // redirection, assignment, compound statement
  non_grammatical,     // unknown utility or flag, syntax error
};

std::string_view to_string(FilterRule rule);

struct NlCmdPair {
  std::string id;
  NlSentence nl;
  std::string cmd_raw;
  std::string cmd_clean;
  std::optional<CommandAst> ast;
  PairStatus status = PairStatus::kept;
  FilterRule rule = FilterRule::none;
  std::string reason;  // "rule" or "rule: violation kind"
  std::vector<ScopeViolation> violations;
  std::optional<std::string> source_url;
};

// Builds the pair: cleans the command and normalizes the description.
NlCmdPair make_pair(const RawRecord& record, const StopwordSet& stopwords);
// Sets status/reason from the four filter rules; the AST is kept only when in scope.
NlCmdPair filter_pair(NlCmdPair pair, const SpecDb& db);

enum class Split { train, dev, test };
std::string_view to_string(Split split);

using SplitAssignment = std::map<std::string, Split>;

class SplitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Clusters by normalized description, shuffles clusters with the seed,
// assigns them 10:1:1 and then moves whole clusters upward (test -> dev ->
// train) until no description key or command is shared by two splits.
SplitAssignment split_corpus(const std::vector<NlCmdPair>& kept, std::uint64_t seed);

// Uniform integer in [0, bound) by rejection sampling; unlike the standard
// distributions this gives the same sequence with every standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

// Fisher-Yates over uniform_below.
template <class T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

struct Summary {
  double avg = 0;
  double median = 0;
  std::size_t max = 0;
};

Summary summarize(std::vector<std::size_t> values);

// Statistics of kept pairs, shaped like the paper's corpus tables. The
// assignment, when given, selects the train split for flag coverage.
nlohmann::json compute_stats(const std::vector<NlCmdPair>& kept, const SplitAssignment* assignment,
                             const SpecDb& db, int workers = 0);

struct PipelineConfig {
  std::uint64_t seed = 0;
  std::size_t vocab_cutoff = 4;
  int workers = 0;
};

struct PipelineResult {
  std::vector<NlCmdPair> pairs;  // input order, kept and filtered
  SplitAssignment split;         // empty if the corpus is too small to split
  std::optional<std::string> split_error;
  nlohmann::json stats;
  std::vector<std::pair<std::string, SpellSuggestion>> spelling;  // (pair id, suggestion)
  Vocabulary vocabulary;  // train split descriptions, or all kept ones if unsplit
};

PipelineResult run_pipeline(const std::vector<RawRecord>& input, const SpecDb& db,
                            const StopwordSet& stopwords, const PipelineConfig& config);

// Writes kept.jsonl, filtered.jsonl, stats.json, split.tsv, spelling.tsv,
// vocab.tsv and test_set.jsonl / dev_set.jsonl into `dir`.
void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& dir);

nlohmann::json to_json(const RawRecord& record);
nlohmann::json pair_json(const NlCmdPair& pair);

// Groups the pairs of one split by normalized description; references are
// deduplicated cleaned commands. Instance ids are "<split>-<n>" in key order.
std::vector<nlohmann::json> build_test_instances(const std::vector<NlCmdPair>& kept,
                                                 const SplitAssignment& assignment, Split split);

}  // namespace nlbash
