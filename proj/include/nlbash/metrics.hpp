#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nlbash/ast.hpp"
#include "nlbash/spec_db.hpp"

namespace nlbash {

// Close-vocabulary tokens of a command: utilities, canonical flags and
// reserved tokens, arguments excluded.
struct CloseVocab {
  std::vector<std::string> tokens;
  // The command did not parse; tokens are whitespace words that name a known
  // utility, a known flag of the preceding utility, or a reserved token.
  bool approximated = false;
};

CloseVocab close_vocabulary(const CommandAst& ast);
CloseVocab close_vocabulary(std::string_view cmd, const SpecDb& db);

// |A ∩ B| / max(|A|, |B|) for multisets A and B, maximized over references.
// Two empty multisets score 1. Precondition: references non-empty.
double tm_score(const std::vector<std::string>& candidate,
                const std::vector<std::vector<std::string>>& references);

// Sentence BLEU with n-grams up to 4, counts clipped by the maximum count in
// any reference, brevity penalty against the closest reference length (ties
// to the shorter one) and add-one smoothing for orders 2 to 4, so an order
// with no candidate n-gram has precision 1. Zero when the candidate is empty
// or shares no unigram with any reference.
double bleu_score(const std::vector<std::string>& candidate,
                  const std::vector<std::vector<std::string>>& references);

// Token-granularity stream used for BLEU; whitespace words if unparseable.
std::vector<std::string> bleu_tokens(std::string_view cmd, const SpecDb& db);

enum class Metric { facc, tacc, tm, bleu };
std::string_view to_string(Metric m);
inline constexpr Metric kAllMetrics[] = {Metric::facc, Metric::tacc, Metric::bleu, Metric::tm};

struct TestInstance {
  std::string id;
  std::string nl;
  std::vector<std::string> references;  // cleaned commands, deduplicated
};

struct SystemOutput {
  std::string id;
  std::vector<std::string> candidates;  // best first
};

// Scores of each candidate of one instance, in rank order.
struct InstanceScores {
  std::string id;
  std::map<Metric, std::vector<double>> per_candidate;
  std::size_t approximated = 0;  // candidates scored from whitespace words
};

InstanceScores score_instance(const TestInstance& instance,
                              const std::vector<std::string>& candidates, const SpecDb& db);

// Maximum over the first k candidates (all of them if there are fewer).
double score_at_k(const std::vector<double>& per_candidate, std::size_t k);
inline double score_at_k(const InstanceScores& s, Metric m, std::size_t k) {
  return score_at_k(s.per_candidate.at(m), k);
}

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalReport {
  std::vector<std::size_t> k_values;
  std::vector<InstanceScores> instances;  // sorted by id
  std::map<std::string, double> aggregate;  // "FAcc@1", "TM@3", ...

  nlohmann::json to_json() const;
  // Aligned columns, scores as percentages.
  std::string table() const;
};

std::string metric_label(Metric m, std::size_t k);

// Unweighted means over instances, summed in sorted-id order.
EvalReport evaluate(const std::vector<TestInstance>& test_set,
                    const std::vector<SystemOutput>& outputs, const std::vector<std::size_t>& k_values,
                    const SpecDb& db, int workers = 0);

// JSONL: {"instance_id", "nl", "references": [...]}.
std::vector<TestInstance> read_test_set(std::istream& in);
std::vector<TestInstance> read_test_set(const std::filesystem::path& path);
// JSONL: {"instance_id", "candidates": [...]}.
std::vector<SystemOutput> read_system_output(std::istream& in);
std::vector<SystemOutput> read_system_output(const std::filesystem::path& path);

}  // namespace nlbash
