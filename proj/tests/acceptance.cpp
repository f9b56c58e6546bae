// Acceptance checks, one line per criterion.
//
//   nlbash_acceptance offline   criteria that need only the repository
//   nlbash_acceptance corpus    criteria that need the released corpus
//
// Corpus mode reads NLBASH_CORPUS_DIR, which may hold the filtered corpus
// (filtered.jsonl, or filtered.nl + filtered.cm) and the full collection
// (full.jsonl, or full.nl + full.cm). Without it every corpus criterion is
// BLOCKED and the exit code is 77.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nlbash/bash_parser.hpp"
#include "nlbash/corpus.hpp"
#include "nlbash/metrics.hpp"
#include "nlbash/nl_pipeline.hpp"
#include "nlbash/parallel.hpp"
#include "nlbash/spec_db.hpp"
#include "nlbash/template.hpp"
#include "nlbash/tokenization.hpp"

using namespace nlbash;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kStatsTolerance = 0.03;
constexpr double kMappingTolerance = 0.05;
constexpr double kFilterTolerance = 0.01;
constexpr double kCoverageTolerance = 0.10;
constexpr double kBleuTolerance = 1e-9;
constexpr double kStatsSeconds = 30.0;
constexpr int kFuzzCorpora = 1000;
constexpr int kFuzzStrings = 10000;
constexpr std::size_t kTemplateSample = 1000;
constexpr std::uint64_t kSplitSeed = 0;

enum class Status { pass, fail, blocked };

struct Outcome {
  Status status;
  std::string detail;
};

std::vector<Status> results;

void report(const std::string& id, const std::string& name, const Outcome& o) {
  const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "BLOCKED";
  std::printf("[%s] %s %s: %s\n", tag, id.c_str(), name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  results.push_back(o.status);
}

void run(const std::string& id, const std::string& name, const std::function<Outcome()>& fn) {
  try {
    report(id, name, fn());
  } catch (const std::exception& e) {
    report(id, name, {Status::fail, std::string("exception: ") + e.what()});
  }
}

Outcome check(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * want; }

std::string near(const std::string& name, double got, double want, double rel, bool& ok) {
  const bool good = within(got, want, rel);
  ok = ok && good;
  return name + " " + fmt(got) + " vs " + fmt(want) + (good ? "" : " (out of tolerance)");
}

const SpecDb& db() { return SpecDb::bundled(); }

std::vector<std::string> fixture_lines(const std::string& name) {
  std::ifstream in(data_dir() / "fixtures" / name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

// Every argument word of a command, including nested ones.
void collect_args(const Node& node, std::vector<std::string>& out) {
  for_each_utility(node, [&](const Node& u) {
    for (const auto& item : u.items) {
      if (const auto* a = std::get_if<Arg>(&item)) out.push_back(a->text);
      if (const auto* f = std::get_if<FlagBinding>(&item)) {
        for (const auto& v : f->values) out.push_back(v.text);
      }
    }
  });
}

// ---------------------------------------------------------------- offline

Outcome find_flag_total() {
  const auto* find = db().lookup("find");
  if (!find) return {Status::fail, "find missing from the database"};
  const auto n = find->flag_string_count();
  return check(n == 103, "find total flags " + std::to_string(n) + " vs 103 exact");
}

std::vector<RawRecord> random_corpus(std::mt19937_64& rng, std::size_t size,
                                     const std::vector<std::string>& commands) {
  static const std::vector<std::string> words{
      "find", "files", "list", "all", "the", "directory", "recursively", "count", "lines",
      "sort", "size", "delete", "empty", "show", "current", "java", "text", "largest",
      "copy", "backup", "search", "pattern", "in", "older", "than", "days", "print"};
  std::vector<RawRecord> out;
  for (std::size_t i = 0; i < size; ++i) {
    std::string nl;
    const auto n = 1 + rng() % 5;
    for (std::size_t w = 0; w < n; ++w) nl += (w ? " " : "") + words[rng() % words.size()];
    out.push_back({std::to_string(i), nl, commands[rng() % commands.size()], std::nullopt, 0});
  }
  return out;
}

Outcome split_invariants() {
  auto commands = fixture_lines("commands.txt");
  for (const auto& line : fixture_lines("out_of_scope.tsv")) {
    commands.push_back(line.substr(line.find('\t') + 1));
  }
  std::mt19937_64 rng(20240601);
  PipelineConfig config;
  config.workers = 1;
  std::size_t key_leaks = 0;
  std::size_t cmd_leaks = 0;
  std::size_t partition_errors = 0;
  std::size_t split_runs = 0;
  for (int trial = 0; trial < kFuzzCorpora; ++trial) {
    const auto input = random_corpus(rng, 12 + rng() % 60, commands);
    config.seed = rng();
    const auto r = run_pipeline(input, db(), default_stopwords(), config);
    std::size_t kept = 0;
    std::size_t filtered = 0;
    for (const auto& p : r.pairs) (p.status == PairStatus::kept ? kept : filtered)++;
    if (kept + filtered != input.size()) ++partition_errors;
    if (r.split_error) continue;
    ++split_runs;
    std::map<std::string, Split> keys;
    std::map<std::string, Split> cmds;
    for (const auto& p : r.pairs) {
      if (p.status != PairStatus::kept) continue;
      const auto s = r.split.at(p.id);
      if (keys.emplace(p.nl.normalized_key, s).first->second != s) ++key_leaks;
      if (cmds.emplace(p.cmd_clean, s).first->second != s) ++cmd_leaks;
    }
  }
  return check(key_leaks == 0 && cmd_leaks == 0 && partition_errors == 0 && split_runs > 0,
               std::to_string(kFuzzCorpora) + " corpora (" + std::to_string(split_runs) +
                   " split): shared keys " + std::to_string(key_leaks) + ", shared commands " +
                   std::to_string(cmd_leaks) + ", partition errors " +
                   std::to_string(partition_errors));
}

Outcome path_example() {
  const std::vector<std::string> want{std::string(kSubStart), "/", "home", "/", "dir", "03", "/",
                                      "*", ".", "txt", std::string(kSubEnd)};
  const auto got = to_subtokens("/home/dir03/*.txt");
  return check(got == want, "/home/dir03/*.txt -> " + std::to_string(got.size()) + " items" +
                                (got == want ? ", exact" : ", differs"));
}

Outcome subtoken_round_trip() {
  std::mt19937_64 rng(7);
  std::size_t failures = 0;
  for (int i = 0; i < kFuzzStrings; ++i) {
    std::string s;
    const auto n = rng() % 40;
    for (std::size_t j = 0; j < n; ++j) s.push_back(static_cast<char>(rng() % 256));
    if (detokenize_subtokens(to_subtokens(s)) != s) ++failures;
  }
  std::size_t args = 0;
  for (const auto& cmd : fixture_lines("commands.txt")) {
    const auto r = parse_command(clean_command(cmd), db());
    if (!r.ok()) continue;
    std::vector<std::string> words;
    collect_args(r.ast().root, words);
    for (const auto& w : words) {
      ++args;
      if (detokenize_subtokens(to_subtokens(w)) != w) ++failures;
    }
  }
  return check(failures == 0, std::to_string(kFuzzStrings) + " fuzzed strings and " +
                                  std::to_string(args) + " fixture arguments, " +
                                  std::to_string(failures) + " failures");
}

Outcome grep_template() {
  const auto r = parse_command("grep -l \"TODO\" *.java", db());
  if (!r.ok()) return {Status::fail, "did not parse"};
  const auto t = extract_template(r.ast(), db()).templatized;
  return check(t == "grep -l [regex] [file]", "got \"" + t + "\"");
}

// Commands built from a few flags in random order with random arguments, so
// that many pairs are template-equal.
std::vector<CommandAst> template_sample(std::size_t n) {
  struct Shape {
    std::string utility;
    std::vector<std::string> flags;
    std::vector<std::string> args;
  };
  const std::vector<Shape> shapes{
      {"ls", {"-l", "-a", "-h", "-t"}, {"/tmp", "/home/user", "."}},
      {"grep", {"-r", "-n", "-i", "-l"}, {"foo", "\"TODO\"", "'a.*b'"}},
      {"sort", {"-n", "-r", "-u"}, {"a.txt", "data.csv"}},
      {"du", {"-s", "-h", "-a"}, {".", "/var/log"}},
      {"wc", {"-l", "-w", "-c"}, {"f.txt", "*.py"}},
  };
  std::mt19937_64 rng(99);
  std::vector<CommandAst> out;
  while (out.size() < n) {
    const auto& s = shapes[rng() % shapes.size()];
    auto flags = s.flags;
    std::shuffle(flags.begin(), flags.end(), rng);
    flags.resize(1 + rng() % flags.size());
    std::string cmd = s.utility;
    for (const auto& f : flags) cmd += " " + f;
    cmd += " " + s.args[rng() % s.args.size()];
    if (rng() % 3 == 0) cmd += " | head -n " + std::to_string(1 + rng() % 9);
    const auto r = parse_command(cmd, db());
    if (r.ok()) out.push_back(r.ast());
  }
  return out;
}

Outcome equivalence_relation(const std::vector<CommandAst>& asts, const std::string& what) {
  const auto n = asts.size();
  std::vector<std::vector<char>> eq(n, std::vector<char>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) eq[i][j] = template_equal(asts[i], asts[j], db());
  }
  std::size_t bad = 0;
  std::size_t classes = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!eq[i][i]) ++bad;
    bool first = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (eq[i][j] != eq[j][i]) ++bad;
      // Transitivity: equal elements have identical rows.
      if (eq[i][j] && eq[i] != eq[j]) ++bad;
      if (eq[i][j] && j < i) first = false;
    }
    if (first) ++classes;
  }
  return check(bad == 0, std::to_string(n) + " " + what + ", " + std::to_string(classes) +
                             " classes, " + std::to_string(bad) + " violations");
}

Outcome bleu_oracle() {
  std::ifstream in(std::string(NLBASH_TEST_DIR) + "/golden/bleu_cases.tsv");
  if (!in) return {Status::fail, "missing golden file"};
  auto words = [](const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
  };
  std::string line;
  std::size_t cases = 0;
  double worst = 0;
  while (std::getline(in, line)) {
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    std::vector<std::vector<std::string>> refs;
    const auto joined = line.substr(t1 + 1, t2 - t1 - 1);
    std::size_t pos = 0;
    while (true) {
      const auto sep = joined.find(" ||| ", pos);
      refs.push_back(words(joined.substr(pos, sep - pos)));
      if (sep == std::string::npos) break;
      pos = sep + 5;
    }
    const double want = std::stod(line.substr(t2 + 1));
    worst = std::max(worst, std::abs(bleu_score(words(line.substr(0, t1)), refs) - want));
    ++cases;
  }
  return check(cases == 50 && worst <= kBleuTolerance,
               std::to_string(cases) + " cases, max error " + fmt(worst) + " (tolerance 1e-9)");
}

Outcome tm_properties() {
  auto cmds = fixture_lines("commands.txt");
  for (auto& c : cmds) c = clean_command(c);
  std::size_t bad = 0;
  std::size_t checks = 0;
  auto cv = [](const std::string& c) { return close_vocabulary(c, db()).tokens; };
  for (const auto& c : cmds) {
    ++checks;
    if (tm_score(cv(c), {cv(c)}) != 1.0) ++bad;
  }
  ++checks;
  if (tm_score(cv("ls -l"), {cv("find . -type f")}) != 0.0) ++bad;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    TestInstance inst{"t", "", {}};
    for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) inst.references.push_back(cmds[rng() % cmds.size()]);
    std::vector<std::string> cands;
    for (std::size_t i = 0, n = 1 + rng() % 5; i < n; ++i) cands.push_back(cmds[rng() % cmds.size()]);
    const auto s = score_instance(inst, cands, db());
    auto reversed = inst;
    std::reverse(reversed.references.begin(), reversed.references.end());
    ++checks;
    if (score_instance(reversed, cands, db()).per_candidate != s.per_candidate) ++bad;
    for (auto m : kAllMetrics) {
      for (std::size_t k = 1; k <= 5; ++k) {
        ++checks;
        if (score_at_k(s, m, k) > score_at_k(s, m, k + 1)) ++bad;
      }
    }
  }
  return check(bad == 0, std::to_string(checks) + " checks (identity, disjoint, order, k), " +
                             std::to_string(bad) + " failures");
}

Outcome out_of_scope_fixture() {
  std::size_t total = 0;
  std::size_t right = 0;
  for (const auto& line : fixture_lines("out_of_scope.tsv")) {
    const auto tab = line.find('\t');
    const auto kind = line.substr(0, tab);
    const auto r = parse_command(clean_command(line.substr(tab + 1)), db());
    ++total;
    const bool found =
        !r.ok() && std::any_of(r.violations().begin(), r.violations().end(),
                               [&](const ScopeViolation& v) { return to_string(v.kind) == kind; });
    if (found) ++right;
  }
  std::size_t in_scope = 0;
  const auto cmds = fixture_lines("commands.txt");
  for (const auto& c : cmds) in_scope += parse_command(clean_command(c), db()).ok();
  return check(total == 50 && right == total && in_scope == cmds.size(),
               std::to_string(right) + "/" + std::to_string(total) +
                   " rejected with the expected kind; " + std::to_string(in_scope) + "/" +
                   std::to_string(cmds.size()) + " in-scope fixtures accepted");
}

int offline() {
  run("find_flags", "find flag total", find_flag_total);
  run("split", "split invariants and partition", split_invariants);
  run("subtoken_path", "sub-token path example", path_example);
  run("subtoken_roundtrip", "sub-token round trip", subtoken_round_trip);
  run("grep_template", "grep template", grep_template);
  run("template_equal", "template_equal equivalence",
      [] { return equivalence_relation(template_sample(kTemplateSample), "generated commands"); });
  run("bleu", "BLEU oracle", bleu_oracle);
  run("tm_topk", "TM and top-k properties", tm_properties);
  run("scope_fixture", "out-of-scope fixture", out_of_scope_fixture);
  return std::all_of(results.begin(), results.end(), [](Status s) { return s == Status::pass; })
             ? 0
             : 1;
}

// ----------------------------------------------------------------- corpus

std::optional<std::vector<RawRecord>> load(const fs::path& dir, const std::string& stem) {
  if (fs::exists(dir / (stem + ".jsonl"))) return read_corpus_jsonl(dir / (stem + ".jsonl"));
  if (fs::exists(dir / (stem + ".nl")) && fs::exists(dir / (stem + ".cm"))) {
    return read_parallel_files(dir / (stem + ".nl"), dir / (stem + ".cm"));
  }
  return std::nullopt;
}

int corpus() {
  const char* env = std::getenv("NLBASH_CORPUS_DIR");
  std::optional<std::vector<RawRecord>> filtered;
  std::optional<std::vector<RawRecord>> full;
  std::string why = "NLBASH_CORPUS_DIR is not set; the released corpus is not available offline";
  if (env && *env) {
    filtered = load(env, "filtered");
    full = load(env, "full");
    why = std::string("no matching corpus files in ") + env;
  }

  const Outcome blocked{Status::blocked, why};
  std::vector<NlCmdPair> kept;
  std::vector<NlCmdPair> rejected;
  nlohmann::json stats;
  double seconds = 0;
  if (filtered) {
    const auto start = std::chrono::steady_clock::now();
    auto pairs = parallel_map(*filtered, [](const RawRecord& r) {
      return filter_pair(make_pair(r, default_stopwords()), db());
    });
    for (auto& p : pairs) (p.status == PairStatus::kept ? kept : rejected).push_back(std::move(p));
    stats = compute_stats(kept, nullptr, db());
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  run("corpus_counts", "corpus size counts", [&]() -> Outcome {
    if (!filtered) return blocked;
    const std::size_t pairs = stats["pairs"];
    const std::size_t utils = stats["cmd"]["utilities"];
    const std::size_t flags = stats["cmd"]["flags"];
    return check(pairs == 9305 && utils == 102 && flags == 206 && seconds < kStatsSeconds,
                 "pairs " + std::to_string(pairs) + "/9305, utilities " + std::to_string(utils) +
                     "/102, flags " + std::to_string(flags) + "/206, " + fmt(seconds) + " s");
  });
  run("corpus_stats", "NL and command statistics", [&]() -> Outcome {
    if (!filtered) return blocked;
    bool ok = true;
    std::string d;
    d += near("sentences", stats["nl"]["unique_sentences"], 8559, kStatsTolerance, ok);
    d += ", " + near("words", stats["nl"]["unique_words"], 7790, kStatsTolerance, ok);
    d += ", " + near("words/sent", stats["nl"]["words_per_sentence"]["avg"], 11.7, kStatsTolerance, ok);
    d += ", " + near("commands", stats["cmd"]["unique_commands"], 7587, kStatsTolerance, ok);
    d += ", " + near("templates", stats["cmd"]["unique_templates"], 4602, kStatsTolerance, ok);
    d += ", " + near("tokens/cmd", stats["cmd"]["tokens_per_command"]["avg"], 7.7, kStatsTolerance, ok);
    return check(ok, d);
  });
  run("filter_yield", "filtering keeps 9,305 of the full data", [&]() -> Outcome {
    if (!full) return blocked;
    std::size_t n = 0;
    for (const auto& r : *full) {
      n += filter_pair(make_pair(r, default_stopwords()), db()).status == PairStatus::kept;
    }
    bool ok = true;
    const auto d = near("kept", static_cast<double>(n), 9305, kFilterTolerance, ok);
    return check(ok, d + " of " + std::to_string(full->size()));
  });
  run("nl_cmd_mapping", "NL to command mapping", [&]() -> Outcome {
    if (!filtered) return blocked;
    bool ok = true;
    const auto& m = stats["mapping"];
    std::string d = near("cmds/nl", m["commands_per_nl"]["avg"], 1.09, kMappingTolerance, ok);
    d += ", " + near("nls/cmd", m["nls_per_command"]["avg"], 1.23, kMappingTolerance, ok);
    d += ", " + near("max cmds/nl", m["commands_per_nl"]["max"], 9, kMappingTolerance, ok);
    d += ", " + near("max nls/cmd", m["nls_per_command"]["max"], 22, kMappingTolerance, ok);
    return check(ok, d);
  });
  run("find_coverage", "find train coverage", [&]() -> Outcome {
    if (!filtered) return blocked;
    const auto split = split_corpus(kept, kSplitSeed);
    const auto s = compute_stats(kept, &split, db());
    for (const auto& u : s["flag_coverage"]["utilities"]) {
      if (u["utility"] != "find") continue;
      bool ok = u["total_flags"] == 103;
      const auto d = near("covered", u["covered_flags"], 68, kCoverageTolerance, ok);
      return check(ok, d + ", total " + u["total_flags"].dump() + "/103");
    }
    return {Status::fail, "find missing from coverage"};
  });
  run("subtoken_corpus", "sub-token round trip on corpus arguments", [&]() -> Outcome {
    if (!filtered) return blocked;
    std::size_t args = 0;
    std::size_t failures = 0;
    for (const auto& p : kept) {
      std::vector<std::string> words;
      collect_args(p.ast->root, words);
      for (const auto& w : words) {
        ++args;
        failures += detokenize_subtokens(to_subtokens(w)) != w;
      }
    }
    return check(failures == 0, std::to_string(args) + " arguments, " +
                                    std::to_string(failures) + " failures");
  });
  run("template_corpus", "template_equal on sampled corpus commands", [&]() -> Outcome {
    if (!filtered) return blocked;
    std::vector<CommandAst> asts;
    std::mt19937_64 rng(1);
    auto pool = kept;
    std::shuffle(pool.begin(), pool.end(), rng);
    for (const auto& p : pool) {
      if (asts.size() == kTemplateSample) break;
      asts.push_back(*p.ast);
    }
    return equivalence_relation(asts, "corpus commands");
  });
  run("scope_corpus", "filtered corpus parses in scope", [&]() -> Outcome {
    if (!filtered) return blocked;
    return check(rejected.empty(), std::to_string(kept.size()) + "/" +
                                       std::to_string(filtered->size()) + " in scope");
  });

  if (std::any_of(results.begin(), results.end(), [](Status s) { return s == Status::fail; })) {
    return 1;
  }
  if (std::any_of(results.begin(), results.end(), [](Status s) { return s == Status::blocked; })) {
    return 77;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "offline";
  if (mode == "offline") return offline();
  if (mode == "corpus") return corpus();
  std::fprintf(stderr, "usage: %s [offline|corpus]\n", argv[0]);
  return 2;
}
