#include "nlbash/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "nlbash/ast_json.hpp"
#include "nlbash/parallel.hpp"
#include "nlbash/template.hpp"

namespace nlbash {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string required_string(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string("missing field \"") + key + "\"", line);
  if (!it->is_string()) throw FormatError(std::string("field \"") + key + "\" must be a string", line);
  return it->get<std::string>();
}

}  // namespace

std::vector<RawRecord> read_corpus_jsonl(std::istream& in) {
  std::vector<RawRecord> out;
  std::unordered_set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (trim(text).empty()) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(std::string("invalid JSON: ") + e.what(), line);
    }
    if (!obj.is_object()) throw FormatError("record must be a JSON object", line);
    RawRecord r;
    r.line = line;
    const auto id = obj.find("id");
    if (id == obj.end()) throw FormatError("missing field \"id\"", line);
    if (id->is_string()) {
      r.id = id->get<std::string>();
    } else if (id->is_number_integer()) {
      r.id = std::to_string(id->get<long long>());
    } else {
      throw FormatError("field \"id\" must be a string or an integer", line);
    }
    if (r.id.empty()) throw FormatError("empty id", line);
    if (!ids.insert(r.id).second) throw FormatError("duplicate id \"" + r.id + "\"", line);
    r.nl = required_string(obj, "nl", line);
    r.cmd = required_string(obj, "cmd", line);
    if (const auto url = obj.find("source_url"); url != obj.end() && !url->is_null()) {
      if (!url->is_string()) throw FormatError("field \"source_url\" must be a string", line);
      r.source_url = url->get<std::string>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<RawRecord> read_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_corpus_jsonl(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), 0);
  }
}

std::vector<RawRecord> read_parallel_files(const std::filesystem::path& nl_path,
                                           const std::filesystem::path& cmd_path) {
  std::ifstream nl(nl_path);
  if (!nl) throw std::runtime_error("cannot open " + nl_path.string());
  std::ifstream cmd(cmd_path);
  if (!cmd) throw std::runtime_error("cannot open " + cmd_path.string());
  std::vector<RawRecord> out;
  std::string a;
  std::string b;
  std::size_t line = 0;
  while (true) {
    const bool has_a = static_cast<bool>(std::getline(nl, a));
    const bool has_b = static_cast<bool>(std::getline(cmd, b));
    if (!has_a && !has_b) break;
    ++line;
    if (has_a != has_b) {
      throw FormatError((has_a ? cmd_path : nl_path).string() + " ends early", line);
    }
    RawRecord r;
    r.id = std::to_string(line);
    r.nl = a;
    r.cmd = b;
    r.line = line;
    out.push_back(std::move(r));
  }
  return out;
}

std::string_view to_string(FilterRule rule) {
  switch (rule) {
    case FilterRule::none: return "none";
    case FilterRule::empty: return "empty";
    case FilterRule::nested_interpreter: return "nested_interpreter";
    case FilterRule::multi_statement: return "multi_statement";
    case FilterRule::out_of_scope: return "out_of_scope";
    case FilterRule::non_grammatical: return "non_grammatical";
  }
  return "none";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

namespace {

FilterRule rule_for(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::nested_interpreter: return FilterRule::nested_interpreter;
    case ViolationKind::multi_statement: return FilterRule::multi_statement;
    case ViolationKind::io_redirection:
    case ViolationKind::variable_assignment:
    case ViolationKind::compound_statement: return FilterRule::out_of_scope;
    case ViolationKind::unknown_utility:
    case ViolationKind::unknown_flag:
    case ViolationKind::syntax_error: return FilterRule::non_grammatical;
  }
  return FilterRule::non_grammatical;
}

}  // namespace

NlCmdPair make_pair(const RawRecord& record, const StopwordSet& stopwords) {
  NlCmdPair p;
  p.id = record.id;
  p.nl = make_sentence(trim(record.nl), stopwords);
  p.cmd_raw = record.cmd;
  p.cmd_clean = clean_command(record.cmd);
  p.source_url = record.source_url;
  return p;
}

NlCmdPair filter_pair(NlCmdPair pair, const SpecDb& db) {
  pair.ast.reset();
  pair.violations.clear();
  pair.status = PairStatus::kept;
  pair.rule = FilterRule::none;
  pair.reason.clear();
  if (pair.cmd_clean.empty() || pair.nl.raw.empty()) {
    pair.status = PairStatus::filtered;
    pair.rule = FilterRule::empty;
    pair.reason = "empty";
    return pair;
  }
  auto result = parse_command(pair.cmd_clean, db);
  if (result.ok()) {
    pair.ast = result.ast();
    return pair;
  }
  pair.violations = result.violations();
  pair.status = PairStatus::filtered;
  // Violations are sorted by span; the highest-priority rule wins, then the earliest.
  const ScopeViolation* chosen = nullptr;
  for (const auto& v : pair.violations) {
    if (!chosen || rule_for(v.kind) < rule_for(chosen->kind)) chosen = &v;
  }
  if (!chosen) {
    pair.rule = FilterRule::non_grammatical;
    pair.reason = "non_grammatical";
    return pair;
  }
  pair.rule = rule_for(chosen->kind);
  pair.reason = std::string(to_string(pair.rule));
  if (pair.rule == FilterRule::out_of_scope || pair.rule == FilterRule::non_grammatical) {
    pair.reason += ": ";
    pair.reason += to_string(chosen->kind);
  }
  return pair;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
  // Values below `threshold` would bias the modulus.
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

SplitAssignment split_corpus(const std::vector<NlCmdPair>& kept, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> by_key;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i].status != PairStatus::kept) {
      throw std::invalid_argument("split_corpus: pair " + kept[i].id + " is not kept");
    }
    by_key[kept[i].nl.normalized_key].push_back(i);
  }
  const std::size_t n = by_key.size();
  if (n < 12) {
    throw SplitError("cannot split " + std::to_string(n) +
                     " clusters 10:1:1; at least 12 are needed");
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  seeded_shuffle(order, rng);

  const std::size_t held = std::max<std::size_t>(1, (n + 6) / 12);  // round(n / 12)
  std::vector<int> rank(n, 0);                                      // 0 train, 1 dev, 2 test
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (pos < held) {
      rank[order[pos]] = 2;
    } else if (pos < 2 * held) {
      rank[order[pos]] = 1;
    }
  }

  std::vector<const std::vector<std::size_t>*> clusters;
  clusters.reserve(n);
  for (const auto& [key, members] : by_key) clusters.push_back(&members);

  // A cluster sharing a command with a cluster in a lower split moves down to it.
  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_map<std::string, int> lowest;
    for (std::size_t c = 0; c < n; ++c) {
      for (auto i : *clusters[c]) {
        auto [it, fresh] = lowest.emplace(kept[i].cmd_clean, rank[c]);
        if (!fresh) it->second = std::min(it->second, rank[c]);
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      for (auto i : *clusters[c]) {
        const int low = lowest.at(kept[i].cmd_clean);
        if (low < rank[c]) {
          rank[c] = low;
          changed = true;
        }
      }
    }
  }

  SplitAssignment out;
  for (std::size_t c = 0; c < n; ++c) {
    for (auto i : *clusters[c]) out[kept[i].id] = static_cast<Split>(rank[c]);
  }
  return out;
}

Summary summarize(std::vector<std::size_t> values) {
  Summary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double total = 0;
  for (auto v : values) total += static_cast<double>(v);
  s.avg = total / static_cast<double>(values.size());
  const auto m = values.size() / 2;
  s.median = values.size() % 2 ? static_cast<double>(values[m])
                               : (static_cast<double>(values[m - 1]) + values[m]) / 2.0;
  s.max = values.back();
  return s;
}

namespace {

json summary_json(const Summary& s, bool with_max = false) {
  json j{{"avg", s.avg}, {"median", s.median}};
  if (with_max) j["max"] = s.max;
  return j;
}

// Per-command facts computed independently for each record.
struct CommandFacts {
  std::vector<std::string> tokens;
  std::string templ;
  std::set<std::string> utilities;
  std::set<std::pair<std::string, std::string>> flags;  // (utility, canonical)
  std::set<std::string> reserved;
  // (utility, db spelling) for known flags, for coverage.
  std::set<std::pair<std::string, std::string>> spellings;
};

CommandFacts command_facts(const CommandAst& ast, const SpecDb& db) {
  CommandFacts f;
  for (const auto& t : command_tokens(ast)) {
    f.tokens.push_back(t.text);
    if (t.cls == TokenClass::reserved) f.reserved.insert(t.canonical);
  }
  f.templ = extract_template(ast, db).templatized;
  for_each_utility(ast.root, [&](const Node& node) {
    f.utilities.insert(node.name);
    const auto* spec = db.lookup(node.name);
    for (const auto& item : node.items) {
      const auto* flag = std::get_if<FlagBinding>(&item);
      if (!flag) continue;
      f.flags.emplace(node.name, flag->canonical);
      if (!flag->known || !spec) continue;
      const FlagSpec* fs = nullptr;
      if (flag->text.rfind("--", 0) == 0) {
        fs = spec->find_long(flag->text);
        if (!fs) fs = spec->find_long_prefix(flag->text);
        if (fs && fs->long_form) {
          f.spellings.emplace(node.name, *fs->long_form);
          continue;
        }
      }
      fs = spec->find_short(flag->canonical);
      if (fs) f.spellings.emplace(node.name, fs->short_form);
    }
  });
  return f;
}

template <class Map>
std::vector<std::size_t> sizes_of(const Map& m) {
  std::vector<std::size_t> out;
  out.reserve(m.size());
  for (const auto& [k, v] : m) out.push_back(v.size());
  return out;
}

}  // namespace

json compute_stats(const std::vector<NlCmdPair>& kept, const SplitAssignment* assignment,
                   const SpecDb& db, int workers) {
  std::vector<const NlCmdPair*> pairs;
  for (const auto& p : kept) {
    if (p.status == PairStatus::kept && p.ast) pairs.push_back(&p);
  }
  const auto facts = parallel_map(
      pairs, [&](const NlCmdPair* p) { return command_facts(*p->ast, db); }, workers);

  // Natural language side, over unique raw sentences.
  std::map<std::string, const NlSentence*> sentences;
  for (const auto* p : pairs) sentences.emplace(p->nl.raw, &p->nl);
  std::map<std::string, std::set<std::string>> sentences_per_word;
  std::vector<std::size_t> words_per_sentence;
  for (const auto& [raw, s] : sentences) {
    words_per_sentence.push_back(s->tokens.size());
    for (const auto& w : s->tokens) sentences_per_word[w].insert(raw);
  }

  // Command side, over unique cleaned commands.
  std::map<std::string, std::size_t> first_fact;  // command -> index into facts
  for (std::size_t i = 0; i < pairs.size(); ++i) first_fact.emplace(pairs[i]->cmd_clean, i);
  std::set<std::string> templates;
  std::map<std::string, std::set<std::string>> commands_per_token;
  std::map<std::string, std::set<std::string>> commands_per_utility;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> commands_per_flag;
  std::set<std::string> reserved;
  std::vector<std::size_t> tokens_per_command;
  for (const auto& [cmd, i] : first_fact) {
    const auto& f = facts[i];
    templates.insert(f.templ);
    tokens_per_command.push_back(f.tokens.size());
    for (const auto& t : f.tokens) commands_per_token[t].insert(cmd);
    for (const auto& u : f.utilities) commands_per_utility[u].insert(cmd);
    for (const auto& fl : f.flags) commands_per_flag[fl].insert(cmd);
    reserved.insert(f.reserved.begin(), f.reserved.end());
  }

  // Mapping between descriptions and commands.
  std::map<std::string, std::set<std::string>> cmds_per_nl;
  std::map<std::string, std::set<std::string>> nls_per_cmd;
  for (const auto* p : pairs) {
    cmds_per_nl[p->nl.raw].insert(p->cmd_clean);
    nls_per_cmd[p->cmd_clean].insert(p->nl.raw);
  }

  // Pairs containing each utility.
  std::map<std::string, std::size_t> utility_pairs;
  for (const auto& f : facts) {
    for (const auto& u : f.utilities) ++utility_pairs[u];
  }
  std::vector<std::pair<std::string, std::size_t>> freq(utility_pairs.begin(),
                                                        utility_pairs.end());
  std::stable_sort(freq.begin(), freq.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  json frequency = json::array();
  for (const auto& [u, c] : freq) frequency.push_back({{"utility", u}, {"pairs", c}});

  // Flag coverage against the db, over the train split when one is given.
  std::map<std::string, std::set<std::string>> covered;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (assignment) {
      const auto it = assignment->find(pairs[i]->id);
      if (it == assignment->end() || it->second != Split::train) continue;
    }
    for (const auto& [u, s] : facts[i].spellings) covered[u].insert(s);
  }
  json coverage = json::array();
  for (const auto& spec : db.utilities()) {
    if (!spec.in_scope()) continue;
    const auto total = spec.flag_string_count();
    const auto it = covered.find(spec.name);
    const std::size_t seen = it == covered.end() ? 0 : it->second.size();
    coverage.push_back({{"utility", spec.name},
                        {"total_flags", total},
                        {"covered_flags", seen},
                        {"coverage", total ? static_cast<double>(seen) / total : 0.0}});
  }

  json out;
  out["pairs"] = pairs.size();
  out["nl"] = {
      {"unique_sentences", sentences.size()},
      {"unique_words", sentences_per_word.size()},
      {"words_per_sentence", summary_json(summarize(words_per_sentence))},
      {"sentences_per_word", summary_json(summarize(sizes_of(sentences_per_word)))},
  };
  out["cmd"] = {
      {"unique_commands", first_fact.size()},
      {"unique_templates", templates.size()},
      {"unique_tokens", commands_per_token.size()},
      {"tokens_per_command", summary_json(summarize(tokens_per_command))},
      {"commands_per_token", summary_json(summarize(sizes_of(commands_per_token)))},
      {"utilities", commands_per_utility.size()},
      {"flags", commands_per_flag.size()},
      {"reserved_tokens", reserved.size()},
      {"commands_per_utility", summary_json(summarize(sizes_of(commands_per_utility)))},
      {"commands_per_flag", summary_json(summarize(sizes_of(commands_per_flag)))},
  };
  out["mapping"] = {
      {"commands_per_nl", summary_json(summarize(sizes_of(cmds_per_nl)), true)},
      {"nls_per_command", summary_json(summarize(sizes_of(nls_per_cmd)), true)},
  };
  out["utility_frequency"] = std::move(frequency);
  out["flag_coverage"] = {{"scope", assignment ? "train" : "all"}, {"utilities", coverage}};
  return out;
}

PipelineResult run_pipeline(const std::vector<RawRecord>& input, const SpecDb& db,
                            const StopwordSet& stopwords, const PipelineConfig& config) {
  PipelineResult result{{}, {}, std::nullopt, json::object(), {}, Vocabulary(config.vocab_cutoff)};
  if (config.vocab_cutoff < 1) throw std::invalid_argument("vocabulary cutoff must be at least 1");
  result.pairs = parallel_map(
      input, [&](const RawRecord& r) { return filter_pair(make_pair(r, stopwords), db); },
      config.workers);

  std::vector<NlCmdPair> kept;
  std::map<std::string, std::size_t> reasons;
  for (const auto& p : result.pairs) {
    if (p.status == PairStatus::kept) {
      kept.push_back(p);
    } else {
      ++reasons[p.reason];
    }
  }

  try {
    result.split = split_corpus(kept, config.seed);
  } catch (const SplitError& e) {
    result.split_error = e.what();
  }

  std::vector<NlSentence> vocab_corpus;
  for (const auto& p : kept) {
    if (result.split.empty() || result.split.at(p.id) == Split::train) {
      vocab_corpus.push_back(p.nl);
    }
  }
  result.vocabulary = build_vocab(vocab_corpus, config.vocab_cutoff);

  // Spelling suggestions against the whole kept corpus.
  std::vector<NlSentence> all_nl;
  all_nl.reserve(kept.size());
  for (const auto& p : kept) all_nl.push_back(p.nl);
  const auto model = build_vocab(all_nl, config.vocab_cutoff);
  const auto suggestions = parallel_map(
      kept, [&](const NlCmdPair& p) { return spelling_suggestions(p.nl.tokens, model); },
      config.workers);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (const auto& s : suggestions[i]) result.spelling.emplace_back(kept[i].id, s);
  }

  result.stats = compute_stats(kept, result.split.empty() ? nullptr : &result.split, db,
                               config.workers);
  json filtering{{"input", input.size()},
                 {"kept", kept.size()},
                 {"filtered", input.size() - kept.size()},
                 {"reasons", reasons}};
  result.stats["filtering"] = std::move(filtering);
  json split{{"seed", config.seed}};
  if (result.split_error) {
    split["error"] = *result.split_error;
  } else {
    std::map<std::string, std::size_t> sizes{{"train", 0}, {"dev", 0}, {"test", 0}};
    for (const auto& [id, s] : result.split) ++sizes[std::string(to_string(s))];
    split["sizes"] = sizes;
    json ratios;
    for (const auto& [name, size] : sizes) {
      ratios[name] = kept.empty() ? 0.0 : static_cast<double>(size) / kept.size();
    }
    split["realized_ratios"] = std::move(ratios);
  }
  result.stats["split"] = std::move(split);
  return result;
}

json to_json(const RawRecord& record) {
  json j{{"id", record.id}, {"nl", record.nl}, {"cmd", record.cmd}};
  j["source_url"] = record.source_url ? json(*record.source_url) : json(nullptr);
  return j;
}

json pair_json(const NlCmdPair& pair) {
  json j{{"id", pair.id}, {"nl", pair.nl.raw}};
  if (pair.status == PairStatus::kept) {
    j["cmd"] = pair.cmd_clean;
    j["cmd_raw"] = pair.cmd_raw;
    j["nl_key"] = pair.nl.normalized_key;
  } else {
    j["cmd"] = pair.cmd_raw;
    j["reason"] = pair.reason;
    json violations = json::array();
    for (const auto& v : pair.violations) violations.push_back(to_json(v));
    j["violations"] = std::move(violations);
  }
  j["source_url"] = pair.source_url ? json(*pair.source_url) : json(nullptr);
  return j;
}

std::vector<json> build_test_instances(const std::vector<NlCmdPair>& kept,
                                       const SplitAssignment& assignment, Split split) {
  struct Group {
    std::string nl;
    std::vector<std::string> refs;
  };
  std::map<std::string, Group> groups;
  for (const auto& p : kept) {
    if (p.status != PairStatus::kept) continue;
    const auto it = assignment.find(p.id);
    if (it == assignment.end() || it->second != split) continue;
    auto& g = groups[p.nl.normalized_key];
    if (g.refs.empty()) g.nl = p.nl.raw;
    if (std::find(g.refs.begin(), g.refs.end(), p.cmd_clean) == g.refs.end()) {
      g.refs.push_back(p.cmd_clean);
    }
  }
  std::vector<json> out;
  std::size_t n = 0;
  for (const auto& [key, g] : groups) {
    out.push_back({{"instance_id", std::string(to_string(split)) + "-" + std::to_string(++n)},
                   {"nl", g.nl},
                   {"nl_key", key},
                   {"references", g.refs}});
  }
  return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_pipeline_outputs(const PipelineResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto kept = open_out(dir / "kept.jsonl");
  auto filtered = open_out(dir / "filtered.jsonl");
  std::vector<NlCmdPair> kept_pairs;
  for (const auto& p : result.pairs) {
    (p.status == PairStatus::kept ? kept : filtered) << pair_json(p).dump() << '\n';
    if (p.status == PairStatus::kept) kept_pairs.push_back(p);
  }

  open_out(dir / "stats.json") << result.stats.dump(2) << '\n';

  auto split = open_out(dir / "split.tsv");
  for (const auto& p : kept_pairs) {
    const auto it = result.split.find(p.id);
    if (it != result.split.end()) split << p.id << '\t' << to_string(it->second) << '\n';
  }

  auto spelling = open_out(dir / "spelling.tsv");
  for (const auto& [id, s] : result.spelling) {
    spelling << id << '\t' << s.word << '\t' << s.suggestion << '\n';
  }

  open_out(dir / "vocab.tsv") << result.vocabulary.to_tsv();

  for (auto s : {Split::dev, Split::test}) {
    auto out = open_out(dir / (std::string(to_string(s)) + "_set.jsonl"));
    for (const auto& inst : build_test_instances(kept_pairs, result.split, s)) {
      out << inst.dump() << '\n';
    }
  }
}

}  // namespace nlbash
