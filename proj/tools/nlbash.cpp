// Command-line front end: parse, pipeline, tokenize, template, stats, eval.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlbash/ast_json.hpp"
#include "nlbash/bash_parser.hpp"
#include "nlbash/corpus.hpp"
#include "nlbash/metrics.hpp"
#include "nlbash/nl_pipeline.hpp"
#include "nlbash/spec_db.hpp"
#include "nlbash/template.hpp"
#include "nlbash/tokenization.hpp"

using namespace nlbash;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsageError = 2;

struct Config {
  std::string spec_db;
  std::string stopwords;
  std::uint64_t seed = 0;
  std::size_t cutoff = 4;
  std::vector<std::size_t> k_values{1, 3};
  int workers = 0;
  bool permissive = false;
  std::string config_file;
};

struct Io {
  std::string input = "-";
  std::string output_dir = "out";
  std::string nl_file;
  std::string cmd_file;
  std::string split_file;
  std::string granularity = "token";
  std::string side = "cmd";
  std::string test_set;
  std::string system_output;
  std::string report;
};

json config_json(const Config& c, const std::string& command) {
  return {{"command", command},
          {"spec_db", c.spec_db.empty() ? (data_dir() / "spec_db.tsv").string() : c.spec_db},
          {"stopwords",
           c.stopwords.empty() ? (data_dir() / "stopwords.txt").string() : c.stopwords},
          {"seed", c.seed},
          {"cutoff", c.cutoff},
          {"k", c.k_values},
          {"workers", c.workers},
          {"permissive", c.permissive},
          {"config", c.config_file}};
}

class Context {
 public:
  explicit Context(const Config& c) : config(c) {}

  const SpecDb& db() {
    if (config.spec_db.empty()) return SpecDb::bundled();
    if (!db_) db_ = std::make_unique<SpecDb>(SpecDb::load(config.spec_db));
    return *db_;
  }

  const StopwordSet& stopwords() {
    if (config.stopwords.empty()) return default_stopwords();
    if (!stopwords_) stopwords_ = std::make_unique<StopwordSet>(load_stopwords(config.stopwords));
    return *stopwords_;
  }

  const Config& config;

 private:
  std::unique_ptr<SpecDb> db_;
  std::unique_ptr<StopwordSet> stopwords_;
};

// Reads `path`, or standard input for "-".
std::vector<std::string> read_lines(const std::string& path) {
  std::unique_ptr<std::ifstream> file;
  std::istream* in = &std::cin;
  if (path != "-") {
    file = std::make_unique<std::ifstream>(path);
    if (!*file) throw std::runtime_error("cannot open " + path);
    in = file.get();
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(*in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

std::vector<RawRecord> read_records(const Io& io) {
  if (!io.nl_file.empty() || !io.cmd_file.empty()) {
    if (io.nl_file.empty() || io.cmd_file.empty()) {
      throw CLI::ValidationError("--nl and --cm must be given together");
    }
    return read_parallel_files(io.nl_file, io.cmd_file);
  }
  if (io.input == "-") return read_corpus_jsonl(std::cin);
  return read_corpus_jsonl(std::filesystem::path(io.input));
}

int run_parse(Context& ctx, const Io& io) {
  int status = kOk;
  std::size_t n = 0;
  for (const auto& line : read_lines(io.input)) {
    ++n;
    if (blank(line)) continue;
    const auto clean = clean_command(line);
    const auto r = parse_command(clean, ctx.db(), ParseOptions{ctx.config.permissive});
    json out{{"line", n}, {"command", clean}, {"in_scope", r.ok()}};
    if (r.ok()) {
      out["ast"] = to_json(r.ast());
    } else {
      status = kDomainFailure;
      json v = json::array();
      for (const auto& x : r.violations()) v.push_back(to_json(x));
      out["violations"] = std::move(v);
      if (r.partial_ast()) out["partial_ast"] = to_json(*r.partial_ast());
      std::cerr << "line " << n << ": out of scope: " << clean << '\n';
    }
    std::cout << out.dump() << '\n';
  }
  return status;
}

int run_pipeline_cmd(Context& ctx, const Io& io) {
  const auto records = read_records(io);
  PipelineConfig pc;
  pc.seed = ctx.config.seed;
  pc.vocab_cutoff = ctx.config.cutoff;
  pc.workers = ctx.config.workers;
  const auto result = run_pipeline(records, ctx.db(), ctx.stopwords(), pc);
  write_pipeline_outputs(result, io.output_dir);
  const auto& f = result.stats["filtering"];
  std::cerr << "input " << f["input"] << ", kept " << f["kept"] << ", filtered " << f["filtered"]
            << '\n';
  if (result.split_error) std::cerr << "split skipped: " << *result.split_error << '\n';
  return kOk;
}

int run_tokenize(Context& ctx, const Io& io) {
  const auto g = parse_granularity(io.granularity);
  if (!g) throw CLI::ValidationError("--granularity must be token, char or subtoken");
  int status = kOk;
  if (io.side == "pair") {
    for (const auto& r : read_records(io)) {
      const auto clean = clean_command(r.cmd);
      const auto parsed = parse_command(clean, ctx.db(), ParseOptions{ctx.config.permissive});
      if (!parsed.ok()) {
        std::cerr << "record " << r.id << ": out of scope: " << clean << '\n';
        status = kDomainFailure;
        continue;
      }
      std::cout << encoded_record(r.id, encode_nl(r.nl, *g), encode_command(clean, parsed.ast(), *g))
                       .dump()
                << '\n';
    }
    return status;
  }
  std::size_t n = 0;
  for (const auto& line : read_lines(io.input)) {
    ++n;
    if (blank(line)) continue;
    if (io.side == "nl") {
      std::cout << json(encode_nl(line, *g).items).dump() << '\n';
      continue;
    }
    const auto clean = clean_command(line);
    const auto parsed = parse_command(clean, ctx.db(), ParseOptions{ctx.config.permissive});
    if (!parsed.ok()) {
      std::cerr << "line " << n << ": out of scope: " << clean << '\n';
      status = kDomainFailure;
      continue;
    }
    std::cout << json(encode_command(clean, parsed.ast(), *g).items).dump() << '\n';
  }
  return status;
}

int run_template(Context& ctx, const Io& io) {
  int status = kOk;
  std::size_t n = 0;
  for (const auto& line : read_lines(io.input)) {
    ++n;
    if (blank(line)) continue;
    const auto clean = clean_command(line);
    const auto parsed = parse_command(clean, ctx.db(), ParseOptions{ctx.config.permissive});
    if (!parsed.ok()) {
      std::cerr << "line " << n << ": out of scope: " << clean << '\n';
      status = kDomainFailure;
      continue;
    }
    const auto t = extract_template(parsed.ast(), ctx.db());
    std::string types;
    for (std::size_t i = 0; i < t.slot_types.size(); ++i) {
      if (i) types += ',';
      types += to_string(t.slot_types[i]);
    }
    std::cout << clean << '\t' << t.templatized << '\t' << types << '\n';
  }
  return status;
}

int run_stats(Context& ctx, const Io& io) {
  const auto records = read_records(io);
  std::optional<SplitAssignment> split;
  if (!io.split_file.empty()) {
    split.emplace();
    std::size_t n = 0;
    for (const auto& line : read_lines(io.split_file)) {
      ++n;
      if (blank(line)) continue;
      const auto tab = line.find('\t');
      const auto name = tab == std::string::npos ? "" : line.substr(tab + 1);
      Split s;
      if (name == "train") {
        s = Split::train;
      } else if (name == "dev") {
        s = Split::dev;
      } else if (name == "test") {
        s = Split::test;
      } else {
        throw FormatError(io.split_file + ": expected \"id<TAB>train|dev|test\"", n);
      }
      (*split)[line.substr(0, tab)] = s;
    }
  }
  std::vector<NlCmdPair> pairs;
  std::map<std::string, std::size_t> reasons;
  for (const auto& r : records) {
    auto p = filter_pair(make_pair(r, ctx.stopwords()), ctx.db());
    if (p.status == PairStatus::kept) {
      pairs.push_back(std::move(p));
    } else {
      ++reasons[p.reason];
    }
  }
  auto stats = compute_stats(pairs, split ? &*split : nullptr, ctx.db(), ctx.config.workers);
  stats["filtering"] = {{"input", records.size()},
                        {"kept", pairs.size()},
                        {"filtered", records.size() - pairs.size()},
                        {"reasons", reasons}};
  std::cout << stats.dump(2) << '\n';
  return kOk;
}

int run_eval(Context& ctx, const Io& io) {
  const auto test = read_test_set(std::filesystem::path(io.test_set));
  const auto output = read_system_output(std::filesystem::path(io.system_output));
  const auto report = evaluate(test, output, ctx.config.k_values, ctx.db(), ctx.config.workers);
  if (!io.report.empty()) {
    std::ofstream out(io.report);
    if (!out) throw std::runtime_error("cannot write " + io.report);
    out << report.to_json().dump(2) << '\n';
  }
  std::cout << report.table();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tools for natural language to Bash command corpora"};
  app.require_subcommand(1);
  app.fallthrough();
  Config config;
  Io io;

  app.set_config("--config", "", "Config file (key = value lines)")->envname("NLBASH_CONFIG");
  app.add_option("--spec-db", config.spec_db, "Utility/flag database TSV")
      ->envname("NLBASH_SPEC_DB");
  app.add_option("--stopwords", config.stopwords, "Stopword list")->envname("NLBASH_STOPWORDS");
  app.add_option("--seed", config.seed, "Split seed")->envname("NLBASH_SEED");
  app.add_option("--cutoff", config.cutoff, "Vocabulary frequency cutoff")
      ->envname("NLBASH_CUTOFF")
      ->check(CLI::PositiveNumber);
  app.add_option("--k", config.k_values, "Comma separated k values")
      ->delimiter(',')
      ->envname("NLBASH_K")
      ->check(CLI::PositiveNumber);
  app.add_option("--workers", config.workers, "Worker threads, 0 for all cores")
      ->envname("NLBASH_WORKERS")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--permissive", config.permissive, "Accept unknown utilities and flags")
      ->envname("NLBASH_PERMISSIVE");

  auto* parse = app.add_subcommand("parse", "Parse commands, one per line, into AST JSON");
  parse->add_option("input", io.input, "Command file, - for stdin");

  auto* pipeline = app.add_subcommand("pipeline", "Filter, clean, split and summarize a corpus");
  pipeline->add_option("input", io.input, "Corpus JSONL, - for stdin");
  pipeline->add_option("--nl", io.nl_file, "Descriptions, one per line");
  pipeline->add_option("--cm", io.cmd_file, "Commands, one per line");
  pipeline->add_option("-o,--output", io.output_dir, "Output directory")->capture_default_str();

  auto* tokenize = app.add_subcommand("tokenize", "Encode commands or descriptions");
  tokenize->add_option("input", io.input, "Input file, - for stdin");
  tokenize->add_option("--granularity", io.granularity, "token, char or subtoken")
      ->capture_default_str()
      ->check(CLI::IsMember({"token", "char", "subtoken"}));
  tokenize->add_option("--side", io.side, "cmd, nl, or pair (corpus JSONL input)")
      ->capture_default_str()
      ->check(CLI::IsMember({"cmd", "nl", "pair"}));
  tokenize->add_option("--nl", io.nl_file, "Descriptions, one per line (with --side pair)");
  tokenize->add_option("--cm", io.cmd_file, "Commands, one per line (with --side pair)");

  auto* templ = app.add_subcommand("template", "Print command templates as TSV");
  templ->add_option("input", io.input, "Command file, - for stdin");

  auto* stats = app.add_subcommand("stats", "Corpus statistics as JSON");
  stats->add_option("input", io.input, "Corpus JSONL, - for stdin");
  stats->add_option("--nl", io.nl_file, "Descriptions, one per line");
  stats->add_option("--cm", io.cmd_file, "Commands, one per line");
  stats->add_option("--split", io.split_file, "Split TSV; flag coverage uses its train part");

  auto* eval = app.add_subcommand("eval", "Score system output against a test set");
  eval->add_option("--test-set", io.test_set, "Test set JSONL")->required();
  eval->add_option("--output", io.system_output, "System output JSONL")->required();
  eval->add_option("--report", io.report, "Write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  const auto* sub = app.get_subcommands().front();
  std::cerr << "config " << config_json(config, sub->get_name()).dump() << '\n';

  Context ctx(config);
  try {
    if (sub == parse) return run_parse(ctx, io);
    if (sub == pipeline) return run_pipeline_cmd(ctx, io);
    if (sub == tokenize) return run_tokenize(ctx, io);
    if (sub == templ) return run_template(ctx, io);
    if (sub == stats) return run_stats(ctx, io);
    if (sub == eval) return run_eval(ctx, io);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainFailure;
  }
  return kUsageError;
}
