#include "nlbash/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_set>

#include "nlbash/bash_parser.hpp"
#include "nlbash/parallel.hpp"
#include "nlbash/template.hpp"
#include "nlbash/tokenization.hpp"

namespace nlbash {

using nlohmann::json;

namespace {

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

// Permissive parse; nullopt when the text is not a usable command.
std::optional<CommandAst> parse_candidate(const std::string& clean, const SpecDb& db) {
  if (clean.empty()) return std::nullopt;
  auto strict = parse_command(clean, db);
  if (strict.ok()) return strict.ast();
  auto r = parse_command(clean, db, ParseOptions{true});
  if (!r.partial_ast()) return std::nullopt;
  for (const auto& v : r.violations()) {
    if (v.kind == ViolationKind::syntax_error) return std::nullopt;
  }
  return *r.partial_ast();
}

CloseVocab approximate(const std::string& clean, const SpecDb& db) {
  CloseVocab out;
  out.approximated = true;
  std::string utility;
  bool command_position = true;
  for (const auto& w : split_ws(clean)) {
    if (auto r = reserved_class(w)) {
      out.tokens.push_back(*r);
      if (*r == "|" || *r == "&&" || *r == "||" || *r == "(" || *r == "$(" || *r == "<(") {
        utility.clear();
        command_position = true;
      }
    } else if (command_position) {
      command_position = false;
      if (db.lookup(w)) {
        out.tokens.push_back(w);
        utility = w;
      }
    } else if (!utility.empty() && w.size() > 1 && w[0] == '-') {
      const auto v = db.validate_flag(utility, w);
      if (v.ok()) out.tokens.push_back(v.canonical);
    }
  }
  return out;
}

}  // namespace

CloseVocab close_vocabulary(const CommandAst& ast) {
  CloseVocab out;
  for (const auto& t : command_tokens(ast)) {
    if (t.cls != TokenClass::argument) out.tokens.push_back(t.canonical);
  }
  return out;
}

CloseVocab close_vocabulary(std::string_view cmd, const SpecDb& db) {
  const auto clean = clean_command(cmd);
  if (auto ast = parse_candidate(clean, db)) return close_vocabulary(*ast);
  return approximate(clean, db);
}

double tm_score(const std::vector<std::string>& candidate,
                const std::vector<std::vector<std::string>>& references) {
  if (references.empty()) throw std::invalid_argument("tm_score: no references");
  std::map<std::string, std::size_t> cand;
  for (const auto& t : candidate) ++cand[t];
  double best = 0;
  for (const auto& ref : references) {
    const auto denom = std::max(candidate.size(), ref.size());
    if (denom == 0) return 1.0;
    std::map<std::string, std::size_t> r;
    for (const auto& t : ref) ++r[t];
    std::size_t common = 0;
    for (const auto& [tok, n] : cand) {
      const auto it = r.find(tok);
      if (it != r.end()) common += std::min(n, it->second);
    }
    best = std::max(best, static_cast<double>(common) / static_cast<double>(denom));
  }
  return best;
}

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<Ngram, std::size_t> out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++out[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

}  // namespace

double bleu_score(const std::vector<std::string>& candidate,
                  const std::vector<std::vector<std::string>>& references) {
  if (candidate.empty() || references.empty()) return 0.0;
  constexpr std::size_t kMaxOrder = 4;
  double log_sum = 0;
  for (std::size_t n = 1; n <= kMaxOrder; ++n) {
    const auto cand = ngram_counts(candidate, n);
    std::map<Ngram, std::size_t> max_ref;
    for (const auto& ref : references) {
      for (const auto& [g, c] : ngram_counts(ref, n)) {
        auto& m = max_ref[g];
        m = std::max(m, c);
      }
    }
    std::size_t matched = 0;
    std::size_t total = 0;
    for (const auto& [g, c] : cand) {
      total += c;
      const auto it = max_ref.find(g);
      if (it != max_ref.end()) matched += std::min(c, it->second);
    }
    if (n == 1) {
      if (matched == 0) return 0.0;
      log_sum += std::log(static_cast<double>(matched) / static_cast<double>(total));
    } else {
      // An order longer than the candidate contributes (0 + 1) / (0 + 1).
      log_sum += std::log((matched + 1.0) / (total + 1.0));
    }
  }
  const auto c = candidate.size();
  std::size_t r = references.front().size();
  for (const auto& ref : references) {
    const auto d = ref.size() > c ? ref.size() - c : c - ref.size();
    const auto best = r > c ? r - c : c - r;
    if (d < best || (d == best && ref.size() < r)) r = ref.size();
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * std::exp(log_sum / static_cast<double>(kMaxOrder));
}

std::vector<std::string> bleu_tokens(std::string_view cmd, const SpecDb& db) {
  const auto clean = clean_command(cmd);
  if (auto ast = parse_candidate(clean, db)) {
    return encode_command(clean, *ast, Granularity::token).items;
  }
  return split_ws(clean);
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::facc: return "FAcc";
    case Metric::tacc: return "TAcc";
    case Metric::tm: return "TM";
    case Metric::bleu: return "BLEU";
  }
  return "FAcc";
}

std::string metric_label(Metric m, std::size_t k) {
  return std::string(to_string(m)) + "@" + std::to_string(k);
}

namespace {

struct Parsed {
  std::string clean;
  std::optional<CommandAst> ast;
  CloseVocab close;
  std::vector<std::string> tokens;
};

Parsed prepare(std::string_view cmd, const SpecDb& db) {
  Parsed p;
  p.clean = clean_command(cmd);
  p.ast = parse_candidate(p.clean, db);
  if (p.ast) {
    p.close = close_vocabulary(*p.ast);
    p.tokens = encode_command(p.clean, *p.ast, Granularity::token).items;
  } else {
    p.close = approximate(p.clean, db);
    p.tokens = split_ws(p.clean);
  }
  return p;
}

}  // namespace

InstanceScores score_instance(const TestInstance& instance,
                              const std::vector<std::string>& candidates, const SpecDb& db) {
  if (instance.references.empty()) {
    throw EvalError("instance " + instance.id + " has no references");
  }
  std::vector<Parsed> refs;
  std::vector<std::vector<std::string>> ref_close;
  std::vector<std::vector<std::string>> ref_tokens;
  for (const auto& r : instance.references) {
    refs.push_back(prepare(r, db));
    ref_close.push_back(refs.back().close.tokens);
    ref_tokens.push_back(refs.back().tokens);
  }

  InstanceScores s;
  s.id = instance.id;
  for (auto m : kAllMetrics) s.per_candidate[m];
  for (const auto& cand : candidates) {
    const auto c = prepare(cand, db);
    if (c.close.approximated) ++s.approximated;
    bool full = false;
    bool templ = false;
    for (const auto& r : refs) {
      const bool same = (!c.clean.empty() && c.clean == r.clean) ||
                        (c.ast && r.ast && serialize(*c.ast) == serialize(*r.ast));
      full = full || same;
      templ = templ || same || (c.ast && r.ast && template_equal(*c.ast, *r.ast, db));
    }
    s.per_candidate[Metric::facc].push_back(full ? 1.0 : 0.0);
    s.per_candidate[Metric::tacc].push_back(templ ? 1.0 : 0.0);
    s.per_candidate[Metric::tm].push_back(tm_score(c.close.tokens, ref_close));
    s.per_candidate[Metric::bleu].push_back(bleu_score(c.tokens, ref_tokens));
  }
  return s;
}

double score_at_k(const std::vector<double>& per_candidate, std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  double best = 0;
  for (std::size_t i = 0; i < per_candidate.size() && i < k; ++i) {
    best = std::max(best, per_candidate[i]);
  }
  return best;
}

EvalReport evaluate(const std::vector<TestInstance>& test_set,
                    const std::vector<SystemOutput>& outputs, const std::vector<std::size_t>& k_values,
                    const SpecDb& db, int workers) {
  if (k_values.empty()) throw EvalError("no k values");
  for (auto k : k_values) {
    if (k < 1) throw EvalError("k must be at least 1");
  }
  std::map<std::string, const TestInstance*> tests;
  for (const auto& t : test_set) {
    if (!tests.emplace(t.id, &t).second) throw EvalError("duplicate test instance " + t.id);
  }
  std::map<std::string, const SystemOutput*> outs;
  for (const auto& o : outputs) {
    if (!outs.emplace(o.id, &o).second) throw EvalError("duplicate system output " + o.id);
  }
  std::vector<std::string> missing;
  std::vector<std::string> unknown;
  std::vector<std::string> empty;
  for (const auto& [id, t] : tests) {
    const auto it = outs.find(id);
    if (it == outs.end()) {
      missing.push_back(id);
    } else if (it->second->candidates.empty()) {
      empty.push_back(id);
    }
  }
  for (const auto& [id, o] : outs) {
    if (!tests.count(id)) unknown.push_back(id);
  }
  if (!missing.empty() || !unknown.empty() || !empty.empty()) {
    std::string msg = "instance mismatch between system output and test set";
    auto list = [&](const char* what, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      msg += std::string("; ") + what + ":";
      for (const auto& id : ids) msg += " " + id;
    };
    list("missing from output", missing);
    list("not in test set", unknown);
    list("without candidates", empty);
    throw EvalError(msg);
  }

  std::vector<std::string> ids;
  for (const auto& [id, t] : tests) ids.push_back(id);
  EvalReport report;
  report.k_values = k_values;
  report.instances = parallel_map(
      ids,
      [&](const std::string& id) {
        return score_instance(*tests.at(id), outs.at(id)->candidates, db);
      },
      workers);
  for (auto m : kAllMetrics) {
    for (auto k : k_values) {
      double sum = 0;
      for (const auto& s : report.instances) sum += score_at_k(s, m, k);
      report.aggregate[metric_label(m, k)] =
          report.instances.empty() ? 0.0 : sum / static_cast<double>(report.instances.size());
    }
  }
  return report;
}

json EvalReport::to_json() const {
  json j;
  j["k_values"] = k_values;
  j["instances"] = instances.size();
  std::size_t approx = 0;
  json per = json::array();
  for (const auto& s : instances) {
    approx += s.approximated;
    json row{{"instance_id", s.id}};
    for (auto m : kAllMetrics) {
      for (auto k : k_values) row[metric_label(m, k)] = score_at_k(s, m, k);
    }
    row["approximated_candidates"] = s.approximated;
    per.push_back(std::move(row));
  }
  j["approximated_candidates"] = approx;
  json agg = json::object();
  for (auto m : kAllMetrics) {
    for (auto k : k_values) agg[metric_label(m, k)] = aggregate.at(metric_label(m, k));
  }
  j["aggregate"] = std::move(agg);
  j["per_instance"] = std::move(per);
  return j;
}

std::string EvalReport::table() const {
  std::vector<std::string> header;
  std::vector<std::string> row;
  for (auto m : kAllMetrics) {
    for (auto k : k_values) {
      header.push_back(std::string(to_string(m)) + std::to_string(k));
      std::ostringstream v;
      v << std::fixed << std::setprecision(1) << 100.0 * aggregate.at(metric_label(m, k));
      row.push_back(v.str());
    }
  }
  std::ostringstream out;
  out << std::left << std::setw(10) << "instances";
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto w = std::max(header[i].size(), row[i].size()) + 2;
    out << std::right << std::setw(static_cast<int>(w)) << header[i];
  }
  out << '\n' << std::left << std::setw(10) << instances.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto w = std::max(header[i].size(), row[i].size()) + 2;
    out << std::right << std::setw(static_cast<int>(w)) << row[i];
  }
  out << '\n';
  return out.str();
}

namespace {

template <class T, class F>
std::vector<T> read_jsonl(std::istream& in, F&& make) {
  std::vector<T> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(text);
      if (!j.is_object()) throw EvalError("record must be a JSON object");
      out.push_back(make(j));
    } catch (const std::exception& e) {
      throw EvalError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

std::string id_of(const json& j) {
  const auto& id = j.at("instance_id");
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  return id.get<std::string>();
}

template <class F>
auto read_file(const std::filesystem::path& path, F&& reader) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return reader(in);
  } catch (const EvalError& e) {
    throw EvalError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<TestInstance> read_test_set(std::istream& in) {
  return read_jsonl<TestInstance>(in, [](const json& j) {
    TestInstance t;
    t.id = id_of(j);
    if (j.contains("nl")) t.nl = j.at("nl").get<std::string>();
    for (const auto& r : j.at("references")) {
      auto ref = r.get<std::string>();
      if (std::find(t.references.begin(), t.references.end(), ref) == t.references.end()) {
        t.references.push_back(std::move(ref));
      }
    }
    if (t.references.empty()) throw EvalError("instance " + t.id + " has no references");
    return t;
  });
}

std::vector<TestInstance> read_test_set(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in) { return read_test_set(in); });
}

std::vector<SystemOutput> read_system_output(std::istream& in) {
  return read_jsonl<SystemOutput>(in, [](const json& j) {
    SystemOutput o;
    o.id = id_of(j);
    o.candidates = j.at("candidates").get<std::vector<std::string>>();
    return o;
  });
}

std::vector<SystemOutput> read_system_output(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in) { return read_system_output(in); });
}

}  // namespace nlbash
