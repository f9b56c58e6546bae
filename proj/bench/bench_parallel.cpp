// Serial reference vs OpenMP kernels for the record-level phases.

#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "nlbash/corpus.hpp"
#include "nlbash/metrics.hpp"
#include "nlbash/parallel.hpp"

using namespace nlbash;

namespace {

std::vector<std::string> fixture_commands() {
  std::ifstream in(data_dir() / "fixtures" / "commands.txt");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

std::vector<RawRecord> synthetic_corpus(std::size_t n) {
  const auto cmds = fixture_commands();
  const std::vector<std::string> words{"find", "all", "java", "files", "under", "current",
                                       "directory", "and", "count", "their", "lines", "sort",
                                       "by", "size", "show", "largest", "five"};
  std::mt19937_64 rng(1);
  std::vector<RawRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string nl;
    for (std::size_t w = 0, len = 4 + rng() % 10; w < len; ++w) {
      nl += (w ? " " : "") + words[rng() % words.size()];
    }
    out.push_back({std::to_string(i), nl, cmds[rng() % cmds.size()], std::nullopt, 0});
  }
  return out;
}

const std::vector<RawRecord>& corpus() {
  static const auto c = synthetic_corpus(20000);
  return c;
}

NlCmdPair filter_one(const RawRecord& r) {
  return filter_pair(make_pair(r, default_stopwords()), SpecDb::bundled());
}

void BM_FilterSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial_map(corpus(), filter_one));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().size()));
}

void BM_FilterParallel(benchmark::State& state) {
  const auto workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(parallel_map(corpus(), filter_one, workers));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().size()));
}

std::pair<std::vector<TestInstance>, std::vector<SystemOutput>> eval_set(std::size_t n) {
  const auto cmds = fixture_commands();
  std::mt19937_64 rng(2);
  std::vector<TestInstance> test;
  std::vector<SystemOutput> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = std::to_string(i);
    test.push_back({id, "", {cmds[rng() % cmds.size()], cmds[rng() % cmds.size()]}});
    SystemOutput o{id, {}};
    for (int k = 0; k < 3; ++k) o.candidates.push_back(cmds[rng() % cmds.size()]);
    out.push_back(std::move(o));
  }
  return {test, out};
}

void BM_Evaluate(benchmark::State& state) {
  static const auto data = eval_set(2000);
  const auto workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(data.first, data.second, {1, 3}, SpecDb::bundled(), workers));
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}

}  // namespace

BENCHMARK(BM_FilterSerial)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FilterParallel)->Arg(2)->Arg(4)->Arg(0)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->Arg(1)->Arg(4)->Arg(0)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
