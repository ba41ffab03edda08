#include <benchmark/benchmark.h>

#include <string>

#include "cluesynth/clues.hpp"
#include "cluesynth/corpus.hpp"
#include "cluesynth/interpreter.hpp"
#include "cluesynth/learning.hpp"
#include "cluesynth/search.hpp"

using namespace cluesynth;

namespace {

const Corpus& corpus() {
  static const Corpus c = load_corpus(CLUESYNTH_CORPUS);
  return c;
}

const CorpusTask& task(const char* id) { return *corpus().find(id); }

std::string name_list(int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? "\n" : "") + std::string("name ") + std::to_string(i % (n / 3 + 1));
  return s;
}

}  // namespace

static void BM_InstanceGrammar(benchmark::State& state) {
  SystemInput z = task("oscar-counts").system_input();
  for (auto _ : state) benchmark::DoNotOptimize(build_instance_grammar(z, standard_catalog()));
}
BENCHMARK(BM_InstanceGrammar);

static void BM_EvaluateCountProgram(benchmark::State& state) {
  Program p = parse_program(
      "join(dedup(concatLists(lines(x), \" \", concatLists(\"(\", count(lines(x), lines(x)), \")\"))), \"\\n\")");
  std::string data = name_list(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(p, data));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvaluateCountProgram)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

// Uniform weights; the two modes share the instance grammar.
static void BM_Search(benchmark::State& state, const char* id, SearchMode mode) {
  SystemInput z = task(id).system_input();
  WeightVector zero = WeightVector::zeros(standard_catalog().ids());
  SearchConfig cfg;
  cfg.mode = mode;
  cfg.max_candidates_per_band = 1;
  std::uint64_t executed = 0;
  for (auto _ : state) {
    SearchOutcome out = search(z, zero, cfg);
    executed = out.stats.programs_executed;
    benchmark::DoNotOptimize(out);
  }
  state.counters["executed"] = static_cast<double>(executed);
}
BENCHMARK_CAPTURE(BM_Search, sorted_unique_learned, "sorted-unique", SearchMode::learned);
BENCHMARK_CAPTURE(BM_Search, sorted_unique_baseline, "sorted-unique", SearchMode::baseline);
BENCHMARK_CAPTURE(BM_Search, email_domains_learned, "email-domains", SearchMode::learned);
BENCHMARK_CAPTURE(BM_Search, email_domains_baseline, "email-domains", SearchMode::baseline);

static void BM_ObjectiveGradient(benchmark::State& state) {
  std::vector<Program> anns;
  for (const auto& t : corpus().tasks) {
    if (t.annotation) anns.push_back(resolve_annotation(t.training_task(), standard_catalog()));
  }
  Objective obj(standard_catalog().ids());
  for (const auto& p : anns) obj.add(p);
  std::vector<double> theta(obj.dimension(), 0.1), grad(obj.dimension());
  for (auto _ : state) benchmark::DoNotOptimize(obj.value_and_gradient(theta, 0.1, grad));
}
BENCHMARK(BM_ObjectiveGradient);

static void BM_FitManualAnnotations(benchmark::State& state) {
  std::vector<Program> anns;
  for (const auto& t : corpus().tasks) {
    if (t.annotation) anns.push_back(resolve_annotation(t.training_task(), standard_catalog()));
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit(anns, standard_catalog().ids(), {}));
}
BENCHMARK(BM_FitManualAnnotations)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
