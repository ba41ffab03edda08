#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cluesynth/corpus.hpp"
#include "cluesynth/learning.hpp"
#include "cluesynth/search.hpp"

namespace cluesynth {

enum class Category { correct, ranking_error, timeout_error };

std::string_view category_name(Category c);
std::string_view method_name(SearchMode m);

struct TaskResult {
  std::string task_id;
  std::size_t split = 0;
  SearchMode method = SearchMode::learned;
  double tau = 0.0;
  Category category = Category::timeout_error;
  std::optional<std::string> program;
  std::size_t size = 0;  // rules in the returned program; 0 when none
  double seconds = 0.0;
  std::uint64_t programs_executed = 0;
};

/// One inference on one task: searches on the example pair, then checks the
/// winner on the held-out data byte for byte.
TaskResult run_task(const CorpusTask& task, SearchMode method, double tau, const WeightVector& theta,
                    const ExecutionBudget& budget = {}, const ClueCatalog& catalog = standard_catalog());

/// Default sweep 1/16 .. 4 seconds; the full sweep adds 8 and 16.
std::vector<double> default_tau_sweep(bool full = false);

struct EvalConfig {
  std::vector<double> taus = default_tau_sweep();
  std::vector<SearchMode> methods = {SearchMode::learned, SearchMode::baseline};
  std::size_t n_splits = 10;
  double train_frac = 0.8;
  std::uint64_t seed = kDefaultSplitSeed;
  BootstrapConfig training;
  /// Used for every split instead of training when set.
  std::optional<WeightVector> weights;
  ExecutionBudget budget;
  std::function<void(const std::string&)> log;
};

struct SplitTraining {
  std::size_t split = 0;
  std::vector<RoundReport> rounds;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

struct CellSummary {
  SearchMode method = SearchMode::learned;
  double tau = 0.0;
  std::size_t tasks = 0;
  std::size_t correct = 0;
  std::size_t ranking_errors = 0;
  std::size_t timeout_errors = 0;
};

struct EvalReport {
  std::vector<Split> splits;
  std::vector<SplitTraining> training;
  std::vector<TaskResult> results;  // split, tau, method, test-task order
};

EvalReport evaluate(const Corpus& corpus, const EvalConfig& cfg, const ClueCatalog& catalog = standard_catalog());

std::vector<CellSummary> summarize(const EvalReport& report);

/// Mean of baseline time / learned time over (split, task) pairs both methods
/// solved correctly at `tau`; nullopt when there are none.
std::optional<double> mean_speedup(const EvalReport& report, double tau);

/// (baseline seconds, learned seconds) for pairs both methods solved.
std::vector<std::pair<double, double>> scatter_pairs(const EvalReport& report, double tau);

/// Correct programs by size; everything else in "N/A".
std::map<std::string, std::size_t> size_histogram(const EvalReport& report, SearchMode method, double tau);

/// Times (seconds) of the tasks both methods solved correctly at `tau`.
struct PairedTimes {
  std::vector<double> learned;
  std::vector<double> baseline;
};
PairedTimes paired_times(const EvalReport& report, double tau);

double median(std::vector<double> v);

/// JSON report. Wall-clock fields are named `seconds`, `mean_speedup` and
/// `scatter`; everything else is reproducible from corpus, seed and weights.
std::string report_to_json(const EvalReport& report);
/// One row per task result.
std::string report_to_csv(const EvalReport& report);

}  // namespace cluesynth
