#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cluesynth/clues.hpp"
#include "cluesynth/interpreter.hpp"
#include "cluesynth/learning.hpp"

namespace cluesynth {

struct CorpusTask {
  std::string id;
  std::string description;
  std::string provenance;
  Text example_input;
  Text example_output;
  Text data_input;
  Text data_output;
  std::optional<std::string> annotation;

  SystemInput system_input() const { return {data_input, example_input, example_output}; }
  TrainingTask training_task() const { return {id, system_input(), data_output, annotation}; }
};

struct Corpus {
  std::vector<CorpusTask> tasks;

  const CorpusTask* find(std::string_view id) const;
  std::vector<std::string> ids() const;
};

/// Throws Error(malformed_input) naming the line of a JSON syntax error or
/// the offending field (`tasks[3].example_input`), and on duplicate ids.
Corpus parse_corpus(std::string_view json_text);
/// Canonical form: two-space indentation, fixed key order, trailing newline.
std::string corpus_to_json(const Corpus& corpus);
Corpus load_corpus(const std::string& path);
void save_corpus(const Corpus& corpus, const std::string& path);

struct CorpusIssue {
  std::string task_id;
  std::string message;
};

/// Annotations must parse, resolve in the task's instance grammar and produce
/// both expected outputs.
std::vector<CorpusIssue> self_check(const Corpus& corpus, const ClueCatalog& catalog = standard_catalog(),
                                    const ExecutionBudget& budget = {});

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

inline constexpr std::uint64_t kDefaultSplitSeed = 20100628;

/// Seeded shuffles of the task ids; the first round(n * train_frac) go to
/// training. Throws Error(invalid_argument) for fewer than 2 tasks or
/// train_frac outside (0, 1).
std::vector<Split> make_splits(const Corpus& corpus, std::size_t n_splits = 10, double train_frac = 0.8,
                               std::uint64_t seed = kDefaultSplitSeed);

}  // namespace cluesynth
