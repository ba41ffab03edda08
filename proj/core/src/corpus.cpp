#include "cluesynth/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cluesynth/errors.hpp"

namespace cluesynth {

using nlohmann::ordered_json;

const CorpusTask* Corpus::find(std::string_view id) const {
  for (const auto& t : tasks) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

std::vector<std::string> Corpus::ids() const {
  std::vector<std::string> out;
  for (const auto& t : tasks) out.push_back(t.id);
  return out;
}

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::string field_string(const ordered_json& obj, const std::string& where, const char* key, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw Error(ErrorCode::malformed_input, where + "." + key + ": missing");
    return {};
  }
  if (!it->is_string()) throw Error(ErrorCode::malformed_input, where + "." + key + ": expected a string");
  return it->get<std::string>();
}

}  // namespace

Corpus parse_corpus(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::malformed_input,
                "line " + std::to_string(line_of(json_text, e.byte ? e.byte - 1 : 0)) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::malformed_input, "top level: expected an object");
  auto tasks = doc.find("tasks");
  if (tasks == doc.end() || !tasks->is_array()) throw Error(ErrorCode::malformed_input, "tasks: expected an array");

  Corpus corpus;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < tasks->size(); ++i) {
    const auto& t = (*tasks)[i];
    std::string where = "tasks[" + std::to_string(i) + "]";
    if (!t.is_object()) throw Error(ErrorCode::malformed_input, where + ": expected an object");
    CorpusTask task;
    task.id = field_string(t, where, "id", true);
    if (task.id.empty()) throw Error(ErrorCode::malformed_input, where + ".id: empty");
    if (!seen.insert(task.id).second) throw Error(ErrorCode::malformed_input, where + ".id: duplicate id " + task.id);
    task.description = field_string(t, where, "description", false);
    task.provenance = field_string(t, where, "provenance", false);
    task.example_input = field_string(t, where, "example_input", true);
    task.example_output = field_string(t, where, "example_output", true);
    task.data_input = field_string(t, where, "data_input", true);
    task.data_output = field_string(t, where, "data_output", true);
    if (t.contains("annotation") && !t["annotation"].is_null()) {
      task.annotation = field_string(t, where, "annotation", true);
    }
    corpus.tasks.push_back(std::move(task));
  }
  return corpus;
}

std::string corpus_to_json(const Corpus& corpus) {
  ordered_json tasks = ordered_json::array();
  for (const auto& t : corpus.tasks) {
    ordered_json j;
    j["id"] = t.id;
    j["description"] = t.description;
    j["provenance"] = t.provenance;
    j["example_input"] = t.example_input;
    j["example_output"] = t.example_output;
    j["data_input"] = t.data_input;
    j["data_output"] = t.data_output;
    if (t.annotation) j["annotation"] = *t.annotation;
    tasks.push_back(std::move(j));
  }
  ordered_json doc;
  doc["tasks"] = std::move(tasks);
  return doc.dump(2) + "\n";
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_corpus(ss.str());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::malformed_input) throw;
    throw Error(ErrorCode::malformed_input, path + ": " + e.message());
  }
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << corpus_to_json(corpus);
  if (!out) throw Error(ErrorCode::io_error, "write failed: " + path);
}

std::vector<CorpusIssue> self_check(const Corpus& corpus, const ClueCatalog& catalog, const ExecutionBudget& budget) {
  std::vector<CorpusIssue> issues;
  for (const auto& t : corpus.tasks) {
    if (!t.annotation) continue;
    try {
      Program p = resolve_annotation(t.training_task(), catalog);
      for (const auto& [in, want, label] : {std::tuple{&t.example_input, &t.example_output, "example"},
                                            std::tuple{&t.data_input, &t.data_output, "data"}}) {
        EvalResult r = evaluate(p, *in, budget);
        if (!r) {
          issues.push_back({t.id, std::string(label) + " pair: " + std::string(eval_error_name(r.error().kind)) + ": " +
                                      r.error().message});
        } else if (!r.value().is_text() || r.value().text() != *want) {
          issues.push_back({t.id, std::string(label) + " pair: annotation output differs from the expected output"});
        }
      }
    } catch (const Error& e) {
      issues.push_back({t.id, e.what()});
    }
  }
  return issues;
}

std::vector<Split> make_splits(const Corpus& corpus, std::size_t n_splits, double train_frac, std::uint64_t seed) {
  const std::size_t n = corpus.tasks.size();
  if (n < 2) throw Error(ErrorCode::invalid_argument, "splitting needs at least 2 tasks");
  if (!(train_frac > 0 && train_frac < 1)) throw Error(ErrorCode::invalid_argument, "train fraction must be in (0, 1)");
  std::size_t n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_frac));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  std::mt19937_64 rng(seed);
  std::vector<Split> splits;
  for (std::size_t s = 0; s < n_splits; ++s) {
    std::vector<std::string> ids = corpus.ids();
    // Fisher-Yates with explicit draws: std::shuffle's sequence is not
    // specified across standard libraries.
    for (std::size_t i = n - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(ids[i], ids[j]);
    }
    Split sp;
    sp.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    sp.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
    splits.push_back(std::move(sp));
  }
  return splits;
}

}  // namespace cluesynth
