#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cluesynth/corpus.hpp"
#include "cluesynth/errors.hpp"
#include "cluesynth/harness.hpp"
#include "cluesynth/interpreter.hpp"
#include "fixtures.hpp"

using namespace cluesynth;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus small_corpus(std::size_t n) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    CorpusTask t;
    t.id = "t" + std::to_string(i);
    t.example_input = "b\na";
    t.example_output = "B\nA";
    t.data_input = "d\nc";
    t.data_output = "D\nC";
    c.tasks.push_back(t);
  }
  return c;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("bundled corpus has the motivating and evaluation tasks") {
  Corpus c = load_corpus(CLUESYNTH_CORPUS);
  CHECK(c.tasks.size() >= 30);
  const CorpusTask* fig = c.find("oscar-counts");
  REQUIRE(fig != nullptr);
  CHECK(fig->example_input == fixtures::kOscars);
  CHECK(fig->example_output == fixtures::kOscarsOut);
  for (const char* id : {"zip-from-address", "date-long-form", "case-statement"}) CHECK(c.find(id) != nullptr);
  CHECK(self_check(c).empty());
  // The file is stored in canonical form.
  CHECK(corpus_to_json(c) == read_file(CLUESYNTH_CORPUS));
}

TEST_CASE("corpus round trip and diagnostics") {
  Corpus empty = parse_corpus(R"({"tasks": []})");
  CHECK(empty.tasks.empty());

  Corpus c = small_corpus(2);
  c.tasks[0].annotation = "join(mapUpper(split(x, \"\\n\")), \"\\n\")";
  std::string text = corpus_to_json(c);
  CHECK(corpus_to_json(parse_corpus(text)) == text);

  try {
    parse_corpus("{\n  \"tasks\": [\n    {\"id\": 1,,}\n  ]\n}");
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_input);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    parse_corpus(R"({"tasks": [{"id": "a", "example_output": "", "data_input": "", "data_output": ""}]})");
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("tasks[0].example_input: missing") != std::string::npos);
  }
  std::string dup = R"({"tasks": [
    {"id": "a", "example_input": "", "example_output": "", "data_input": "", "data_output": ""},
    {"id": "a", "example_input": "", "example_output": "", "data_input": "", "data_output": ""}]})";
  CHECK(code_of([&] { parse_corpus(dup); }) == ErrorCode::malformed_input);
  CHECK(code_of([] { load_corpus("/nonexistent/corpus.json"); }) == ErrorCode::io_error);
}

TEST_CASE("self check flags annotations that disagree with the examples") {
  Corpus c = small_corpus(1);
  c.tasks[0].annotation = "join(mapLower(split(x, \"\\n\")), \"\\n\")";
  auto issues = self_check(c);
  // Both pairs disagree.
  REQUIRE(issues.size() == 2);
  for (const auto& i : issues) CHECK(i.task_id == "t0");
  c.tasks[0].annotation = "join(mapUpper(split(x, \"\\n\")), \"\\n\")";
  CHECK(self_check(c).empty());
}

TEST_CASE("splits partition the ids deterministically") {
  Corpus c = small_corpus(10);
  auto a = make_splits(c, 10, 0.8, 7);
  auto b = make_splits(c, 10, 0.8, 7);
  REQUIRE(a.size() == 10);
  for (std::size_t s = 0; s < a.size(); ++s) {
    CHECK(a[s].train == b[s].train);
    CHECK(a[s].test == b[s].test);
    CHECK(a[s].train.size() == 8);
    CHECK(a[s].test.size() == 2);
    std::set<std::string> all(a[s].train.begin(), a[s].train.end());
    all.insert(a[s].test.begin(), a[s].test.end());
    CHECK(all.size() == 10);
  }
  CHECK(code_of([] { make_splits(small_corpus(1)); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { make_splits(small_corpus(5), 3, 1.0); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { make_splits(small_corpus(5), 3, 0.0); }) == ErrorCode::invalid_argument);
}

TEST_CASE("default splits put most bundled tasks in some test set") {
  Corpus c = load_corpus(CLUESYNTH_CORPUS);
  std::set<std::string> tested;
  for (const auto& s : make_splits(c)) tested.insert(s.test.begin(), s.test.end());
  CHECK(tested.size() * 5 >= c.tasks.size() * 4);
}

TEST_CASE("adversarial task is a ranking error") {
  Corpus c = load_corpus(CLUESYNTH_CORPUS);
  const CorpusTask& t = *c.find("sort-digits-adversarial");
  WeightVector zero = WeightVector::zeros(standard_catalog().ids());
  // Independent check of the planted trap: text order fits the example but
  // not the data, numeric order fits both.
  Program text_order = parse_program("join(sort(split(x, \"\\n\"), alpha), \"\\n\")");
  Program numeric = parse_program("join(sort(split(x, \"\\n\"), numeric), \"\\n\")");
  CHECK(evaluate(text_order, t.example_input).value().text() == t.example_output);
  CHECK(evaluate(text_order, t.data_input).value().text() != t.data_output);
  CHECK(evaluate(numeric, t.data_input).value().text() == t.data_output);

  for (SearchMode m : {SearchMode::learned, SearchMode::baseline}) {
    TaskResult r = run_task(t, m, 5.0, zero);
    CHECK(r.category == Category::ranking_error);
    REQUIRE(r.program);
    Program p = parse_program(*r.program);
    CHECK(evaluate(p, t.example_input).value().text() == t.example_output);
    CHECK(evaluate(p, t.data_input).value().text() != t.data_output);
  }
}

TEST_CASE("zero timeout is all timeouts and categories partition") {
  Corpus c = load_corpus(CLUESYNTH_CORPUS);
  EvalConfig cfg;
  cfg.taus = {0.0};
  cfg.n_splits = 2;
  cfg.weights = WeightVector::zeros(standard_catalog().ids());
  EvalReport rep = evaluate(c, cfg);
  CHECK(rep.results.size() == 2 * 2 * rep.splits[0].test.size());
  for (const auto& r : rep.results) CHECK(r.category == Category::timeout_error);
  for (const auto& cell : summarize(rep)) {
    CHECK(cell.timeout_errors == cell.tasks);
    CHECK(cell.correct + cell.ranking_errors + cell.timeout_errors == cell.tasks);
  }
  auto h = size_histogram(rep, SearchMode::learned, 0.0);
  CHECK(h.size() == 1);
  CHECK(h["N/A"] == rep.splits.size() * rep.splits[0].test.size());
  CHECK_FALSE(mean_speedup(rep, 0.0));
}

TEST_CASE("timeouts do not increase with tau") {
  Corpus all = load_corpus(CLUESYNTH_CORPUS);
  Corpus c;
  for (const char* id : {"word-counts", "swap-name", "upper-case", "sorted-unique", "csv-second-column"}) {
    c.tasks.push_back(*all.find(id));
  }
  EvalConfig cfg;
  cfg.taus = {0.0, 0.01, 0.1, 0.5};
  cfg.n_splits = 2;
  cfg.train_frac = 0.4;
  cfg.weights = WeightVector::zeros(standard_catalog().ids());
  EvalReport rep = evaluate(c, cfg);
  for (std::size_t s = 0; s < rep.splits.size(); ++s) {
    for (SearchMode m : cfg.methods) {
      std::size_t prev = SIZE_MAX;
      for (double tau : cfg.taus) {
        std::size_t n = std::count_if(rep.results.begin(), rep.results.end(), [&](const TaskResult& r) {
          return r.split == s && r.method == m && r.tau == tau && r.category == Category::timeout_error;
        });
        CHECK(n <= prev);
        prev = n;
      }
    }
  }
}

TEST_CASE("evaluation trains per split and is reproducible") {
  Corpus all = load_corpus(CLUESYNTH_CORPUS);
  Corpus c;
  for (const char* id : {"upper-case", "lower-case", "reverse-lines", "dedup-lines", "sort-words"}) {
    c.tasks.push_back(*all.find(id));
  }
  EvalConfig cfg;
  cfg.taus = {0.5};
  cfg.n_splits = 2;
  cfg.training.timeout_seconds = 1.0;
  cfg.training.rounds = 1;
  EvalReport a = evaluate(c, cfg);
  EvalReport b = evaluate(c, cfg);
  REQUIRE(a.training.size() == 2);
  CHECK(a.training[0].rounds.size() == 1);
  REQUIRE(a.results.size() == b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    CHECK(a.results[i].task_id == b.results[i].task_id);
    CHECK(a.results[i].category == b.results[i].category);
    CHECK(a.results[i].program == b.results[i].program);
  }
  std::string json = report_to_json(a);
  CHECK(json.find("\"per_tau\"") != std::string::npos);
  std::string csv = report_to_csv(a);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(a.results.size() + 1));
}

TEST_CASE("size histogram counts correct programs only") {
  EvalReport rep;
  TaskResult solved;
  solved.category = Category::correct;
  solved.size = 5;
  solved.tau = 1.0;
  TaskResult wrong = solved;
  wrong.category = Category::ranking_error;
  rep.results = {solved, wrong};
  auto h = size_histogram(rep, SearchMode::learned, 1.0);
  CHECK(h["5"] == 1);
  CHECK(h["N/A"] == 1);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
}
