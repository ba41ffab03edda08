// cluesynth: command-line front end.
//
// Exit codes: 0 success, 1 task-level failure (no program, evaluation error,
// no annotations), 2 usage or I/O error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cluesynth/corpus.hpp"
#include "cluesynth/errors.hpp"
#include "cluesynth/harness.hpp"
#include "cluesynth/interpreter.hpp"
#include "cluesynth/learning.hpp"
#include "cluesynth/search.hpp"
#include "cluesynth/service.hpp"
#include "cluesynth/weights_io.hpp"
#include "http_server.hpp"

using namespace cluesynth;
using nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kTaskFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Text files conventionally end with a newline that is not part of the data.
std::string read_text(const std::string& path) {
  std::string s = slurp(path);
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw UsageError("cannot write " + path);
}

bool usage_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::io_error:
    case ErrorCode::malformed_input:
    case ErrorCode::fingerprint_mismatch:
    case ErrorCode::invalid_argument:
    case ErrorCode::syntax_error:
    case ErrorCode::unknown_function:
    case ErrorCode::sort_error:
    case ErrorCode::missing_weight:
      return true;
    default:
      return false;
  }
}

WeightVector weights_or_uniform(const std::string& path, const ClueCatalog& catalog, std::string* fingerprint) {
  if (path.empty()) {
    if (fingerprint) fingerprint->clear();
    return WeightVector::zeros(catalog.ids());
  }
  WeightVector w = load_weights(path, catalog);
  if (fingerprint) *fingerprint = catalog.fingerprint();
  return w;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// --- train -----------------------------------------------------------------

struct TrainOpts {
  std::string corpus, out, report;
  std::size_t rounds = 3;
  double timeout = 8.0;
  double lambda = 0.1;
  bool cv = false;
  bool verbose = false;
};

int run_train(const TrainOpts& o, bool structured) {
  const ClueCatalog& catalog = standard_catalog();
  Corpus corpus = load_corpus(o.corpus);
  std::vector<TrainingTask> tasks;
  for (const auto& t : corpus.tasks) tasks.push_back(t.training_task());

  BootstrapConfig cfg;
  cfg.rounds = o.rounds;
  cfg.timeout_seconds = o.timeout;
  cfg.optimizer.lambda = o.lambda;
  cfg.cross_validate = o.cv;
  cfg.budget = ExecutionBudget::from_environment();
  if (o.verbose) cfg.log = [](const std::string& s) { std::cerr << s << '\n'; };
  if (o.rounds < 1) throw UsageError("--rounds must be at least 1");

  TrainingReport rep;
  try {
    rep = bootstrap(tasks, cfg, catalog);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_annotations_found) throw;
    std::cerr << e.what() << '\n';
    return kTaskFailure;
  }
  save_weights(o.out, rep.theta, catalog);

  ordered_json j;
  j["corpus"] = o.corpus;
  j["catalog_fingerprint"] = catalog.fingerprint();
  ordered_json rounds = ordered_json::array();
  for (const auto& r : rep.rounds) {
    rounds.push_back({{"round", r.round},
                      {"annotated", r.annotated},
                      {"found_by_search", r.found_by_search},
                      {"coverage", r.coverage},
                      {"lambda", r.lambda},
                      {"objective", r.objective},
                      {"iterations", r.iterations},
                      {"seconds", r.seconds}});
  }
  j["rounds"] = rounds;
  ordered_json anns = ordered_json::object();
  for (const auto& [id, text] : rep.annotations) anns[id] = {{"program", text}, {"source", rep.sources.at(id)}};
  j["annotations"] = anns;
  j["objective_trace"] = rep.objective_trace;
  j["warnings"] = rep.warnings;
  const std::string report_path = o.report.empty() ? o.out + ".report.json" : o.report;
  write_file(report_path, j.dump(2) + "\n");

  if (structured) {
    ordered_json s = {{"weights", o.out}, {"report", report_path}, {"rounds", rounds}};
    std::cout << s.dump(2) << '\n';
  } else {
    for (const auto& r : rep.rounds) {
      std::cout << "round " << r.round << ": " << r.annotated << "/" << tasks.size() << " tasks annotated, lambda "
                << r.lambda << ", objective " << fmt("%.6f", r.objective) << '\n';
    }
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << '\n';
    std::cout << "weights written to " << o.out << "\nreport written to " << report_path << '\n';
  }
  return kOk;
}

// --- infer -----------------------------------------------------------------

struct InferOpts {
  std::string example_in, example_out, data, weights;
  double timeout = 10.0;
  bool baseline = false;
  std::size_t top = 5;
  bool trace = false;
};

int run_infer(const InferOpts& o, bool structured) {
  const ClueCatalog& catalog = standard_catalog();
  SystemInput z;
  z.example_input = read_text(o.example_in);
  z.example_output = read_text(o.example_out);
  z.data_input = o.data.empty() ? z.example_input : read_text(o.data);
  WeightVector theta = weights_or_uniform(o.weights, catalog, nullptr);
  if (o.weights.empty() && !o.baseline) std::cerr << "note: no --weights given, using uniform weights\n";

  SearchConfig cfg;
  cfg.timeout_seconds = o.timeout;
  cfg.mode = o.baseline ? SearchMode::baseline : SearchMode::learned;
  cfg.max_candidates_per_band = std::max<std::size_t>(o.top, 1);
  cfg.budget = ExecutionBudget::from_environment();
  cfg.trace = o.trace;
  SearchOutcome out = search(z, theta, cfg, catalog);
  if (o.trace) {
    for (const auto& line : out.trace) std::cerr << line << '\n';
  }

  const bool found = out.status == SearchStatus::found;
  if (structured) {
    ordered_json j;
    j["status"] = status_name(out.status);
    j["program"] = found ? ordered_json(out.result->text()) : ordered_json(nullptr);
    ordered_json cands = ordered_json::array();
    for (std::size_t i = 0; i < out.candidates.size() && i < o.top; ++i) {
      const auto& c = out.candidates[i];
      cands.push_back({{"program", c.program.text()}, {"log_probability", c.logprob}, {"size", c.program.size()}});
    }
    if (cands.empty() && found) {
      cands.push_back({{"program", out.result->text()}, {"log_probability", out.logprob}, {"size", out.result->size()}});
    }
    j["candidates"] = cands;
    j["stats"] = {{"programs_executed", out.stats.programs_executed},
                  {"programs_generated", out.stats.programs_generated},
                  {"bands", out.stats.bands},
                  {"elapsed_seconds", out.stats.elapsed_seconds}};
    std::cout << j.dump(2) << '\n';
  } else if (found) {
    std::cout << out.result->text() << '\n';
    for (std::size_t i = 0; i < out.candidates.size() && i < o.top; ++i) {
      const auto& c = out.candidates[i];
      std::cout << "# " << i + 1 << "  logp " << fmt("%.4f", c.logprob) << "  size " << c.program.size() << "  "
                << c.program.text() << '\n';
    }
  } else {
    std::cout << "NO PROGRAM FOUND\n";
  }
  std::cerr << status_name(out.status) << ": " << out.stats.programs_executed << " programs executed, "
            << out.stats.bands << (o.baseline ? " size levels, " : " bands, ") << fmt("%.3f", out.stats.elapsed_seconds)
            << " s\n";
  return found ? kOk : kTaskFailure;
}

// --- apply -----------------------------------------------------------------

int run_apply(const std::string& program_arg, const std::string& data_path) {
  std::string text;
  if (program_arg == "-") {
    text = read_text("-");
  } else if (std::filesystem::is_regular_file(program_arg)) {
    text = read_text(program_arg);
  } else {
    text = program_arg;
  }
  if (program_arg == "-" && data_path == "-") throw UsageError("program and data cannot both come from standard input");
  Program p = parse_program(text);
  std::string data = read_text(data_path);
  EvalResult r = evaluate(p, data, ExecutionBudget::from_environment());
  if (!r) {
    std::cerr << eval_error_name(r.error().kind) << ": " << r.error().message << '\n';
    return kTaskFailure;
  }
  if (!r.value().is_text()) {
    std::cerr << "SortError: program does not produce text\n";
    return kTaskFailure;
  }
  std::cout << r.value().text() << '\n';
  return kOk;
}

// --- eval ------------------------------------------------------------------

struct EvalOpts {
  std::string corpus, weights, out = "eval_report.json", csv;
  std::size_t splits = 10;
  std::uint64_t seed = kDefaultSplitSeed;
  std::vector<double> taus;
  bool full_sweep = false;
  std::vector<std::string> methods = {"learned", "baseline"};
  std::size_t rounds = 3;
  double train_timeout = 8.0;
  double lambda = 0.1;
  bool verbose = false;
};

int run_eval(const EvalOpts& o, bool structured) {
  const ClueCatalog& catalog = standard_catalog();
  Corpus corpus = load_corpus(o.corpus);
  EvalConfig cfg;
  cfg.taus = o.taus.empty() ? default_tau_sweep(o.full_sweep) : o.taus;
  cfg.methods.clear();
  for (const auto& m : o.methods) {
    if (m == "learned") cfg.methods.push_back(SearchMode::learned);
    else if (m == "baseline") cfg.methods.push_back(SearchMode::baseline);
    else throw UsageError("unknown method " + m);
  }
  cfg.n_splits = o.splits;
  cfg.seed = o.seed;
  cfg.training.rounds = o.rounds;
  cfg.training.timeout_seconds = o.train_timeout;
  cfg.training.optimizer.lambda = o.lambda;
  cfg.budget = ExecutionBudget::from_environment();
  cfg.training.budget = cfg.budget;
  if (!o.weights.empty()) cfg.weights = load_weights(o.weights, catalog);
  if (o.verbose) cfg.log = [](const std::string& s) { std::cerr << s << '\n'; };

  EvalReport rep = evaluate(corpus, cfg, catalog);
  write_file(o.out, report_to_json(rep));
  if (!o.csv.empty()) write_file(o.csv, report_to_csv(rep));

  auto cells = summarize(rep);
  if (structured) {
    ordered_json j = ordered_json::array();
    for (const auto& c : cells) {
      j.push_back({{"method", method_name(c.method)},
                   {"tau", c.tau},
                   {"tasks", c.tasks},
                   {"correct", c.correct},
                   {"ranking_errors", c.ranking_errors},
                   {"timeout_errors", c.timeout_errors}});
    }
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "tau       method    tasks  correct  ranking  timeout\n";
    for (const auto& c : cells) {
      char line[128];
      std::snprintf(line, sizeof line, "%-9.4g %-9s %5zu %8zu %8zu %8zu\n", c.tau,
                    std::string(method_name(c.method)).c_str(), c.tasks, c.correct, c.ranking_errors,
                    c.timeout_errors);
      std::cout << line;
    }
    std::cout << "report written to " << o.out << '\n';
  }
  return kOk;
}

// --- corpus-validate ---------------------------------------------------------

int run_validate(const std::string& path, bool structured) {
  Corpus corpus = load_corpus(path);
  auto issues = self_check(corpus, standard_catalog(), ExecutionBudget::from_environment());
  std::size_t annotated = 0;
  for (const auto& t : corpus.tasks) annotated += t.annotation.has_value();
  if (structured) {
    ordered_json j;
    j["tasks"] = corpus.tasks.size();
    j["annotated"] = annotated;
    ordered_json is = ordered_json::array();
    for (const auto& i : issues) is.push_back({{"task", i.task_id}, {"message", i.message}});
    j["issues"] = is;
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& i : issues) std::cout << i.task_id << ": " << i.message << '\n';
    std::cout << corpus.tasks.size() << " tasks, " << annotated << " annotated, " << issues.size() << " issues\n";
  }
  return issues.empty() ? kOk : kTaskFailure;
}

// --- serve -------------------------------------------------------------------

struct ServeOpts {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string weights;
  int max_concurrent = 4;
  int timeout_cap_ms = 10'000;
};

int run_serve(const ServeOpts& o) {
  const ClueCatalog& catalog = standard_catalog();
  std::string fp;
  WeightVector theta = weights_or_uniform(o.weights, catalog, &fp);
  ServiceConfig cfg;
  cfg.max_concurrent = o.max_concurrent;
  cfg.timeout_cap_ms = o.timeout_cap_ms;
  cfg.default_timeout_ms = o.timeout_cap_ms;
  cfg.budget = ExecutionBudget::from_environment();
  Service service(cfg, theta, fp, catalog);
  http::Server server(service);
  int port = server.bind(o.host, o.port);
  if (port < 0) throw UsageError("cannot bind " + o.host + ":" + std::to_string(o.port));
  std::cerr << "listening on http://" << o.host << ":" << port << '\n';
  return server.listen() ? kOk : kUsage;
}

// --- rules -----------------------------------------------------------------

int run_rules(const InferOpts& o, bool structured) {
  const ClueCatalog& catalog = standard_catalog();
  SystemInput z;
  z.example_input = read_text(o.example_in);
  z.example_output = read_text(o.example_out);
  z.data_input = o.data.empty() ? z.example_input : read_text(o.data);
  WeightVector theta = weights_or_uniform(o.weights, catalog, nullptr);
  auto g = build_instance_grammar(z, catalog);
  RuleProbabilities rp = assign_probabilities(*g, theta);
  ordered_json rules = ordered_json::array();
  for (RuleIndex i = 0; i < g->size(); ++i) {
    const Rule& r = g->rule(i);
    if (structured) {
      rules.push_back({{"rule", r.id}, {"probability", std::exp(rp.logp[i])}, {"clues", r.suggesters}});
      continue;
    }
    std::cout << fmt("%.4f", std::exp(rp.logp[i])) << "  " << r.id << "  [";
    for (std::size_t k = 0; k < r.suggesters.size(); ++k) std::cout << (k ? " " : "") << r.suggesters[k];
    std::cout << "]\n";
  }
  if (structured) std::cout << rules.dump(2) << '\n';
  return kOk;
}

// --- grammar -----------------------------------------------------------------

// A hand-written grammar, {"rules": [{"rule": "P->join(LIST, DELIM)", "probability": 1}, ...]},
// explained the way the search sees it: best completions, then the first bands.
int run_grammar(const std::string& path, std::size_t n_bands, bool structured) {
  ordered_json doc = ordered_json::parse(slurp(path), nullptr, false);
  if (doc.is_discarded() || !doc.contains("rules") || !doc["rules"].is_array()) {
    throw UsageError(path + ": expected {\"rules\": [...]}");
  }
  std::vector<Rule> rules;
  std::map<std::string, double> logp;
  for (const auto& r : doc["rules"]) {
    if (!r.contains("rule") || !r["rule"].is_string() || !r.contains("probability") || !r["probability"].is_number()) {
      throw UsageError(path + ": every rule needs \"rule\" text and a \"probability\"");
    }
    Rule rule = parse_rule(r["rule"].get<std::string>());
    logp[rule.id] = std::log(r["probability"].get<double>());
    rules.push_back(std::move(rule));
  }
  Grammar g(std::move(rules));
  RuleProbabilities rp = probabilities_from(g, logp);
  MaxCompletionTable table = max_completion(g, rp);

  ordered_json best = ordered_json::object();
  ordered_json bands = ordered_json::array();
  for (Sort s : {Sort::P, Sort::E, Sort::LIST, Sort::DELIM, Sort::INT, Sort::CAT, Sort::COMP}) {
    if (g.rules_for(s).empty()) continue;
    best[std::string(sort_name(s))] = std::exp(table[s]);
    if (!structured) std::cout << "best[" << sort_name(s) << "] = " << fmt("%.6g", std::exp(table[s])) << '\n';
  }
  // Same schedule as the search: the top band opens at best[P] and each
  // later band's lower edge shrinks by the default decay.
  const double decay = SearchConfig{}.eta_decay;
  double hi = 1.0, lo = std::exp(table[Sort::P]);
  for (std::size_t b = 0; b < n_bands; ++b, hi = lo, lo *= decay) {
    ordered_json progs = ordered_json::array();
    if (!structured) std::cout << "band " << b + 1 << "  [" << fmt("%.6g", lo) << ", " << fmt("%.6g", hi) << (b ? ")" : "]") << '\n';
    for (const auto& sd : enumerate_band(g, rp, table, lo, hi)) {
      std::string text = derivation_text(g, sd.derivation);
      if (structured) {
        progs.push_back({{"program", text}, {"probability", std::exp(sd.logprob)}, {"size", sd.derivation.size()}});
      } else {
        std::cout << "  " << fmt("%.6g", std::exp(sd.logprob)) << "  " << text << '\n';
      }
    }
    if (structured) bands.push_back({{"low", lo}, {"high", hi}, {"programs", progs}});
  }
  if (structured) std::cout << ordered_json({{"best", best}, {"bands", bands}}).dump(2) << '\n';
  return kOk;
}

// --- catalog -----------------------------------------------------------------

int run_catalog(bool structured) {
  const ClueCatalog& catalog = standard_catalog();
  if (structured) {
    Service s({}, WeightVector::zeros(catalog.ids()), "", catalog);
    std::cout << ordered_json::parse(s.meta().body).dump(2) << '\n';
    return kOk;
  }
  std::cout << "# functions: " << catalog.registry().size() << '\n';
  for (const auto* e : catalog.registry().entries()) {
    std::cout << sort_name(e->desc.return_sort) << ' ' << e->desc.name << '(';
    for (std::size_t i = 0; i < e->desc.param_sorts.size(); ++i) {
      std::cout << (i ? ", " : "") << sort_name(e->desc.param_sorts[i]);
    }
    std::cout << ")\t" << e->desc.doc << '\n';
  }
  std::cout << catalog.manifest();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cluesynth: text transformations from one input/output example"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "structured"}));

  TrainOpts train;
  auto* c_train = app.add_subcommand("train", "Bootstrap clue weights from a corpus");
  c_train->add_option("--corpus", train.corpus)->required();
  c_train->add_option("--out", train.out, "Weights file to write")->required();
  c_train->add_option("--report", train.report, "Training report (default <out>.report.json)");
  c_train->add_option("--rounds", train.rounds)->capture_default_str();
  c_train->add_option("--timeout", train.timeout, "Per-task search timeout in seconds")->capture_default_str();
  auto* lambda_opt = c_train->add_option("--lambda", train.lambda)->capture_default_str();
  c_train->add_flag("--cv", train.cv, "Choose lambda by 5-fold cross-validation")->excludes(lambda_opt);
  c_train->add_flag("-v,--verbose", train.verbose);

  InferOpts infer;
  auto* c_infer = app.add_subcommand("infer", "Find a program consistent with an example pair");
  c_infer->add_option("--example-in", infer.example_in)->required();
  c_infer->add_option("--example-out", infer.example_out)->required();
  c_infer->add_option("--data", infer.data, "Full input (clues also look at it)");
  c_infer->add_option("--weights", infer.weights);
  c_infer->add_option("--timeout", infer.timeout)->capture_default_str();
  c_infer->add_flag("--baseline", infer.baseline, "Size-ordered search with uniform weights");
  c_infer->add_option("--top", infer.top)->capture_default_str();
  c_infer->add_flag("--trace", infer.trace, "Print every executed program to stderr");

  std::string program, data;
  auto* c_apply = app.add_subcommand("apply", "Run a program on data");
  c_apply->add_option("--program", program, "Program text, a file holding it, or - for stdin")->required();
  c_apply->add_option("--data", data, "Input file or -")->required();

  EvalOpts ev;
  auto* c_eval = app.add_subcommand("eval", "Learned vs baseline over seeded train/test splits");
  c_eval->add_option("--corpus", ev.corpus)->required();
  c_eval->add_option("--weights", ev.weights, "Use these weights instead of training per split");
  c_eval->add_option("--splits", ev.splits)->capture_default_str();
  c_eval->add_option("--seed", ev.seed)->capture_default_str();
  c_eval->add_option("--tau-sweep", ev.taus, "Timeouts in seconds")->delimiter(',');
  c_eval->add_flag("--full-sweep", ev.full_sweep, "Extend the default sweep to 16 s");
  c_eval->add_option("--methods", ev.methods)->delimiter(',')->capture_default_str();
  c_eval->add_option("--rounds", ev.rounds)->capture_default_str();
  c_eval->add_option("--train-timeout", ev.train_timeout)->capture_default_str();
  c_eval->add_option("--lambda", ev.lambda)->capture_default_str();
  c_eval->add_option("--out", ev.out)->capture_default_str();
  c_eval->add_option("--csv", ev.csv);
  c_eval->add_flag("-v,--verbose", ev.verbose);

  std::string corpus_path;
  auto* c_validate = app.add_subcommand("corpus-validate", "Parse a corpus and check its annotations");
  c_validate->add_option("--corpus", corpus_path)->required();

  ServeOpts serve;
  auto* c_serve = app.add_subcommand("serve", "HTTP API for infer/apply");
  c_serve->add_option("--host", serve.host)->capture_default_str();
  c_serve->add_option("--port", serve.port)->capture_default_str();
  c_serve->add_option("--weights", serve.weights);
  c_serve->add_option("--max-concurrent", serve.max_concurrent)->capture_default_str();
  c_serve->add_option("--timeout-cap-ms", serve.timeout_cap_ms)->capture_default_str();

  InferOpts rules;
  auto* c_rules = app.add_subcommand("rules", "Print the instance grammar built for an example pair");
  c_rules->add_option("--example-in", rules.example_in)->required();
  c_rules->add_option("--example-out", rules.example_out)->required();
  c_rules->add_option("--data", rules.data);
  c_rules->add_option("--weights", rules.weights);

  auto* c_catalog = app.add_subcommand("catalog", "List library functions and clues");

  std::string grammar_path;
  std::size_t n_bands = 3;
  auto* c_grammar = app.add_subcommand("grammar", "Best completions and first bands of a hand-written grammar");
  c_grammar->add_option("--file", grammar_path)->required();
  c_grammar->add_option("--bands", n_bands)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const bool structured = format == "structured";
  try {
    if (*c_train) return run_train(train, structured);
    if (*c_infer) return run_infer(infer, structured);
    if (*c_apply) return run_apply(program, data);
    if (*c_eval) return run_eval(ev, structured);
    if (*c_validate) return run_validate(corpus_path, structured);
    if (*c_serve) return run_serve(serve);
    if (*c_rules) return run_rules(rules, structured);
    if (*c_catalog) return run_catalog(structured);
    if (*c_grammar) return run_grammar(grammar_path, n_bands, structured);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage_code(e.code()) ? kUsage : kTaskFailure;
  }
  return kUsage;
}
